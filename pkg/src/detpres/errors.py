"""Exception hierarchy.

Each family maps to one CLI exit code: UsageError (bad arguments or input)
exits 1, HypothesisViolation (inputs outside the decomposition's
assumptions) exits 2, InvariantFailure (an internal check failed) exits 3.
"""


class DetPresError(Exception):
    """Base class for every error raised by this package."""


class UsageError(DetPresError, ValueError):
    pass


class HypothesisViolation(DetPresError):
    """The inputs do not satisfy an assumption of the theory."""


class InvariantFailure(DetPresError, AssertionError):
    """A post-condition failed; a bug or, in exploration mode, a counterexample."""


# field_core
class NotPrime(UsageError):
    pass


class CharTwo(UsageError):
    pass


class DividesChar(UsageError, ZeroDivisionError):
    pass


class DuplicateNode(UsageError):
    pass


class FieldTooSmall(HypothesisViolation):
    pass


class DegreeOverflow(HypothesisViolation):
    pass


# matrix_core
class IndexOutOfRange(UsageError, IndexError):
    pass


class EqualIndices(UsageError):
    pass


class Singular(UsageError, ZeroDivisionError):
    pass


class DimensionMismatch(UsageError):
    pass


class NotSymmetric(UsageError):
    pass


class NotSkew(UsageError):
    pass


class WrongStructure(UsageError):
    pass


# canonical_forms
class EqualInputs(UsageError):
    pass


class OddDimension(HypothesisViolation):
    pass


# trace_pack
class SingularZ(HypothesisViolation):
    pass


class TraceHypothesisViolated(HypothesisViolation):
    pass


class NotLinearOnTable(HypothesisViolation):
    pass


class NotLinear(HypothesisViolation):
    pass


# decomposer
class NotInImage(HypothesisViolation):
    pass


class NotSurjective(HypothesisViolation):
    pass


class SingularInput(UsageError):
    pass


class NotCongruenceForm(HypothesisViolation):
    pass


class DetCompatViolated(HypothesisViolation):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonzeroPsiAtZero(HypothesisViolation):
    pass


class ZeroAlpha(UsageError):
    pass


class DeterminantConditionViolated(HypothesisViolation):
    pass


# harness
class SearchSpaceTooLarge(UsageError):
    pass


class UnknownSuite(UsageError):
    pass
