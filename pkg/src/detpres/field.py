"""Exact fields and univariate polynomials over them.

Two kinds of field are supported: prime fields GF(p) with p an odd prime,
and the rationals. Scalars are plain Python values in canonical form, a
residue ``int`` in ``[0, p)`` or a ``fractions.Fraction``, so equality of
elements is equality of representations.

Generic code does arithmetic with the ordinary operators and reduces the
result with ``F(value)``; division goes through ``F.inv``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import CharTwo, DegreeOverflow, DividesChar, DuplicateNode, FieldTooSmall, NotPrime, UsageError

Scalar = Union[int, Fraction]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


class Field:
    """Common interface of the exact fields."""

    kind: str
    char: int
    order: int | None  # None for infinite fields

    def __call__(self, value) -> Scalar:
        raise NotImplementedError

    def inv(self, x: Scalar) -> Scalar:
        raise NotImplementedError

    def div(self, x: Scalar, y: Scalar) -> Scalar:
        return self(x * self.inv(y))

    def element(self, k: int) -> Scalar:
        """The k-th element in enumeration order (0, 1, 2, ...)."""
        return self(k)

    def elements(self) -> Iterator[Scalar]:
        raise NotImplementedError

    def random(self, rng: random.Random) -> Scalar:
        raise NotImplementedError

    def random_nonzero(self, rng: random.Random) -> Scalar:
        while True:
            x = self.random(rng)
            if x != 0:
                return x

    def parse(self, text) -> Scalar:
        """Read a scalar from its serialized form ("3", "-1/2", or a bare int)."""
        if isinstance(text, int):
            return self(text)
        text = str(text).strip()
        if "/" in text:
            num, den = text.split("/")
            return self.div(int(num), int(den))
        return self(int(text))

    def format(self, x: Scalar) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def has_order_at_least(self, k: int) -> bool:
        return self.order is None or self.order >= k


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    kind = "prime"

    @property
    def char(self) -> int:
        return self.p

    @property
    def order(self) -> int:
        return self.p

    def __call__(self, value) -> int:
        if type(value) is int:
            return value % self.p
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, x) -> int:
        x = self(x)
        if x == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(x, -1, self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def format(self, x) -> str:
        return str(self(x))

    def to_json(self) -> dict:
        return {"kind": "prime", "p": self.p}

    def __repr__(self) -> str:
        return f"GF({self.p})"


@dataclass(frozen=True)
class RationalField(Field):
    kind = "rational"

    @property
    def char(self) -> int:
        return 0

    @property
    def order(self) -> None:
        return None

    def __call__(self, value) -> Fraction:
        return Fraction(value)

    def inv(self, x) -> Fraction:
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("0 has no inverse in Q")
        return 1 / x

    def elements(self) -> Iterator[Fraction]:
        # 0, 1, -1, 2, -2, ... is enough for every scan this package performs
        yield Fraction(0)
        k = 1
        while True:
            yield Fraction(k)
            yield Fraction(-k)
            k += 1

    def element(self, k: int) -> Fraction:
        return Fraction(k)

    def random(self, rng: random.Random) -> Fraction:
        return Fraction(rng.randint(-9, 9), rng.randint(1, 4))

    def format(self, x) -> str:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def to_json(self) -> dict:
        return {"kind": "rational"}

    def __repr__(self) -> str:
        return "Q"


QQ = RationalField()


def make_field(kind: str = "prime", p: int | None = None) -> Field:
    """Build a field context.

    >>> make_field("prime", 5)
    GF(5)
    """
    if kind == "rational":
        return QQ
    if kind != "prime":
        raise UsageError(f"unknown field kind {kind!r}")
    if p is None:
        raise UsageError("prime field needs p")
    if p == 2:
        raise CharTwo("characteristic 2 is excluded: 4 must be invertible")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return PrimeField(p)


def field_from_json(obj: dict) -> Field:
    return make_field(obj["kind"], obj.get("p"))


def inv_small_int(F: Field, k: int) -> Scalar:
    """Return (1 + ... + 1)^-1 with k summands."""
    if k <= 0:
        raise UsageError("k must be positive")
    if F.char and k % F.char == 0:
        raise DividesChar(f"{k} is zero in {F!r}")
    return F.inv(F(k))


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial, coefficients lowest degree first, no trailing zeros."""

    field: Field
    coeffs: tuple

    def __init__(self, field: Field, coeffs: Iterable = ()):
        cs = [field(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field(0)

    def __call__(self, x) -> Scalar:
        F = self.field
        acc = F(0)
        for c in reversed(self.coeffs):
            acc = F(acc * x + c)
        return acc

    def __add__(self, other: Polynomial) -> Polynomial:
        k = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.field, [self.coeff(i) + other.coeff(i) for i in range(k)])

    def __neg__(self) -> Polynomial:
        return Polynomial(self.field, [-c for c in self.coeffs])

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial(self.field, [c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Polynomial(self.field)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(self.field, out)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Polynomial(0)"
        terms = [f"{self.field.format(c)}*a^{k}" for k, c in enumerate(self.coeffs) if c != 0]
        return "Polynomial(" + " + ".join(terms) + ")"


def interpolate(F: Field, points: Sequence[tuple], degree_bound: int) -> Polynomial:
    """Lagrange interpolation through ``points`` with degree at most ``degree_bound``.

    The first ``degree_bound + 1`` points determine the polynomial; any further
    points are checked against it and a mismatch raises ``DegreeOverflow``.
    """
    if not F.has_order_at_least(degree_bound + 1):
        raise FieldTooSmall(f"{F!r} has fewer than {degree_bound + 1} elements")
    pts = [(F(x), F(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise DuplicateNode("interpolation nodes must be distinct")
    if len(pts) < degree_bound + 1:
        raise UsageError(f"need {degree_bound + 1} points, got {len(pts)}")
    base = pts[: degree_bound + 1]
    result = Polynomial(F)
    for i, (xi, yi) in enumerate(base):
        if yi == 0:
            continue
        basis = Polynomial(F, [1])
        denom = F(1)
        for j, (xj, _) in enumerate(base):
            if j != i:
                basis = basis * Polynomial(F, [-xj, 1])
                denom = F(denom * (xi - xj))
        result = result + basis * F(yi * F.inv(denom))
    for x, y in pts[degree_bound + 1:]:
        if result(x) != y:
            raise DegreeOverflow(f"points are not on a polynomial of degree <= {degree_bound}")
    return result
