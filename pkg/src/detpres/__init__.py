"""Exact recovery of determinant-compatible map pairs on symmetric and skew-symmetric matrices."""

from .canonical import (CongruenceForm, distinguishing_witness_skew, distinguishing_witness_sym,
                        invertible_spanning_basis, skew_canonical, sym_diagonalize)
from .decomposer import (AdjugateSeries, CofactorPolyBundle, SkewDecomposition, SymDecomposition, adjugate_series,
                         chi_functional, decompose_minus_pair, decompose_pair_skew, decompose_pair_sym,
                         decompose_twisted, decompose_two_alphas, factor_linear_sym_preserver, preimage,
                         recover_cofactor_polys, verify_det_compat)
from .errors import DetPresError, HypothesisViolation, InvariantFailure, UsageError
from .field import QQ, Polynomial, inv_small_int, interpolate, make_field
from .maps import (AnalyticMap, CanonicalCongruence, MapTable, TableMap, alpha_twist, canonical_pair, identity_map,
                   map_from_json, random_canonical)
from .matrix import (Matrix, adjugate, cofactor, cofactor_bump, congruence, det, det_bump, double_delete, identity,
                     inverse, matrix, rank, skew_unit, sym_unit, trace, unit)
from .space import Space
from .trace_pack import (LinearOperator, PackedVector, extract_linear_via_trace, operator_from_table, pack_col,
                         pack_row, pairing, unpack)
from .verify import Verification, sampled

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
