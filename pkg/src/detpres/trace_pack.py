"""Packed coordinates for symmetric/skew matrices and the trace pairing.

A structured n x n matrix is packed into a vector of length m by reading
its upper triangle row by row: (1,1), (1,2), ..., (1,n), (2,2), ... for the
symmetric space (m = (n^2+n)/2) and (1,2), ..., (1,n), (2,3), ... for the
skew space (m = (n^2-n)/2).

Row and column packings carry different weights so that the dot product
of a row-packed `a` with a column-packed `b` is a trace:

=========  ==========================  ===========================  =============
space      row weights                 column weights               row . col
=========  ==========================  ===========================  =============
symmetric  1 on diagonal, 2 off it     1                            tr(ab)
skew       1                           -1                           tr(ab) / 2
=========  ==========================  ===========================  =============

Maps and tables key their points by the *plain* upper-triangle entries
(`Space.coords`), which coincide with the column packing in the symmetric
space and are its negative in the skew space. A linear operator has the
same matrix in either convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import NotLinear, NotLinearOnTable, Singular, SingularZ, TraceHypothesisViolated, UsageError, WrongStructure
from .field import Field, Scalar
from .matrix import Matrix, inverse, rank_of_rows
from .space import SKEW_SPACE, SYM, Space, space_of
from .verify import check_operator


@dataclass(frozen=True)
class PackedVector:
    space: Space
    coords: tuple
    role: str  # "row" or "col"

    def dot(self, other: PackedVector, F: Field) -> Scalar:
        if self.space != other.space:
            raise WrongStructure("vectors live in different spaces")
        return F(sum(x * y for x, y in zip(self.coords, other.coords)))


def pack_row(a: Matrix) -> PackedVector:
    sp = space_of(a)
    F = a.field
    if sp.kind == SYM:
        coords = tuple(F(x if i == j else 2 * x) for (i, j), x in zip(sp.positions, sp.coords(a)))
    else:
        coords = sp.coords(a)
    return PackedVector(sp, coords, "row")


def pack_col(a: Matrix) -> PackedVector:
    sp = space_of(a)
    coords = sp.coords(a)
    if sp.kind == SKEW_SPACE:
        coords = tuple(a.field(-x) for x in coords)
    return PackedVector(sp, coords, "col")


def unpack(v: PackedVector, F: Field) -> Matrix:
    """Inverse of `pack_col` (or of `pack_row` when ``v.role == "row"``)."""
    sp = v.space
    coords = list(v.coords)
    if v.role == "row" and sp.kind == SYM:
        half = F.inv(2)
        coords = [c if i == j else F(c * half) for (i, j), c in zip(sp.positions, coords)]
    elif v.role == "col" and sp.kind == SKEW_SPACE:
        coords = [F(-c) for c in coords]
    return sp.from_coords(F, coords)


def pairing(a: Matrix, b: Matrix) -> Scalar:
    """R_a . C_b: tr(ab) on Sigma_n and tr(ab)/2 on Q_n."""
    ra, cb = pack_row(a), pack_col(b)
    return ra.dot(cb, a.field)


def _square(F: Field, rows) -> Matrix:
    return Matrix._trusted(F, tuple(tuple(F(x) for x in r) for r in rows))


@dataclass(frozen=True)
class LinearOperator:
    """An m x m matrix q with coords(psi(y)) = q . coords(y)."""

    space: Space
    q: Matrix

    @property
    def field(self) -> Field:
        return self.q.field

    def apply(self, a: Matrix) -> Matrix:
        F = self.field
        c = self.space.coords(a)
        out = [F(sum(x * y for x, y in zip(row, c))) for row in self.q.rows]
        return self.space.from_coords(F, out)

    __call__ = apply

    def is_invertible(self) -> bool:
        return rank_of_rows(self.field, self.q.rows) == self.space.dim

    def to_numpy(self) -> np.ndarray:
        return self.q.to_numpy()

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "operator": self.q.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> LinearOperator:
        return cls(Space.from_json(obj["space"]), Matrix.from_json(obj["operator"]))

    @classmethod
    def from_images(cls, space: Space, F: Field, images: Sequence[Matrix]) -> LinearOperator:
        """Operator whose k-th column is the image of the k-th standard basis element."""
        cols = [space.coords(b) for b in images]
        return cls(space, _square(F, list(zip(*cols))) if cols else _square(F, []))

    @classmethod
    def from_function(cls, space: Space, F: Field, f) -> LinearOperator:
        return cls.from_images(space, F, [f(b) for b in space.basis(F)])


def _rows_matrix(F: Field, vectors: Sequence[PackedVector]) -> Matrix:
    return _square(F, [v.coords for v in vectors])


def _cols_matrix(F: Field, vectors: Sequence[PackedVector]) -> Matrix:
    return _square(F, list(zip(*[v.coords for v in vectors])))


def extract_linear_via_trace(psi, chi: Mapping[Matrix, Matrix] | Sequence[tuple], inv_basis: Sequence[Matrix],
                             probe_basis: Sequence[Matrix], verification=None) -> LinearOperator:
    """Recover the matrix of psi from the trace identity tr(xy) = tr(chi(x) psi(y)).

    X has rows R_{x_k} over the invertible basis, Z rows R_{chi(x_k)}, Y
    columns C_{y_j} over the probe basis and W columns C_{psi(y_j)}. The
    identity gives ZW = XY, so Z is invertible and C_{psi(y)} = Z^-1 X C_y.
    The result is then checked against psi on the points selected by
    ``verification`` (every point by default on finite fields).
    """
    chi = dict(chi)
    space = psi.space
    F = psi.field
    m = space.dim
    if len(inv_basis) != m or len(probe_basis) != m:
        raise UsageError(f"need {m} basis elements, got {len(inv_basis)} and {len(probe_basis)}")
    X = _rows_matrix(F, [pack_row(x) for x in inv_basis])
    Z = _rows_matrix(F, [pack_row(chi[x]) for x in inv_basis])
    Y = _cols_matrix(F, [pack_col(y) for y in probe_basis])
    W = _cols_matrix(F, [pack_col(psi(y)) for y in probe_basis])
    for M, name in ((X, "X"), (Y, "Y")):
        if rank_of_rows(F, M.rows) < m:
            raise UsageError(f"{name} is singular: the supplied basis is not a basis")
    ZW, XY = Z @ W, X @ Y
    if ZW != XY:
        k, j = next((k, j) for k in range(m) for j in range(m) if ZW.rows[k][j] != XY.rows[k][j])
        raise TraceHypothesisViolated(
            f"tr(x y) != tr(chi(x) psi(y)) for x = basis[{k}], y = probe[{j}]")
    try:
        Zinv = inverse(Z)
    except Singular:
        raise SingularZ("Z is singular") from None
    op = LinearOperator(space, Zinv @ X)
    bad = check_operator(psi, op, verification)
    if bad is not None:
        raise NotLinearOnTable(f"psi differs from the extracted operator at {bad!r}")
    return op


def operator_from_table(t, verification=None) -> LinearOperator:
    """Read the operator off the images of the standard basis and check it everywhere."""
    op = LinearOperator.from_function(t.space, t.field, t)
    bad = check_operator(t, op, verification)
    if bad is not None:
        raise NotLinear(f"map is not linear: disagrees with its basis operator at {bad!r}")
    return op
