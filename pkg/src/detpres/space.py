"""The two matrix spaces: Sigma_n (symmetric) and Q_n (skew-symmetric).

Points are identified by their upper-triangle entries read row by row
(`Space.coords`); over GF(p) they are enumerated in lexicographic order
of those coordinates, which is the "index" used by tables and sharding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, OddDimension, UsageError, WrongStructure
from .field import Field
from .matrix import SKEW, SYMMETRIC, Matrix, identity, skew_unit, sym_unit, symplectic_unit

SYM, SKEW_SPACE = "sym", "skew"


@dataclass(frozen=True)
class Space:
    """Sigma_n (kind "sym") or Q_n (kind "skew")."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (SYM, SKEW_SPACE):
            raise UsageError(f"unknown space kind {self.kind!r}")
        if self.n < 1:
            raise UsageError("n must be positive")

    @property
    def structure(self) -> str:
        return SYMMETRIC if self.kind == SYM else SKEW

    @cached_property
    def positions(self) -> tuple:
        off = 0 if self.kind == SYM else 1
        return tuple((i, j) for i in range(self.n) for j in range(i + off, self.n))

    @property
    def dim(self) -> int:
        return len(self.positions)

    def basis(self, F: Field) -> list[Matrix]:
        """Standard basis, in packing order: e_ii / e_ij + e_ji, or e_ij - e_ji."""
        unit = sym_unit if self.kind == SYM else skew_unit
        return [unit(F, self.n, i + 1, j + 1) for i, j in self.positions]

    def unit_element(self, F: Field) -> Matrix:
        """The identity for Sigma_n, diag(x, ..., x) for Q_n."""
        if self.kind == SYM:
            return identity(F, self.n)
        if self.n % 2:
            raise OddDimension("Q_n has no invertible elements for odd n")
        return symplectic_unit(F, self.n)

    def check(self, a: Matrix):
        if a.n != self.n:
            raise DimensionMismatch(f"expected {self.n}x{self.n}, got {a.n}x{a.n}")
        if self.kind == SYM and not a.is_symmetric():
            raise WrongStructure("matrix is not symmetric")
        if self.kind == SKEW_SPACE and not a.is_skew():
            raise WrongStructure("matrix is not skew-symmetric")

    def coords(self, a: Matrix) -> tuple:
        return tuple(a.rows[i][j] for i, j in self.positions)

    def from_coords(self, F: Field, coords: Sequence) -> Matrix:
        n = self.n
        rows = [[F(0)] * n for _ in range(n)]
        sign = 1 if self.kind == SYM else -1
        for (i, j), c in zip(self.positions, coords):
            rows[i][j] = F(c)
            rows[j][i] = F(sign * c)
        return Matrix._trusted(F, tuple(map(tuple, rows)), self.structure)

    def zero(self, F: Field) -> Matrix:
        return self.from_coords(F, [0] * self.dim)

    # finite-field enumeration

    def size(self, F: Field) -> int | None:
        return None if F.order is None else F.order ** self.dim

    def index(self, coords: Sequence, p: int) -> int:
        """Position of a point in lexicographic packed-coordinate order."""
        k = 0
        for c in coords:
            k = k * p + int(c)
        return k

    def point(self, F: Field, index: int) -> Matrix:
        """Inverse of `index` over GF(p)."""
        p = F.order
        coords = [(index // p ** e) % p for e in range(self.dim - 1, -1, -1)]
        return self.from_coords(F, coords)

    def elements(self, F: Field) -> Iterator[Matrix]:
        for cs in product(range(F.order), repeat=self.dim):
            yield self.from_coords(F, cs)

    def all_coords(self, p: int) -> np.ndarray:
        """Every point of the space as an (p^m, m) array, in index order."""
        m = self.dim
        idx = np.arange(p ** m, dtype=np.int64)
        out = np.empty((idx.size, m), dtype=np.int64)
        for k in range(m - 1, -1, -1):
            out[:, k] = idx % p
            idx //= p
        return out

    def index_array(self, coords: np.ndarray, p: int) -> np.ndarray:
        weights = p ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        return coords @ weights

    def coords_to_arrays(self, coords: np.ndarray, p: int) -> np.ndarray:
        """(N, m) coordinates -> (N, n, n) matrices mod p."""
        N = coords.shape[0]
        out = np.zeros((N, self.n, self.n), dtype=np.int64)
        ii = np.array([i for i, _ in self.positions], dtype=np.intp)
        jj = np.array([j for _, j in self.positions], dtype=np.intp)
        out[:, ii, jj] = coords
        if self.kind == SYM:
            out[:, jj, ii] = coords
        else:
            out[:, jj, ii] = (-coords) % p
        return out

    def arrays_to_coords(self, arrs: np.ndarray) -> np.ndarray:
        ii = np.array([i for i, _ in self.positions], dtype=np.intp)
        jj = np.array([j for _, j in self.positions], dtype=np.intp)
        return arrs[:, ii, jj]

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> Space:
        return cls(obj["kind"], int(obj["n"]))


def space_of(a: Matrix) -> Space:
    if a.structure == SYMMETRIC:
        return Space(SYM, a.n)
    if a.structure == SKEW:
        return Space(SKEW_SPACE, a.n)
    raise WrongStructure("matrix carries no symmetric/skew structure tag")
