"""Exact dense matrices over a `Field`.

A `Matrix` is an immutable, hashable value carrying a structure tag:
``"general"``, ``"symmetric"`` or ``"skew"``. The tag is validated when a
matrix is built from user data; operations that are known to preserve the
structure keep it, everything else returns ``"general"``.

Indices in the public helpers (`cofactor`, `unit`, ...) are 1-based to
match the usual notation e_ij, A_ij; `Matrix.rows` is plain 0-based.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (DimensionMismatch, EqualIndices, IndexOutOfRange, NotSkew, NotSymmetric, Singular,
                     UsageError)
from .field import Field, Scalar, field_from_json

GENERAL, SYMMETRIC, SKEW = "general", "symmetric", "skew"
STRUCTURES = (GENERAL, SYMMETRIC, SKEW)


class Matrix:
    __slots__ = ("field", "rows", "structure", "_hash")

    def __init__(self, field: Field, rows: Sequence[Sequence], structure: str = GENERAL):
        if structure not in STRUCTURES:
            raise UsageError(f"unknown structure {structure!r}")
        rows = tuple(tuple(field(x) for x in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square")
        if structure == SYMMETRIC and not _is_symmetric(rows):
            raise NotSymmetric("entries are not symmetric")
        if structure == SKEW and not _is_skew(field, rows):
            raise NotSkew("entries are not skew-symmetric")
        self._set(field, rows, structure)

    def _set(self, field, rows, structure):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _trusted(cls, field: Field, rows: tuple, structure: str = GENERAL) -> Matrix:
        # rows already reduced and structure known to hold
        m = cls.__new__(cls)
        m._set(field, rows, structure)
        return m

    def __setattr__(self, key, value):
        raise AttributeError("Matrix is immutable")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.field, self.rows)))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.field.format(x) for x in r) for r in self.rows)
        return f"Matrix[{self.field!r}, {self.structure}]({body})"

    def _check(self, other: Matrix):
        if self.n != other.n or self.field != other.field:
            raise DimensionMismatch(f"{self.n}x{self.n} over {self.field!r} vs {other.n}x{other.n} over {other.field!r}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        F = self.field
        if F.kind == "prime":
            p = F.p
            rows = tuple(tuple((x + y) % p for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))
        else:
            rows = tuple(tuple(F(x + y) for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Matrix._trusted(F, rows, self.structure if self.structure == other.structure else GENERAL)

    def __neg__(self) -> Matrix:
        F = self.field
        return Matrix._trusted(F, tuple(tuple(F(-x) for x in r) for r in self.rows), self.structure)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        F = self.field
        if F.kind == "prime":
            p = F.p
            rows = tuple(tuple((x - y) % p for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))
        else:
            rows = tuple(tuple(F(x - y) for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Matrix._trusted(F, rows, self.structure if self.structure == other.structure else GENERAL)

    def scale(self, c) -> Matrix:
        F = self.field
        c = F(c)
        return Matrix._trusted(F, tuple(tuple(F(c * x) for x in r) for r in self.rows), self.structure)

    def __mul__(self, c) -> Matrix:
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        F = self.field
        cols = list(zip(*other.rows))
        if F.kind == "prime":
            p = F.p
            rows = tuple(tuple(sum(a * b for a, b in zip(r, c)) % p for c in cols) for r in self.rows)
        else:
            rows = tuple(tuple(F(sum(a * b for a, b in zip(r, c))) for c in cols) for r in self.rows)
        return Matrix._trusted(F, rows)

    @property
    def T(self) -> Matrix:
        return Matrix._trusted(self.field, tuple(zip(*self.rows)), self.structure)

    def with_structure(self, structure: str) -> Matrix:
        """Re-tag, validating the new structure."""
        return Matrix(self.field, self.rows, structure)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        return self.structure == SYMMETRIC or _is_symmetric(self.rows)

    def is_skew(self) -> bool:
        return self.structure == SKEW or _is_skew(self.field, self.rows)

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.n, self.n)

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "structure": self.structure,
            "rows": [[self.field.format(x) for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> Matrix:
        F = field or field_from_json(obj["field"])
        rows = [[F.parse(x) for x in r] for r in obj["rows"]]
        if "n" in obj and len(rows) != obj["n"]:
            raise DimensionMismatch(f"declared n={obj['n']} but got {len(rows)} rows")
        return cls(F, rows, obj.get("structure", GENERAL))


def _is_symmetric(rows) -> bool:
    n = len(rows)
    return all(rows[i][j] == rows[j][i] for i in range(n) for j in range(i + 1, n))


def _is_skew(F: Field, rows) -> bool:
    n = len(rows)
    return all(F(rows[i][j] + rows[j][i]) == 0 for i in range(n) for j in range(i, n))


def matrix(F: Field, rows, structure: str | None = None) -> Matrix:
    """Build a matrix, inferring the tightest structure tag when none is given."""
    m = Matrix(F, rows)
    if structure is not None:
        return m.with_structure(structure)
    if m.n and m.is_skew() and not m.is_zero():
        return Matrix._trusted(F, m.rows, SKEW)
    if m.is_symmetric():
        return Matrix._trusted(F, m.rows, SYMMETRIC)
    return m


# constructors

def _check_index(n, *idx):
    for k in idx:
        if not 1 <= k <= n:
            raise IndexOutOfRange(f"index {k} out of range 1..{n}")


def zeros(F: Field, n: int, structure: str = SYMMETRIC) -> Matrix:
    return Matrix._trusted(F, tuple((F(0),) * n for _ in range(n)), structure)


def identity(F: Field, n: int) -> Matrix:
    return Matrix._trusted(F, tuple(tuple(F(int(i == j)) for j in range(n)) for i in range(n)), SYMMETRIC)


def diag(F: Field, values: Sequence) -> Matrix:
    n = len(values)
    return Matrix._trusted(F, tuple(tuple(F(values[i]) if i == j else F(0) for j in range(n)) for i in range(n)),
                           SYMMETRIC)


def unit(F: Field, n: int, i: int, j: int) -> Matrix:
    """e_ij: 1 at (i, j), zero elsewhere."""
    _check_index(n, i, j)
    rows = [[F(0)] * n for _ in range(n)]
    rows[i - 1][j - 1] = F(1)
    return Matrix._trusted(F, tuple(map(tuple, rows)), SYMMETRIC if i == j else GENERAL)


def sym_unit(F: Field, n: int, i: int, j: int) -> Matrix:
    """e_ij + e_ji for i != j, and e_ii on the diagonal."""
    _check_index(n, i, j)
    rows = [[F(0)] * n for _ in range(n)]
    rows[i - 1][j - 1] = F(1)
    rows[j - 1][i - 1] = F(1)
    return Matrix._trusted(F, tuple(map(tuple, rows)), SYMMETRIC)


def skew_unit(F: Field, n: int, i: int, j: int) -> Matrix:
    """e_ij - e_ji, requires i < j."""
    _check_index(n, i, j)
    if i >= j:
        raise IndexOutOfRange("skew_unit needs i < j")
    rows = [[F(0)] * n for _ in range(n)]
    rows[i - 1][j - 1] = F(1)
    rows[j - 1][i - 1] = F(-1)
    return Matrix._trusted(F, tuple(map(tuple, rows)), SKEW)


def symplectic_unit(F: Field, n: int) -> Matrix:
    """diag(x, ..., x) with x = [[0, 1], [-1, 0]]; n must be even."""
    if n % 2:
        raise UsageError("symplectic_unit needs even n")
    rows = [[F(0)] * n for _ in range(n)]
    for k in range(0, n, 2):
        rows[k][k + 1] = F(1)
        rows[k + 1][k] = F(-1)
    return Matrix._trusted(F, tuple(map(tuple, rows)), SKEW)


# determinant and friends

def _det_rows(F: Field, rows) -> Scalar:
    n = len(rows)
    a = [list(r) for r in rows]
    det = F(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            return F(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        pk = a[k][k]
        det = F(det * pk)
        inv = F.inv(pk)
        rk = a[k]
        for r in range(k + 1, n):
            f = a[r][k]
            if f != 0:
                f = F(f * inv)
                ar = a[r]
                for c in range(k + 1, n):
                    ar[c] = F(ar[c] - f * rk[c])
    return F(det)


@lru_cache(maxsize=1 << 17)
def _det_cached(F: Field, rows) -> Scalar:
    return _det_rows(F, rows)


def det(a: Matrix) -> Scalar:
    """Exact determinant by Gaussian elimination; det of the 0x0 matrix is 1."""
    return _det_cached(a.field, a.rows)


def minor_rows(rows, drop_rows, drop_cols) -> tuple:
    return tuple(tuple(x for c, x in enumerate(r) if c not in drop_cols) for k, r in enumerate(rows)
                 if k not in drop_rows)


def cofactor(a: Matrix, i: int, j: int) -> Scalar:
    """A_ij(a) = (-1)^(i+j) det(a with row i and column j deleted), 1-based."""
    _check_index(a.n, i, j)
    m = det(Matrix._trusted(a.field, minor_rows(a.rows, {i - 1}, {j - 1})))
    return a.field(m if (i + j) % 2 == 0 else -m)


def double_delete(a: Matrix, i: int, j: int) -> Matrix:
    """Delete rows i, j and columns i, j (1-based)."""
    if i == j:
        raise EqualIndices("double_delete needs i != j")
    _check_index(a.n, i, j)
    drop = {i - 1, j - 1}
    return Matrix._trusted(a.field, minor_rows(a.rows, drop, drop), a.structure)


def adjugate(a: Matrix) -> Matrix:
    """Transposed cofactor matrix: entry (i, j) is A_ji(a)."""
    n = a.n
    rows = tuple(tuple(cofactor(a, j, i) for j in range(1, n + 1)) for i in range(1, n + 1))
    if a.structure == SYMMETRIC:
        structure = SYMMETRIC
    elif a.structure == SKEW and n % 2 == 0:
        structure = SKEW
    else:
        structure = GENERAL
    return Matrix._trusted(a.field, rows, structure)


def _eliminate(F: Field, rows, aug=None):
    """Reduced row echelon form; returns (rows, aug, pivot columns)."""
    a = [list(r) for r in rows]
    b = [list(r) for r in aug] if aug is not None else None
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, nrows) if a[k][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        if b is not None:
            b[r], b[piv] = b[piv], b[r]
        inv = F.inv(a[r][c])
        a[r] = [F(x * inv) for x in a[r]]
        if b is not None:
            b[r] = [F(x * inv) for x in b[r]]
        for k in range(nrows):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [F(x - f * y) for x, y in zip(a[k], a[r])]
                if b is not None:
                    b[k] = [F(x - f * y) for x, y in zip(b[k], b[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, b, pivots


def rank_of_rows(F: Field, rows) -> int:
    if not rows:
        return 0
    return len(_eliminate(F, rows)[2])


def rank(a: Matrix) -> int:
    return rank_of_rows(a.field, a.rows)


def inverse(a: Matrix) -> Matrix:
    F, n = a.field, a.n
    eye = identity(F, n).rows
    red, inv, pivots = _eliminate(F, a.rows, eye)
    if len(pivots) < n:
        raise Singular("matrix is singular")
    structure = a.structure if a.structure in (SYMMETRIC, SKEW) else GENERAL
    return Matrix._trusted(F, tuple(map(tuple, inv)), structure)


def trace(a: Matrix) -> Scalar:
    return a.field(sum(a.rows[i][i] for i in range(a.n)))


def congruence(p: Matrix, c: Matrix) -> Matrix:
    """p c p^T, keeping c's structure tag."""
    p._check(c)
    out = p @ c @ p.T
    if c.structure == SYMMETRIC:
        return Matrix._trusted(out.field, out.rows, SYMMETRIC)
    if c.structure == SKEW:
        return Matrix._trusted(out.field, out.rows, SKEW)
    return out


def det_bump(x: Matrix, t, i: int, j: int) -> Scalar:
    """det(x) + t * A_ij(x), which equals det(x + t e_ij)."""
    F = x.field
    return F(det(x) + F(t) * cofactor(x, i, j))


def cofactor_bump(a: Matrix, t, i: int, j: int) -> Scalar:
    """A_ji(a) - t det(a with rows/columns i, j deleted), which equals A_ji(a + t e_ij) for i != j."""
    F = a.field
    return F(cofactor(a, j, i) - F(t) * det(double_delete(a, i, j)))


# vectorised helpers over GF(p)

def inverse_table(p: int) -> np.ndarray:
    """inv[k] = k^-1 mod p, with inv[0] = 0."""
    tab = np.zeros(p, dtype=np.int64)
    for k in range(1, p):
        tab[k] = pow(k, -1, p)
    return tab


def batch_det_mod(arr: np.ndarray, p: int, invtab: np.ndarray | None = None) -> np.ndarray:
    """Determinants of a stack of matrices mod p, shape (N, n, n) -> (N,).

    Same elimination as `det` (first nonzero pivot by row order), run for the
    whole batch at once.
    """
    if p >= 1 << 31:
        raise UsageError("batch_det_mod needs p < 2**31")
    a = np.array(arr, dtype=np.int64) % p
    N, n, _ = a.shape
    out = np.ones(N, dtype=np.int64)
    if n == 0:
        return out
    if invtab is None:
        invtab = inverse_table(p)
    idx = np.arange(N)
    for k in range(n):
        nz = a[:, k:, k] != 0
        piv = nz.argmax(axis=1) + k
        swap = piv != k
        if swap.any():
            rk = a[idx, k].copy()
            a[idx, k] = a[idx, piv]
            a[idx, piv] = rk
            out[swap] = (-out[swap]) % p
        pv = a[:, k, k]
        out = out * pv % p
        if k + 1 < n:
            f = a[:, k + 1:, k] * invtab[pv][:, None] % p
            a[:, k + 1:, k:] = (a[:, k + 1:, k:] - f[:, :, None] * a[:, None, k, k:]) % p
    return out
