"""Congruence canonical forms and the constructions built on them.

`sym_diagonalize` and `skew_canonical` reduce a structured matrix by
simultaneous row/column operations, recording the row operations in `p`
so that ``p a p^T == d``. The distinguishing witnesses and the invertible
bases of Sigma_n / Q_n are derived from these forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import EqualInputs, FieldTooSmall, NotSkew, NotSymmetric, OddDimension
from .field import Field
from .matrix import SKEW, SYMMETRIC, Matrix, det, diag, inverse, rank_of_rows
from .space import SKEW_SPACE, SYM, Space


@dataclass(frozen=True)
class CongruenceForm:
    p: Matrix
    d: Matrix
    rank: int

    def to_json(self) -> dict:
        return {"p": self.p.to_json(), "d": self.d.to_json(), "rank": self.rank}


class _Reducer:
    """Mutable working copy of (a, p) under congruence operations."""

    def __init__(self, a: Matrix):
        self.F = a.field
        self.n = a.n
        self.a = [list(r) for r in a.rows]
        self.p = [[self.F(int(i == j)) for j in range(self.n)] for i in range(self.n)]

    def swap(self, i, j):
        if i == j:
            return
        a, p = self.a, self.p
        a[i], a[j] = a[j], a[i]
        p[i], p[j] = p[j], p[i]
        for r in a:
            r[i], r[j] = r[j], r[i]

    def add(self, dst, src, f):
        """row dst += f * row src, then the same on columns."""
        if f == 0:
            return
        F, a, p = self.F, self.a, self.p
        a[dst] = [F(x + f * y) for x, y in zip(a[dst], a[src])]
        p[dst] = [F(x + f * y) for x, y in zip(p[dst], p[src])]
        for r in a:
            r[dst] = F(r[dst] + f * r[src])

    def scale(self, i, f):
        F, a, p = self.F, self.a, self.p
        a[i] = [F(f * x) for x in a[i]]
        p[i] = [F(f * x) for x in p[i]]
        for r in a:
            r[i] = F(f * r[i])

    def result(self, structure: str, rank: int) -> CongruenceForm:
        F = self.F
        d = Matrix._trusted(F, tuple(map(tuple, self.a)), structure)
        p = Matrix._trusted(F, tuple(map(tuple, self.p)))
        return CongruenceForm(p, d, rank)


@lru_cache(maxsize=1 << 14)
def sym_diagonalize(a: Matrix) -> CongruenceForm:
    """Diagonalize a symmetric matrix by congruence.

    The nonzero diagonal entries of ``d`` come first and their number is
    the rank. Pivot: the smallest index with a nonzero diagonal entry; if
    the remaining diagonal is all zero, row/column l is added to row/column
    k for the first nonzero a_kl, which puts 2 a_kl on the diagonal.
    """
    if not a.is_symmetric():
        raise NotSymmetric("sym_diagonalize needs a symmetric matrix")
    R = _Reducer(a)
    F, n, A = R.F, R.n, R.a
    r = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][i] != 0), None)
        if piv is None:
            off = next(((i, l) for i in range(k, n) for l in range(i + 1, n) if A[i][l] != 0), None)
            if off is None:
                break
            i, l = off
            R.add(i, l, F(1))
            piv = i
        R.swap(k, piv)
        inv = F.inv(A[k][k])
        for i in range(k + 1, n):
            if A[i][k] != 0:
                R.add(i, k, F(-A[i][k] * inv))
        r += 1
    return R.result(SYMMETRIC, r)


@lru_cache(maxsize=1 << 14)
def skew_canonical(c: Matrix) -> CongruenceForm:
    """Reduce a skew matrix to diag(x, ..., x, 0, ..., 0), x = [[0, 1], [-1, 0]].

    Each step moves the first nonzero a_ij (row-major, i < j) to position
    (s, s+1), scales it to 1 and clears the rest of rows/columns s and s+1.
    """
    if not c.is_skew():
        raise NotSkew("skew_canonical needs a skew-symmetric matrix")
    R = _Reducer(c)
    F, n, A = R.F, R.n, R.a
    s = 0
    while s + 1 < n:
        hit = next(((i, j) for i in range(s, n) for j in range(i + 1, n) if A[i][j] != 0), None)
        if hit is None:
            break
        i, j = hit
        R.swap(s, i)
        R.swap(s + 1, j)
        R.scale(s, F.inv(A[s][s + 1]))
        for r in range(s + 2, n):
            f_s, f_t = A[r][s], A[r][s + 1]
            R.add(r, s, F(-f_t))
            R.add(r, s + 1, f_s)
        s += 2
    return R.result(SKEW, s)


def _tail_witness(form: CongruenceForm, w: Matrix) -> Matrix:
    pinv = inverse(form.p)
    return pinv @ w @ pinv.T


@lru_cache(maxsize=1 << 14)
def _sym_core(c: Matrix) -> Matrix:
    form = sym_diagonalize(c)
    F, n = c.field, c.n
    w = diag(F, [0] * form.rank + [1] * (n - form.rank))
    return Matrix._trusted(F, _tail_witness(form, w).rows, SYMMETRIC)


@lru_cache(maxsize=1 << 14)
def _skew_core(c: Matrix) -> Matrix:
    form = skew_canonical(c)
    F, n = c.field, c.n
    rows = [[F(0)] * n for _ in range(n)]
    for k in range(form.rank, n, 2):
        rows[k][k + 1] = F(1)
        rows[k + 1][k] = F(-1)
    w = Matrix._trusted(F, tuple(map(tuple, rows)), SKEW)
    return Matrix._trusted(F, _tail_witness(form, w).rows, SKEW)


def distinguishing_witness_sym(a: Matrix, b: Matrix) -> Matrix:
    """Return x with det(a + x) != det(b + x), for symmetric a != b.

    With c = b - a diagonalized as p c p^T = d (rank r > 0), put w = 1 on the
    zero tail of d and z = p^-1 w p^-T. Then det(z) = 0 while
    det(c + z) != 0, and x = z - a turns this into det(a + x) = 0 != det(b + x).
    """
    if not (a.is_symmetric() and b.is_symmetric()):
        raise NotSymmetric("witness needs symmetric inputs")
    if a == b:
        raise EqualInputs("a and b are equal; no witness exists")
    return _sym_core((b - a).with_structure(SYMMETRIC)) - a.with_structure(SYMMETRIC)


def distinguishing_witness_skew(a: Matrix, b: Matrix) -> Matrix:
    """Skew analogue of `distinguishing_witness_sym`; the tail is filled with x blocks."""
    if not (a.is_skew() and b.is_skew()):
        raise NotSkew("witness needs skew-symmetric inputs")
    if a.n % 2:
        raise OddDimension("every odd-order skew matrix is singular; no witness exists")
    if a == b:
        raise EqualInputs("a and b are equal; no witness exists")
    c = b - a
    return _skew_core(Matrix._trusted(c.field, c.rows, SKEW)) - Matrix._trusted(a.field, a.rows, SKEW)


def invertible_spanning_basis(space: str | Space, n: int | None = None, F: Field | None = None) -> list[Matrix]:
    """A basis of Sigma_n or Q_n made of invertible matrices.

    Each singular standard basis element a is replaced by a + lambda*J for
    the first lambda (in field order) making it invertible, J being the
    identity or diag(x, ..., x). Since J together with these shifts spans
    the space, a greedy pass over [shifted elements..., J] yields a basis.
    """
    sp = space if isinstance(space, Space) else Space({"sym": SYM, "skew": SKEW_SPACE}[space], n)
    if F is None:
        raise TypeError("field is required")
    n = sp.n
    if not F.has_order_at_least(n + 1):
        raise FieldTooSmall(f"need |F| >= {n + 1} to shift singular elements")
    J = sp.unit_element(F)
    candidates = []
    for a in sp.basis(F):
        if det(a) == 0:
            lam = next(l for l in F.elements() if det(a + J * l) != 0)
            a = a + J * lam
        candidates.append(a)
    candidates.append(J)
    chosen, rows = [], []
    for a in candidates:
        trial = rows + [sp.coords(a)]
        if rank_of_rows(F, trial) == len(trial):
            chosen.append(a)
            rows = trial
        if len(chosen) == sp.dim:
            break
    return chosen
