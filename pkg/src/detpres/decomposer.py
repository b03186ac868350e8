"""Recovering determinant-compatible map pairs.

Given maps phi, psi on Sigma_n with det(phi(x) + psi(y)) = det(x + y) and
psi surjective, `decompose_pair_sym` finds (beta, u, x0) such that
phi(x) = beta u (x + x0) u^T and psi(x) = beta u (x - x0) u^T. The default
``"paper"`` path never reads psi's matrix directly; it goes through

1. the shift psi0 = psi - psi(0), phi0 = phi + psi(0);
2. preimages b_ij, d_ij of the unit matrices under psi0;
3. cofactor polynomials alpha -> A_ij(phi0(alpha a)), interpolated from
   determinants of alpha*a + b_ij alone (`recover_cofactor_polys`);
4. the adjugate series (phi0(a / alpha))^-1 = sum_i alpha^i chi_i(a);
5. chi(x) = chi_1(x^-1), which satisfies tr(xy) = tr(chi(x) psi0(y));
6. linearity of psi0 from that trace identity (`extract_linear_via_trace`);
7. the factorization psi0(x) = beta u x u^T and x0 = -beta^-1 u^-1 psi(0) u^-T.

The ``"fast"`` path reads psi0 on the standard basis instead of steps 2-6.
`decompose_pair_skew` runs steps 2-6 on Q_n and stops at the operator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .canonical import invertible_spanning_basis
from .errors import (DetCompatViolated, FieldTooSmall, InvariantFailure, NonzeroPsiAtZero, NotCongruenceForm,
                     NotSurjective, OddDimension, SingularInput, UsageError)
from .field import Field, Polynomial, Scalar, interpolate, inv_small_int
from .matrix import SYMMETRIC, Matrix, cofactor, det, identity, inverse, skew_unit, sym_unit
from .maps import MINUS, PLUS, AnalyticMap, CanonicalCongruence, MapTable, ShiftedMap, alpha_twist
from .space import SKEW_SPACE, SYM, Space
from .trace_pack import LinearOperator, extract_linear_via_trace, operator_from_table
from .verify import (EXHAUSTIVE, MAX_EXHAUSTIVE_PAIRS, Verification, check_det_preserving, check_equal,
                     det_compat, sampled)

log = logging.getLogger(__name__)

PAPER, FAST, BOTH = "paper", "fast", "both"


def default_verification(space: Space, F: Field) -> Verification:
    """Exhaustive when every pair of points can be checked, otherwise 10^4 seeded samples."""
    size = space.size(F)
    if size is not None and size * size <= MAX_EXHAUSTIVE_PAIRS and space.dim <= 6:
        return Verification(EXHAUSTIVE)
    return sampled(10_000, 0)


@dataclass
class DetCompatReport:
    ok: bool
    mode: str
    pairs_checked: int
    witness: tuple | None = None

    def to_json(self) -> dict:
        out = {"ok": self.ok, "mode": self.mode, "pairs_checked": self.pairs_checked}
        if self.witness is not None:
            out["witness"] = {"x": self.witness[0].to_json(), "y": self.witness[1].to_json()}
        return out


def verify_det_compat(phi: MapTable, psi: MapTable, verification: Verification | None = None) -> DetCompatReport:
    """Check det(phi(x) + psi(y)) == det(x + y) over all pairs or a seeded sample."""
    _same_domain(phi, psi)
    v = verification or default_verification(phi.space, phi.field)
    res = det_compat(phi, psi, v)
    return DetCompatReport(res.ok, v.mode, res.checked, res.witness)


def preimage(t: MapTable, target: Matrix) -> Matrix:
    """Some x with t(x) == target; raises NotInImage."""
    return t.preimage(target)


def _same_domain(phi: MapTable, psi: MapTable):
    if phi.space != psi.space or phi.field != psi.field:
        raise UsageError("phi and psi must act on the same space over the same field")


# cofactor polynomials and the adjugate series

@dataclass(frozen=True)
class UnitPreimages:
    """b[(i, j)] and d[(i, j)] (0-based, i <= j) with psi(b) = +unit, psi(d) = -unit."""

    space: Space
    b: dict
    d: dict


def unit_preimages(psi: MapTable) -> UnitPreimages:
    sp, F = psi.space, psi.field
    b, d = {}, {}
    for i, j in sp.positions:
        if sp.kind == SYM:
            e = sym_unit(F, sp.n, i + 1, j + 1)
        else:
            e = skew_unit(F, sp.n, i + 1, j + 1)
        b[(i, j)] = psi.preimage(e)
        if i != j:
            d[(i, j)] = psi.preimage(-e)
    return UnitPreimages(sp, b, d)


@dataclass(frozen=True)
class CofactorPolyBundle:
    """polys[i][j] is alpha -> A_{i+1, j+1}(phi(alpha a)), of degree < n."""

    a: Matrix
    polys: tuple

    def coefficient(self, k: int) -> Matrix:
        """(beta_{i,j,k}(a))_{ij}: the alpha^k coefficients."""
        F = self.a.field
        return Matrix._trusted(F, tuple(tuple(p.coeff(k) for p in row) for row in self.polys))

    def evaluate(self, alpha) -> Matrix:
        F = self.a.field
        return Matrix._trusted(F, tuple(tuple(p(alpha) for p in row) for row in self.polys))


def recover_cofactor_polys(phi: MapTable | None, psi: MapTable, a: Matrix,
                           preimages: UnitPreimages | None = None, check: bool = True) -> CofactorPolyBundle:
    """Cofactors of phi(alpha a) as polynomials in alpha, from determinants on the domain only.

    Diagonal (symmetric space): A_ii = det(alpha a + b_ii) - alpha^n det(a).
    Off-diagonal: A_ij = (det(alpha a + b_ij) - det(alpha a + d_ij)) / 4.
    In the skew space the diagonal vanishes and A_ji = -A_ij.

    Each expression is sampled at alpha = 0, 1, ..., n and interpolated
    with degree bound n - 1; the extra node guards the bound. With
    ``check`` and a ``phi`` given, the polynomials are compared with the
    actual cofactors of phi(alpha a) at the nodes, which only fails when
    the pair is not determinant-compatible.
    """
    sp, F = psi.space, psi.field
    n = sp.n
    if not F.has_order_at_least(n + 1):
        raise FieldTooSmall(f"need {n + 1} interpolation nodes")
    pre = preimages or unit_preimages(psi)
    nodes = [F.element(k) for k in range(n + 1)]
    scaled = [a.scale(al) for al in nodes]
    da = det(a)
    quarter = inv_small_int(F, 4)
    zero = Polynomial(F)
    polys = [[zero] * n for _ in range(n)]
    for i, j in sp.positions:
        if i == j:
            pts = [(al, det(x + pre.b[(i, i)]) - al ** n * da) for al, x in zip(nodes, scaled)]
            polys[i][i] = interpolate(F, pts, n - 1)
            continue
        pts = [(al, quarter * (det(x + pre.b[(i, j)]) - det(x + pre.d[(i, j)]))) for al, x in zip(nodes, scaled)]
        poly = interpolate(F, pts, n - 1)
        polys[i][j] = poly
        polys[j][i] = poly if sp.kind == SYM else -poly
    bundle = CofactorPolyBundle(a, tuple(map(tuple, polys)))
    if check and phi is not None:
        for al, x in zip(nodes, scaled):
            image = phi(x)
            got = bundle.evaluate(al)
            for i in range(n):
                for j in range(n):
                    if cofactor(image, i + 1, j + 1) != got.rows[i][j]:
                        raise DetCompatViolated(
                            f"cofactor ({i + 1},{j + 1}) of phi({F.format(al)} a) disagrees with the recovered "
                            "polynomial; the pair is not determinant-compatible", (x,))
    return bundle


@dataclass(frozen=True)
class AdjugateSeries:
    """(phi(a / alpha))^-1 = alpha chi_1 + alpha^2 chi_2 + ... + alpha^n chi_n."""

    a: Matrix
    chis: tuple

    def __call__(self, alpha) -> Matrix:
        F = self.a.field
        out = None
        for k, chi in enumerate(self.chis, start=1):
            term = chi.scale(F(alpha) ** k)
            out = term if out is None else out + term
        return out


def adjugate_series(phi: MapTable | None, psi: MapTable, a: Matrix,
                    preimages: UnitPreimages | None = None, check: bool = True) -> AdjugateSeries:
    """chi_i = omega_{n-i} / det(a), omega_k = (beta_{j,i,k}(a))_{ij}."""
    F = a.field
    da = det(a)
    if da == 0:
        raise SingularInput("adjugate series needs an invertible a")
    bundle = recover_cofactor_polys(phi, psi, a, preimages, check)
    n = a.n
    dinv = F.inv(da)
    structure = psi.space.structure
    chis = []
    for i in range(1, n + 1):
        omega = bundle.coefficient(n - i).T
        chis.append(Matrix._trusted(F, omega.scale(dinv).rows, structure))
    return AdjugateSeries(a, tuple(chis))


def chi_functional(phi: MapTable | None, psi: MapTable, x: Matrix,
                   preimages: UnitPreimages | None = None, check: bool = True) -> Matrix:
    """chi(x) = chi_1(x^-1); satisfies tr(x y) = tr(chi(x) psi(y)) for a compatible pair."""
    if det(x) == 0:
        raise SingularInput("chi is only defined on invertible matrices")
    return adjugate_series(phi, psi, inverse(x), preimages, check).chis[0]


def series_residual(series: AdjugateSeries, psi: MapTable, y: Matrix, alpha) -> Scalar:
    """det(e + S(alpha) psi(y)) - det(e + alpha a^-1 y); vanishes identically for a compatible pair."""
    a = series.a
    F = a.field
    e = identity(F, a.n)
    lhs = det(e + series(alpha) @ psi(y))
    rhs = det(e + (inverse(a) @ y).scale(alpha))
    return F(lhs - rhs)


# factoring a linear determinant preserver on Sigma_n

def factor_linear_sym_preserver(L: LinearOperator) -> tuple[Scalar, Matrix]:
    """Write a linear map on Sigma_n as x -> beta u x u^T, gauge-fixed.

    s_i = L(e_ii) must be rank one, s_i = mu_i v_i v_i^T with mu_i = 1 / (s_i)_kk
    and v_i the k-th column of s_i for the first nonzero diagonal entry k.
    Taking u's first column as v_1 fixes beta = mu_1; the cross images
    L(e_1i + e_i1) = kappa_i (v_1 v_i^T + v_i v_1^T) give the other columns
    kappa_i / beta * v_i. The result is checked on the whole standard basis.
    """
    sp, F = L.space, L.field
    if sp.kind != SYM:
        raise UsageError("factorization is defined on the symmetric space")
    n = sp.n
    vs, mus = [], []
    for i in range(1, n + 1):
        s = L(sym_unit(F, n, i, i))
        k = next((k for k in range(n) if s.rows[k][k] != 0), None)
        if k is None:
            raise NotCongruenceForm(f"L(e_{i}{i}) has zero diagonal, not beta c c^T")
        mu = F.inv(s.rows[k][k])
        v = [s.rows[r][k] for r in range(n)]
        if any(F(mu * v[r] * v[c]) != s.rows[r][c] for r in range(n) for c in range(n)):
            raise NotCongruenceForm(f"L(e_{i}{i}) is not rank one")
        vs.append(v)
        mus.append(mu)
    beta = mus[0]
    cols = [vs[0]]
    for i in range(1, n):
        h = L(sym_unit(F, n, 1, i + 1))
        g = [[F(vs[0][r] * vs[i][c] + vs[i][r] * vs[0][c]) for c in range(n)] for r in range(n)]
        r, c = next((r, c) for r in range(n) for c in range(n) if g[r][c] != 0)
        kappa = F(h.rows[r][c] * F.inv(g[r][c]))
        if any(F(kappa * g[r][c]) != h.rows[r][c] for r in range(n) for c in range(n)):
            raise NotCongruenceForm(f"L(e_1{i + 1} + e_{i + 1}1) is inconsistent with the diagonal images")
        t = F(kappa * F.inv(beta))
        cols.append([F(t * x) for x in vs[i]])
    u = Matrix._trusted(F, tuple(tuple(cols[c][r] for c in range(n)) for r in range(n)))
    if det(u) == 0 or F(beta ** n * det(u) ** 2) != 1:
        raise NotCongruenceForm("recovered (beta, u) violates beta^n det(u)^2 = 1; L does not preserve det")
    f = next(x for row in u.rows for x in row if x != 0)
    beta, u = F(beta * f * f), u.scale(F.inv(f))
    for b in sp.basis(F):
        if (u @ b @ u.T).scale(beta) != L(b):
            raise NotCongruenceForm("L is not of the form x -> beta u x u^T")
    return beta, u


# end-to-end pipelines

@dataclass
class SymDecomposition:
    phi_form: CanonicalCongruence
    psi_form: CanonicalCongruence
    path: str
    verification: Verification
    pairs_checked: int
    points_checked: int
    exploration: bool = False
    swapped: bool = False
    operator: LinearOperator | None = field(default=None, repr=False)

    @property
    def beta(self) -> Scalar:
        return self.phi_form.beta

    @property
    def u(self) -> Matrix:
        return self.phi_form.u

    @property
    def x0(self) -> Matrix:
        return self.phi_form.x0

    def to_json(self) -> dict:
        out = self.phi_form.to_json()
        out["psi"] = self.psi_form.to_json()
        out["verified"] = dict(self.verification.to_json(), pairs_checked=self.pairs_checked,
                               points_checked=self.points_checked)
        out["path"] = self.path
        out["exploration"] = self.exploration
        if self.swapped:
            out["swapped"] = True
        return out


@dataclass
class SkewDecomposition:
    operator: LinearOperator
    path: str
    verification: Verification
    pairs_checked: int
    points_checked: int
    exploration: bool = False

    def to_json(self) -> dict:
        out = self.operator.to_json()
        out["verified"] = dict(self.verification.to_json(), pairs_checked=self.pairs_checked,
                               points_checked=self.points_checked)
        out["path"] = self.path
        out["exploration"] = self.exploration
        return out


def _bound_check(space: Space, F: Field, strict: bool) -> bool:
    """Return True when running below |F| >= n^2 + 1 (exploration)."""
    if F.has_order_at_least(space.n ** 2 + 1):
        return False
    if strict:
        raise FieldTooSmall(f"|F| = {F.order} < n^2 + 1 = {space.n ** 2 + 1}; pass strict=False to explore")
    log.warning("running below |F| >= n^2+1: conclusions are not guaranteed")
    return True


def _require_compat(phi, psi, v) -> int:
    rep = verify_det_compat(phi, psi, v)
    if not rep.ok:
        x, y = rep.witness
        raise DetCompatViolated(f"det(phi(x) + psi(y)) != det(x + y) at x={x!r}, y={y!r}", rep.witness)
    return rep.pairs_checked


def linear_part_via_trace(phi0: MapTable, psi0: MapTable, verification: Verification | None = None,
                          check: bool = True) -> LinearOperator:
    """The operator of psi0 (with psi0(0) = 0) from the trace identity, via chi on an invertible basis."""
    sp, F = psi0.space, psi0.field
    pre = unit_preimages(psi0)
    basis = invertible_spanning_basis(sp, sp.n, F)
    chi = {x: chi_functional(phi0, psi0, x, pre, check) for x in basis}
    return extract_linear_via_trace(psi0, chi, basis, sp.basis(F), verification)


def decompose_pair_sym(phi: MapTable, psi: MapTable, path: str = PAPER, verification: Verification | None = None,
                       strict: bool = True) -> SymDecomposition:
    """Find (beta, u, x0) with phi = beta u (x + x0) u^T and psi = beta u (x - x0) u^T.

    If psi is known not to be surjective but phi is, the roles are swapped
    (the hypothesis is symmetric in phi and psi) and x0 changes sign.
    """
    _same_domain(phi, psi)
    sp, F = psi.space, psi.field
    if sp.kind != SYM:
        raise UsageError("decompose_pair_sym works on Sigma_n; use decompose_pair_skew for Q_n")
    if path not in (PAPER, FAST, BOTH):
        raise UsageError(f"unknown path {path!r}")
    explore = _bound_check(sp, F, strict)
    v = verification or default_verification(sp, F)
    # surjectivity is decided first: over a finite field a compatible pair is
    # always bijective, so a non-surjective input would otherwise only ever
    # surface as a det-compat violation
    swapped = False
    if psi.is_surjective() is False:
        if phi.is_surjective() is not True:
            raise NotSurjective("neither phi nor psi is surjective")
        phi, psi, swapped = psi, phi, True
    pairs = _require_compat(phi, psi, v)

    a = psi(sp.zero(F))
    psi0 = ShiftedMap(psi, -a)
    phi0 = ShiftedMap(phi, a)

    ops = {}
    if path in (PAPER, BOTH):
        ops[PAPER] = linear_part_via_trace(phi0, psi0, v)
    if path in (FAST, BOTH):
        ops[FAST] = operator_from_table(psi0, v)
    L = ops.get(PAPER) or ops[FAST]
    if len(ops) == 2 and ops[PAPER] != ops[FAST]:
        raise InvariantFailure("paper and fast paths recovered different operators")

    if phi0(sp.zero(F)) != sp.zero(F):
        raise InvariantFailure("phi(0) != -psi(0): the shifted phi does not vanish at 0")
    dp = check_det_preserving(psi0, v)
    if not dp.ok:
        raise InvariantFailure(f"shifted psi does not preserve det at {dp.witness[0]!r}")

    beta, u = factor_linear_sym_preserver(L)
    x0 = Matrix._trusted(F, (inverse(u) @ a @ inverse(u).T).scale(-F.inv(beta)).rows, SYMMETRIC)
    if swapped:
        x0 = -x0
        phi, psi = psi, phi
    phi_form = CanonicalCongruence(beta, u, x0, PLUS)
    psi_form = phi_form.with_side(MINUS)
    points = 0
    for t, form in ((phi, phi_form), (psi, psi_form)):
        res = check_equal(t, AnalyticMap(form), v)
        points += res.checked
        if not res.ok:
            raise InvariantFailure(f"recovered canonical form disagrees with the input map at {res.witness[0]!r}")
    return SymDecomposition(phi_form, psi_form, path, v, pairs, points, explore, swapped, L)


def decompose_pair_skew(phi: MapTable, psi: MapTable, path: str = PAPER, verification: Verification | None = None,
                        strict: bool = True) -> SkewDecomposition:
    """For even n: check phi == psi and return psi's (bijective, det-preserving) operator."""
    _same_domain(phi, psi)
    sp, F = psi.space, psi.field
    if sp.kind != SKEW_SPACE:
        raise UsageError("decompose_pair_skew works on Q_n")
    if sp.n % 2:
        raise OddDimension("every map on Q_n preserves det for odd n; nothing to decompose")
    if path not in (PAPER, FAST, BOTH):
        raise UsageError(f"unknown path {path!r}")
    explore = _bound_check(sp, F, strict)
    zero = sp.zero(F)
    if psi(zero) != zero:
        raise NonzeroPsiAtZero("psi(0) must be 0")
    v = verification or default_verification(sp, F)
    if psi.is_surjective() is False:
        raise NotSurjective("psi is not surjective")
    pairs = _require_compat(phi, psi, v)

    ops = {}
    if path in (PAPER, BOTH):
        ops[PAPER] = linear_part_via_trace(phi, psi, v)
    if path in (FAST, BOTH):
        ops[FAST] = operator_from_table(psi, v)
    L = ops.get(PAPER) or ops[FAST]
    if len(ops) == 2 and ops[PAPER] != ops[FAST]:
        raise InvariantFailure("paper and fast paths recovered different operators")

    same = check_equal(phi, psi, v)
    if not same.ok:
        raise InvariantFailure(f"phi != psi at {same.witness[0]!r}")
    if not L.is_invertible():
        raise InvariantFailure("recovered operator is not bijective")
    dp = check_det_preserving(psi, v)
    if not dp.ok:
        raise InvariantFailure(f"psi does not preserve det at {dp.witness[0]!r}")
    return SkewDecomposition(L, path, v, pairs, same.checked + dp.checked, explore)


# corollary reductions

@dataclass
class TwistedDecomposition:
    phi_form: CanonicalCongruence
    gamma_form: CanonicalCongruence
    alpha: Scalar
    base: SymDecomposition


def decompose_twisted(phi: MapTable, gamma: MapTable, alpha, **kwargs) -> TwistedDecomposition:
    """For det(phi(x) + alpha gamma(y)) = det(x + alpha y).

    psi = alpha_twist(gamma, alpha) satisfies the untwisted identity; its
    decomposition gives gamma(x) = beta u (x - x0 / alpha) u^T.
    """
    F = gamma.field
    alpha = F(alpha)
    res = decompose_pair_sym(phi, alpha_twist(gamma, alpha), **kwargs)
    g0 = Matrix._trusted(F, res.x0.scale(F.inv(alpha)).rows, SYMMETRIC)
    gamma_form = CanonicalCongruence(res.beta, res.u, g0, MINUS)
    chk = check_equal(gamma, AnalyticMap(gamma_form), res.verification)
    if not chk.ok:
        raise InvariantFailure(f"gamma disagrees with its recovered form at {chk.witness[0]!r}")
    return TwistedDecomposition(res.phi_form, gamma_form, alpha, res)


def decompose_minus_pair(phi: MapTable, psi: MapTable, **kwargs) -> CanonicalCongruence:
    """For det(phi(x) - psi(y)) = det(x - y): phi == psi == beta u (x + x0) u^T."""
    F = phi.field
    res = decompose_twisted(phi, psi, F(-1), **kwargs)
    chk = check_equal(phi, psi, res.base.verification)
    if not chk.ok:
        raise InvariantFailure(f"phi != psi at {chk.witness[0]!r}")
    return res.phi_form


def decompose_two_alphas(phi: MapTable, gamma: MapTable, alpha1, alpha2, **kwargs) -> CanonicalCongruence:
    """For the identity at two distinct nonzero alphas: phi == gamma == beta u x u^T (x0 = 0)."""
    F = phi.field
    alpha1, alpha2 = F(alpha1), F(alpha2)
    if alpha1 == alpha2:
        raise UsageError("the two alphas must be distinct")
    r1 = decompose_twisted(phi, gamma, alpha1, **kwargs)
    r2 = decompose_twisted(phi, gamma, alpha2, **kwargs)
    if r1.phi_form != r2.phi_form:
        raise InvariantFailure("the two twists recovered different data for phi")
    if not r1.phi_form.x0.is_zero():
        raise InvariantFailure("x0 != 0 although the identity holds for two alphas")
    form = r1.phi_form
    chk = check_equal(phi, gamma, r1.base.verification)
    if not chk.ok:
        raise InvariantFailure(f"phi != gamma at {chk.witness[0]!r}")
    return form
