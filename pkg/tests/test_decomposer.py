import random

import pytest
from hypothesis import given, strategies as st

from detpres.decomposer import (BOTH, PAPER, adjugate_series, chi_functional, decompose_minus_pair,
                                decompose_pair_skew, decompose_pair_sym, decompose_twisted, decompose_two_alphas,
                                factor_linear_sym_preserver, recover_cofactor_polys, series_residual)
from detpres.errors import (DetCompatViolated, FieldTooSmall, NonzeroPsiAtZero, NotCongruenceForm, NotSurjective,
                            OddDimension, SingularInput, UsageError)
from detpres.field import QQ, make_field
from detpres.harness.suites import random_unimodular_congruence
from detpres.maps import (AnalyticMap, CanonicalCongruence, FunctionMap, ShiftedMap, canonical_pair, identity_map,
                          random_canonical)
from detpres.matrix import Matrix, cofactor, congruence, det, diag, identity, inverse, trace
from detpres.space import Space
from detpres.trace_pack import LinearOperator
from detpres.verify import check_equal, sampled

F3 = make_field("prime", 3)
F5 = make_field("prime", 5)
F7 = make_field("prime", 7)
F11 = make_field("prime", 11)
F17 = make_field("prime", 17)
SIG2 = Space("sym", 2)


def _pair(sp, F, seed, with_x0=True):
    form = random_canonical(sp, F, random.Random(seed), with_x0=with_x0)
    phi, psi = canonical_pair(form.beta, form.u, form.x0)
    return form, phi, psi


def _shifted(phi, psi):
    a = psi(psi.space.zero(psi.field))
    return ShiftedMap(phi, a), ShiftedMap(psi, -a)


# cofactor polynomials


def test_cofactor_polys_identity_examples():
    ident = identity_map(SIG2, F5)
    bundle = recover_cofactor_polys(ident, ident, identity(F5, 2))
    assert bundle.polys[0][0].coeffs == (0, 1)  # alpha
    assert bundle.polys[0][1].is_zero() and bundle.polys[1][0].is_zero()


def test_cofactor_polys_match_direct_cofactors_exhaustive():
    """Direct oracle: cofactors of phi(alpha a) computed from the closed form, all invertible a."""
    form, phi, psi = _pair(SIG2, F5, 11, with_x0=False)
    for a in SIG2.elements(F5):
        if det(a) == 0:
            continue
        bundle = recover_cofactor_polys(None, psi, a)
        for al in range(5):
            m = form(a.scale(al))
            for i in range(2):
                for j in range(2):
                    assert bundle.polys[i][j](al) == cofactor(m, i + 1, j + 1)
                    assert bundle.polys[i][j].degree <= 1


def test_cofactor_polys_skew_antisymmetric():
    sp = Space("skew", 4)
    pm = random_unimodular_congruence(F17, 4, random.Random(2))
    t = AnalyticMap(CanonicalCongruence(1, pm, sp.zero(F17)))
    a = sp.unit_element(F17)
    bundle = recover_cofactor_polys(t, t, a)
    for i in range(4):
        assert bundle.polys[i][i].is_zero()
        for j in range(4):
            assert bundle.polys[i][j] == -bundle.polys[j][i]


def test_cofactor_check_detects_incompatible_phi():
    _, phi, psi = _pair(SIG2, F7, 3)
    phi0, psi0 = _shifted(phi, psi)
    wrong = FunctionMap(SIG2, F7, lambda x: phi0(x).scale(2))
    with pytest.raises(DetCompatViolated):
        recover_cofactor_polys(wrong, psi0, identity(F7, 2).with_structure("symmetric"))


# adjugate series and chi


def test_adjugate_series_identity_examples():
    ident = identity_map(SIG2, F5)
    e = identity(F5, 2).with_structure("symmetric")
    s = adjugate_series(ident, ident, e)
    assert s.chis[0] == e and s.chis[1].is_zero()
    a = diag(F5, [1, 2]).with_structure("symmetric")
    s = adjugate_series(ident, ident, a)
    assert s.chis[0] == inverse(a) and s.chis[1].is_zero()
    with pytest.raises(SingularInput):
        adjugate_series(ident, ident, diag(F5, [1, 0]).with_structure("symmetric"))


@pytest.mark.parametrize("n,p,seed", [(2, 5, 0), (2, 7, 1), (3, 11, 2), (3, 11, 3)])
def test_adjugate_series_identity_at_every_alpha(n, p, seed):
    F = make_field("prime", p)
    sp = Space("sym", n)
    _, phi, psi = _pair(sp, F, seed)
    phi0, psi0 = _shifted(phi, psi)
    rng = random.Random(seed)
    a = next(x for x in (sp.from_coords(F, [F.random(rng) for _ in range(sp.dim)]) for _ in range(100))
             if det(x) != 0)
    s = adjugate_series(phi0, psi0, a)
    y = sp.from_coords(F, [F.random(rng) for _ in range(sp.dim)])
    for al in range(1, p):
        assert inverse(phi0(a.scale(F.inv(al)))) == s(al)
    for al in range(p):
        assert series_residual(s, psi0, y, al) == 0


def test_chi_identity_example():
    ident = identity_map(SIG2, F5)
    for x in SIG2.elements(F5):
        if det(x) != 0:
            assert chi_functional(ident, ident, x) == x
    with pytest.raises(SingularInput):
        chi_functional(ident, ident, SIG2.zero(F5))


def test_chi_trace_identity_exhaustive_sigma2_gf5():
    _, phi, psi = _pair(SIG2, F5, 7)
    phi0, psi0 = _shifted(phi, psi)
    pts = list(SIG2.elements(F5))
    for x in pts:
        if det(x) == 0:
            continue
        c = chi_functional(phi0, psi0, x)
        for y in pts:
            assert trace(x @ y) == trace(c @ psi0(y))


# factorization


def test_factor_identity():
    beta, u = factor_linear_sym_preserver(LinearOperator.from_function(SIG2, F5, lambda x: x))
    assert beta == 1 and u == identity(F5, 2)


def test_factor_example_gauge_equivalent():
    u0 = Matrix(F5, [[1, 1], [0, 1]])
    L = LinearOperator.from_function(SIG2, F5, lambda x: congruence(u0, x))
    beta, u = factor_linear_sym_preserver(L)
    for x in SIG2.elements(F5):
        assert (u @ x @ u.T).scale(beta) == L(x)


def test_factor_rejects_non_preserver():
    e = identity(F5, 2).with_structure("symmetric")
    L = LinearOperator.from_function(SIG2, F5, lambda x: x + e.scale(trace(x)))
    with pytest.raises(NotCongruenceForm):
        factor_linear_sym_preserver(L)
    with pytest.raises(UsageError):
        factor_linear_sym_preserver(LinearOperator.from_function(Space("skew", 2), F5, lambda x: x))


@given(st.data())
def test_factor_recovers_gauge_fixed_data(data):
    F = data.draw(st.sampled_from([F5, F7, F11]))
    sp = Space("sym", data.draw(st.integers(1, 4)))
    form = random_canonical(sp, F, random.Random(data.draw(st.integers(0, 10 ** 6))), with_x0=False)
    lam = data.draw(st.integers(1, F.order - 1))
    # present the same map with a different gauge
    shown = CanonicalCongruence(F(form.beta * F.inv(lam * lam)), form.u.scale(lam), form.x0)
    L = LinearOperator.from_function(sp, F, shown)
    beta, u = factor_linear_sym_preserver(L)
    g = form.gauge_fixed()
    assert (beta, u) == (g.beta, g.u)


# symmetric pipeline


def test_decompose_identity():
    ident = identity_map(SIG2, F5)
    r = decompose_pair_sym(ident, ident)
    assert r.beta == 1 and r.u == identity(F5, 2) and r.x0.is_zero()
    out = r.to_json()
    assert out["gauge"] == "row-major-first-1" and out["verified"]["mode"] == "exhaustive"
    assert out["verified"]["pairs_checked"] == 125 ** 2 and out["path"] == PAPER


@pytest.mark.parametrize("seed", range(6))
def test_decompose_round_trip_gf5(seed):
    form, phi, psi = _pair(SIG2, F5, seed)
    r = decompose_pair_sym(phi, psi, BOTH)
    assert r.phi_form == form.gauge_fixed()
    assert check_equal(AnalyticMap(r.phi_form), phi).ok and check_equal(AnalyticMap(r.psi_form), psi).ok
    # materialized tables give the same gauge-fixed answer
    r2 = decompose_pair_sym(phi.materialize(), psi.materialize(), PAPER)
    assert r2.phi_form == r.phi_form


def test_decompose_n3_gf11_sampled():
    form, phi, psi = _pair(Space("sym", 3), F11, 5)
    r = decompose_pair_sym(phi, psi, BOTH, sampled(10_000, 5))
    assert r.phi_form == form.gauge_fixed() and r.pairs_checked == 10_000


def test_decompose_rational():
    form, phi, psi = _pair(SIG2, QQ, 4)
    r = decompose_pair_sym(phi, psi, BOTH, sampled(300, 1))
    assert r.phi_form == form.gauge_fixed()


def test_decompose_strict_and_explore():
    ident = identity_map(SIG2, F3)
    with pytest.raises(FieldTooSmall):
        decompose_pair_sym(ident, ident)
    r = decompose_pair_sym(ident, ident, strict=False)
    assert r.exploration and r.to_json()["exploration"] is True


def test_decompose_errors():
    ident = identity_map(SIG2, F5)
    form, phi, psi = _pair(SIG2, F5, 1)
    with pytest.raises(DetCompatViolated) as info:
        decompose_pair_sym(phi, ident)
    x, y = info.value.witness
    assert det(phi(x) + y) != det(x + y)
    e11 = SIG2.from_coords(F5, [1, 0, 0])
    stuck = ident.materialize().with_entry(e11, SIG2.zero(F5))
    with pytest.raises(NotSurjective):
        decompose_pair_sym(stuck, stuck)
    with pytest.raises(UsageError):
        decompose_pair_sym(ident, ident, path="scenic")
    with pytest.raises(UsageError):
        decompose_pair_sym(ident, identity_map(Space("sym", 3), F5))


class _ClaimsNotSurjective(AnalyticMap):
    def is_surjective(self):
        return False


def test_decompose_swaps_when_only_phi_is_surjective():
    form, phi, psi = _pair(SIG2, F7, 8)
    r = decompose_pair_sym(phi, _ClaimsNotSurjective(psi.form))
    assert r.swapped and r.phi_form == form.gauge_fixed()
    assert r.to_json()["swapped"] is True


# skew pipeline


def test_decompose_skew_identity():
    sp = Space("skew", 4)
    ident = identity_map(sp, F17)
    r = decompose_pair_skew(ident, ident, verification=sampled(2000, 0))
    assert r.operator.q == identity(F17, 6)


@pytest.mark.parametrize("seed", range(3))
def test_decompose_skew_congruence(seed):
    sp = Space("skew", 4)
    pm = random_unimodular_congruence(F17, 4, random.Random(seed))
    assert det(pm) ** 2 % 17 == 1
    t = AnalyticMap(CanonicalCongruence(1, pm, sp.zero(F17)))
    r = decompose_pair_skew(t, t, BOTH, sampled(10_000, seed))
    assert r.operator == LinearOperator.from_function(sp, F17, lambda x: congruence(pm, x))
    assert r.operator.is_invertible()


def test_decompose_skew_errors():
    sp = Space("skew", 2)
    ident = identity_map(sp, F5)
    shifted = ShiftedMap(ident, sp.from_coords(F5, [1]))
    with pytest.raises(NonzeroPsiAtZero):
        decompose_pair_skew(ident, shifted)
    odd = identity_map(Space("skew", 3), F11)
    with pytest.raises(OddDimension):
        decompose_pair_skew(odd, odd)
    neg = FunctionMap(sp, F5, lambda x: x.scale(2))
    with pytest.raises(DetCompatViolated):
        decompose_pair_skew(neg, ident)
    with pytest.raises(UsageError):
        decompose_pair_skew(identity_map(SIG2, F5), identity_map(SIG2, F5))


def test_decompose_skew_n2_exhaustive():
    sp = Space("skew", 2)
    minus = AnalyticMap(CanonicalCongruence(1, Matrix(F5, [[0, 1], [1, 0]]), sp.zero(F5)))
    r = decompose_pair_skew(minus, minus)
    assert r.operator.q == Matrix(F5, [[4]])


# corollary reductions


def test_twisted_decomposition():
    form, phi, _ = _pair(SIG2, F7, 9)
    alpha = 3
    gamma_form = CanonicalCongruence(form.beta, form.u, form.x0.scale(F7.inv(alpha)), "minus")
    gamma = AnalyticMap(gamma_form)
    r = decompose_twisted(phi, gamma, alpha)
    assert r.phi_form == form.gauge_fixed()
    assert check_equal(AnalyticMap(r.gamma_form), gamma).ok


def test_minus_pair():
    form, phi, _ = _pair(SIG2, F7, 10)
    out = decompose_minus_pair(phi, phi)
    assert out == form.gauge_fixed()


def test_two_alphas_force_zero_shift():
    form, _, _ = _pair(SIG2, F7, 12, with_x0=False)
    g = AnalyticMap(form)
    out = decompose_two_alphas(g, g, 1, 2)
    assert out.x0.is_zero() and out == form.gauge_fixed()
    with pytest.raises(UsageError):
        decompose_two_alphas(g, g, 3, 3)
    # with x0 != 0 the identity fails at one of the alphas
    f2, phi, _ = _pair(SIG2, F7, 13)
    assert not f2.x0.is_zero()
    with pytest.raises(DetCompatViolated):
        decompose_two_alphas(phi, phi, 1, 2)
