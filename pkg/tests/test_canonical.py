
import pytest
from hypothesis import given, strategies as st

from detpres.canonical import (distinguishing_witness_skew, distinguishing_witness_sym, invertible_spanning_basis,
                               skew_canonical, sym_diagonalize)
from detpres.errors import EqualInputs, FieldTooSmall, NotSkew, NotSymmetric, OddDimension
from detpres.field import QQ, make_field
from detpres.matrix import Matrix, congruence, det, diag, identity, rank, rank_of_rows, skew_unit, sym_unit, unit, zeros
from detpres.space import Space

from conftest import space_points

F3 = make_field("prime", 3)
F5 = make_field("prime", 5)
F17 = make_field("prime", 17)
X = Matrix(F5, [[0, 1], [-1, 0]])


def _is_diag(d):
    return all(d.rows[i][j] == 0 for i in range(d.n) for j in range(d.n) if i != j)


def test_sym_diagonalize_examples():
    z = sym_diagonalize(zeros(F5, 2))
    assert z.p == identity(F5, 2) and z.d == zeros(F5, 2) and z.rank == 0
    f = sym_diagonalize(sym_unit(F5, 2, 1, 2))
    assert congruence(f.p, sym_unit(F5, 2, 1, 2)) == f.d and _is_diag(f.d) and f.rank == 2
    with pytest.raises(NotSymmetric):
        sym_diagonalize(Matrix(F5, [[0, 1], [2, 0]]))


@pytest.mark.parametrize("n,p", [(2, 5), (3, 3)])
def test_sym_diagonalize_exhaustive(n, p):
    F = make_field("prime", p)
    for a in Space("sym", n).elements(F):
        f = sym_diagonalize(a)
        assert congruence(f.p, a) == f.d and _is_diag(f.d) and det(f.p) != 0
        nz = [f.d.rows[i][i] != 0 for i in range(n)]
        assert sum(nz) == f.rank == rank(a)
        assert nz == sorted(nz, reverse=True)  # nonzero entries lead


def test_sym_diagonalize_rational():
    a = Matrix(QQ, [[0, 1, 2], [1, 0, 3], [2, 3, 0]])
    f = sym_diagonalize(a)
    assert congruence(f.p, a) == f.d and _is_diag(f.d) and f.rank == 3


def test_skew_canonical_examples():
    f = skew_canonical(skew_unit(F5, 2, 1, 2))
    assert f.p == identity(F5, 2) and f.d == X and f.rank == 2
    z = skew_canonical(zeros(F5, 4).with_structure("skew"))
    assert z.rank == 0 and z.d.is_zero()
    with pytest.raises(NotSkew):
        skew_canonical(sym_unit(F5, 2, 1, 2))


def test_skew_canonical_exhaustive_q4_gf3():
    by_rank = {}
    for c in Space("skew", 4).elements(F3):
        f = skew_canonical(c)
        assert congruence(f.p, c) == f.d and det(f.p) != 0
        assert f.rank % 2 == 0 and f.rank == rank(c)
        by_rank.setdefault(f.rank, set()).add(f.d)
    # the canonical representative depends only on the rank
    assert sorted(by_rank) == [0, 2, 4] and all(len(v) == 1 for v in by_rank.values())


def test_witness_sym_examples():
    e = identity(F5, 2)
    z = distinguishing_witness_sym(zeros(F5, 2), e)
    assert z.is_zero() and det(z) == 0 and det(e + z) == 1
    b = unit(F5, 2, 1, 1).with_structure("symmetric")
    z = distinguishing_witness_sym(zeros(F5, 2), b)
    assert det(z) == 0 and det(b + z) != 0
    with pytest.raises(EqualInputs):
        distinguishing_witness_sym(e, e)
    with pytest.raises(NotSymmetric):
        distinguishing_witness_sym(Matrix(F5, [[0, 1], [0, 0]]), e)


@given(st.data())
def test_witness_sym_property(data):
    F = data.draw(st.sampled_from([F3, F5, make_field("prime", 7)]))
    sp = Space("sym", data.draw(st.integers(1, 3)))
    a = data.draw(space_points(F, sp))
    b = data.draw(space_points(F, sp))
    if a == b:
        return
    z = distinguishing_witness_sym(a, b)
    assert z.is_symmetric() and det(a + z) != det(b + z)


def test_witness_skew_examples():
    sp = Space("skew", 4)
    b = sp.from_coords(F5, [1, 0, 0, 0, 0, 0])  # diag(x, 0)
    a = sp.zero(F5)
    z = distinguishing_witness_skew(a, b)
    assert det(z) == 0 and det(b - a + z) != 0
    full = sp.from_coords(F5, [1, 0, 0, 0, 0, 1])
    assert distinguishing_witness_skew(a, full).is_zero()
    with pytest.raises(OddDimension):
        distinguishing_witness_skew(Space("skew", 3).zero(F5), Space("skew", 3).from_coords(F5, [1, 0, 0]))
    with pytest.raises(EqualInputs):
        distinguishing_witness_skew(a, a)


@given(st.data())
def test_witness_skew_property(data):
    sp = Space("skew", data.draw(st.sampled_from([2, 4])))
    F = data.draw(st.sampled_from([F3, F5]))
    a, b = data.draw(space_points(F, sp)), data.draw(space_points(F, sp))
    if a == b:
        return
    z = distinguishing_witness_skew(a, b)
    assert z.is_skew() and det(a + z) != det(b + z)


@pytest.mark.parametrize("kind,n,p,size", [("sym", 2, 5, 3), ("skew", 2, 5, 1), ("skew", 4, 17, 6),
                                            ("sym", 3, 5, 6), ("sym", 4, 5, 10)])
def test_invertible_spanning_basis(kind, n, p, size):
    F = make_field("prime", p)
    sp = Space(kind, n)
    basis = invertible_spanning_basis(kind, n, F)
    assert len(basis) == size == sp.dim
    assert all(det(b) != 0 for b in basis)
    assert rank_of_rows(F, [sp.coords(b) for b in basis]) == size
    assert basis == invertible_spanning_basis(sp, None, F)  # deterministic


def test_invertible_spanning_basis_errors():
    with pytest.raises(FieldTooSmall):
        invertible_spanning_basis("sym", 3, F3)
    with pytest.raises(OddDimension):
        invertible_spanning_basis("skew", 3, F5)
    assert len(invertible_spanning_basis("sym", 3, QQ)) == 6


def test_form_json():
    f = sym_diagonalize(diag(F5, [0, 2]))
    assert set(f.to_json()) == {"p", "d", "rank"} and f.to_json()["rank"] == 1
