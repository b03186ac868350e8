import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detpres.canonical import invertible_spanning_basis
from detpres.errors import NotLinear, NotLinearOnTable, TraceHypothesisViolated, UsageError, WrongStructure
from detpres.field import make_field
from detpres.maps import FunctionMap, TableMap, identity_map, random_invertible
from detpres.matrix import Matrix, congruence, matrix, det, identity, inverse, symplectic_unit
from detpres.space import Space
from detpres.trace_pack import (LinearOperator, PackedVector, extract_linear_via_trace, operator_from_table,
                                pack_col, pack_row, pairing, unpack)

from conftest import space_points

F3 = make_field("prime", 3)
F5 = make_field("prime", 5)
F7 = make_field("prime", 7)
SIG2 = Space("sym", 2)


def trace_of_product(a, b):
    n = a.n
    return a.field(sum(a.rows[i][k] * b.rows[k][i] for i in range(n) for k in range(n)))


def test_packing_examples():
    a = matrix(F5, [[1, 2], [2, 3]])
    assert pack_col(a).coords == (1, 2, 3)
    assert pack_row(a).coords == (1, 4, 3)
    for t in range(5):
        x = symplectic_unit(F5, 2).scale(t)
        assert pack_row(x).coords == (t,) and pack_col(x).coords == (F5(-t),)
    with pytest.raises(WrongStructure):
        pack_row(Matrix(F5, [[1, 2], [3, 4]]))


@pytest.mark.parametrize("kind,n,p", [("sym", 2, 5), ("skew", 3, 3), ("skew", 4, 3)])
def test_unpack_inverts_both_packings(kind, n, p):
    F = make_field("prime", p)
    sp = Space(kind, n)
    seen = set()
    for a in sp.elements(F):
        assert unpack(pack_col(a), F) == a and unpack(pack_row(a), F) == a
        seen.add(pack_col(a).coords)
    assert len(seen) == p ** sp.dim  # bijective onto F^m


def test_pairing_examples():
    assert pairing(identity(F5, 2).with_structure("symmetric"), identity(F5, 2).with_structure("symmetric")) == 2
    x = symplectic_unit(F5, 2)
    assert pairing(x, x) == F5(-1) == F5(trace_of_product(x, x) * F5.inv(2))


def test_pairing_equals_trace_exhaustive_sigma2_gf5():
    pts = list(SIG2.elements(F5))
    for a, b in itertools.product(pts, repeat=2):
        assert pairing(a, b) == trace_of_product(a, b)


def test_pairing_half_trace_exhaustive_q3_gf3():
    pts = list(Space("skew", 3).elements(F3))
    for a, b in itertools.product(pts, repeat=2):
        assert F3(2 * pairing(a, b)) == trace_of_product(a, b)


@given(st.data())
def test_pairing_property_larger(data):
    kind = data.draw(st.sampled_from(["sym", "skew"]))
    sp = Space(kind, data.draw(st.integers(2, 5)))
    a, b = data.draw(space_points(F7, sp)), data.draw(space_points(F7, sp))
    factor = 1 if kind == "sym" else 2
    assert F7(factor * pairing(a, b)) == trace_of_product(a, b)


def test_packed_vector_dot_checks_space():
    with pytest.raises(WrongStructure):
        PackedVector(SIG2, (1, 2, 3), "row").dot(PackedVector(Space("sym", 3), (1,) * 6, "col"), F5)


def _congruence_map(sp, F, p):
    return FunctionMap(sp, F, lambda y: congruence(p, y))


def test_extract_identity():
    basis = invertible_spanning_basis(SIG2, None, F5)
    op = extract_linear_via_trace(identity_map(SIG2, F5), {x: x for x in basis}, basis, SIG2.basis(F5))
    assert op.q == identity(F5, 3)


@pytest.mark.parametrize("kind,n,p", [("sym", 2, 5), ("sym", 3, 5), ("skew", 4, 5)])
def test_extract_congruence_map(kind, n, p):
    F = make_field("prime", p)
    sp = Space(kind, n)
    pm = random_invertible(F, n, random.Random(n * p))
    pinvT = inverse(pm).T
    # tr(x y) = tr(chi(x) p y p^T) for chi(x) = p^-T x p^-1
    chi = {}
    basis = invertible_spanning_basis(sp, None, F)
    for x in basis:
        chi[x] = congruence(pinvT, x)
    psi = _congruence_map(sp, F, pm)
    op = extract_linear_via_trace(psi, list(chi.items()), basis, sp.basis(F))
    direct = LinearOperator.from_images(sp, F, [congruence(pm, y) for y in sp.basis(F)])
    assert op == direct == operator_from_table(psi.materialize())


def test_extract_rejects_nonlinear_table():
    basis = invertible_spanning_basis(SIG2, None, F5)
    t = identity_map(SIG2, F5).materialize()
    a, b = SIG2.from_coords(F5, [1, 1, 2]), SIG2.from_coords(F5, [3, 0, 1])
    swapped = t.with_entry(a, b).with_entry(b, a)
    with pytest.raises((TraceHypothesisViolated, NotLinearOnTable)):
        extract_linear_via_trace(swapped, {x: x for x in basis}, basis, SIG2.basis(F5))
    # swapping a standard basis image breaks the probe identity itself
    e1, e2 = SIG2.basis(F5)[:2]
    with pytest.raises(TraceHypothesisViolated):
        extract_linear_via_trace(t.with_entry(e1, e2).with_entry(e2, e1), {x: x for x in basis}, basis,
                                 SIG2.basis(F5))


def test_extract_rejects_bad_basis():
    basis = invertible_spanning_basis(SIG2, None, F5)
    with pytest.raises(UsageError):
        extract_linear_via_trace(identity_map(SIG2, F5), {x: x for x in basis}, [basis[0]] * 3, SIG2.basis(F5))
    with pytest.raises(UsageError):
        extract_linear_via_trace(identity_map(SIG2, F5), {x: x for x in basis}, basis[:2], SIG2.basis(F5))


def test_operator_from_table():
    assert operator_from_table(identity_map(SIG2, F5)).q == identity(F5, 3)
    const = TableMap(SIG2, F5, np.tile([1, 0, 0], (125, 1)))
    with pytest.raises(NotLinear):
        operator_from_table(const)


def test_linear_operator_json_and_apply():
    q = Matrix(F5, [[1, 2, 0], [0, 1, 0], [3, 0, 1]])
    op = LinearOperator(SIG2, q)
    assert LinearOperator.from_json(op.to_json()) == op
    a = SIG2.from_coords(F5, [1, 1, 1])
    assert SIG2.coords(op(a)) == (3, 1, 4)
    assert op.is_invertible() == (det(q) != 0)
    assert op.to_numpy().shape == (3, 3)
