import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudoregulus import _linalg as la
from pseudoregulus.field_tower import ZERO, gf_create
from pseudoregulus.proj_geometry import BudgetExceeded, row_keys
from pseudoregulus.segre import (
    EndSpace,
    HElement,
    SegreError,
    adjoint_checks,
    build_segre,
    d_subspace_witness,
    h_act,
    identity_space,
    is_d_subspace,
    qpoly_compose,
    qpoly_eval,
    qpoly_rank,
    quadric_form_check,
    random_h_element,
    segre_checks,
    segre_element,
    system_member,
    trace_form,
    upsilon,
    upsilon2,
    upsilon_checks,
)


def _end(n, q_p, h=1):
    return EndSpace(gf_create(q_p, h * n), h)


def test_scalar_maps_have_full_rank_and_segre_elements_rank_one():
    E = _end(2, 3)
    for lam in range(E.field.mult_order):
        assert qpoly_rank(E.t(lam)) == 2
    for lam, mu in itertools.product(range(8), repeat=2):
        assert qpoly_rank(segre_element(E, lam, mu)) == 1


def test_composition_matches_evaluation_exhaustively():
    E = _end(2, 3)
    xs = np.array([ZERO] + list(range(E.field.mult_order)))
    rng = np.random.default_rng(0)
    polys = [E.qpoly(rng.integers(-1, E.field.mult_order, 2)) for _ in range(30)]
    for a, b in zip(polys, polys[1:]):
        assert np.array_equal(qpoly_eval(qpoly_compose(a, b), xs), a.eval(b.eval(xs)))


def test_matrix_round_trip():
    E = _end(3, 2)
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = E.qpoly(rng.integers(-1, E.field.mult_order, 3))
        assert E.from_matrix(p.matrix()) == p
        assert p.rank() == la.rank(E.field, p.matrix())


@pytest.mark.parametrize("n,q,size,members", [(2, 3, 16, 4), (3, 2, 49, 7), (2, 2, 9, 3)])
def test_segre_variety(n, q, size, members):
    S = build_segre(n, q)
    c = segre_checks(S)
    assert c["constructions_agree"]
    assert c["size"] == c["expected_size"] == size
    assert c["system_sizes"] == (members, members)
    for key in ("members_are_maximal_spaces", "members_on_variety", "skew_within", "one_point_across",
                "partition", "omega_contains_segre"):
        assert c[key], key
    assert c["omega_size"] == c["expected_omega_size"]


def test_systems_meet_in_the_expected_point():
    E = _end(2, 3)
    for lam, mu in [(0, 1), (2, 5), (3, 3)]:
        meet = set(int(k) for k in row_keys(E.field, system_member(E, lam, 1).points())) & set(
            int(k) for k in row_keys(E.field, system_member(E, mu, 2).points()))
        assert meet == {int(row_keys(E.field, E.points_of(segre_element(E, mu, lam)))[0])}


def test_segre_rejects_bad_input():
    with pytest.raises(SegreError):
        build_segre(1, 3)
    with pytest.raises(BudgetExceeded):
        build_segre(3, 4, budget=1000)


def test_adjoint_exhaustive_n2_q3():
    c = adjoint_checks(_end(2, 3))
    assert all(c.values()), c


def test_adjoint_random_n3_q2():
    c = adjoint_checks(_end(3, 2), trials=100, seed=3)
    assert all(c.values()), c


def test_adjoint_fixes_scalars_and_bilinear_identity():
    E = _end(2, 3)
    xs, ys = np.meshgrid(np.arange(-1, 8), np.arange(-1, 8), indexing="ij")
    xs, ys = xs.reshape(-1), ys.reshape(-1)
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = E.qpoly(rng.integers(-1, E.field.mult_order, 2))
        assert np.array_equal(trace_form(E, p.eval(xs), ys), trace_form(E, xs, p.adjoint().eval(ys)))
    assert E.t(5).adjoint() == E.t(5)


def test_upsilon_examples():
    E = _end(2, 3)
    p = E.qpoly([5, 7])
    assert upsilon(p, 0) == p
    img = E.subspace([upsilon(E.from_matrix(m)) for m in E.unflatten(identity_space(E).basis)])
    assert img == identity_space(E, 1)  # lambda x^q
    E3 = _end(3, 2)
    I = identity_space(E3)
    for i in range(3):
        assert E3.subspace([upsilon2(E3.from_matrix(m), i) for m in E3.unflatten(I.basis)]) == identity_space(E3, 3 - i)


@pytest.mark.parametrize("n,q", [(2, 3), (2, 2), (3, 2)])
def test_upsilon_structure(n, q):
    c = upsilon_checks(_end(n, q))
    assert all(c.values()), c


def test_h_identity_and_transpose():
    E = _end(2, 3)
    I = identity_space(E)
    assert h_act(HElement.identity(E), I) == I
    T = HElement.transposition(E)
    S = build_segre(2, 3)
    R1 = {X.key() for X in S.R1}
    R2 = {X.key() for X in S.R2}
    assert {h_act(T, X).key() for X in S.R1} == R2
    assert {h_act(T, X).key() for X in S.R2} == R1


def test_h_entries_must_lie_in_the_coordinate_field():
    E = _end(2, 3)
    with pytest.raises(Exception):
        HElement(E, np.array([[1, ZERO], [ZERO, 0]]), la.identity(2))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (2, 2)]), st.integers(0, 10**6))
def test_d_subspaces_avoid_the_secant_variety(nq, seed):
    E = _end(*nq)
    h = random_h_element(E, np.random.default_rng(seed), transpose=False)
    X = h_act(h, identity_space(E))
    mats = E.unflatten(X.points())
    assert np.all(E.dets(mats) != ZERO)
    w = d_subspace_witness(E, X)
    assert w is not None and h_act(w, identity_space(E)) == X


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_transposing_elements_swap_the_systems(seed):
    E = _end(2, 3)
    h = random_h_element(E, np.random.default_rng(seed), transpose=True)
    S = build_segre(2, 3)
    R2 = {X.key() for X in S.R2}
    assert all(h_act(h, X).key() in R2 for X in S.R1)
    g = random_h_element(E, np.random.default_rng(seed + 1), transpose=False)
    R1 = {X.key() for X in S.R1}
    assert all(h_act(g, X).key() in R1 for X in S.R1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_h_group_laws(seed):
    E = _end(2, 3)
    rng = np.random.default_rng(seed)
    a, b = random_h_element(E, rng), random_h_element(E, rng)
    p = E.qpoly(rng.integers(-1, E.field.mult_order, 2))
    assert h_act(a.then(b), p) == h_act(b, h_act(a, p))
    assert h_act(a.inverse(), h_act(a, p)) == p
    assert h_act(a, p).rank() == p.rank()


def test_non_d_subspace_rejected():
    E = _end(2, 3)
    # a line of the Segre variety is not a D-subspace
    assert not is_d_subspace(E, system_member(E, 0, 1))


def test_quadric_form_check_q3():
    c = quadric_form_check(3)
    assert c["points"] == 40 and c["zero_set_size"] == 16
    assert all(v for k, v in c.items() if k not in ("points", "zero_set_size")), c
