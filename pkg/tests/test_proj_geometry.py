import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_subspace
from pseudoregulus import _linalg as la
from pseudoregulus.field_tower import ZERO, gf_create
from pseudoregulus.proj_geometry import (
    BudgetExceeded,
    FqLinearSet,
    GeometryError,
    ProjPoint,
    ProjSpace,
    SemilinearMap,
    apply_semilinear,
    enumerate_points,
    format_vector,
    fq_rref_subspaces,
    fq_to_vectors,
    gaussian_binomial,
    intersect,
    is_scattered,
    max_scattered_bound_check,
    parse_vector,
    point_weights,
    row_keys,
    span,
    weight,
    weight_by_counting,
)
from pseudoregulus.pseudoregulus import LinePRSpec, PseudoregulusSpec, build_line_pr, build_pr_linear_set


def _matrix(F, rng, rows, cols):
    return rng.integers(-1, F.mult_order, size=(rows, cols))


# -- linear algebra over the host field -------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (2, 4), (5, 1)]), st.integers(1, 4), st.integers(0, 10**6))
def test_inverse_and_det(pe, n, seed):
    F = gf_create(*pe)
    A = _matrix(F, np.random.default_rng(seed), n, n)
    d = la.det(F, A)
    assert (d == ZERO) == (la.rank(F, A) < n)
    if d != ZERO:
        Ai = la.inverse(F, A)
        assert np.array_equal(la.matmul(F, A, Ai), la.identity(n))
        assert F.mul(d, la.det(F, Ai)) == 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (2, 2)]), st.integers(1, 4), st.integers(1, 5), st.integers(0, 10**6))
def test_rank_nullity(pe, r, c, seed):
    F = gf_create(*pe)
    M = _matrix(F, np.random.default_rng(seed), r, c)
    K = la.kernel(F, M)
    assert la.rank(F, M) + K.shape[0] == c
    if K.shape[0]:
        assert np.all(la.matmul(F, M, K.T) == ZERO)
    R, piv = la.rref(F, M)
    assert len(piv) == la.rank(F, M)
    assert la.same_space(F, la.row_basis(F, M), R[: len(piv)])


# -- projective subspaces --------------------------------------------------------

def test_span_and_intersection():
    F = gf_create(2, 2)
    S = ProjSpace.over(F, 4)
    P, Q = S.point([0, ZERO, ZERO, ZERO]), S.point([ZERO, 0, ZERO, ZERO])
    assert span(P, Q).dim == 1
    H1 = S.subspace([[0, ZERO, ZERO, ZERO], [ZERO, 0, ZERO, ZERO], [ZERO, ZERO, 0, ZERO]])
    H2 = S.subspace([[0, ZERO, ZERO, ZERO], [ZERO, 0, ZERO, ZERO], [ZERO, ZERO, ZERO, 0]])
    assert intersect(H1, H2).dim == 1
    assert intersect(H1, H2) == span(P, Q)
    assert S.num_points == 85 and S.all_points().shape[0] == 85


def test_point_io_round_trip():
    v = parse_vector("0:Z:3")
    assert v.tolist() == [0, ZERO, 3]
    assert format_vector(v) == "0:Z:3"
    F = gf_create(2, 3)
    P = ProjPoint.of(ProjSpace.over(F, 3), [2, 3, ZERO])
    assert P.vector[0] == 0  # leading one
    with pytest.raises(GeometryError):
        ProjSpace.over(F, 3).point([ZERO, ZERO, ZERO])


def test_linear_set_small_examples():
    F = gf_create(2, 3)
    S = ProjSpace.over(F, 2)
    one = FqLinearSet(S, [[0, 1]], 1)
    assert one.size() == 1 and is_scattered(one)
    # an F_{q^t}-line counted over F_q: one point of weight t
    fat = FqLinearSet(S, [[0, ZERO], [1, ZERO], [2, ZERO]], 1)
    assert fat.size() == 1 and not is_scattered(fat)
    assert weight(S.whole(), fat) == 3
    assert weight(S.subspace([[ZERO, 0]]), fat) == 0
    with pytest.raises(GeometryError):
        FqLinearSet(S, [[0, 1], [0, 1]], 1)


def test_maximum_scattered_size_at_rank_six():
    F = gf_create(2, 3)
    L = build_pr_linear_set(PseudoregulusSpec.standard(F, 1, 2))
    assert L.size() == 63 and is_scattered(L)
    assert len(enumerate_points(L)) == 63


def test_random_rank_four_sets_in_v2_f8():
    F = gf_create(2, 3)
    S = ProjSpace(F, 3, 2)
    sizes = set()
    for M in list(fq_rref_subspaces(F, 1, 6, 4))[::37]:
        L = FqLinearSet(S, fq_to_vectors(S, 1, M), 1)
        sizes.add(L.size())
        assert L.size() <= 15 and L.size() % 2 == 1
    assert sizes <= {3, 5, 7, 9}


def test_bound_check_at_r2_q2_t3():
    rep = max_scattered_bound_check(2, 1, 3, gf_create(2, 3))
    assert rep.subspaces == gaussian_binomial(6, 4, 2) == 651
    assert rep.scattered == 0 and rep.holds
    assert rep.witness_found


def test_bound_at_r1():
    # PG(0, q^t) is one point: nothing above rank t/2 is scattered, and here not even rank 2
    rep = max_scattered_bound_check(1, 1, 4, gf_create(2, 4))
    assert rep.rank_checked == 3 and rep.holds and not rep.witness_found


def test_budget_is_enforced():
    F = gf_create(2, 6)
    L = FqLinearSet(ProjSpace.over(F, 4), la.identity(4), 1, budget=8)
    with pytest.raises(BudgetExceeded):
        L.size()
    with pytest.raises(BudgetExceeded):
        list(fq_rref_subspaces(F, 1, 12, 6, cap=10))


def _line_scale_subspaces(F, q_degree, t, k):
    S = ProjSpace(F, q_degree * t, 2)
    for M in fq_rref_subspaces(F, q_degree, 2 * t, k):
        yield FqLinearSet(S, fq_to_vectors(S, q_degree, M), q_degree)


def test_scattered_set_is_not_linear_over_a_larger_subfield():
    # line scale, q = 2, t = 4: the scattered rank-4 set is not F_4-linear of rank 2
    F = gf_create(2, 4)
    L = build_line_pr(LinePRSpec.standard(F, 1))
    assert is_scattered(L) and L.rank == 4
    target = L.point_set()
    S4 = ProjSpace(F, 4, 2)
    count = 0
    for M in fq_rref_subspaces(F, 2, 4, 2):
        count += 1
        assert FqLinearSet(S4, fq_to_vectors(S4, 2, M), 2).point_set() != target
    assert count == gaussian_binomial(4, 2, 4)


# -- invariants ------------------------------------------------------------------

SCENARIOS = [(2, 3, 1, 2), (3, 2, 1, 2), (2, 4, 1, 2), (2, 2, 1, 3), (2, 4, 2, 2)]  # (p, e, q_degree, r)


_random_subspace = random_subspace


@pytest.mark.parametrize("p,e,qd,r", SCENARIOS)
def test_size_bound_and_congruence_on_random_subspaces(p, e, qd, r):
    F = gf_create(p, e)
    space = ProjSpace(F, e, r)
    q = p**qd
    rng = np.random.default_rng(1000 * p + e)
    for _ in range(1000):
        L = _random_subspace(F, space, qd, rng)
        n = L.size()
        assert n <= (q**L.rank - 1) // (q - 1)
        assert n % q == 1 % q


@pytest.mark.parametrize("p,e,qd,r", SCENARIOS[:4])
def test_point_weights_account_for_every_vector(p, e, qd, r):
    F = gf_create(p, e)
    space = ProjSpace(F, e, r)
    rng = np.random.default_rng(7)
    for _ in range(20):
        L = _random_subspace(F, space, qd, rng)
        w = point_weights(L)
        assert sum(L.q**x - 1 for x in w.values()) == L.q**L.rank - 1
        assert set(w) == L.point_set()
        for row in L.points()[:5]:
            P = space.subspace([row])
            assert weight(P, L) == w[int(row_keys(F, row[None, :])[0])] == weight_by_counting(P, L)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 5))
def test_semilinear_maps_preserve_weights(seed, j):
    F = gf_create(2, 3)
    space = ProjSpace.over(F, 3)
    rng = np.random.default_rng(seed)
    L = _random_subspace(F, space, 1, rng)
    while True:
        A = rng.integers(-1, 7, size=(3, 3))
        if la.rank(F, A) == 3:
            break
    M = SemilinearMap(space, A, j)
    LM = apply_semilinear(M, L)
    # image point set is the set of images of points
    got = {P for P in enumerate_points(LM)}
    want = {apply_semilinear(M, P) for P in enumerate_points(L)}
    assert got == want
    W = space.subspace(rng.integers(-1, 7, size=(2, 3)))
    assert weight(apply_semilinear(M, W), LM) == weight(W, L)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 8), st.integers(0, 8))
def test_semilinear_composition(seed, j1, j2):
    F = gf_create(3, 2)
    space = ProjSpace.over(F, 2)
    rng = np.random.default_rng(seed)
    mats = []
    while len(mats) < 2:
        A = rng.integers(-1, 8, size=(2, 2))
        if la.rank(F, A) == 2:
            mats.append(A)
    M1, M2 = SemilinearMap(space, mats[0], j1), SemilinearMap(space, mats[1], j2)
    P = space.point(rng.integers(0, 8, size=2))
    assert apply_semilinear(M1, apply_semilinear(M2, P)) == apply_semilinear(M1.compose(M2), P)
    assert apply_semilinear(M1.inverse(), apply_semilinear(M1, P)) == P
    assert apply_semilinear(SemilinearMap.identity(space), P) == P
    assert M1.compose(M2).frob_exp == (j1 + j2) % F.e


def test_gaussian_binomial_matches_enumeration():
    F = gf_create(3, 1)
    assert sum(1 for _ in fq_rref_subspaces(F, 1, 4, 2)) == gaussian_binomial(4, 2, 3) == 130
