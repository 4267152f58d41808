import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudoregulus import _linalg as la
from pseudoregulus.proj_geometry import ProjSubspace, is_scattered, span
from pseudoregulus.pseudoregulus import (
    PseudoregulusSpec,
    build_pr_linear_set,
    detect_pseudoregulus,
)
from pseudoregulus.subgeometry import (
    DesarguesianSpread,
    ProjectionSpec,
    SubgeometryError,
    canonical_subgeometry,
    construct_by_projection,
    default_director,
    director_orbit,
    director_problems,
    field_reduction_spread,
    find_directors,
    project,
    recover_spread,
    spread_from_director,
)


def test_canonical_subgeometry_fixed_points():
    G = canonical_subgeometry(2, 3, 2)
    pts = G.fixed_points()
    assert pts.shape[0] == G.num_fixed_points() == 63
    # every fixed point is fixed by Psi
    assert np.array_equal(G.psi_rows(pts), pts)
    with pytest.raises(SubgeometryError):
        canonical_subgeometry(2, 1, 2)


def test_psi_has_order_t():
    G = canonical_subgeometry(2, 3, 2)
    rng = np.random.default_rng(0)
    V = rng.integers(-1, G.field.mult_order, size=(100, G.space.r))
    assert np.array_equal(G.psi_rows(V, G.t), V)


@pytest.mark.parametrize("n,t,q", [(2, 3, 2), (2, 3, 3), (2, 4, 2)])
def test_spread_from_director(n, t, q):
    G = canonical_subgeometry(n, t, q)
    D = spread_from_director(default_director(G), G)
    assert len(D) == (q ** (n * t) - 1) // (q**t - 1)
    assert D.validate() == []
    assert all(X.vdim == t for X in D.elements)


def test_degenerate_director_rejected():
    G = canonical_subgeometry(2, 3, 2)
    # a space spanned by subgeometry points is Psi-stable, so its conjugates span nothing new
    Th = ProjSubspace.of(G.space, la.identity(6)[:2])
    with pytest.raises(SubgeometryError):
        spread_from_director(Th, G)


def test_field_reduction_spread_has_a_director():
    D = field_reduction_spread(2, 3, 2)
    assert len(D) == 9 and D.validate() == []
    dirs = find_directors(D)
    assert len(dirs) == 3  # one Psi-orbit of t directors
    D2 = DesarguesianSpread(D.elements, dirs[0], "check", D.geometry)
    assert D2.validate() == []
    assert spread_from_director(dirs[0], D.geometry).keyset() == D.keyset()


def test_director_problems_flag_bad_candidates():
    G = canonical_subgeometry(2, 3, 2)
    D = spread_from_director(default_director(G), G)
    assert director_problems(default_director(G), D) == []
    bad = ProjSubspace.of(G.space, la.identity(6)[:2])
    assert director_problems(bad, D)


def test_projection_with_empty_center_is_the_subgeometry():
    G = canonical_subgeometry(2, 3, 2)
    spec = ProjectionSpec(G, G.space.empty(), la.identity(6))
    L = project(G, spec)
    assert L.rank == 6 and L.size() == G.num_fixed_points()


def test_projection_from_conjugate_director():
    G = canonical_subgeometry(2, 3, 2)
    Th = default_director(G)
    R = construct_by_projection(Th, G, 0, 1)
    assert R.pr_type and R.s == 1
    L = R.linear_set
    assert L.rank == 6 and L.size() == 63 and is_scattered(L)
    assert L.same_points(build_pr_linear_set(PseudoregulusSpec.standard(G.field, 1, 2, 1)))
    r = detect_pseudoregulus(L)
    got = {R.spec.lift_subspace(T).key() for T in (r.pseudoregulus.T1, r.pseudoregulus.T2)}
    assert got == {G.psi_space(Th, 0).key(), G.psi_space(Th, 1).key()}


def test_both_coprime_index_pairs_give_pseudoregulus_type():
    G = canonical_subgeometry(2, 3, 2)
    Th = default_director(G)
    for i1, i2 in [(0, 1), (1, 2)]:
        R = construct_by_projection(Th, G, i1, i2)
        assert R.pr_type
        assert detect_pseudoregulus(R.linear_set).kind == "pseudoregulus"


def test_non_coprime_projection_at_t4():
    G = canonical_subgeometry(2, 4, 2)
    R = construct_by_projection(default_director(G), G, 0, 2)
    assert R.s == 2 and not R.pr_type
    assert R.linear_set.size() % 4 == 1


def test_bad_indices():
    G = canonical_subgeometry(2, 3, 2)
    with pytest.raises(SubgeometryError):
        construct_by_projection(default_director(G), G, 1, 1)
    with pytest.raises(SubgeometryError):
        construct_by_projection(default_director(G), G, 0, 3)


@pytest.mark.parametrize("n,t,q", [(2, 3, 2), (2, 3, 3), (2, 4, 2)])
def test_recover_spread_round_trip(n, t, q):
    G = canonical_subgeometry(n, t, q)
    Th = default_director(G)
    R = construct_by_projection(Th, G, 0, 1)
    r = detect_pseudoregulus(R.linear_set)
    rec = recover_spread(R.linear_set, R.spec, G, r.pseudoregulus)
    assert rec.spread.keyset() == spread_from_director(Th, G).keyset()
    assert rec.spread.validate() == []
    assert all(G.psi_space(X) == X for X in rec.spread.elements)
    assert math.gcd(rec.m, t) == 1
    assert rec.gamma_decomposition_ok
    assert {d.key() for d in rec.directors_found} == {x.key() for x in director_orbit(Th, G)}


def test_center_is_a_single_conjugate_at_t3():
    G = canonical_subgeometry(2, 3, 2)
    Th = default_director(G)
    R = construct_by_projection(Th, G, 0, 1)
    assert R.spec.center == G.psi_space(Th, 2)
    r = detect_pseudoregulus(R.linear_set)
    rec = recover_spread(R.linear_set, R.spec, G, r.pseudoregulus)
    assert span(rec.theta_bar) == R.spec.center


@pytest.mark.parametrize("t", [3, 4, 5])
def test_every_coprime_projection_is_a_standard_set(t):
    G = canonical_subgeometry(2, t, 2)
    Th = default_director(G)
    for a in range(t):
        for b in range(t):
            if a != b and math.gcd(b - a, t) == 1:
                spec = PseudoregulusSpec.standard(G.field, 1, 2, (b - a) % t)
                assert construct_by_projection(Th, G, a, b).linear_set.same_points(build_pr_linear_set(spec))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_random_directors_give_valid_spreads(seed):
    G = canonical_subgeometry(2, 3, 2)
    rng = np.random.default_rng(seed)
    while True:
        rows = rng.integers(-1, G.field.mult_order, size=(2, 6))
        Th = ProjSubspace.of(G.space, rows)
        if Th.vdim == 2 and span(*director_orbit(Th, G)).vdim == 6:
            break
    try:
        D = spread_from_director(Th, G)
    except SubgeometryError:
        return  # some conjugate meets the subgeometry
    assert D.validate() == []
    assert all(G.psi_space(X) == X for X in D.elements)
