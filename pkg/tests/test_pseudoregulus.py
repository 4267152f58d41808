import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudoregulus import _linalg as la
from pseudoregulus.field_tower import ZERO, gf_create
from pseudoregulus.proj_geometry import (
    FqLinearSet,
    ProjSpace,
    ProjSubspace,
    SemilinearMap,
    apply_semilinear,
    intersect,
    is_scattered,
    row_keys,
    weight,
)
from pseudoregulus.pseudoregulus import (
    LinePRSpec,
    NoMap,
    PseudoregulusError,
    PseudoregulusSpec,
    build_equivalence,
    build_line_pr,
    build_pr_linear_set,
    canonical_rho,
    coprime_exponents,
    detect_line_pr,
    detect_line_pr_bruteforce,
    detect_pseudoregulus,
    euler_phi,
    line_equivalence_census,
    line_section_check,
    lp_example_set,
    norm_class_reps,
    orbit_count,
    partition_check,
    pgl2_matrices,
    pseudoregulus_of_spec,
    recover_sigma,
    sigma_class,
    weight_t_lines,
)


def _spec(q_p, h, t, n, sigma=1, rho=0, A=None):
    F = gf_create(q_p, h * t)
    return PseudoregulusSpec.standard(F, h, n, sigma, rho, A)


def test_counting_utilities():
    assert coprime_exponents(5) == [1, 2, 3, 4]
    assert coprime_exponents(6) == [1, 5]
    assert euler_phi(5) == 4 and euler_phi(12) == 4
    assert orbit_count(5) == 2 and orbit_count(7) == 3
    assert sigma_class(4, 5) == 1 and sigma_class(3, 5) == 2


def test_standard_set_at_q2_t3_n2():
    spec = _spec(2, 1, 3, 2)
    L = build_pr_linear_set(spec)
    assert L.size() == 63 and is_scattered(L)
    P = pseudoregulus_of_spec(spec)
    assert P.m == 9
    pts = L.points()
    assert all(int(s.contains_rows(pts).sum()) == 7 for s in P.lines)
    assert not np.any(P.T1.contains_rows(pts)) and not np.any(P.T2.contains_rows(pts))
    assert intersect(P.T1, P.T2).is_empty
    assert P.validate(L) == []


def test_equal_norm_gives_equal_sets():
    F = gf_create(3, 3)
    by_norm = {}
    for rho in range(F.mult_order):
        by_norm.setdefault(F.norm(rho, 1), []).append(rho)
    for group in by_norm.values():
        a, b = group[0], group[-1]
        La = build_pr_linear_set(PseudoregulusSpec.standard(F, 1, 2, 1, a))
        Lb = build_pr_linear_set(PseudoregulusSpec.standard(F, 1, 2, 1, b))
        assert La.same_points(Lb)
    assert canonical_rho(F, 13, 3, 1) == min(by_norm[F.norm(13, 1)])


def test_partition_at_q3_t3():
    res = partition_check(_spec(3, 1, 3, 2))
    assert res["part_sizes"] == [364, 364]
    assert res["transversal_sizes"] == [28, 28]
    assert res["line_points"] == 784 == 28 * 28
    assert res["disjoint"] and res["covers"]


def test_partition_at_q2_t3():
    res = partition_check(_spec(2, 1, 3, 2))
    assert res["part_sizes"] == [63] and res["transversal_sizes"] == [9, 9]
    assert res["line_points"] == 81 and res["disjoint"] and res["covers"]


def test_pseudoregulus_of_q3_t3():
    P = pseudoregulus_of_spec(_spec(3, 1, 3, 2))
    assert P.m == 28
    assert all(s.points().shape[0] == 28 for s in P.lines)


def test_degenerate_specs_rejected():
    F = gf_create(2, 3)
    with pytest.raises(PseudoregulusError):
        PseudoregulusSpec.standard(F, 1, 1)
    with pytest.raises(PseudoregulusError):
        PseudoregulusSpec.standard(gf_create(2, 4), 1, 2, sigma_exp=2)
    with pytest.raises(PseudoregulusError):
        PseudoregulusSpec.standard(F, 1, 2, rho=ZERO)


def test_weight_t_lines_are_the_pseudoregulus():
    spec = _spec(2, 1, 3, 2)
    L = build_pr_linear_set(spec)
    lines = weight_t_lines(L)
    assert {s.key() for s, _ in lines} == pseudoregulus_of_spec(spec).line_keys()


def test_weight_t_lines_empty_below_rank_t():
    F = gf_create(2, 4)
    L = FqLinearSet(ProjSpace.over(F, 4), [[0, ZERO, ZERO, ZERO], [ZERO, 0, ZERO, ZERO], [ZERO, ZERO, 0, 1]], 1)
    assert is_scattered(L)
    assert weight_t_lines(L) == []


def test_detect_recovers_transversals():
    spec = _spec(2, 1, 3, 2)
    P = pseudoregulus_of_spec(spec)
    r = detect_pseudoregulus(build_pr_linear_set(spec))
    assert r.kind == "pseudoregulus"
    assert {r.pseudoregulus.T1, r.pseudoregulus.T2} == {P.T1, P.T2}
    assert r.pseudoregulus.line_keys() == P.line_keys()


def test_detect_baer_case_is_flagged():
    r = detect_pseudoregulus(build_pr_linear_set(_spec(3, 1, 2, 2)))
    assert r.kind == "t2_nonunique" and r.is_pr


def test_example_sets_at_q4_t4():
    F = gf_create(2, 8)
    rho = next(c for c in range(F.mult_order) if F.norm(c, 2) != 0)
    L = lp_example_set(F, 2, rho)
    assert L.size() == 85 and is_scattered(L)
    assert detect_line_pr(L).kind == "not_pr"
    L2 = lp_example_set(F, 2, rho, n=2)
    line = ProjSubspace.of(L2.space, np.array([[0, ZERO, ZERO, ZERO], [ZERO, ZERO, 0, ZERO]]))
    assert weight(line, L2) == 4
    assert detect_pseudoregulus(L2).kind == "not_pr"
    with pytest.raises(PseudoregulusError):
        lp_example_set(F, 2, 0)


def test_example_plane_line_is_found_by_the_scan():
    F = gf_create(3, 3)
    rho = next(c for c in range(F.mult_order) if F.norm(c, 1) != 0)
    L = lp_example_set(F, 1, rho, n=2)
    assert is_scattered(L)
    line = ProjSubspace.of(L.space, np.array([[0, ZERO, ZERO, ZERO], [ZERO, ZERO, 0, ZERO]]))
    assert weight(line, L) == 3
    assert line.key() in {s.key() for s, _ in weight_t_lines(L)}


def test_line_sets_at_q2_t3_and_q3_t2():
    F8 = gf_create(2, 3)
    L = build_line_pr(LinePRSpec.standard(F8, 1))
    want = {int(k) for k in row_keys(F8, np.array([[0, a] for a in range(7)]))}
    assert L.point_set() == want
    F9 = gf_create(3, 2)
    L9 = build_line_pr(LinePRSpec.standard(F9, 1))
    fourth_roots = [a for a in range(8) if F9.pow(a, 4) == 0]
    assert L9.point_set() == {int(k) for k in row_keys(F9, np.array([[0, a] for a in fourth_roots]))}


@pytest.mark.parametrize("p,h,t", [(2, 1, 3), (2, 1, 5), (3, 1, 3), (2, 2, 3)])
def test_line_sets_do_not_depend_on_the_coprime_exponent(p, h, t):
    F = gf_create(p, h * t)
    sets = [build_line_pr(LinePRSpec.standard(F, h, i)) for i in coprime_exponents(t)]
    assert all(s.same_points(sets[0]) for s in sets)


def test_line_detection():
    F = gf_create(2, 3)
    r = detect_line_pr(build_line_pr(LinePRSpec.standard(F, 1)))
    frame = frozenset(int(k) for k in row_keys(F, np.array([[0, ZERO], [ZERO, 0]])))
    assert r.kind == "pr" and r.pair_keys(F) == {frame}
    F9 = gf_create(3, 2)
    L9 = build_line_pr(LinePRSpec.standard(F9, 1))
    r9 = detect_line_pr(L9)
    assert r9.kind == "t2_nonunique" and len(r9.pair_keys(F9)) > 1
    brute = {frozenset(int(k) for k in row_keys(F9, np.stack([w, v]))) for w, v, *_ in detect_line_pr_bruteforce(L9)}
    assert brute == r9.pair_keys(F9)


def test_sigma_classes_and_equivalence_at_t5():
    specs = {i: _spec(2, 1, 5, 2, i) for i in coprime_exponents(5)}
    classes = {i: recover_sigma(build_pr_linear_set(s), pseudoregulus_of_spec(s)) for i, s in specs.items()}
    assert classes == {1: 1, 2: 2, 3: 2, 4: 1}
    M = build_equivalence(specs[1], specs[4])
    assert not isinstance(M, NoMap)
    assert apply_semilinear(M, build_pr_linear_set(specs[1])).same_points(build_pr_linear_set(specs[4]))
    assert isinstance(build_equivalence(specs[1], specs[2]), NoMap)


def test_equivalence_with_itself():
    spec = _spec(2, 1, 3, 2)
    M = build_equivalence(spec, spec)
    L = build_pr_linear_set(spec)
    assert apply_semilinear(M, L).same_points(L)


def test_sigma_class_is_invariant_under_the_equivalence():
    a, b = _spec(2, 1, 5, 2, 2), _spec(2, 1, 5, 2, 3)
    M = build_equivalence(a, b)
    img = apply_semilinear(M, build_pr_linear_set(a))
    r = detect_pseudoregulus(img)
    assert recover_sigma(img, r.pseudoregulus) == 2


def test_line_sections_have_the_transversal_points():
    spec = _spec(2, 1, 3, 2)
    assert line_section_check(build_pr_linear_set(spec), pseudoregulus_of_spec(spec))


def test_exhaustive_line_census_small():
    F = gf_create(2, 3)
    assert pgl2_matrices(F, 3).shape[0] == 8 * 63
    c = line_equivalence_census(F, 1)
    assert c.group_order == 504 and c.all_equivalent
    assert c.sets_checked == 9 * 8 * 2


def test_norm_class_reps():
    F = gf_create(3, 3)
    reps = norm_class_reps(F, 3, 1)
    assert len(reps) == 2
    assert len({F.norm(r, 1) for r in reps}) == 2


# -- properties -------------------------------------------------------------------

SCALES = [(2, 1, 3, 2), (3, 1, 2, 2), (2, 2, 2, 2), (2, 1, 4, 2), (2, 1, 2, 3)]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SCALES), st.integers(0, 10**6))
def test_counts_for_random_specs(scale, seed):
    p, h, t, n = scale
    F = gf_create(p, h * t)
    rng = np.random.default_rng(seed)
    while True:
        A = rng.integers(-1, F.mult_order, size=(n, n))
        if la.rank(F, A) == n:
            break
    sig = int(rng.choice(coprime_exponents(t)))
    rho = int(rng.integers(0, F.mult_order))
    spec = PseudoregulusSpec.standard(F, h, n, sig, rho, A)
    L = build_pr_linear_set(spec)
    q = p**h
    assert L.size() == (q ** (t * n) - 1) // (q - 1)
    P = pseudoregulus_of_spec(spec)
    assert P.m == (q ** (n * t) - 1) // (q**t - 1)
    assert P.validate(L) == []


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(2, 1, 3, 2), (3, 1, 3, 2), (2, 1, 4, 2)]), st.integers(0, 10**6))
def test_detect_after_build_for_t_at_least_three(scale, seed):
    p, h, t, n = scale
    F = gf_create(p, h * t)
    rng = np.random.default_rng(seed)
    sp = ProjSpace.over(F, 2 * n)
    while True:
        B = rng.integers(-1, F.mult_order, size=(2 * n, 2 * n))
        if la.rank(F, B) == 2 * n:
            break
    spec = PseudoregulusSpec(sp, h, B[:n], B[n:], la.identity(n), int(rng.choice(coprime_exponents(t))))
    r = detect_pseudoregulus(build_pr_linear_set(spec), seed=seed)
    assert r.kind == "pseudoregulus"
    assert {r.pseudoregulus.T1, r.pseudoregulus.T2} == {sp.subspace(B[:n]), sp.subspace(B[n:])}


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_class_survives_random_collineations(seed):
    rng = np.random.default_rng(seed)
    i = int(rng.choice([1, 2, 3, 4]))
    spec = _spec(2, 1, 5, 2, i)
    F = spec.space.field
    while True:
        A = rng.integers(-1, F.mult_order, size=(4, 4))
        if la.rank(F, A) == 4:
            break
    M = SemilinearMap(spec.space, A, int(rng.integers(5)))
    img = apply_semilinear(M, build_pr_linear_set(spec))
    r = detect_pseudoregulus(img)
    assert recover_sigma(img, r.pseudoregulus) == sigma_class(i, 5)
