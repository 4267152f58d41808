"""Verification suites: named groups of checks run against a scenario (p, h, t, n).

Every check compares an observed value with an expected value that is computed
independently (closed-form count, brute-force oracle, or a fixed constant).
"""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field, is_dataclass, replace
from typing import Callable

import numpy as np

from . import _linalg as la
from .field_tower import FieldError, ZERO, gf_create
from .proj_geometry import (
    DEFAULT_ENUM_BUDGET,
    BudgetExceeded,
    ProjSubspace,
    SemilinearMap,
    apply_semilinear,
    fq_rref_subspaces,
    intersect,
    is_scattered,
    max_scattered_bound_check,
    row_keys,
    weight,
)
from .pseudoregulus import (
    DEFAULT_PAIR_BUDGET,
    LinePRSpec,
    NoMap,
    PseudoregulusSpec,
    build_equivalence,
    build_line_pr,
    build_pr_linear_set,
    coprime_exponents,
    detect_line_pr,
    detect_line_pr_bruteforce,
    detect_pseudoregulus,
    euler_phi,
    line_equivalence_census,
    line_section_check,
    lp_example_set,
    orbit_count,
    partition_check,
    pseudoregulus_of_spec,
    recover_sigma,
)
from .report import CheckRecord, Report
from .segre import (
    EndSpace,
    HElement,
    adjoint_checks,
    build_segre,
    d1_spread,
    d_subspace_witness,
    h_act,
    identity_space,
    quadric_form_check,
    random_h_element,
    segre_checks,
    upsilon_checks,
)
from .semifield import (
    field_spread_set,
    gtf_excluded_set,
    gtf_find_params,
    gtf_spread_set,
    gtf_structure_check,
    knuth_find_params,
    knuth_spread_set,
    knuth_structure_check,
    knuth_transpose_params,
    recognize_gtf,
    recognize_knuth,
)
from .subgeometry import (
    canonical_subgeometry,
    construct_by_projection,
    default_director,
    director_orbit,
    recover_spread,
    spread_from_director,
)


class ConfigError(ValueError):
    pass


class UnknownSuite(KeyError):
    pass


# -- configuration ------------------------------------------------------------

_INT_KEYS = ("p", "h", "t", "n", "budget", "line_budget", "seed", "workers")


@dataclass
class ScenarioConfig:
    p: int | None = None
    h: int | None = None
    t: int | None = None
    n: int | None = None
    budget: int = DEFAULT_ENUM_BUDGET
    line_budget: int = DEFAULT_PAIR_BUDGET
    seed: int = 0
    workers: int = 1
    timing: bool = False
    params: dict = dc_field(default_factory=dict)  # suite-specific integers (i1, i2, sigma_exp, ...)

    @property
    def q(self) -> int:
        return self.p**self.h

    def set_q(self, q: int) -> "ScenarioConfig":
        for p in range(2, q + 1):
            if q % p == 0:
                h = round(math.log(q, p))
                if p**h != q:
                    raise ConfigError(f"q = {q} is not a prime power")
                return replace(self, p=p, h=h)
        raise ConfigError(f"q = {q} is not a prime power")

    def param(self, key: str, default: int) -> int:
        return int(self.params.get(key, default))

    def resolved(self, defaults: dict) -> "ScenarioConfig":
        out = self
        if out.p is None:
            out = out.set_q(defaults["q"])
        for k in ("t", "n"):
            if getattr(out, k) is None:
                out = replace(out, **{k: defaults[k]})
        if out.workers < 1:
            raise ConfigError("workers must be positive")
        return out

    def scenario(self) -> dict:
        return {"p": self.p, "h": self.h, "t": self.t, "n": self.n}

    @classmethod
    def from_mapping(cls, d: dict) -> "ScenarioConfig":
        cfg = cls()
        extra = {}
        for k, v in d.items():
            k = k.replace("-", "_")
            if k == "q":
                cfg = cfg.set_q(int(v))
            elif k in _INT_KEYS:
                cfg = replace(cfg, **{k: int(v)})
            elif k == "timing":
                cfg = replace(cfg, timing=str(v).lower() in ("1", "true", "yes"))
            else:
                try:
                    extra[k] = int(v)
                except ValueError as exc:
                    raise ConfigError(f"{k} must be an integer") from exc
        return replace(cfg, params={**cfg.params, **extra})


def parse_config_text(text: str) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# -- suite machinery ---------------------------------------------------------------

@dataclass
class Check:
    id: str
    fn: Callable[[], tuple]  # (expected, observed) or (expected, observed, passed)


@dataclass
class Suite:
    id: str
    title: str
    defaults: dict
    build: Callable[[ScenarioConfig], list]


class _Lazy:
    """Shared value computed once, safe across worker threads."""

    def __init__(self, fn):
        self.fn = fn
        self.lock = threading.Lock()
        self.done = False

    def __call__(self):
        with self.lock:
            if not self.done:
                self.value = self.fn()
                self.done = True
            return self.value


def _plain(x):
    if is_dataclass(x) and not isinstance(x, type):
        return _plain(asdict(x))
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _run_check(c: Check, timing: bool):
    t0 = time.perf_counter()
    try:
        res = c.fn()
    except BudgetExceeded as exc:
        return None, None, False, str(exc), (time.perf_counter() - t0) * 1000
    exp, obs = _plain(res[0]), _plain(res[1])
    passed = bool(res[2]) if len(res) > 2 else exp == obs
    return exp, obs, passed, None, (time.perf_counter() - t0) * 1000


def run_suite(suite_id: str, cfg: ScenarioConfig | None = None) -> Report:
    if suite_id not in SUITES:
        raise UnknownSuite(suite_id)
    suite = SUITES[suite_id]
    cfg = (cfg or ScenarioConfig()).resolved(suite.defaults)
    try:
        checks = suite.build(cfg)
    except FieldError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(lambda c: _run_check(c, cfg.timing), checks))
    else:
        results = [_run_check(c, cfg.timing) for c in checks]
    rep = Report(suite_id, cfg.scenario(), cfg.seed)
    for c, (exp, obs, ok, skipped, ms) in zip(checks, results):
        rep.checks.append(CheckRecord(c.id, ANCHORS[suite_id][c.id], exp, obs, ok,
                                      round(ms, 3) if cfg.timing else None, skipped))
    return rep


# -- independent oracles ---------------------------------------------------------

def _theta(k: int, q: int) -> int:
    return (q**k - 1) // (q - 1)


def _gauss(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _gl_order(n: int, q: int) -> int:
    return math.prod(q**n - q**i for i in range(n))


def _phi(t: int) -> int:
    return sum(1 for i in range(1, t + 1) if math.gcd(i, t) == 1)


def _sigma_classes(t: int) -> dict:
    return {i: min(i, t - i) for i in range(1, t) if math.gcd(i, t) == 1}


def _need(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _keyset(F, S: ProjSubspace) -> set:
    return {int(k) for k in row_keys(F, S.points())}


# -- pseudoregulus suites --------------------------------------------------------

def _pr_spec(cfg: ScenarioConfig, sigma_exp: int | None = None) -> PseudoregulusSpec:
    F = gf_create(cfg.p, cfg.h * cfg.t)
    s = cfg.param("sigma_exp", 1) if sigma_exp is None else sigma_exp
    return PseudoregulusSpec.standard(F, cfg.h, cfg.n, s, cfg.param("rho_exp", 0))


def _build_thm35(cfg):
    _need(cfg.n >= 2 and cfg.t >= 2, "needs n >= 2 and t >= 2")
    q, t, n = cfg.q, cfg.t, cfg.n
    spec = _pr_spec(cfg)
    L = _Lazy(lambda: build_pr_linear_set(spec, cfg.budget))
    P = _Lazy(lambda: pseudoregulus_of_spec(spec))

    def line_weights():
        pts = L().points()
        return {int(s.contains_rows(pts).sum()) for s in P().lines}

    def detect():
        r = detect_pseudoregulus(L(), seed=cfg.seed)
        if not r.is_pr:
            return {"kind": r.kind}
        D = r.pseudoregulus
        out = {"kind": r.kind, "valid": not D.validate(L())}
        if t >= 3:
            out["lines"] = D.line_keys() == P().line_keys()
            out["transversals"] = {D.T1.key(), D.T2.key()} == {P().T1.key(), P().T2.key()}
        return out

    want = {"kind": "pseudoregulus", "valid": True, "lines": True, "transversals": True} if t >= 3 \
        else {"kind": "t2_nonunique", "valid": True}
    return [
        Check("size", lambda: (_theta(n * t, q), L().size())),
        Check("scattered", lambda: (True, is_scattered(L()))),
        Check("lines", lambda: (_theta(n, q**t), P().m)),
        Check("line_weights", lambda: ({_theta(t, q)}, line_weights())),
        Check("transversals_miss_set", lambda: (True, not any(
            bool(np.any(T.contains_rows(L().points()))) for T in (P().T1, P().T2)))),
        Check("transversals_disjoint", lambda: (True, intersect(P().T1, P().T2).is_empty)),
        Check("structure_valid", lambda: ([], P().validate(L()))),
        Check("detect", lambda: (want, detect())),
        Check("line_sections", lambda: (True, line_section_check(L(), P()))),
    ]


def _build_rem36(cfg):
    _need(cfg.n >= 2 and cfg.t >= 2, "needs n >= 2 and t >= 2")
    q, t, n = cfg.q, cfg.t, cfg.n
    res = _Lazy(lambda: partition_check(_pr_spec(cfg)))
    m = _theta(n, q**t)
    return [
        Check("norm_classes", lambda: (q - 1, len(res()["part_sizes"]))),
        Check("part_sizes", lambda: ([_theta(n * t, q)] * (q - 1), res()["part_sizes"])),
        Check("transversal_traces", lambda: ([m, m], res()["transversal_sizes"])),
        Check("line_points", lambda: (m * (q**t + 1), res()["line_points"])),
        Check("parts_disjoint", lambda: (True, res()["disjoint"])),
        Check("parts_cover", lambda: (True, res()["covers"])),
    ]


def _detected_class(L, seed):
    r = detect_pseudoregulus(L, seed=seed)
    if not r.is_pr:
        return None
    return recover_sigma(L, r.pseudoregulus)


def _build_thm37(cfg):
    _need(cfg.n >= 2 and cfg.t >= 3, "needs n >= 2 and t >= 3")
    t = cfg.t
    exps = coprime_exponents(t)
    specs = {i: _pr_spec(cfg, i) for i in exps}
    sets = {i: _Lazy(lambda i=i: build_pr_linear_set(specs[i], cfg.budget)) for i in exps}
    cls = _sigma_classes(t)
    pairs = [(i, j) for i in exps for j in exps]
    same = [(i, j) for i, j in pairs if cls[i] == cls[j]]
    diff = [(i, j) for i, j in pairs if cls[i] != cls[j]]

    def within():
        ok = 0
        for i, j in same:
            M = build_equivalence(specs[i], specs[j])
            if not isinstance(M, NoMap) and apply_semilinear(M, sets[i]()).same_points(sets[j]()):
                ok += 1
        return ok

    def across():
        return sum(isinstance(build_equivalence(specs[i], specs[j]), NoMap) for i, j in diff)

    def invariant():
        rng = np.random.default_rng(cfg.seed)
        F = specs[exps[0]].space.field
        sp = specs[exps[0]].space
        out = {}
        for i in exps:
            while True:
                A = rng.integers(-1, F.mult_order, (sp.r, sp.r))
                if la.rank(F, A) == sp.r:
                    break
            M = SemilinearMap(sp, A, int(rng.integers(F.e)))
            out[i] = _detected_class(apply_semilinear(M, sets[i]()), cfg.seed)
        return out

    return [
        Check("sigma_classes", lambda: (cls, {i: _detected_class(sets[i](), cfg.seed) for i in exps})),
        Check("equivalent_within_class", lambda: (len(same), within())),
        Check("no_map_across_classes", lambda: (len(diff), across())),
        Check("class_invariant_under_collineations", lambda: (cls, invariant())),
    ]


def _build_cor38(cfg):
    t = cfg.t
    _need(t >= 2, "needs t >= 2")
    distinct = len(set(_sigma_classes(t).values()))

    def realized():
        out = set()
        for i in coprime_exponents(t):
            spec = _pr_spec(cfg, i)
            out.add(recover_sigma(build_pr_linear_set(spec, cfg.budget), pseudoregulus_of_spec(spec)))
        return len(out)

    checks = [
        Check("totient", lambda: (_phi(t), euler_phi(t))),
        Check("orbit_count", lambda: (distinct, orbit_count(t))),
    ]
    if cfg.n >= 2:
        checks.append(Check("classes_realized", lambda: (distinct, realized())))
    return checks


def _build_rem42(cfg):
    q, t = cfg.q, cfg.t
    _need(t >= 2, "needs t >= 2")
    Q = q**t
    census = _Lazy(lambda: line_equivalence_census(gf_create(cfg.p, cfg.h * t), cfg.h))
    return [
        Check("group_order", lambda: (Q * (Q * Q - 1), census().group_order)),
        Check("sets_checked", lambda: ((Q + 1) * Q * _phi(t) * (q - 1), census().sets_checked)),
        Check("all_equivalent", lambda: (census().sets_checked, census().sets_in_orbit)),
    ]


def _build_prop43(cfg):
    q, t = cfg.q, cfg.t
    _need(t >= 2, "needs t >= 2")
    F = gf_create(cfg.p, cfg.h * t)
    L = _Lazy(lambda: build_line_pr(LinePRSpec.standard(F, cfg.h, 1)))
    res = _Lazy(lambda: detect_line_pr(L(), cfg.line_budget))
    frame = frozenset(int(k) for k in row_keys(F, np.array([[0, ZERO], [ZERO, 0]])))
    checks = [Check("size", lambda: (_theta(t, q), L().size()))]
    if t >= 3:
        checks += [
            Check("kind", lambda: ("pr", res().kind)),
            Check("pair_count", lambda: (1, len(res().pair_keys(F)))),
            Check("pair_is_frame", lambda: (True, res().pair_keys(F) == {frame})),
        ]
    else:
        checks += [
            Check("kind", lambda: ("t2_nonunique", res().kind)),
            Check("pair_count", lambda: (">1", len(res().pair_keys(F)), len(res().pair_keys(F)) > 1)),
        ]
    if q**t <= 16:
        def brute():
            return {frozenset(int(k) for k in row_keys(F, np.stack([w, v]))) for w, v, *_ in
                    detect_line_pr_bruteforce(L())}
        checks.append(Check("matches_bruteforce", lambda: (True, brute() == res().pair_keys(F))))
    return checks


def _build_ex46(cfg):
    q, t = cfg.q, cfg.t
    _need(t >= 3, "needs t >= 3")
    F = gf_create(cfg.p, cfg.h * t)
    rho = next(c for c in range(F.mult_order) if F.norm(c, cfg.h) != 0)
    L1 = _Lazy(lambda: lp_example_set(F, cfg.h, rho))
    L2 = _Lazy(lambda: lp_example_set(F, cfg.h, rho, n=2))
    # the line {x_1 = x_3 = 0} through <e_0> and <e_2>
    line = _Lazy(lambda: ProjSubspace.of(L2().space, np.array([[0, ZERO, ZERO, ZERO], [ZERO, ZERO, 0, ZERO]])))
    return [
        Check("rho_norm_not_one", lambda: (True, F.norm(rho, cfg.h) != 0)),
        Check("line_size", lambda: (_theta(t, q), L1().size())),
        Check("line_scattered", lambda: (True, is_scattered(L1()))),
        Check("line_detect", lambda: ("not_pr", detect_line_pr(L1(), cfg.line_budget).kind)),
        Check("plane_scattered", lambda: (True, is_scattered(L2()))),
        Check("special_line_weight", lambda: (t, weight(line(), L2()))),
        Check("plane_detect", lambda: ("not_pr", detect_pseudoregulus(L2(), seed=cfg.seed).kind)),
    ]


# -- subgeometry suites ------------------------------------------------------------

def _geometry(cfg):
    _need(cfg.n >= 2 and cfg.t >= 2, "needs n >= 2 and t >= 2")
    G = canonical_subgeometry(cfg.n, cfg.t, cfg.q)
    return G, default_director(G)


def _build_thm39(cfg):
    G, Th = _geometry(cfg)
    t, q = cfg.t, cfg.q
    i1, i2 = cfg.param("i1", 0), cfg.param("i2", 1)
    _need(0 <= i1 < t and 0 <= i2 < t and i1 != i2, "need distinct i1, i2 in [0, t)")
    s = math.gcd(i2 - i1, t)
    R = _Lazy(lambda: construct_by_projection(Th, G, i1, i2))
    checks = [Check("rank", lambda: (cfg.n * t, R().linear_set.rank))]
    if s == 1:
        spec = PseudoregulusSpec.standard(G.field, G.q_degree, cfg.n, (i2 - i1) % t)

        def transversals():
            L = R().linear_set
            r = detect_pseudoregulus(L, seed=cfg.seed)
            if not r.is_pr:
                return False
            got = {R().spec.lift_subspace(T).key() for T in (r.pseudoregulus.T1, r.pseudoregulus.T2)}
            return got == {G.psi_space(Th, i1).key(), G.psi_space(Th, i2).key()}

        checks += [
            Check("matches_construction", lambda: (True, R().linear_set.same_points(build_pr_linear_set(spec)))),
            Check("scattered", lambda: (True, is_scattered(R().linear_set))),
        ]
        if t >= 3:
            checks.append(Check("transversals_are_conjugate_directors", lambda: (True, transversals())))
    else:
        checks.append(Check("size_mod_q_s", lambda: (1 % q**s, R().linear_set.size() % q**s)))
    return checks


def _build_thm312(cfg):
    G, Th = _geometry(cfg)
    t, q = cfg.t, cfg.q
    pairs = [(a, b) for a in range(t) for b in range(t) if a != b]
    cop = [(a, b) for a, b in pairs if math.gcd(b - a, t) == 1]
    non = [(a, b) for a, b in pairs if math.gcd(b - a, t) > 1]

    def matches():
        ok = 0
        for a, b in cop:
            spec = PseudoregulusSpec.standard(G.field, G.q_degree, cfg.n, (b - a) % t)
            ok += construct_by_projection(Th, G, a, b).linear_set.same_points(build_pr_linear_set(spec))
        return ok

    def congruent():
        ok = 0
        for a, b in non:
            qs = q ** math.gcd(b - a, t)
            ok += construct_by_projection(Th, G, a, b).linear_set.size() % qs == 1 % qs
        return ok

    checks = [Check("coprime_projections_match", lambda: (len(cop), matches()))]
    if non:
        checks.append(Check("other_projections_size_mod_q_s", lambda: (len(non), congruent())))
    return checks


def _build_thm311(cfg):
    G, Th = _geometry(cfg)
    t, q, n = cfg.t, cfg.q, cfg.n
    i1, i2 = cfg.param("i1", 0), cfg.param("i2", 1)
    _need(math.gcd(i2 - i1, t) == 1, "needs gcd(i2 - i1, t) = 1")

    def recovered():
        R = construct_by_projection(Th, G, i1, i2)
        cands = None
        if t == 2:
            T = ProjSubspace.of(R.linear_set.space, la.identity(2 * n)[:n])
            cands = [T]
        r = detect_pseudoregulus(R.linear_set, transversal_candidates=cands, seed=cfg.seed)
        return recover_spread(R.linear_set, R.spec, G, r.pseudoregulus)

    rec = _Lazy(recovered)
    D = _Lazy(lambda: spread_from_director(Th, G))
    return [
        Check("spread_size", lambda: (_theta(n, q**t), len(rec().spread))),
        Check("spread_matches_director_spread", lambda: (True, rec().spread.keyset() == D().keyset())),
        Check("spread_valid", lambda: ([], rec().spread.validate())),
        Check("elements_psi_stable", lambda: (True, all(G.psi_space(X) == X for X in rec().spread.elements))),
        Check("desarguesian", lambda: (True, len(rec().directors_found) > 0)),
        Check("directors_are_conjugates", lambda: (True, {d.key() for d in rec().directors_found} ==
                                                   {x.key() for x in director_orbit(Th, G)})),
        Check("center_decomposition", lambda: (True, rec().gamma_decomposition_ok)),
        Check("m_coprime_to_t", lambda: (1, math.gcd(rec().m, t))),
    ]


def _build_thm22(cfg):
    r, t, q = cfg.n, cfg.t, cfg.q
    _need(r >= 1 and t >= 2, "needs r >= 1 and t >= 2")
    rep = _Lazy(lambda: max_scattered_bound_check(r, cfg.h, t, gf_create(cfg.p, cfg.h * t), cfg.budget))
    k = r * t // 2 + 1
    return [
        Check("rank_checked", lambda: (k, rep().rank_checked)),
        Check("subspaces", lambda: (_gauss(r * t, k, q), rep().subspaces)),
        Check("scattered_above_bound", lambda: (0, rep().scattered)),
        Check("bound_attained", lambda: (True, rep().witness_found)),
    ]


# -- Segre and D-subspace suites ------------------------------------------------------

def _end(cfg) -> EndSpace:
    _need(cfg.n >= 2, "needs n >= 2")
    return EndSpace(gf_create(cfg.p, cfg.h * cfg.n), cfg.h)


def _build_prop51(cfg):
    n, q = cfg.n, cfg.q
    _need(n >= 2, "needs n >= 2")
    S = _Lazy(lambda: build_segre(n, q, cfg.budget))
    sc = _Lazy(lambda: segre_checks(S()))
    per = _theta(n, q)
    trials = None if q ** (n * n) <= 256 else 100
    bools = ["constructions_agree", "members_are_maximal_spaces", "members_on_variety", "skew_within",
             "one_point_across", "partition", "omega_contains_segre"]
    checks = [
        Check("size", lambda: (per * per, sc()["size"])),
        Check("system_sizes", lambda: ([per, per], list(sc()["system_sizes"]))),
        Check("omega_size", lambda: ((q ** (n * n) - _gl_order(n, q) - 1) // (q - 1), sc()["omega_size"])),
    ]
    checks += [Check(b, lambda b=b: (True, sc()[b])) for b in bools]
    adj = _Lazy(lambda: adjoint_checks(S().end, trials, cfg.seed))
    for k in ("bilinear", "involution", "anti_homomorphism", "inverse", "fixes_t_lambda", "rank_preserved",
              "swaps_systems"):
        checks.append(Check(f"adjoint_{k}", lambda k=k: (True, adj()[k])))
    return checks


def _build_thm52(cfg):
    E = _end(cfg)
    F = E.field
    up = _Lazy(lambda: upsilon_checks(E))
    keys = ["conjugates_monomial", "conjugates_span", "fixes_spread_1", "fixed_elements_are_system_1",
            "order_divides_n_1", "orbit_of_I_1", "fixes_spread_2", "fixed_elements_are_system_2",
            "order_divides_n_2", "orbit_of_I_2", "upsilon2_conjugates"]
    checks = [Check(f"upsilon_{k}", lambda k=k: (True, up()[k])) for k in keys]
    I = identity_space(E)
    g = random_h_element(E, np.random.default_rng(cfg.seed), transpose=False)
    X = h_act(g, I)
    spreads = _Lazy(lambda: {i: [h_act(g, S) for S in d1_spread(E, i)] for i in (1, 2)})
    phi_T = HElement.from_maps(E.identity(), E.identity(), adjoint=True)
    Phi = g.inverse().then(phi_T).then(g)

    def witness():
        w = d_subspace_witness(E, X)
        return w is not None and h_act(w, I) == X

    def non_d():
        # a subspace through a rank-one element is never a D-subspace
        rows = np.concatenate([I.basis[1:], E.flatten(np.array([_rank_one(E)]))])
        return d_subspace_witness(E, ProjSubspace.of(E.space, rows)) is None

    def member(i):
        return X.key() in {S.key() for S in spreads()[i]}

    def system_inside(i):
        from .segre import system_member
        keys_ = {S.key() for S in spreads()[i]}
        return all(system_member(E, l, i).key() in keys_ for l in range(_theta(n_, E.Q)))

    def is_spread(i):
        allk = [k for S in spreads()[i] for k in _keyset(F, S)]
        return len(allk) == len(set(allk)) == _theta(E.n * E.n, E.Q)

    def phi_fixes_x():
        pts = X.points()
        img = E.flatten(Phi.apply_matrices(E.unflatten(pts)))
        return bool(np.array_equal(row_keys(F, pts), row_keys(F, img)))

    def phi_swaps():
        img = {h_act(Phi, S).key() for S in spreads()[1]}
        return img == {S.key() for S in spreads()[2]}

    n_ = E.n
    checks += [
        Check("witness_found", lambda: (True, witness())),
        Check("non_d_subspace_rejected", lambda: (True, non_d())),
        Check("x_in_both_spreads", lambda: ([True, True], [member(1), member(2)])),
        Check("systems_in_spreads", lambda: ([True, True], [system_inside(1), system_inside(2)])),
        Check("spreads_partition", lambda: ([True, True], [is_spread(1), is_spread(2)])),
        Check("involution_fixes_x", lambda: (True, phi_fixes_x())),
        Check("involution_swaps_spreads", lambda: (True, phi_swaps())),
    ]
    return checks


def _rank_one(E: EndSpace) -> np.ndarray:
    M = la.zeros((E.n, E.n))
    M[0, 0] = 0
    return M


def _build_rem54(cfg):
    _need(cfg.n == 2, "the quadric picture needs n = 2")
    q = cfg.q
    E = _end(cfg)
    F = E.field
    qc = _Lazy(lambda: quadric_form_check(q))

    def orbit():
        ext = d_ok = other_ok = 0
        total = 0
        for M in fq_rref_subspaces(F, E.d, 4, 2, cfg.budget):
            S = ProjSubspace(E.space, M)
            total += 1
            external = bool(np.all(E.dets(E.unflatten(S.points())) != ZERO))
            w = d_subspace_witness(E, S) is not None
            ext += external
            d_ok += external and w
            other_ok += (not external) and (not w)
        return {"lines": total, "external": ext, "external_d": d_ok, "others_not_d": total - ext == other_ok}

    checks = [
        Check("quadric_points", lambda: ((q + 1) ** 2, qc()["zero_set_size"])),
    ]
    for k in ("zero_set_is_segre", "I_external", "polar_of_I_is_conjugate", "polar_matches_determinant"):
        checks.append(Check(k, lambda k=k: (True, qc()[k])))
    ext = q * q * (q - 1) ** 2 // 2
    checks.append(Check("d_orbit_is_external_lines", lambda: (
        {"lines": _gauss(4, 2, q), "external": ext, "external_d": ext, "others_not_d": True}, orbit())))
    return checks


# -- semifield suites ---------------------------------------------------------------

def _gtf_params(cfg):
    ps = gtf_find_params(cfg.q, cfg.n, cfg.t, limit=1)
    if not ps:
        raise ConfigError(f"no Generalized Twisted Field with q = {cfg.q}, n = {cfg.n}, t = {cfg.t}")
    return ps[0]


def _build_prop55(cfg):
    q, n, t = cfg.q, cfg.n, cfg.t
    _need(n >= 2 and t >= 1, "needs n >= 2")
    P = _gtf_params(cfg)
    res = _Lazy(lambda: gtf_structure_check(P, cfg.seed))
    M = q ** (n * t) - 1

    def valid_c():
        out = {}
        for l in range(1, n):
            for m in range(1, n * t):
                if math.gcd(l, n) == 1 and math.gcd(t, m) == 1 and m != t * l:
                    out[f"{l},{m}"] = (M - len(gtf_excluded_set(q, n, t, l, m)), M - M // math.gcd(
                        q ** (t * l) - 1, q**m - 1, M))
        return out

    kind = {1: "pr", 2: "t2_nonunique"}.get(t, "pseudoregulus")
    checks = [
        Check("valid_c_count", lambda: ({k: v[1] for k, v in valid_c().items()},
                                        {k: v[0] for k, v in valid_c().items()})),
        Check("spread_set", lambda: (True, res()["valid"])),
        Check("rank", lambda: (n * t, res()["rank"])),
        Check("in_join_of_I_and_conjugate", lambda: (True, res()["in_lambda"])),
        Check("scattered", lambda: (True, res()["scattered"])),
        Check("detect", lambda: (kind, res()["detect_kind"])),
        Check("transversals_are_I_and_conjugate", lambda: (True, res()["transversals_are_I_and_conjugate"])),
    ]
    if t == 1:
        checks.append(Check("induced_points", lambda: (_theta(n, q), res()["induced_points"])))
    else:
        checks.append(Check("structure_valid", lambda: ([], res()["validate"])))
    return checks


def _round_trip_gtf(C, seed):
    r = recognize_gtf(C, seed=seed)
    if r.kind != "gtf":
        return r.reason
    rebuilt = gtf_spread_set(r.params)
    return rebuilt.linear_set().same_points(C.transformed(r.normalizer).linear_set()) and \
        rebuilt.same_spread_set(C.transformed(r.normalizer))


def _build_thm56(cfg):
    q, n, t = cfg.q, cfg.n, cfg.t
    _need(n >= 2, "needs n >= 2")
    P = _gtf_params(cfg)
    C = _Lazy(lambda: gtf_spread_set(P))
    rng = np.random.default_rng(cfg.seed)
    checks = [Check("round_trip", lambda: (True, _round_trip_gtf(C(), cfg.seed)))]
    if t >= 2:
        g = _Lazy(lambda: random_h_element(C().end, rng))
        checks.append(Check("round_trip_after_h", lambda: (True, _round_trip_gtf(C().transformed(g()), cfg.seed))))
    if n == 2 and t >= 2:
        K = _Lazy(lambda: knuth_spread_set(knuth_find_params(q, t, limit=1)[0]))
        checks.append(Check("rejects_knuth", lambda: ("not_gtf", recognize_gtf(K(), seed=cfg.seed).kind)))
    checks.append(Check("rejects_field", lambda: ("not_gtf", recognize_gtf(field_spread_set(q, n, t)).kind)))
    return checks


def _knuth(cfg):
    _need(cfg.n == 2 and cfg.t >= 2, "Knuth semifields need n = 2 and t >= 2")
    ps = knuth_find_params(cfg.q, cfg.t, 17, cfg.param("sigma_exp", 1), limit=1)
    if not ps:
        raise ConfigError("no Knuth parameters")  # pragma: no cover
    return ps[0]


def _build_rem58(cfg):
    K = _knuth(cfg)
    res = _Lazy(lambda: knuth_structure_check(K, cfg.seed))
    return [
        Check("transpose_is_partner", lambda: (True, res()["transpose_is_partner"])),
        Check("adjoint_is_gram_conjugate_of_partner", lambda: (True, res()["adjoint_is_gram_conjugate_of_partner"])),
        Check("partner_rule_involutive", lambda: (K, knuth_transpose_params(knuth_transpose_params(K)))),
        Check("partner_valid", lambda: ([], knuth_spread_set(knuth_transpose_params(K)).validate())),
    ]


def _build_prop59(cfg):
    K = _knuth(cfg)
    t = cfg.t
    r17 = _Lazy(lambda: knuth_structure_check(K, cfg.seed))
    r19 = _Lazy(lambda: knuth_structure_check(knuth_transpose_params(K), cfg.seed))

    def kinds():
        return [detect_pseudoregulus(knuth_spread_set(P).linear_set(), seed=cfg.seed).kind
                for P in (K, knuth_transpose_params(K))]

    want = "t2_nonunique" if t == 2 else "pseudoregulus"
    return [
        Check("pseudoregulus_type", lambda: ([want, want], kinds())),
        Check("scattered", lambda: ([True, True], [r17()["scattered"], r19()["scattered"]])),
        Check("family17_transversals_in_R1", lambda: (True, r17()["transversals_in_R1"])),
        Check("family17_reguli", lambda: ([1, 2] if t == 2 else [1], r17()["transversal_reguli"])),
        Check("family19_reguli", lambda: ([1, 2] if t == 2 else [2], r19()["transversal_reguli"])),
    ]


def _round_trip_knuth(C, family, seed):
    # for t = 2 both readings may exist; ask for the wanted one
    r = recognize_knuth(C, seed=seed, family=family if C.t == 2 else None)
    if r.kind != "knuth":
        return r.reason
    return r.params.family == family and knuth_spread_set(r.params).same_spread_set(C.transformed(r.normalizer))


def _build_thm510(cfg):
    K = _knuth(cfg)
    q, t = cfg.q, cfg.t
    K19 = knuth_transpose_params(K)
    rng = np.random.default_rng(cfg.seed)
    C17 = _Lazy(lambda: knuth_spread_set(K))
    C19 = _Lazy(lambda: knuth_spread_set(K19))
    g = _Lazy(lambda: random_h_element(C17().end, rng, transpose=False))
    checks = [
        Check("round_trip_17", lambda: (True, _round_trip_knuth(C17(), 17, cfg.seed))),
        Check("round_trip_19", lambda: (True, _round_trip_knuth(C19(), 19, cfg.seed))),
        Check("round_trip_17_after_h", lambda: (True, _round_trip_knuth(C17().transformed(g()), 17, cfg.seed))),
        Check("round_trip_19_after_h", lambda: (True, _round_trip_knuth(C19().transformed(g()), 19, cfg.seed))),
        Check("rejects_field", lambda: ("not_knuth", recognize_knuth(field_spread_set(q, 2, t)).kind)),
    ]
    gtf = gtf_find_params(q, 2, t, limit=1)
    if gtf:
        checks.append(Check("rejects_gtf", lambda: ("not_knuth",
                                                    recognize_knuth(gtf_spread_set(gtf[0]), seed=cfg.seed).kind)))
    else:
        # the excluded product set is everything: gcd(q^t - 1, q^m - 1, q^2t - 1) = q - 1 = 1 for q = 2
        checks.append(Check("no_gtf_of_this_order", lambda: (0 if q == 2 else ">0", len(gtf), (len(gtf) == 0) == (q == 2))))
    return checks


# -- registry -------------------------------------------------------------------------

SUITES = {s.id: s for s in [
    Suite("thm35", "linear sets L_{rho,f} are scattered of pseudoregulus type", {"q": 2, "t": 3, "n": 2}, _build_thm35),
    Suite("rem36", "norm classes partition the pseudoregulus point set", {"q": 3, "t": 3, "n": 2}, _build_rem36),
    Suite("thm37", "equivalence classes of L_{rho,f} by the automorphism class", {"q": 2, "t": 5, "n": 2}, _build_thm37),
    Suite("cor38", "number of inequivalent classes", {"q": 2, "t": 5, "n": 2}, _build_cor38),
    Suite("thm39", "projection of a subgeometry from conjugate directors", {"q": 2, "t": 3, "n": 2}, _build_thm39),
    Suite("thm311", "spread recovery from a projected set", {"q": 2, "t": 3, "n": 2}, _build_thm311),
    Suite("thm312", "every coprime projection is of pseudoregulus type", {"q": 2, "t": 3, "n": 2}, _build_thm312),
    Suite("rem42", "line-scale sets form a single orbit", {"q": 2, "t": 4, "n": 1}, _build_rem42),
    Suite("prop43", "transversal points of a line set", {"q": 2, "t": 3, "n": 1}, _build_prop43),
    Suite("ex46", "maximum scattered sets not of pseudoregulus type", {"q": 4, "t": 4, "n": 2}, _build_ex46),
    Suite("prop51", "Segre variety and the adjoint", {"q": 3, "t": 1, "n": 2}, _build_prop51),
    Suite("thm52", "D-subspaces, their spreads and the conjugating collineations", {"q": 3, "t": 1, "n": 2}, _build_thm52),
    Suite("rem54", "the n = 2 quadric and external lines", {"q": 3, "t": 1, "n": 2}, _build_rem54),
    Suite("prop55", "Generalized Twisted Fields give pseudoregulus-type sets", {"q": 3, "t": 2, "n": 2}, _build_prop55),
    Suite("thm56", "recognition of Generalized Twisted Fields", {"q": 3, "t": 2, "n": 2}, _build_thm56),
    Suite("rem58", "transposition of Knuth spread sets", {"q": 2, "t": 2, "n": 2}, _build_rem58),
    Suite("prop59", "transversal lines of Knuth linear sets", {"q": 2, "t": 2, "n": 2}, _build_prop59),
    Suite("thm510", "recognition of Knuth semifields", {"q": 2, "t": 2, "n": 2}, _build_thm510),
    Suite("thm22", "no scattered set above half the dimension", {"q": 2, "t": 3, "n": 2}, _build_thm22),
]}


def _registry() -> dict:
    """Anchor string for every (suite, check) pair."""
    A = {
        "thm35": {
            "size": "pseudoregulus construction: maximum scattered size",
            "scattered": "pseudoregulus construction: scattered",
            "lines": "pseudoregulus construction: number of lines",
            "line_weights": "pseudoregulus construction: every line has weight t",
            "transversals_miss_set": "pseudoregulus construction: transversal spaces disjoint from the set",
            "transversals_disjoint": "pseudoregulus construction: transversal spaces disjoint",
            "structure_valid": "pseudoregulus construction: defining conditions",
            "detect": "pseudoregulus detection recovers the construction",
            "line_sections": "line sections are line pseudoreguli with the traced transversal points",
        },
        "rem36": {
            "norm_classes": "norm-class partition: one set per norm value",
            "part_sizes": "norm-class partition: part sizes",
            "transversal_traces": "norm-class partition: transversal traces",
            "line_points": "norm-class partition: points on the pseudoregulus lines",
            "parts_disjoint": "norm-class partition: disjoint parts",
            "parts_cover": "norm-class partition: parts cover the lines",
        },
        "thm37": {
            "sigma_classes": "automorphism class recovered from the set",
            "equivalent_within_class": "equal classes give equivalent sets",
            "no_map_across_classes": "different classes give no equivalence",
            "class_invariant_under_collineations": "automorphism class is a collineation invariant",
        },
        "cor38": {
            "totient": "Euler totient of t",
            "orbit_count": "half the totient counts the classes",
            "classes_realized": "every class occurs",
        },
        "thm39": {
            "rank": "projected subgeometry: rank",
            "matches_construction": "projected subgeometry equals the constructed set",
            "scattered": "projected subgeometry: scattered",
            "transversals_are_conjugate_directors": "projected subgeometry: transversals are director conjugates",
            "size_mod_q_s": "non-coprime projection is linear over a larger field",
        },
        "thm311": {
            "spread_size": "recovered spread: size",
            "spread_matches_director_spread": "recovered spread equals the director spread",
            "spread_valid": "recovered spread: partition of the subgeometry",
            "elements_psi_stable": "recovered spread: extensions are stable under the collineation",
            "desarguesian": "recovered spread: a director space exists",
            "directors_are_conjugates": "recovered spread: directors are conjugates",
            "center_decomposition": "projection center is spanned by director conjugates",
            "m_coprime_to_t": "conjugating exponent is coprime to t",
        },
        "thm312": {
            "coprime_projections_match": "coprime projections equal constructed sets",
            "other_projections_size_mod_q_s": "non-coprime projections are linear over a larger field",
        },
        "rem42": {
            "group_order": "projective line group order",
            "sets_checked": "line sets enumerated over frames, automorphisms and norm classes",
            "all_equivalent": "line sets lie in one orbit",
        },
        "prop43": {
            "size": "line pseudoregulus set: size",
            "kind": "line pseudoregulus set: detection verdict",
            "pair_count": "line pseudoregulus set: number of transversal pairs",
            "pair_is_frame": "line pseudoregulus set: transversal pair is the construction frame",
            "matches_bruteforce": "line detection agrees with exhaustive search",
        },
        "ex46": {
            "rho_norm_not_one": "example parameter has norm different from one",
            "line_size": "line example: maximum scattered size",
            "line_scattered": "line example: scattered",
            "line_detect": "line example: not of pseudoregulus type",
            "plane_scattered": "higher example: scattered",
            "special_line_weight": "higher example: a line of weight t",
            "plane_detect": "higher example: not of pseudoregulus type",
        },
        "thm22": {
            "rank_checked": "scattered bound: rank above the bound",
            "subspaces": "scattered bound: all subspaces of that rank",
            "scattered_above_bound": "scattered bound: none is scattered",
            "bound_attained": "scattered bound: attained at half the dimension",
        },
        "prop51": {
            "size": "Segre variety: size",
            "system_sizes": "Segre variety: system sizes",
            "omega_size": "determinantal hypersurface: size",
            "constructions_agree": "Segre variety: parametric and rank-one constructions agree",
            "members_are_maximal_spaces": "Segre variety: system members are maximal subspaces",
            "members_on_variety": "Segre variety: system members lie on the variety",
            "skew_within": "Segre variety: members of one system are skew",
            "one_point_across": "Segre variety: members of different systems meet in one point",
            "partition": "Segre variety: each system partitions the variety",
            "omega_contains_segre": "determinantal hypersurface contains the variety",
        },
        "thm52": {
            "witness_found": "D-subspace: a group element maps I onto it",
            "non_d_subspace_rejected": "D-subspace: a subspace meeting the variety is rejected",
            "x_in_both_spreads": "D-subspace spreads contain the subspace",
            "systems_in_spreads": "D-subspace spreads contain the systems",
            "spreads_partition": "D-subspace spreads are spreads",
            "involution_fixes_x": "conjugated adjoint fixes the subspace pointwise",
            "involution_swaps_spreads": "conjugated adjoint swaps the two spreads",
        },
        "rem54": {
            "quadric_points": "hyperbolic quadric: size",
            "zero_set_is_segre": "hyperbolic quadric equals the Segre variety",
            "I_external": "identity line is external",
            "polar_of_I_is_conjugate": "polar of the identity line is its conjugate",
            "polar_matches_determinant": "quadric polarity equals the determinant polarity",
            "d_orbit_is_external_lines": "D-subspace orbit is the set of external lines",
        },
        "prop55": {
            "valid_c_count": "twisted field parameters: admissible c",
            "spread_set": "twisted field: spread set",
            "rank": "twisted field: rank",
            "in_join_of_I_and_conjugate": "twisted field: set lies in the join of I and a conjugate",
            "scattered": "twisted field: scattered",
            "detect": "twisted field: pseudoregulus type",
            "transversals_are_I_and_conjugate": "twisted field: transversals are I and its conjugate",
            "induced_points": "twisted field: induced line set size",
            "structure_valid": "twisted field: pseudoregulus conditions",
        },
        "thm56": {
            "round_trip": "twisted field recognition round trip",
            "round_trip_after_h": "twisted field recognition after a group element",
            "rejects_knuth": "twisted field recognition rejects Knuth spread sets",
            "rejects_field": "twisted field recognition rejects the field",
        },
        "rem58": {
            "transpose_is_partner": "transposed Knuth spread set is the partner family",
            "adjoint_is_gram_conjugate_of_partner": "adjoint image is the partner family up to the Gram matrix",
            "partner_rule_involutive": "partner parameter rule is an involution",
            "partner_valid": "partner family is a spread set",
        },
        "prop59": {
            "pseudoregulus_type": "Knuth linear sets are of pseudoregulus type",
            "scattered": "Knuth linear sets are scattered",
            "family17_transversals_in_R1": "first family transversals lie in the first regulus",
            "family17_reguli": "first family transversal reguli",
            "family19_reguli": "second family transversal reguli",
        },
        "thm510": {
            "round_trip_17": "Knuth recognition round trip, first family",
            "round_trip_19": "Knuth recognition round trip, second family",
            "round_trip_17_after_h": "Knuth recognition after a group element, first family",
            "round_trip_19_after_h": "Knuth recognition after a group element, second family",
            "rejects_field": "Knuth recognition rejects the field",
            "rejects_gtf": "Knuth recognition rejects twisted fields",
            "no_gtf_of_this_order": "no twisted field exists for q = 2",
        },
    }
    for k in ("bilinear", "involution", "anti_homomorphism", "inverse", "fixes_t_lambda", "rank_preserved",
              "swaps_systems"):
        A["prop51"][f"adjoint_{k}"] = f"adjoint: {k.replace('_', ' ')}"
    for k in ("conjugates_monomial", "conjugates_span", "fixes_spread_1", "fixed_elements_are_system_1",
              "order_divides_n_1", "orbit_of_I_1", "fixes_spread_2", "fixed_elements_are_system_2",
              "order_divides_n_2", "orbit_of_I_2", "upsilon2_conjugates"):
        A["thm52"][f"upsilon_{k}"] = f"conjugating collineations: {k.replace('_', ' ')}"
    return A


ANCHORS = _registry()
