"""Semifield spread sets: Generalized Twisted Fields and 2-dimensional Knuth semifields.

A spread set is an F_q-subspace C of ``E = End(F_{q^{nt}}, F_{q^t})`` of dimension
nt whose non-zero elements are invertible. Its linear set lives in
PG(E, F_{q^t}) = PG(n^2 - 1, q^t) with the matrix coordinates of
:class:`~pseudoregulus.segre.EndSpace`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import _linalg as la
from .field_tower import ZERO, GaloisField, gf_create
from .proj_geometry import (
    FqLinearSet,
    ProjSpace,
    ProjSubspace,
    apply_semilinear,
    format_vector,
    fq_rref_subspaces,
    intersect,
    is_scattered,
    normalize_rows,
    parse_vector,
    row_keys,
)
from .pseudoregulus import (
    Pseudoregulus,
    PseudoregulusError,
    _baer_map,
    _t2_pseudoregulus,
    detect_line_pr_points,
    detect_pseudoregulus,
)
from .segre import (
    EndSpace,
    HElement,
    _prime_power,
    d_subspace_witness,
    h_act,
    identity_space,
)


class SemifieldError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# -- spread sets -----------------------------------------------------------------

@dataclass(eq=False)
class SpreadSetSemifield:
    """F_q-basis (as matrices) of a spread set in End(F_{q^{nt}}, F_{q^t})."""

    end: EndSpace
    matrices: np.ndarray  # (nt, n, n)
    q_degree: int
    family: str = ""

    def __post_init__(self):
        self.matrices = np.asarray(self.matrices, dtype=np.int64).reshape(-1, self.end.n, self.end.n)
        if self.end.d % self.q_degree:
            raise SemifieldError("F_q must be a subfield of F_{q^t}")

    @property
    def n(self) -> int:
        return self.end.n

    @property
    def t(self) -> int:
        return self.end.d // self.q_degree

    @property
    def q(self) -> int:
        return self.end.field.p**self.q_degree

    def polys(self) -> list:
        return [self.end.qpoly(c) for c in self.end.coeffs_of(self.matrices)]

    def linear_set(self) -> FqLinearSet:
        return FqLinearSet(self.end.space, self.end.flatten(self.matrices), self.q_degree)

    def validate(self) -> list[str]:
        out = []
        if self.matrices.shape[0] != self.n * self.t:
            out.append(f"dimension {self.matrices.shape[0]} instead of nt = {self.n * self.t}")
        try:
            L = self.linear_set()
        except Exception as exc:  # F_q-dependent basis
            return out + [str(exc)]
        if np.any(self.end.dets(self.end.unflatten(L.points())) == ZERO):
            out.append("a non-zero element is not invertible")
        return out

    def singular_witness(self):
        L = self.linear_set()
        pts = L.points()
        bad = np.nonzero(self.end.dets(self.end.unflatten(pts)) == ZERO)[0]
        return None if bad.size == 0 else pts[bad[0]]

    def transformed(self, h: HElement) -> "SpreadSetSemifield":
        return SpreadSetSemifield(self.end, h.apply_matrices(self.matrices), self.q_degree, self.family)

    def same_spread_set(self, other: "SpreadSetSemifield") -> bool:
        A = self.end.flatten(self.matrices)
        B = self.end.flatten(other.matrices)
        F = self.end.field
        sp = ProjSpace(F, self.q_degree, A.shape[1])
        # compare F_q-spans through the F_p blow-up
        from .field_tower import fp_rank
        bA, bB = sp.fp_blowup(_fq_rows(F, self.q_degree, A)), sp.fp_blowup(_fq_rows(F, self.q_degree, B))
        r = fp_rank(bA, F.p)
        return r == fp_rank(bB, F.p) == fp_rank(np.concatenate([bA, bB]), F.p)


def _fq_rows(F: GaloisField, h: int, A) -> np.ndarray:
    return np.concatenate([F.vmul(s, A) for s in F.fp_basis(h)], axis=0)


def spreadset_linear_set(C: SpreadSetSemifield) -> FqLinearSet:
    return C.linear_set()


def field_spread_set(q: int, n: int, t: int) -> SpreadSetSemifield:
    """Right multiplications of the field F_{q^{nt}} itself."""
    p, h = _prime_power(q)
    F = gf_create(p, h * n * t)
    E = EndSpace(F, h * t)
    ys = F.relative_basis(h, F.e)
    return SpreadSetSemifield(E, E.matrices(np.array([E.t(y).coeffs for y in ys])), h, "field")


# -- Generalized Twisted Fields ------------------------------------------------------

@dataclass(frozen=True)
class GTFParams:
    q: int
    n: int
    t: int
    c: int  # code in GF(q^{nt})
    l: int
    m: int

    def host(self) -> GaloisField:
        p, h = _prime_power(self.q)
        return gf_create(p, h * self.n * self.t)

    def problems(self) -> list[str]:
        n, t, l, m = self.n, self.t, self.l, self.m
        out = []
        if n < 2:
            out.append("need n >= 2")
        if not 1 <= l <= n - 1:
            out.append("l out of range")
        if not 1 <= m <= n * t - 1:
            out.append("m out of range")
        if m == t * l:
            out.append("m = tl")
        if math.gcd(l, n) != 1:
            out.append("gcd(l, n) != 1")
        if math.gcd(t, m) != 1:
            out.append("gcd(t, m) != 1")
        if self.c == ZERO:
            out.append("c = 0")
        return out


def gtf_excluded_set(q: int, n: int, t: int, l: int, m: int) -> dict:
    """{x^(q^{tl}-1) y^(q^m-1)} as codes, each mapped to one witness (x, y)."""
    p, h = _prime_power(q)
    F = gf_create(p, h * n * t)
    M = F.mult_order
    a, b = (q ** (t * l) - 1) % M, (q**m - 1) % M
    ks = np.arange(M, dtype=np.int64)
    va, ia = np.unique((a * ks) % M, return_index=True)
    vb, ib = np.unique((b * ks) % M, return_index=True)
    out = {}
    for x_code, i in zip(va, ia):
        for y_code, j in zip(vb, ib):
            out.setdefault(int((x_code + y_code) % M), (int(i), int(j)))
    return out


def gtf_check(params: GTFParams):
    """None when valid; otherwise raises with the failed clause and a witness."""
    probs = params.problems()
    if probs:
        raise SemifieldError("; ".join(probs))
    ex = gtf_excluded_set(params.q, params.n, params.t, params.l, params.m)
    if params.c in ex:
        raise SemifieldError("c lies in the excluded product set", witness=ex[params.c])


def gtf_spread_set(params: GTFParams) -> SpreadSetSemifield:
    """phi_y(x) = y x - c y^(q^m) x^(q^{tl}) for y in an F_q-basis."""
    gtf_check(params)
    p, h = _prime_power(params.q)
    F = params.host()
    E = EndSpace(F, h * params.t)
    coeffs = []
    for y in F.relative_basis(h, F.e):
        c = [ZERO] * params.n
        c[0] = y
        c[params.l] = F.neg(F.mul(params.c, F.frob(y, h * params.m)))
        coeffs.append(c)
    return SpreadSetSemifield(E, E.matrices(np.array(coeffs, dtype=np.int64)), h, "gtf")


def gtf_find_params(q: int, n: int, t: int, limit: int | None = None) -> list:
    """Valid parameter tuples, (l, m) lexicographic then c by exponent."""
    p, h = _prime_power(q)
    F = gf_create(p, h * n * t)
    out = []
    for l in range(1, n):
        for m in range(1, n * t):
            trial = GTFParams(q, n, t, 0, l, m)
            if trial.problems():
                continue
            ex = gtf_excluded_set(q, n, t, l, m)
            for c in range(F.mult_order):
                if c not in ex:
                    out.append(GTFParams(q, n, t, c, l, m))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


# -- Knuth semifields -------------------------------------------------------------

@dataclass(frozen=True)
class KnuthParams:
    q: int
    t: int
    family: int  # 17 or 19
    sigma_exp: int  # sigma: x -> x^(q^s)
    f: int  # codes in GF(q^{2t}), lying in GF(q^t)
    g: int

    def host(self) -> GaloisField:
        p, h = _prime_power(self.q)
        return gf_create(p, 2 * h * self.t)


def knuth_root(params: KnuthParams):
    """A root of x^(sigma+1) + g x - f in F_{q^t}, or None."""
    p, h = _prime_power(params.q)
    F = params.host()
    d = h * params.t
    xs = np.array(F.subfield_codes(d), dtype=np.int64)
    s1 = params.q**params.sigma_exp + 1
    vals = F.vsub(F.vadd(F.vpow(xs, s1), F.vmul(params.g, xs)), params.f)
    hit = np.nonzero(vals == ZERO)[0]
    return None if hit.size == 0 else int(xs[hit[0]])


def knuth_check(params: KnuthParams):
    p, h = _prime_power(params.q)
    F = params.host()
    d = h * params.t
    if params.family not in (17, 19):
        raise SemifieldError("family must be 17 or 19")
    if params.t < 2:
        raise SemifieldError("need t >= 2")
    if math.gcd(params.sigma_exp, params.t) != 1:
        raise SemifieldError("sigma must fix exactly F_q")
    if params.f == ZERO or params.g == ZERO:
        raise SemifieldError("f and g must be non-zero")
    if not (F.in_subfield(params.f, d) and F.in_subfield(params.g, d)):
        raise SemifieldError("f and g must lie in F_{q^t}")
    r = knuth_root(params)
    if r is not None:
        raise SemifieldError("x^(sigma+1) + g x - f has a root", witness=r)


def knuth_find_params(q: int, t: int, family: int = 17, sigma_exp: int = 1, limit: int | None = None) -> list:
    """Valid (f, g), both ascending by generator exponent of the host field."""
    p, h = _prime_power(q)
    F = gf_create(p, 2 * h * t)
    sub = sorted(c for c in F.subfield_codes(h * t) if c != ZERO)
    out = []
    for f in sub:
        for g in sub:
            K = KnuthParams(q, t, family, sigma_exp, f, g)
            try:
                knuth_check(K)
            except SemifieldError:
                continue
            out.append(K)
            if limit is not None and len(out) >= limit:
                return out
    return out


def knuth_matrices(params: KnuthParams, xs, ys) -> np.ndarray:
    p, h = _prime_power(params.q)
    F = params.host()
    s = h * params.sigma_exp
    xs, ys = np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64)
    out = la.zeros((xs.size, 2, 2))
    out[:, 0, 0] = xs
    out[:, 0, 1] = ys
    if params.family == 17:
        out[:, 1, 0] = F.vmul(params.f, F.vfrob(ys, s))
        out[:, 1, 1] = F.vadd(F.vfrob(xs, s), F.vmul(params.g, F.vfrob(ys, s)))
    else:
        out[:, 1, 0] = F.vmul(params.f, F.vfrob(ys, -s))
        out[:, 1, 1] = F.vadd(F.vfrob(xs, s), F.vmul(params.g, ys))
    return out


def knuth_spread_set(params: KnuthParams) -> SpreadSetSemifield:
    knuth_check(params)
    p, h = _prime_power(params.q)
    F = params.host()
    E = EndSpace(F, h * params.t)
    w = F.relative_basis(h, h * params.t)
    xs = list(w) + [ZERO] * len(w)
    ys = [ZERO] * len(w) + list(w)
    return SpreadSetSemifield(E, knuth_matrices(params, xs, ys), h, f"knuth{params.family}")


def knuth_transpose_params(params: KnuthParams) -> KnuthParams:
    """Parameters of the transposed family: (sigma, 1/f^(sigma^-1), g/f)."""
    p, h = _prime_power(params.q)
    F = params.host()
    s = h * params.sigma_exp
    if params.family == 17:
        f2 = F.inv(F.frob(params.f, -s))
        g2 = F.div(params.g, params.f)
        return KnuthParams(params.q, params.t, 19, params.sigma_exp, f2, g2)
    # inverse of the rule above
    f = F.inv(F.frob(params.f, s))
    g = F.mul(params.g, f)
    return KnuthParams(params.q, params.t, 17, params.sigma_exp, f, g)


# -- quadric lines (n = 2) ----------------------------------------------------------

def regulus_of_line(E: EndSpace, S: ProjSubspace) -> int:
    """1 or 2 for a line of the Segre quadric in R_1 or R_2, else 0."""
    if E.n != 2 or S.vdim != 2:
        return 0
    F = E.field
    mats = E.unflatten(S.basis)
    pts = E.unflatten(S.points())
    if np.any(E.dets(pts) != ZERO):
        return 0
    if la.rank(F, np.concatenate([mats[0], mats[1]], axis=1)) == 1:
        return 1  # common column space: fixed kernel
    if la.rank(F, np.concatenate([mats[0], mats[1]], axis=0)) == 1:
        return 2
    return 0


def quadric_lines(E: EndSpace, which: int) -> list:
    F = E.field
    out = []
    for c in ProjSpace(F, E.d, 2).all_points():
        mats = []
        for e in la.identity(2):
            M = la.zeros((2, 2))
            for i in range(2):
                for j in range(2):
                    a, b = (c[i], e[j]) if which == 1 else (e[i], c[j])
                    M[i, j] = F.mul(int(a), int(b))
            mats.append(M)
        out.append(E.subspace(np.stack(mats)))
    return out


def _is_external(E: EndSpace, S: ProjSubspace) -> bool:
    return bool(np.all(E.dets(E.unflatten(S.points())) != ZERO))


# -- coordinates on a subspace ----------------------------------------------------------

def _coords_in(F: GaloisField, B: np.ndarray, rows: np.ndarray) -> np.ndarray:
    out = []
    for v in la.as_codes(rows):
        x = la.solve(F, B.T, v)
        if x is None:
            raise SemifieldError("vector outside the subspace")
        out.append(x)
    return np.array(out, dtype=np.int64)


def lambda_basis(E: EndSpace, l: int) -> np.ndarray:
    """Matrices spanning <I, I^{Upsilon_1^l}>."""
    F = E.field
    polys = [E.monomial(i % F.mult_order, 0) for i in range(E.n)]
    polys += [E.monomial(i % F.mult_order, l) for i in range(E.n)]
    return E.matrices(np.array([p.coeffs for p in polys], dtype=np.int64))


def linear_set_in_lambda(C: SpreadSetSemifield, l: int) -> FqLinearSet:
    """L(C) in the coordinates of <I, I^{Upsilon_1^l}> = PG(2n-1, q^t)."""
    E = C.end
    B = E.flatten(lambda_basis(E, l))
    X = _coords_in(E.field, B, E.flatten(C.matrices))
    return FqLinearSet(ProjSpace(E.field, E.d, 2 * E.n), X, C.q_degree)


def induced_line_set(C: SpreadSetSemifield, l: int) -> np.ndarray:
    """For t = 1: the points <(a_0, a_l)> of PG(1, q^n) induced by L(C).

    Each spread element {t_a o phi} of D_1(I) is read as <coefficients of phi>.
    """
    E = C.end
    F = E.field
    coeffs = normalize_rows(F, E.coeffs_of(E.unflatten(C.linear_set().points())))
    other = [i for i in range(E.n) if i not in (0, l)]
    if other and np.any(coeffs[:, other] != ZERO):
        raise SemifieldError("induced set is not on the line joining I and its conjugate")
    return np.unique(normalize_rows(F, coeffs[:, [0, l]]), axis=0)


def gtf_structure_check(params: GTFParams, seed: int = 0) -> dict:
    """Pseudoregulus structure of L(G) with transversals I and I^{Upsilon_1^l}."""
    C = gtf_spread_set(params)
    E = C.end
    F = E.field
    L = C.linear_set()
    out = {"valid": not C.validate(), "rank": L.rank}
    B = E.flatten(lambda_basis(E, params.l))
    out["in_lambda"] = bool(all(la.solve(F, B.T, v) is not None for v in L.basis))
    if params.t >= 2:
        LL = linear_set_in_lambda(C, params.l)
        out["scattered"] = is_scattered(LL)
        n = E.n
        Id = la.identity(2 * n)
        U1 = ProjSubspace.of(LL.space, Id[:n])
        U2 = ProjSubspace.of(LL.space, Id[n:])
        res = detect_pseudoregulus(LL, transversal_candidates=[U1, U2], seed=seed)
        out["detect_kind"] = res.kind
        if res.is_pr:
            P = res.pseudoregulus
            out["transversals_are_I_and_conjugate"] = {P.T1.key(), P.T2.key()} == {U1.key(), U2.key()}
            out["validate"] = P.validate(LL)
        else:
            out["transversals_are_I_and_conjugate"] = False
    else:
        pts = induced_line_set(C, params.l)
        out["induced_points"] = int(pts.shape[0])
        res = detect_line_pr_points(F, F.e, C.q_degree, pts)
        out["detect_kind"] = res.kind
        want = frozenset(int(k) for k in row_keys(F, np.array([[0, ZERO], [ZERO, 0]])))
        out["transversals_are_I_and_conjugate"] = want in res.pair_keys(F)
        out["scattered"] = True
    return out


def knuth_structure_check(params: KnuthParams, seed: int = 0) -> dict:
    """Transversal lines of L(K) and the transposition/adjoint images of a Knuth spread set."""
    C = knuth_spread_set(params)
    E = C.end
    F = E.field
    L = C.linear_set()
    out = {"valid": not C.validate(), "scattered": is_scattered(L), "rank": L.rank}
    cands, why = _knuth_candidates(C, L, seed)
    regs = sorted({w for _, w in cands})
    out["transversal_reguli"] = regs
    out["transversals_in_R1"] = 1 in regs if C.t == 2 else regs == [1]
    partner = knuth_transpose_params(params)
    Cp = knuth_spread_set(partner)
    out["transpose_is_partner"] = C.transformed(HElement.transposition(E)).linear_set().same_points(Cp.linear_set())
    # the adjoint is G M^T G^{-1}: the partner up to a Gram conjugation
    G = E.gram()
    adj = SpreadSetSemifield(E, np.stack([E.from_matrix(m).adjoint().matrix() for m in C.matrices]), C.q_degree)
    conj = HElement(E, G, la.inverse(F, G))
    out["adjoint_is_gram_conjugate_of_partner"] = adj.linear_set().same_points(Cp.transformed(conj).linear_set())
    out["adjoint_is_partner"] = adj.linear_set().same_points(Cp.linear_set())
    for name, X in (("recognize", C), ("recognize_partner", Cp)):
        r = recognize_knuth(X, seed=seed)
        out[name] = r.kind == "knuth" and r.params.family == int(X.family[-2:]) and \
            knuth_spread_set(r.params).same_spread_set(X.transformed(r.normalizer))
    return out


# -- recognition ---------------------------------------------------------------------

@dataclass
class Recognition:
    kind: str  # "gtf", "knuth" or "not_gtf", "not_knuth"
    params: object = None
    normalizer: HElement | None = None  # maps the input onto the rebuilt spread set
    reason: str | None = None
    details: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.kind.startswith("not_")


def _interpolate_linear(F: GaloisField, h: int, k: int, xs, vals) -> np.ndarray:
    """Coefficients g_j with sum_j g_j x^(q^j) = val on F_q-independent xs (k of them)."""
    W = np.stack([F.vfrob(np.asarray(xs, dtype=np.int64), h * j) for j in range(k)], axis=1)
    x = la.solve(F, W, np.asarray(vals, dtype=np.int64))
    if x is None:
        raise SemifieldError("interpolation failed")
    return x


def _det_polar(F: GaloisField, x, y) -> np.ndarray:
    """Polar form of the 2x2 determinant on flattened rows."""
    a = F.vadd(F.vmul(x[..., 0], y[..., 3]), F.vmul(x[..., 3], y[..., 0]))
    b = F.vadd(F.vmul(x[..., 1], y[..., 2]), F.vmul(x[..., 2], y[..., 1]))
    return F.vsub(a, b)


def _t2_polar_candidates(C: SpreadSetSemifield, L: FqLinearSet) -> list:
    """External lines T with T^psi the polar line of T (n = t = 2)."""
    E = C.end
    F = E.field
    psi = _baer_map(L)
    B = np.stack(list(fq_rref_subspaces(F, E.d, 4, 2)))  # (N, 2, 4)
    scal = np.array(F.subfield_codes(E.d), dtype=np.int64)
    # points b0 + a b1 and b1 of every line
    pts = F.vadd(B[:, None, 0, :], F.vmul(scal[None, :, None], B[:, None, 1, :]))
    pts = np.concatenate([pts, B[:, None, 1, :]], axis=1)
    ext = np.all(E.dets(pts.reshape(-1, 2, 2)).reshape(pts.shape[:2]) != ZERO, axis=1)
    B = B[ext]
    img = psi.apply_rows(B.reshape(-1, 4)).reshape(B.shape)
    ok = np.ones(B.shape[0], dtype=bool)
    for i in range(2):
        for j in range(2):
            ok &= _det_polar(F, img[:, i], B[:, j]) == ZERO
    out = []
    for T_rows, Tp_rows in zip(B[ok], img[ok]):
        if la.rank(F, np.concatenate([T_rows, Tp_rows])) == 4:
            out.append((ProjSubspace.of(E.space, T_rows), ProjSubspace.of(E.space, Tp_rows)))
    return out


def _lift(basis: np.ndarray, S: ProjSubspace, space: ProjSpace) -> ProjSubspace:
    F = space.field
    return ProjSubspace.of(space, la.matmul(F, S.basis, basis))


def _gtf_transversal_pairs(C: SpreadSetSemifield, L: FqLinearSet, seed: int):
    """Candidate (X, X') pairs and a reason when there is none."""
    E = C.end
    F = E.field
    n, t = E.n, C.t
    span_rows = la.row_basis(F, L.basis)
    if span_rows.shape[0] != 2 * n:
        return [], f"L(C) spans a space of vector dimension {span_rows.shape[0]}, not 2n"
    if t == 2:
        if n != 2:
            return [], "t = 2 recognition is implemented for n = 2"
        pairs = _t2_polar_candidates(C, L)
        if not pairs:
            return [], "no external transversal line whose partner is its polar line"
        return [p for T, Tp in pairs for p in ((T, Tp),)], None
    LL = FqLinearSet(ProjSpace(F, E.d, 2 * n), _coords_in(F, span_rows, L.basis), C.q_degree)
    try:
        res = detect_pseudoregulus(LL, seed=seed)
    except PseudoregulusError as exc:
        return [], str(exc)
    if not res.is_pr:
        return [], f"not of pseudoregulus type: {res.reason}"
    P = res.pseudoregulus
    T1, T2 = _lift(span_rows, P.T1, E.space), _lift(span_rows, P.T2, E.space)
    return [(T1, T2), (T2, T1)], None


def recognize_gtf(C: SpreadSetSemifield, normalizers=None, seed: int = 0) -> Recognition:
    """Decide whether C is, up to the H-action, a Generalized Twisted Field.

    For t >= 2 the transversal spaces of L(C) must be conjugate D-subspaces;
    after moving them to I and I^{Upsilon_1^l} the map A -> B of the elements
    A x + B x^(Q^l) has to be a monomial -c A^(q^m). For t = 1 the candidate
    normalizations are ``normalizers`` (default: the identity) and the induced
    line set must be of pseudoregulus type with transversal points I and its conjugate.
    """
    E = C.end
    n, t = E.n, C.t
    probs = C.validate()
    if probs:
        return Recognition("not_gtf", reason="not a spread set: " + "; ".join(probs))
    if n < 2:
        return Recognition("not_gtf", reason="need n >= 2")
    L = C.linear_set()
    if t >= 2 and not is_scattered(L):
        return Recognition("not_gtf", reason="L(C) is not scattered")
    if t >= 2:
        pairs, why = _gtf_transversal_pairs(C, L, seed)
        if not pairs:
            return Recognition("not_gtf", reason=why)
        attempts = []
        for X, Xp in pairs:
            hX = d_subspace_witness(E, X)
            if hX is None:
                attempts.append("transversal space is not a D-subspace")
                continue
            attempts.append(_read_gtf(C, hX.inverse(), Xp))
            if isinstance(attempts[-1], Recognition):
                return attempts[-1]
        return Recognition("not_gtf", reason=attempts[-1] if attempts else why,
                           details={"candidates": len(pairs)})
    last = "no candidate normalization"
    for g in normalizers or [HElement.identity(E)]:
        r = _read_gtf(C, g, None)
        if isinstance(r, Recognition):
            return r
        last = r
    return Recognition("not_gtf", reason=last)


def _read_gtf(C: SpreadSetSemifield, g: HElement, Xp):
    """Try one normalization g (X -> I); returns a Recognition or a failure reason."""
    E = C.end
    F = E.field
    n, t, h = E.n, C.t, C.q_degree
    Cn = C.transformed(g)
    if Xp is not None:
        img = h_act(g, Xp)
        ls = [l for l in range(1, n) if img == identity_space(E, l)]
        if not ls:
            return "transversal spaces are not conjugate D-subspaces"
        l = ls[0]
    else:
        coeffs = E.coeffs_of(Cn.matrices)
        supp = [i for i in range(1, n) if np.any(coeffs[:, i] != ZERO)]
        if len(supp) != 1:
            return "L(C) is not contained in the join of I and one conjugate"
        l = supp[0]
        try:
            pts = induced_line_set(Cn, l)
        except SemifieldError as exc:
            return str(exc)
        res = detect_line_pr_points(F, F.e, h, pts)
        want = frozenset(int(k) for k in row_keys(F, np.array([[0, ZERO], [ZERO, 0]])))
        if not res.pairs or want not in res.pair_keys(F):
            return "induced line set is not of pseudoregulus type with transversal points I and its conjugate"
    coeffs = E.coeffs_of(Cn.matrices)
    others = [i for i in range(n) if i not in (0, l)]
    if others and np.any(coeffs[:, others] != ZERO):
        return "L(C) is not contained in the join of I and its conjugate"
    A, B = coeffs[:, 0], coeffs[:, l]
    gam = _interpolate_linear(F, h, n * t, A, B)
    nz = [k for k in range(n * t) if gam[k] != ZERO]
    if len(nz) != 1:
        return "the map between the transversal spaces is not a monomial"
    m = nz[0]
    params = GTFParams(C.q, n, t, F.neg(int(gam[m])), l, m)
    try:
        rebuilt = gtf_spread_set(params)
    except SemifieldError as exc:
        return f"read-off parameters are invalid: {exc}"
    if not rebuilt.same_spread_set(Cn) or not rebuilt.linear_set().same_points(Cn.linear_set()):
        return "rebuilt spread set differs"  # pragma: no cover
    return Recognition("gtf", params, g, details={"l": l, "m": m})


def _knuth_candidates(C: SpreadSetSemifield, L: FqLinearSet, seed: int):
    """(pseudoregulus, regulus index) pairs with transversal lines on the quadric."""
    E = C.end
    t = C.t
    out = []
    if t == 2:
        psi = _baer_map(L)
        for which in (1, 2):
            for r in quadric_lines(E, which):
                rp = apply_semilinear(psi, r)
                if intersect(r, rp).is_empty and regulus_of_line(E, rp) == which:
                    out.append((_t2_pseudoregulus(L, r, psi), which))
        return out, None if out else "no transversal line pair on the quadric"
    try:
        res = detect_pseudoregulus(L, seed=seed)
    except PseudoregulusError as exc:
        return [], str(exc)
    if not res.is_pr:
        return [], f"not of pseudoregulus type: {res.reason}"
    P = res.pseudoregulus
    w1, w2 = regulus_of_line(E, P.T1), regulus_of_line(E, P.T2)
    if w1 == 0 or w2 == 0 or w1 != w2:
        return [], "transversal lines are not contained in the quadric"
    return [(P, w1), (Pseudoregulus(P.lines, P.T2, P.T1), w1)], None


def recognize_knuth(C: SpreadSetSemifield, seed: int = 0, family: int | None = None) -> Recognition:
    """Decide whether C is, up to the H-action, a Knuth semifield of family 17 or 19.

    ``family`` restricts the search to transversal lines in R_1 (17) or R_2 (19);
    for t = 2 the pseudoregulus is not unique and both readings can exist.
    """
    E = C.end
    if E.n != 2:
        return Recognition("not_knuth", reason="need n = 2")
    probs = C.validate()
    if probs:
        return Recognition("not_knuth", reason="not a spread set: " + "; ".join(probs))
    L = C.linear_set()
    if not is_scattered(L):
        return Recognition("not_knuth", reason="L(C) is not scattered")
    cands, why = _knuth_candidates(C, L, seed)
    last = why
    if family is not None:
        cands = [(P, w) for P, w in cands if w == {17: 1, 19: 2}[family]]
        last = last if cands else f"no transversal pair for family {family}"
    for P, which in cands:
        r = _read_knuth(C, P, which)
        if isinstance(r, Recognition):
            return r
        last = r
    return Recognition("not_knuth", reason=last)


def _column_vector(E: EndSpace, S: ProjSubspace, which: int) -> np.ndarray:
    """The fixed column (R_1) or row (R_2) direction of an R-line."""
    M = E.unflatten(S.basis)[0]
    F = E.field
    if which == 1:
        j = int(np.argmax(np.any(M != ZERO, axis=0)))
        return normalize_rows(F, M[:, j][None])[0]
    i = int(np.argmax(np.any(M != ZERO, axis=1)))
    return normalize_rows(F, M[i][None])[0]


def _read_knuth(C: SpreadSetSemifield, P: Pseudoregulus, which: int):
    E = C.end
    F = E.field
    g = HElement.identity(E) if which == 1 else HElement.transposition(E)
    r, rp = h_act(g, P.T1), h_act(g, P.T2)
    lines = [h_act(g, s) for s in P.lines]
    c1, c2 = _column_vector(E, r, 1), _column_vector(E, rp, 1)
    Pm = la.inverse(F, np.stack([c1, c2], axis=1))
    hp = HElement(E, Pm, la.identity(2))
    g = g.then(hp)
    r, rp = h_act(hp, r), h_act(hp, rp)
    last = "no pseudoregulus line"
    # the normal form needs a line s whose points on r and r' are not polar; try each line
    for s in lines:
        out = _read_knuth_line(C, g, h_act(hp, s), r, rp, which)
        if isinstance(out, Recognition):
            return out
        last = out
    return last


def _read_knuth_line(C: SpreadSetSemifield, g: HElement, s: ProjSubspace, r: ProjSubspace,
                     rp: ProjSubspace, which: int):
    E = C.end
    F = E.field
    h, t = C.q_degree, C.t
    a = intersect(s, r).basis[0].reshape(2, 2)
    b = intersect(s, rp).basis[0].reshape(2, 2)
    Qm = la.inverse(F, np.stack([a[0], b[1]]))
    g = g.then(HElement(E, la.identity(2), Qm))
    Cn = C.transformed(g)
    rows = E.flatten(Cn.matrices)
    xs, ys, m2, m3 = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    k = len(xs)
    W = np.concatenate([np.stack([F.vfrob(xs, h * j) for j in range(t)], axis=1),
                        np.stack([F.vfrob(ys, h * j) for j in range(t)], axis=1)], axis=1)
    c2_ = la.solve(F, W, m2)
    c3_ = la.solve(F, W, m3)
    if c2_ is None or c3_ is None or k != 2 * t:
        return "second row is not an F_q-linear function of the first"  # pragma: no cover
    h_x, h_y, g_x, g_y = c2_[:t], c2_[t:], c3_[:t], c3_[t:]
    if np.any(h_x != ZERO):
        return "h(x, y) depends on x"
    sx = [j for j in range(t) if g_x[j] != ZERO]
    if len(sx) != 1:
        return "the x-part of g is not a single sigma-power"
    s_exp = sx[0]
    if [j for j in range(t) if h_y[j] != ZERO] != [s_exp] or [j for j in range(t) if g_y[j] != ZERO] != [s_exp]:
        return "the maps do not share one companion automorphism"
    if math.gcd(s_exp, t) != 1:
        return "companion automorphism does not fix exactly F_q"
    alpha, beta, gamma = int(h_y[s_exp]), int(g_x[s_exp]), int(g_y[s_exp])
    omega = HElement(E, np.array([[0, ZERO], [ZERO, F.inv(beta)]]), la.identity(2))
    g = g.then(omega)
    params = KnuthParams(C.q, t, 17, s_exp, F.div(alpha, beta), F.div(gamma, beta))
    try:
        rebuilt = knuth_spread_set(params)
    except SemifieldError as exc:
        return f"read-off parameters are invalid: {exc}"
    Cn = C.transformed(g)
    if not rebuilt.same_spread_set(Cn):
        return "rebuilt spread set differs"  # pragma: no cover
    if which == 2:
        params = knuth_transpose_params(params)
        g = g.then(HElement.transposition(E))
        rebuilt = knuth_spread_set(params)
        if not rebuilt.same_spread_set(C.transformed(g)):
            return "rebuilt transposed spread set differs"  # pragma: no cover
    return Recognition("knuth", params, g, details={"regulus": which})


# -- spread-set files ------------------------------------------------------------

def format_spread_set(C: SpreadSetSemifield) -> str:
    lines = [f"q={C.q} t={C.t} n={C.n} family={C.family or 'unknown'}"]
    for c in C.end.coeffs_of(C.matrices):
        lines.append(format_vector(c))
    return "\n".join(lines) + "\n"


def parse_spread_set(text: str) -> SpreadSetSemifield:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise SemifieldError("empty spread-set file")
    header = {}
    for tok in rows[0].split():
        if "=" not in tok:
            raise SemifieldError(f"bad header token {tok!r}")
        k, v = tok.split("=", 1)
        header[k] = v
    try:
        q, t, n = int(header["q"]), int(header["t"]), int(header["n"])
    except (KeyError, ValueError) as exc:
        raise SemifieldError("header needs q=, t= and n=") from exc
    p, h = _prime_power(q)
    F = gf_create(p, h * n * t)
    E = EndSpace(F, h * t)
    coeffs = np.array([parse_vector(r) for r in rows[1:]], dtype=np.int64)
    if coeffs.ndim != 2 or coeffs.shape[1] != n:
        raise SemifieldError("each basis line needs n coefficients")
    if np.any(coeffs >= F.mult_order):
        raise SemifieldError("coefficient exponent out of range")
    fam = header.get("family", "")
    return SpreadSetSemifield(E, E.matrices(coeffs), h, "" if fam == "unknown" else fam)


def read_spread_set(path) -> SpreadSetSemifield:
    return parse_spread_set(Path(path).read_text())


def write_spread_set(C: SpreadSetSemifield, path):
    Path(path).write_text(format_spread_set(C))
