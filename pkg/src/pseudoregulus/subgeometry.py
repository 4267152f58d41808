"""Subgeometries, Desarguesian spreads and projections.

The ambient space is PG(tn-1, q^t) with the canonical collineation Psi acting
coordinatewise as x -> x^q; its fixed points form the subgeometry
PG(tn-1, q). A spread element is kept as its extension X* (a Psi-stable
subspace), whose echelon basis then has all entries in F_q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _linalg as la
from .field_tower import ZERO, GaloisField, gf_create
from .proj_geometry import (
    BudgetExceeded,
    FqLinearSet,
    ProjSpace,
    ProjSubspace,
    SemilinearMap,
    intersect,
    normalize_rows,
    row_keys,
    span,
)
from .pseudoregulus import Pseudoregulus


class SubgeometryError(ValueError):
    pass


@dataclass(eq=False)
class CanonicalSubgeometry:
    n: int
    t: int
    q_degree: int
    field: GaloisField
    space: ProjSpace = dc_field(init=False)

    def __post_init__(self):
        if self.t < 2:
            raise SubgeometryError("the collineation must have order t >= 2")
        if self.field.e != self.q_degree * self.t:
            raise SubgeometryError("host field must be F_{q^t}")
        self.space = ProjSpace.over(self.field, self.n * self.t)

    @property
    def q(self) -> int:
        return self.field.p**self.q_degree

    @property
    def psi(self) -> SemilinearMap:
        return SemilinearMap(self.space, la.identity(self.space.r), self.q_degree)

    def psi_rows(self, V, j: int = 1) -> np.ndarray:
        return self.field.vfrob(la.as_codes(V), self.q_degree * j)

    def psi_space(self, S: ProjSubspace, j: int = 1) -> ProjSubspace:
        return S.frobenius(self.q_degree * j)

    def fixed_points(self) -> np.ndarray:
        """Points of the subgeometry: normalised vectors with entries in F_q."""
        return ProjSpace(self.field, self.q_degree, self.space.r).all_points()

    def num_fixed_points(self) -> int:
        return (self.q ** (self.n * self.t) - 1) // (self.q - 1)

    def stable_core(self, S: ProjSubspace) -> ProjSubspace:
        """Largest Psi-stable subspace inside S (the span of its subgeometry points)."""
        out = S
        for j in range(1, self.t):
            out = intersect(out, self.psi_space(S, j))
        return out

    def fix_meet(self, S: ProjSubspace) -> int:
        """Vector dimension over F_q of S cap Sigma."""
        return self.stable_core(S).vdim


def canonical_subgeometry(n: int, t: int, q: int) -> CanonicalSubgeometry:
    p = _prime_of(q)
    h = round(math.log(q, p))
    return CanonicalSubgeometry(n, t, h, gf_create(p, h * t))


def _prime_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise SubgeometryError("q must be a prime power")


@dataclass(eq=False)
class DesarguesianSpread:
    elements: list  # extensions X* as ProjSubspace of Sigma*
    director: ProjSubspace | None
    provenance: str
    geometry: CanonicalSubgeometry

    def __len__(self):
        return len(self.elements)

    def keyset(self) -> set:
        return {X.key() for X in self.elements}

    def validate(self) -> list[str]:
        G = self.geometry
        F = G.field
        problems = []
        n, t, q = G.n, G.t, G.q
        expected = (q ** (t * n) - 1) // (q**t - 1)
        if len(self.elements) != expected:
            problems.append(f"{len(self.elements)} elements, expected {expected}")
        keys = []
        for X in self.elements:
            if X.vdim != t:
                problems.append("element of wrong dimension")
                break
            if G.psi_space(X) != X:
                problems.append("extension is not Psi-stable")
                break
            sub = ProjSpace(F, G.q_degree, X.vdim).all_points()
            pts = la.matmul(F, sub, X.basis)
            keys.append(row_keys(F, normalize_rows(F, pts)))
        if keys:
            allk = np.concatenate(keys)
            if np.unique(allk).size != allk.size:
                problems.append("elements are not disjoint")
            if allk.size != G.num_fixed_points():
                problems.append("elements do not cover the subgeometry")
        if self.director is not None:
            problems += director_problems(self.director, self)
        return problems


def director_problems(H: ProjSubspace, D: DesarguesianSpread) -> list[str]:
    """Violations of the two director-space conditions for H and the spread D."""
    G = D.geometry
    out = []
    if H.vdim != G.n:
        out.append("director has wrong dimension")
        return out
    conj = span(*[G.psi_space(H, j) for j in range(G.t)])
    if conj.vdim != G.space.r:
        out.append("conjugates of the director do not span")
    for X in D.elements:
        if intersect(X, H).is_empty:
            out.append("an extended element misses the director")
            break
    return out


def default_director(G: CanonicalSubgeometry) -> ProjSubspace:
    """Rows whose i-th block is (1, w, ..., w^(t-1)) for a generator w of F_{q^t}."""
    F = G.field
    w = F.subfield_gen(F.e)
    rows = la.zeros((G.n, G.space.r))
    for i in range(G.n):
        for j in range(G.t):
            rows[i, i * G.t + j] = F.pow(w, j)
    return ProjSubspace.of(G.space, rows)


def extension_of_point(G: CanonicalSubgeometry, v) -> ProjSubspace:
    v = np.asarray(v, dtype=np.int64)
    return ProjSubspace.of(G.space, np.stack([G.psi_rows(v[None, :], j)[0] for j in range(G.t)]))


def spread_from_director(Theta: ProjSubspace, G: CanonicalSubgeometry) -> DesarguesianSpread:
    conj = span(*[G.psi_space(Theta, j) for j in range(G.t)])
    if conj.vdim != G.space.r:
        raise SubgeometryError("conjugates of the director do not span the space")
    pts = Theta.points()
    elems = {}
    for v in pts:
        X = extension_of_point(G, v)
        if X.vdim != G.t:
            raise SubgeometryError("degenerate extension")
        elems.setdefault(X.key(), X)
    return DesarguesianSpread(list(elems.values()), Theta, "director", G)


def field_reduction_spread(n: int, t: int, q: int) -> DesarguesianSpread:
    """V(n, q^t) read as V(nt, q) with the basis 1, w, ..., w^(t-1) in each coordinate."""
    G = canonical_subgeometry(n, t, q)
    F = G.field
    h = G.q_degree
    w = F.subfield_gen(F.e)
    basis = [F.pow(w, j) for j in range(t)]
    # F_q coordinates of each element of F_{q^t}
    scal = F.subfield_codes(h)
    coords = {}
    cur = {ZERO: ()}
    for b in basis:
        nxt = {}
        for val, c in cur.items():
            for a in scal:
                nxt[F.add(val, F.mul(a, b))] = c + (a,)
        cur = nxt
    coords = cur
    if len(coords) != F.order:
        raise SubgeometryError("basis is not an F_q-basis")  # pragma: no cover
    elems = {}
    for x in ProjSpace.over(F, n).all_points():
        rows = []
        for om in basis:
            y = F.vmul(x, om)
            rows.append([c for yi in y for c in coords[int(yi)]])
        X = ProjSubspace.of(G.space, np.array(rows, dtype=np.int64))
        elems.setdefault(X.key(), X)
    return DesarguesianSpread(list(elems.values()), None, "field-reduction", G)


def find_directors(D: DesarguesianSpread, budget: int = 5_000_000) -> list:
    """All (n-1)-spaces meeting every extended element and spanning with their conjugates."""
    G = D.geometry
    F = G.field
    n, t = G.n, G.t
    X = D.elements
    found = {}
    if n == 1:
        return [G.space.whole()]
    if n == 2:
        # the transversal through a in X_1 to X_2, X_3 is <a_2, a_3>, a = a_2 + a_3
        X1, X2, X3 = X[0], X[1], X[2]
        pts = X1.points()
        if pts.shape[0] * len(X) > budget:
            raise BudgetExceeded("director search over budget")
        B = np.concatenate([X2.basis, X3.basis])
        C = la.matmul(F, pts, la.inverse(F, B))
        A2 = la.matmul(F, C[:, :t], X2.basis)
        A3 = la.matmul(F, C[:, t:], X3.basis)
        keep = np.ones(pts.shape[0], dtype=bool)
        for Y in X[3:]:
            N = la.kernel(F, Y.basis).T  # x in Y iff x N = 0
            u = la.matmul(F, A2, N)
            w = la.matmul(F, A3, N)
            for j in range(N.shape[1]):
                for k in range(j + 1, N.shape[1]):
                    minor = F.vsub(F.vmul(u[:, j], w[:, k]), F.vmul(u[:, k], w[:, j]))
                    keep &= minor == ZERO
        for i in np.nonzero(keep)[0]:
            ell = ProjSubspace.of(G.space, np.stack([A2[i], A3[i]]))
            if ell.vdim == 2 and not director_problems(ell, D):
                found.setdefault(ell.key(), ell)
        return list(found.values())
    # general n: one point per element from the first n elements
    point_lists = [Y.points() for Y in X[:n]]
    total = int(np.prod([p.shape[0] for p in point_lists], dtype=object))
    if total > budget:
        raise BudgetExceeded("director search over budget")

    def rec(i, rows):
        if i == n:
            H = ProjSubspace.of(G.space, rows)
            if H.vdim == n and not director_problems(H, D):
                found.setdefault(H.key(), H)
            return
        for a in point_lists[i]:
            cand = np.concatenate([rows, a[None, :]])
            if la.rank(F, cand) == i + 1:
                rec(i + 1, cand)

    rec(0, la.zeros((0, G.space.r)))
    return list(found.values())


def director_orbit(Theta: ProjSubspace, G: CanonicalSubgeometry) -> list:
    return [G.psi_space(Theta, j) for j in range(G.t)]


# -- projections ------------------------------------------------------------

@dataclass(eq=False)
class ProjectionSpec:
    """Center Gamma and axis Lambda (given by a basis, which fixes coordinates on Lambda)."""

    geometry: CanonicalSubgeometry
    center: ProjSubspace
    axis_basis: np.ndarray

    def __post_init__(self):
        G = self.geometry
        self.axis_basis = la.as_codes(self.axis_basis)
        axis = ProjSubspace.of(G.space, self.axis_basis)
        if axis.vdim != self.axis_basis.shape[0]:
            raise SubgeometryError("axis basis is not independent")
        if not intersect(self.center, axis).is_empty:
            raise SubgeometryError("center meets the axis")
        if self.center.vdim + axis.vdim != G.space.r:
            raise SubgeometryError("center and axis do not span the space")
        if not self.center.is_empty and G.fix_meet(self.center) != 0:
            raise SubgeometryError("center meets the subgeometry")

    @property
    def axis(self) -> ProjSubspace:
        return ProjSubspace.of(self.geometry.space, self.axis_basis)

    def axis_space(self) -> ProjSpace:
        return ProjSpace.over(self.geometry.field, self.axis_basis.shape[0])

    def axis_coords(self, V) -> np.ndarray:
        """Axis coordinates of the projections of the rows of V."""
        G = self.geometry
        F = G.field
        B = np.concatenate([self.center.basis, self.axis_basis]) if self.center.vdim else self.axis_basis
        Binv = la.inverse(F, B)
        C = la.matmul(F, la.as_codes(V), Binv)
        return C[:, self.center.vdim:]

    def lift(self, coords) -> np.ndarray:
        return la.matmul(self.geometry.field, la.as_codes(coords), self.axis_basis)

    def lift_subspace(self, S: ProjSubspace) -> ProjSubspace:
        return ProjSubspace.of(self.geometry.space, self.lift(S.basis))


def project(G: CanonicalSubgeometry, spec: ProjectionSpec) -> FqLinearSet:
    """Image of the subgeometry, as the linear set of the projected standard basis."""
    rows = spec.axis_coords(la.identity(G.space.r))
    return FqLinearSet(spec.axis_space(), rows, G.q_degree)


@dataclass
class ProjectionResult:
    linear_set: FqLinearSet
    spec: ProjectionSpec
    i1: int
    i2: int
    s: int

    @property
    def pr_type(self) -> bool:
        return self.s == 1


def projection_from_director(Theta: ProjSubspace, G: CanonicalSubgeometry, i1: int, i2: int) -> ProjectionSpec:
    t = G.t
    if not (0 <= i1 < t and 0 <= i2 < t and i1 != i2):
        raise SubgeometryError("need distinct indices in [0, t)")
    conj = director_orbit(Theta, G)
    others = [conj[i] for i in range(t) if i not in (i1, i2)]
    center = span(*others) if others else G.space.empty()
    # keep the Psi-images of the director basis so that coordinates match the standard spec
    axis = np.concatenate([G.psi_rows(Theta.basis, i1), G.psi_rows(Theta.basis, i2)])
    return ProjectionSpec(G, center, axis)


def construct_by_projection(Theta: ProjSubspace, G: CanonicalSubgeometry, i1: int, i2: int) -> ProjectionResult:
    spec = projection_from_director(Theta, G, i1, i2)
    L = project(G, spec)
    s = math.gcd(i2 - i1, G.t)
    if s > 1:
        q_s = G.q**s
        if L.size() % q_s != 1 % q_s:
            raise SubgeometryError("projected set is not F_{q^s}-linear as expected")
    return ProjectionResult(L, spec, i1, i2, s)


@dataclass
class SpreadRecovery:
    spread: DesarguesianSpread
    theta: ProjSubspace  # director inside <Gamma, T_1> and its conjugates
    theta_bar: ProjSubspace
    m: int
    gamma_decomposition_ok: bool
    directors_found: list


def recover_spread(L: FqLinearSet, spec: ProjectionSpec, G: CanonicalSubgeometry,
                   P: Pseudoregulus, search_directors: bool = True) -> SpreadRecovery:
    t = G.t
    Gamma = spec.center
    elems = {}
    for s in P.lines:
        S = span(Gamma, spec.lift_subspace(s))
        X = G.stable_core(S)
        if X.vdim != t:
            raise SubgeometryError("a line of the pseudoregulus does not give a spread element")
        elems.setdefault(X.key(), X)

    def core_director(T):
        K = span(Gamma, spec.lift_subspace(T))
        out = K
        for j in range(1, t - 1):
            out = intersect(out, G.psi_space(K, j))
        return out

    Theta = core_director(P.T1)
    Theta2 = core_director(P.T2)
    D = DesarguesianSpread(list(elems.values()), Theta, "recovered", G)
    problems = D.validate()
    if problems:
        raise SubgeometryError("recovered spread invalid: " + "; ".join(problems))
    ms = [m for m in range(1, t) if G.psi_space(Theta, m) == Theta2]
    if len(ms) != 1:
        raise SubgeometryError("second director is not a conjugate of the first")
    m = ms[0]
    if math.gcd(m, t) != 1:
        raise SubgeometryError("gcd(m, t) != 1")
    theta_bar = G.psi_space(Theta, 2 * m + 1)
    parts = [G.psi_space(theta_bar, m * k) for k in range(t - 2)]
    ok = span(*parts) == Gamma if parts else Gamma.is_empty
    found = find_directors(D) if search_directors else []
    return SpreadRecovery(D, Theta, theta_bar, m, ok, found)
