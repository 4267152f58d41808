"""Endomorphism spaces, the Segre variety S_{n,n} and its symmetry group.

``E = End(F_{Q^n}, F_Q)`` is modelled twice: as linearized polynomials
``phi(x) = sum beta_i x^(Q^i)`` (:class:`QPoly`) and as n x n matrices over
F_Q in the row convention, row i holding the coordinates of ``phi(z^i)`` in
the basis ``1, z, ..., z^(n-1)`` (z the generator of the host field). The
projective space PG(E, F_Q) uses the flattened matrix as coordinates, so the
Segre variety is the set of rank-1 points and the secant variety Omega is the
determinantal hypersurface.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .field_tower import ZERO, GaloisField, gf_create, prime_factors
from .proj_geometry import (
    BudgetExceeded,
    FqLinearSet,
    ProjSpace,
    ProjSubspace,
    normalize_rows,
    row_keys,
)

DEFAULT_SEGRE_BUDGET = 1 << 20


class SegreError(ValueError):
    pass


def _prime_power(q: int) -> tuple[int, int]:
    ps = prime_factors(q)
    if len(ps) != 1:
        raise SegreError(f"{q} is not a prime power")
    p = ps[0]
    h = round(math.log(q, p))
    if p**h != q:
        raise SegreError(f"{q} is not a prime power")
    return p, h


# -- the endomorphism space ---------------------------------------------------

class EndSpace:
    """End(F, F_Q) for the degree-d subfield F_Q of the host field F."""

    def __init__(self, F: GaloisField, d: int):
        F.check_subdegree(d)
        self.field = F
        self.d = d
        self.n = F.e // d
        n = self.n
        if F.order > DEFAULT_SEGRE_BUDGET:
            raise BudgetExceeded("host field too large for coordinate tables")
        self.space = ProjSpace(F, d, n * n)
        sub = np.array(F.subfield_codes(d), dtype=np.int64)
        # coordinates of every element in the basis z^0..z^(n-1)
        combos = np.stack(np.meshgrid(*([sub] * n), indexing="ij"), axis=-1).reshape(-1, n)
        vals = la.zeros(combos.shape[0])
        for i in range(n):
            vals = F.vadd(vals, F.vmul(combos[:, i], i))
        table = la.zeros((F.order, n))
        table[vals + 1] = combos
        self._coords = table
        # Moore matrix W[i, k] = (z^i)^(Q^k)
        Qk = [pow(F.p, d * k, F.mult_order) for k in range(n)]
        W = np.array([[(i * Qk[k]) % F.mult_order for k in range(n)] for i in range(n)], dtype=np.int64)
        self._moore_inv = la.inverse(F, W)

    def __repr__(self):
        return f"EndSpace(End({self.field.spec}, GF({self.field.p}^{self.d})), n={self.n})"

    @property
    def Q(self) -> int:
        return self.field.p**self.d

    # element <-> coordinates
    def coords(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return self._coords[codes + 1]

    def element(self, coords) -> np.ndarray:
        F = self.field
        coords = np.asarray(coords, dtype=np.int64)
        out = np.full(coords.shape[:-1], ZERO, dtype=np.int64)
        for i in range(self.n):
            out = F.vadd(out, F.vmul(coords[..., i], i))
        return out

    # polynomial <-> matrix
    def matrices(self, coeffs) -> np.ndarray:
        """Matrices (k, n, n) of the polynomials with coefficient rows (k, n)."""
        F = self.field
        coeffs = la.as_codes(coeffs)
        n = self.n
        vals = la.zeros((coeffs.shape[0], n))
        for i in range(n):
            for k in range(n):
                zpow = (i * pow(F.p, self.d * k, F.mult_order)) % F.mult_order
                vals[:, i] = F.vadd(vals[:, i], F.vmul(coeffs[:, k], zpow))
        return self.coords(vals)

    def coeffs_of(self, mats) -> np.ndarray:
        """Coefficient rows (k, n) of matrices (k, n, n), by the Moore solve."""
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, self.n, self.n)
        vals = self.element(mats)  # (k, n): phi(z^i)
        return la.matmul(self.field, vals, self._moore_inv.T)

    def qpoly(self, coeffs) -> "QPoly":
        return QPoly(self, tuple(int(c) for c in coeffs))

    def from_matrix(self, M) -> "QPoly":
        return self.qpoly(self.coeffs_of(M)[0])

    def flatten(self, mats) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64)
        return mats.reshape(-1, self.n * self.n)

    def unflatten(self, rows) -> np.ndarray:
        return la.as_codes(rows).reshape(-1, self.n, self.n)

    # standard maps
    def t(self, lam: int) -> "QPoly":
        c = [ZERO] * self.n
        c[0] = lam
        return self.qpoly(c)

    def monomial(self, lam: int, j: int) -> "QPoly":
        c = [ZERO] * self.n
        c[j % self.n] = lam
        return self.qpoly(c)

    def identity(self) -> "QPoly":
        return self.t(0)

    def trace_map(self) -> "QPoly":
        return self.qpoly([0] * self.n)

    def zero(self) -> "QPoly":
        return self.qpoly([ZERO] * self.n)

    def all_coeffs(self) -> np.ndarray:
        """Every element of E as coefficient rows (only for tiny spaces)."""
        F = self.field
        if F.order**self.n > DEFAULT_SEGRE_BUDGET:
            raise BudgetExceeded("E too large to enumerate")
        codes = np.array([ZERO] + list(range(F.mult_order)), dtype=np.int64)
        return np.stack(np.meshgrid(*([codes] * self.n), indexing="ij"), axis=-1).reshape(-1, self.n)

    def gram(self) -> np.ndarray:
        """Matrix of the trace form Tr(xy) on the basis z^i."""
        F = self.field
        return np.array([[F.trace((i + j) % F.mult_order, self.d) for j in range(self.n)]
                         for i in range(self.n)], dtype=np.int64)

    # batched rank information
    def dets(self, mats) -> np.ndarray:
        F = self.field
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, self.n, self.n)
        n = self.n
        total = la.zeros(mats.shape[0])
        for perm in itertools.permutations(range(n)):
            term = np.zeros(mats.shape[0], dtype=np.int64)
            for i, j in enumerate(perm):
                term = F.vmul(term, mats[:, i, j])
            inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
            total = F.vsub(total, term) if inversions % 2 else F.vadd(total, term)
        return total

    def rank_at_most_one(self, mats) -> np.ndarray:
        F = self.field
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, self.n, self.n)
        ok = np.ones(mats.shape[0], dtype=bool)
        for i, k in itertools.combinations(range(self.n), 2):
            for j, l in itertools.combinations(range(self.n), 2):
                m = F.vsub(F.vmul(mats[:, i, j], mats[:, k, l]), F.vmul(mats[:, i, l], mats[:, k, j]))
                ok &= m == ZERO
        return ok

    def ranks(self, mats) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, self.n, self.n)
        return np.array([la.rank(self.field, m) for m in mats], dtype=np.int64)

    def subspace(self, polys) -> ProjSubspace:
        """Subspace of PG(E) spanned by the given polynomials or matrices."""
        return ProjSubspace.of(self.space, self.flatten(_as_mats(self, polys)))

    def points_of(self, polys) -> np.ndarray:
        """Normalised point rows of PG(E) for polynomials or matrices."""
        return normalize_rows(self.field, self.flatten(_as_mats(self, polys)))


def _as_mats(E: EndSpace, x) -> np.ndarray:
    if isinstance(x, QPoly):
        return x.matrix()[None]
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], QPoly):
        return E.matrices(np.array([p.coeffs for p in x], dtype=np.int64))
    return np.asarray(x, dtype=np.int64).reshape(-1, E.n, E.n)


# -- linearized polynomials ------------------------------------------------------

@dataclass(frozen=True)
class QPoly:
    """phi(x) = sum_i coeffs[i] x^(Q^i), an F_Q-linear map of the host field."""

    end: EndSpace
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.end.n:
            raise SegreError("coefficient list has the wrong length")

    def _check(self, other: "QPoly"):
        if other.end is not self.end:
            raise SegreError("degree mismatch")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def eval(self, x):
        F = self.end.field
        x = np.asarray(x, dtype=np.int64)
        out = np.full(x.shape, ZERO, dtype=np.int64)
        for k, b in enumerate(self.coeffs):
            if b != ZERO:
                out = F.vadd(out, F.vmul(b, F.vfrob(x, self.end.d * k)))
        return out

    def __call__(self, x):
        return self.eval(x)

    def compose(self, other: "QPoly") -> "QPoly":
        """self o other."""
        self._check(other)
        F, n, d = self.end.field, self.end.n, self.end.d
        out = la.zeros(n)
        for i, b in enumerate(self.coeffs):
            if b == ZERO:
                continue
            tw = F.vmul(b, F.vfrob(other.array, d * i))
            out = F.vadd(out, np.roll(tw, i))
        return self.end.qpoly(out)

    def __add__(self, other: "QPoly") -> "QPoly":
        self._check(other)
        return self.end.qpoly(self.end.field.vadd(self.array, other.array))

    def __sub__(self, other: "QPoly") -> "QPoly":
        self._check(other)
        return self.end.qpoly(self.end.field.vsub(self.array, other.array))

    def scale(self, lam: int) -> "QPoly":
        """t_lam o self."""
        return self.end.qpoly(self.end.field.vmul(self.array, lam))

    def adjoint(self) -> "QPoly":
        F, n, d = self.end.field, self.end.n, self.end.d
        out = [ZERO] * n
        for i, b in enumerate(self.coeffs):
            j = (n - i) % n
            out[j] = F.frob(b, d * j)
        return self.end.qpoly(out)

    def upsilon(self, j: int = 1) -> "QPoly":
        """j-fold a_i -> a_{i-1}^Q."""
        F, n, d = self.end.field, self.end.n, self.end.d
        j %= n
        return self.end.qpoly(np.roll(F.vfrob(self.array, d * j), j))

    def matrix(self) -> np.ndarray:
        return self.end.matrices(self.array[None])[0]

    def rank(self) -> int:
        return la.rank(self.end.field, self.matrix())

    @property
    def is_invertible(self) -> bool:
        return self.rank() == self.end.n

    @property
    def is_zero(self) -> bool:
        return all(c == ZERO for c in self.coeffs)

    def inverse(self) -> "QPoly":
        return self.end.from_matrix(la.inverse(self.end.field, self.matrix()))


def qpoly_eval(phi: QPoly, x):
    return phi.eval(x)


def qpoly_compose(phi: QPoly, psi: QPoly) -> QPoly:
    return phi.compose(psi)


def qpoly_rank(phi: QPoly) -> int:
    return phi.rank()


def adjoint(phi: QPoly) -> QPoly:
    return phi.adjoint()


def upsilon(phi: QPoly, j: int = 1) -> QPoly:
    return phi.upsilon(j)


def upsilon2(phi: QPoly, j: int = 1) -> QPoly:
    """Phi_T^{-1} o Upsilon_1^j o Phi_T (the adjoint is an involution)."""
    return phi.adjoint().upsilon(j).adjoint()


def trace_form(E: EndSpace, x, y):
    """beta(x, y) = Tr(xy) onto F_Q, vectorised."""
    F = E.field
    xy = F.vmul(x, y)
    out = np.full(np.shape(xy), ZERO, dtype=np.int64)
    for i in range(E.n):
        out = F.vadd(out, F.vfrob(xy, E.d * i))
    return out


# -- the group H(S_{n,n}) and the transpose involution -------------------------------

@dataclass(frozen=True, eq=False)
class HElement:
    """M -> P M Q, or M -> P M^T Q when ``transpose`` is set.

    In terms of maps, P is the matrix of psi_2 and Q that of psi_1, so the
    unflagged action is phi -> psi_1 o phi o psi_2.
    """

    end: EndSpace
    P: np.ndarray
    Q: np.ndarray
    transpose: bool = False

    def __post_init__(self):
        F, n = self.end.field, self.end.n
        for M in (self.P, self.Q):
            if np.shape(M) != (n, n) or la.rank(F, M) != n:
                raise SegreError("singular component")
            if not all(F.in_subfield(int(a), self.end.d) for a in np.ravel(M)):
                raise SegreError("entries must lie in the coordinate field")
        object.__setattr__(self, "P", la.as_codes(self.P))
        object.__setattr__(self, "Q", la.as_codes(self.Q))

    @classmethod
    def identity(cls, E: EndSpace) -> "HElement":
        return cls(E, la.identity(E.n), la.identity(E.n))

    @classmethod
    def from_maps(cls, psi1: QPoly, psi2: QPoly, adjoint: bool = False) -> "HElement":
        """phi -> psi_1 o phi o psi_2, with phi replaced by its adjoint when flagged."""
        E = psi1.end
        P, Q = psi2.matrix(), psi1.matrix()
        if not adjoint:
            return cls(E, P, Q)
        # the adjoint matrix is G M^T G^{-1} in this basis
        G = E.gram()
        F = E.field
        return cls(E, la.matmul(F, P, G), la.matmul(F, la.inverse(F, G), Q), True)

    @classmethod
    def transposition(cls, E: EndSpace) -> "HElement":
        return cls(E, la.identity(E.n), la.identity(E.n), True)

    def apply_matrices(self, mats) -> np.ndarray:
        F = self.end.field
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, self.end.n, self.end.n)
        if self.transpose:
            mats = np.transpose(mats, (0, 2, 1))
        return np.stack([la.matmul(F, la.matmul(F, self.P, m), self.Q) for m in mats])

    def then(self, other: "HElement") -> "HElement":
        """Apply self, then other."""
        F = self.end.field
        if other.transpose:
            return HElement(self.end, la.matmul(F, other.P, self.Q.T), la.matmul(F, self.P.T, other.Q),
                            not self.transpose)
        return HElement(self.end, la.matmul(F, other.P, self.P), la.matmul(F, self.Q, other.Q),
                        self.transpose)

    def inverse(self) -> "HElement":
        F = self.end.field
        Pi, Qi = la.inverse(F, self.P), la.inverse(F, self.Q)
        if self.transpose:
            return HElement(self.end, Qi.T, Pi.T, True)
        return HElement(self.end, Pi, Qi)


def random_h_element(E: EndSpace, rng, transpose: bool | None = None) -> HElement:
    """Uniform P, Q in GL(n, Q) and a random transpose flag unless one is given."""
    F = E.field
    sub = np.array(F.subfield_codes(E.d), dtype=np.int64)
    mats = []
    while len(mats) < 2:
        M = rng.choice(sub, (E.n, E.n))
        if la.rank(F, M) == E.n:
            mats.append(M)
    flag = bool(rng.integers(2)) if transpose is None else transpose
    return HElement(E, mats[0], mats[1], flag)


def h_act(h: HElement, x):
    """Action on a QPoly, matrices, a subspace, a linear set or a list of those."""
    E = h.end
    if isinstance(x, QPoly):
        return E.from_matrix(h.apply_matrices(x.matrix())[0])
    if isinstance(x, ProjSubspace):
        if x.is_empty:
            return x
        return ProjSubspace.of(x.space, E.flatten(h.apply_matrices(E.unflatten(x.basis))))
    if isinstance(x, FqLinearSet):
        return FqLinearSet(x.space, E.flatten(h.apply_matrices(E.unflatten(x.basis))), x.q_degree, x.budget)
    if isinstance(x, (list, tuple)):
        return type(x)(h_act(h, y) for y in x)
    if isinstance(x, np.ndarray):
        return h.apply_matrices(x)
    raise TypeError(f"cannot act on {type(x).__name__}")


# -- D-subspaces ---------------------------------------------------------

def identity_space(E: EndSpace, j: int = 0) -> ProjSubspace:
    """I^{Upsilon_1^j} = {<x -> lam x^(Q^j)>}."""
    F = E.field
    return E.subspace([E.monomial(i % F.mult_order, j) for i in range(E.n)])


def _min_poly_of_generator(E: EndSpace) -> np.ndarray:
    """Coefficients c_0..c_n (c_n = 1) of the minimal polynomial of z over F_Q."""
    F, n = E.field, E.n
    # z^n = sum a_i z^i
    a = E.coords(np.array([n % F.mult_order]))[0]
    c = F.vneg(a)
    return np.concatenate([c, [0]])


def _mat_poly_is_zero(E: EndSpace, coeffs, Z) -> bool:
    F, n = E.field, E.n
    acc = la.zeros((n, n))
    P = la.identity(n)
    for c in coeffs:
        acc = F.vadd(acc, F.vmul(c, P))
        P = la.matmul(F, P, Z)
    return bool(np.all(acc == ZERO))


def d_subspace_witness(E: EndSpace, X: ProjSubspace) -> HElement | None:
    """Some h with I^h = X, or None when X is not a D-subspace.

    X = P I Q forces X_0^{-1} X = Q^{-1} I Q for any non-zero X_0 in X, a copy
    of the field; Q is then found from one element of the same minimal
    polynomial as z.
    """
    F, n = E.field, E.n
    if X.vdim != n:
        return None
    mats = E.unflatten(X.basis)
    if np.any(E.dets(mats) == ZERO):
        return None
    X0 = mats[0]
    X0i = la.inverse(F, X0)
    Y = np.stack([la.matmul(F, X0i, m) for m in mats])
    sub = np.array(F.subfield_codes(E.d), dtype=np.int64)
    mp = _min_poly_of_generator(E)
    Tz = E.t(1).matrix()
    for combo in itertools.product(sub, repeat=n):
        if all(c == ZERO for c in combo):
            continue
        Z = la.zeros((n, n))
        for c, m in zip(combo, Y):
            Z = F.vadd(Z, F.vmul(c, m))
        if not _mat_poly_is_zero(E, mp, Z):
            continue
        # Tz Q = Q Z, linear in the n^2 entries of Q
        rows = []
        for i in range(n):
            for j in range(n):
                r = la.zeros((n, n))
                for k in range(n):
                    r[k, j] = F.add(int(r[k, j]), int(Tz[i, k]))
                    r[i, k] = F.sub(int(r[i, k]), int(Z[k, j]))
                rows.append(r.reshape(-1))
        K = la.kernel(F, np.array(rows, dtype=np.int64))
        for kv in K:
            Qm = kv.reshape(n, n)
            if la.rank(F, Qm) != n:
                continue
            Qi = la.inverse(F, Qm)
            h = HElement(E, la.matmul(F, X0, Qi), Qm)
            if h_act(h, identity_space(E)) == X:
                return h
    return None


def is_d_subspace(E: EndSpace, X: ProjSubspace) -> bool:
    return d_subspace_witness(E, X) is not None


# -- the Segre variety -------------------------------------------------------------

@dataclass(eq=False)
class SegreVariety:
    end: EndSpace
    q: int
    point_keys: np.ndarray  # parametric construction
    rank_one_keys: np.ndarray  # rank test over all points
    omega_keys: np.ndarray
    R1: list  # X(lambda)
    R2: list  # X'(lambda)
    lambdas: list

    @property
    def n(self) -> int:
        return self.end.n

    @property
    def size(self) -> int:
        return int(self.point_keys.size)

    @property
    def constructions_agree(self) -> bool:
        return np.array_equal(self.point_keys, self.rank_one_keys)


def segre_element(E: EndSpace, lam: int, mu: int) -> QPoly:
    """t_lam o Tr o t_mu."""
    F = E.field
    return E.qpoly([F.mul(lam, F.frob(mu, E.d * i)) for i in range(E.n)])


def system_member(E: EndSpace, lam: int, which: int) -> ProjSubspace:
    """X(lam) (which = 1) or X'(lam) (which = 2)."""
    basis = range(E.n)  # z^0..z^(n-1) over F_q
    if which == 1:
        return E.subspace([segre_element(E, a, lam) for a in basis])
    return E.subspace([segre_element(E, lam, a) for a in basis])


def build_segre(n: int, q: int, budget: int = DEFAULT_SEGRE_BUDGET) -> SegreVariety:
    p, h = _prime_power(q)
    if n < 2:
        raise SegreError("need n >= 2")
    if q ** (n * n) > budget:
        raise BudgetExceeded("PG(n^2-1, q) too large to enumerate")
    F = gf_create(p, h * n)
    E = EndSpace(F, h)
    M = F.mult_order
    lam, mu = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    lam, mu = lam.reshape(-1), mu.reshape(-1)
    coeffs = np.stack([F.vmul(lam, F.vfrob(mu, h * i)) for i in range(n)], axis=1)
    par = np.unique(row_keys(F, E.points_of(E.matrices(coeffs))))
    allp = E.space.all_points()
    mats = E.unflatten(allp)
    r1 = np.unique(row_keys(F, allp[E.rank_at_most_one(mats)]))
    om = np.unique(row_keys(F, allp[E.dets(mats) == ZERO]))
    reps = list(range((q**n - 1) // (q - 1)))
    R1 = [system_member(E, l, 1) for l in reps]
    R2 = [system_member(E, l, 2) for l in reps]
    return SegreVariety(E, q, par, r1, om, R1, R2, reps)


def _keys(S: ProjSubspace) -> set:
    return set(int(k) for k in row_keys(S.space.field, S.points()))


def segre_checks(S: SegreVariety) -> dict:
    """Counts and incidence properties of the Segre variety, exhaustively."""
    E, q, n = S.end, S.q, S.n
    F = E.field
    out = {}
    out["constructions_agree"] = S.constructions_agree
    out["size"] = S.size
    out["expected_size"] = ((q**n - 1) // (q - 1)) ** 2
    out["system_sizes"] = (len({X.key() for X in S.R1}), len({X.key() for X in S.R2}))
    pts = set(int(k) for k in S.point_keys)
    fam1 = [_keys(X) for X in S.R1]
    fam2 = [_keys(X) for X in S.R2]
    out["members_are_maximal_spaces"] = all(X.vdim == n for X in S.R1 + S.R2)
    out["members_on_variety"] = all(k <= pts for k in fam1 + fam2)
    out["skew_within"] = all(not (a & b) for fam in (fam1, fam2) for a, b in itertools.combinations(fam, 2))
    meet_ok = True
    for i, a in enumerate(fam1):
        for j, b in enumerate(fam2):
            m = a & b
            lam, mu = S.lambdas[i], S.lambdas[j]
            expect = int(row_keys(F, E.points_of(segre_element(E, mu, lam)))[0])
            if m != {expect}:
                meet_ok = False
    out["one_point_across"] = meet_ok
    out["partition"] = all(set().union(*fam) == pts and sum(map(len, fam)) == len(pts) for fam in (fam1, fam2))
    omega = set(int(k) for k in S.omega_keys)
    gl = 1
    for i in range(n):
        gl *= q**n - q**i
    out["omega_contains_segre"] = pts <= omega
    out["omega_size"] = len(omega)
    out["expected_omega_size"] = (q ** (n * n) - gl - 1) // (q - 1)
    return out


# -- adjoint and Upsilon checks ------------------------------------------------------------

def _sample_polys(E: EndSpace, trials: int | None, rng) -> list:
    if trials is None:
        return [E.qpoly(c) for c in E.all_coeffs()]
    codes = np.array([ZERO] + list(range(E.field.mult_order)), dtype=np.int64)
    return [E.qpoly(codes[rng.integers(0, codes.size, size=E.n)]) for _ in range(trials)]


def adjoint_checks(E: EndSpace, trials: int | None = None, seed: int = 0) -> dict:
    """Adjointness, involution, anti-homomorphism, t_lam fixing, rank, system swap.

    ``trials=None`` is exhaustive over E (pairs included); otherwise random.
    """
    F = E.field
    rng = np.random.default_rng(seed)
    polys = _sample_polys(E, trials, rng)
    elems = np.array([ZERO] + list(range(F.mult_order)), dtype=np.int64)
    if trials is None:
        xs, ys = np.meshgrid(elems, elems, indexing="ij")
        xs, ys = xs.reshape(-1), ys.reshape(-1)
    else:
        xs = elems[rng.integers(0, elems.size, size=200)]
        ys = elems[rng.integers(0, elems.size, size=200)]
    out = {}
    out["bilinear"] = all(
        np.array_equal(trace_form(E, p.eval(xs), ys), trace_form(E, xs, p.adjoint().eval(ys))) for p in polys)
    out["involution"] = all(p.adjoint().adjoint() == p for p in polys)
    if trials is None:
        pairs = itertools.product(polys, polys)
    else:
        pairs = [(polys[i], polys[j]) for i, j in rng.integers(0, len(polys), size=(trials, 2))]
    out["anti_homomorphism"] = all(a.compose(b).adjoint() == b.adjoint().compose(a.adjoint()) for a, b in pairs)
    inv = [p for p in polys if p.is_invertible]
    out["inverse"] = all(p.inverse().adjoint() == p.adjoint().inverse() for p in inv)
    lams = range(F.mult_order) if trials is None else rng.integers(0, F.mult_order, size=trials)
    out["fixes_t_lambda"] = all(E.t(int(l)).adjoint() == E.t(int(l)) for l in lams)
    out["rank_preserved"] = all(p.rank() == p.adjoint().rank() for p in polys)
    reps = range(min((E.Q**E.n - 1) // (E.Q - 1), trials or 10**9))
    swap = True
    for mu in reps:
        X = system_member(E, mu, 1)
        img = E.subspace([E.from_matrix(m).adjoint() for m in E.unflatten(X.basis)])
        swap &= img == system_member(E, mu, 2)
    out["swaps_systems"] = bool(swap)
    return out


def d1_spread(E: EndSpace, which: int = 1) -> list:
    """D_1(I) = {{t_a o phi}} or D_2(I) = {{phi o t_a}} as subspaces of PG(E)."""
    F = E.field
    seen = {}
    for p in E.space.all_points():
        phi = E.from_matrix(E.unflatten(p))
        if which == 1:
            gens = [phi.scale(i % F.mult_order) for i in range(E.n)]
        else:
            gens = [phi.compose(E.t(i % F.mult_order)) for i in range(E.n)]
        S = E.subspace(gens)
        seen.setdefault(S.key(), S)
    return list(seen.values())


def upsilon_checks(E: EndSpace) -> dict:
    F, n = E.field, E.n
    out = {}
    I = identity_space(E)
    conj = []
    for j in range(n):
        img = E.subspace([E.from_matrix(m).upsilon(j) for m in E.unflatten(I.basis)])
        conj.append(img)
    out["conjugates_monomial"] = all(conj[j] == identity_space(E, j) for j in range(n))
    out["conjugates_span"] = la.rank(F, np.concatenate([c.basis for c in conj])) == n * n
    for which, up in ((1, upsilon), (2, upsilon2)):
        spread = d1_spread(E, which)
        keys = {S.key() for S in spread}
        images = [E.subspace([up(E.from_matrix(m)) for m in E.unflatten(S.basis)]) for S in spread]
        out[f"fixes_spread_{which}"] = all(T.key() in keys for T in images)
        fixed = {S.key() for S, T in zip(spread, images) if S == T}
        system = {system_member(E, l, which).key() for l in range((E.Q**n - 1) // (E.Q - 1))}
        out[f"fixed_elements_are_system_{which}"] = fixed == system
        order_ok = True
        for S in spread:
            cur = S
            for _ in range(n):
                cur = E.subspace([up(E.from_matrix(m)) for m in E.unflatten(cur.basis)])
            order_ok &= cur == S
        out[f"order_divides_n_{which}"] = order_ok
        orbit = [I]
        for _ in range(n - 1):
            orbit.append(E.subspace([up(E.from_matrix(m)) for m in E.unflatten(orbit[-1].basis)]))
        out[f"orbit_of_I_{which}"] = len({S.key() for S in orbit}) == n
    out["upsilon2_conjugates"] = all(
        E.subspace([upsilon2(E.from_matrix(m), i) for m in E.unflatten(I.basis)]) == identity_space(E, n - i)
        for i in range(n))
    return out


# -- the n = 2 quadric -------------------------------------------------------

def quadric_form(E: EndSpace, coeffs) -> np.ndarray:
    """a^(Q+1) - b^(Q+1) for phi = a x + b x^Q."""
    if E.n != 2:
        raise SegreError("the quadric form needs n = 2")
    F = E.field
    coeffs = la.as_codes(coeffs)
    e = E.Q + 1
    return F.vsub(F.vpow(coeffs[:, 0], e), F.vpow(coeffs[:, 1], e))


def quadric_polar_form(E: EndSpace, c1, c2) -> np.ndarray:
    """Bilinear form of the quadratic form: Q(u + v) - Q(u) - Q(v)."""
    F = E.field
    c1, c2 = la.as_codes(c1), la.as_codes(c2)
    return F.vsub(F.vsub(quadric_form(E, F.vadd(c1, c2)), quadric_form(E, c1)), quadric_form(E, c2))


def polar_line(E: EndSpace, S: ProjSubspace) -> ProjSubspace:
    """Polar subspace with respect to the determinant quadric (n = 2)."""
    F = E.field
    # det is a quadratic form on matrices; its polar form is B(X, Y) = det(X+Y) - det X - det Y,
    # linear in Y; build the matrix of Y -> B(X_i, Y) on the unit basis
    I4 = la.identity(4)
    rows = []
    for x in S.basis:
        Xm = x.reshape(1, 2, 2)
        vals = []
        for e in I4:
            Ym = e.reshape(1, 2, 2)
            s = F.vadd(Xm, Ym)
            vals.append(int(F.vsub(F.vsub(E.dets(s), E.dets(Xm)), E.dets(Ym))[0]))
        rows.append(vals)
    return ProjSubspace.of(E.space, la.kernel(F, np.array(rows, dtype=np.int64)))


def quadric_form_check(q: int) -> dict:
    p, h = _prime_power(q)
    F = gf_create(p, 2 * h)
    E = EndSpace(F, h)
    allp = E.space.all_points()
    coeffs = E.coeffs_of(E.unflatten(allp))
    zero_form = np.unique(row_keys(F, allp[quadric_form(E, coeffs) == ZERO]))
    rank1 = np.unique(row_keys(F, allp[E.rank_at_most_one(E.unflatten(allp))]))
    I = identity_space(E)
    J = identity_space(E, 1)
    Ic = E.coeffs_of(E.unflatten(I.points()))
    Jc = E.coeffs_of(E.unflatten(J.points()))
    polar_vals = quadric_polar_form(E, np.repeat(Ic, Jc.shape[0], axis=0), np.tile(Jc, (Ic.shape[0], 1)))
    # the polar of I computed from the form: all points orthogonal to every point of I
    orth = np.ones(allp.shape[0], dtype=bool)
    for c in Ic:
        orth &= quadric_polar_form(E, np.repeat(c[None], allp.shape[0], axis=0), coeffs) == ZERO
    polar_keys = set(int(k) for k in row_keys(F, allp[orth]))
    return {
        "points": int(allp.shape[0]),
        "zero_set_size": int(zero_form.size),
        "zero_set_is_segre": bool(np.array_equal(zero_form, rank1)),
        "I_external": bool(np.all(quadric_form(E, Ic) != ZERO)),
        "I_conjugate_orthogonal": bool(np.all(polar_vals == ZERO)),
        "polar_of_I_is_conjugate": polar_keys == _keys(J),
        "polar_matches_determinant": polar_line(E, I) == J,
    }
