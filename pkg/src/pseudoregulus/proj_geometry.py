"""Projective spaces, subspaces, semilinear maps and F_q-linear sets.

Vectors are 1-d numpy arrays of element codes of the host field. A space
``PG(r-1, Q)`` records which subfield of the host its coordinates live in
(degree ``c`` over F_p, so ``Q = p^c``); subspaces keep a reduced row echelon
basis so that equality is array equality.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _linalg as la
from .field_tower import ZERO, GaloisField, fp_rank

DEFAULT_ENUM_BUDGET = 1 << 22


class BudgetExceeded(RuntimeError):
    pass


class GeometryError(ValueError):
    pass


# -- text formats -----------------------------------------------------------

def format_vector(v) -> str:
    return ":".join("Z" if int(c) == ZERO else str(int(c)) for c in v)


def parse_vector(text: str) -> np.ndarray:
    return np.array([ZERO if s.strip() in ("Z", "z") else int(s) for s in text.split(":")], dtype=np.int64)


# -- vectorised point normalisation ---------------------------------------

def normalize_rows(F: GaloisField, V) -> np.ndarray:
    """Scale every non-zero row so that its first non-zero entry is 1."""
    V = np.asarray(V, dtype=np.int64)
    if V.shape[0] == 0:
        return V.copy()
    nz = V != ZERO
    if not np.all(nz.any(axis=1)):
        raise GeometryError("zero vector has no projective point")
    lead_idx = nz.argmax(axis=1)
    lead = V[np.arange(V.shape[0]), lead_idx]
    return np.where(nz, (V - lead[:, None]) % F.mult_order, ZERO)


def row_keys(F: GaloisField, V) -> np.ndarray:
    """Injective integer keys for rows of codes."""
    V = np.asarray(V, dtype=np.int64)
    r = V.shape[1]
    if F.order ** r >= 2**63:
        raise GeometryError("row keys overflow 64 bits")
    w = np.array([F.order**i for i in range(r)], dtype=np.int64)
    return (V + 1) @ w


def keys_to_rows(F: GaloisField, keys, r: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((keys.shape[0], r), dtype=np.int64)
    for i in range(r):
        out[:, i] = keys % F.order - 1
        keys = keys // F.order
    return out


@dataclass(frozen=True)
class ProjSpace:
    """PG(r-1, p^c) with coordinates in the degree-c subfield of ``field``."""

    field: GaloisField
    coord_degree: int
    r: int

    def __post_init__(self):
        self.field.check_subdegree(self.coord_degree)
        if self.r < 1:
            raise GeometryError("vector dimension must be positive")

    @classmethod
    def over(cls, F: GaloisField, r: int) -> "ProjSpace":
        return cls(F, F.e, r)

    @property
    def Q(self) -> int:
        return self.field.p**self.coord_degree

    @property
    def dim(self) -> int:
        return self.r - 1

    @property
    def num_points(self) -> int:
        return (self.Q**self.r - 1) // (self.Q - 1)

    def check_vector(self, v):
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.r,):
            raise GeometryError(f"expected a vector of length {self.r}")
        for c in v:
            if not self.field.in_subfield(int(c), self.coord_degree):
                raise GeometryError("coordinate outside the coordinate field")
        return v

    def point(self, v) -> "ProjPoint":
        return ProjPoint.of(self, v)

    def subspace(self, rows) -> "ProjSubspace":
        return ProjSubspace.of(self, rows)

    def whole(self) -> "ProjSubspace":
        return ProjSubspace.of(self, la.identity(self.r))

    def empty(self) -> "ProjSubspace":
        return ProjSubspace(self, la.zeros((0, self.r)))

    def all_points(self) -> np.ndarray:
        """Every normalised point, as rows (only for small spaces)."""
        if self.num_points > DEFAULT_ENUM_BUDGET:
            raise BudgetExceeded("too many points to enumerate")
        coords = np.array(self.field.subfield_codes(self.coord_degree), dtype=np.int64)
        rows = []
        for lead in range(self.r):
            tail = self.r - lead - 1
            if tail:
                grid = np.stack(np.meshgrid(*([coords] * tail), indexing="ij"), axis=-1).reshape(-1, tail)
            else:
                grid = np.zeros((1, 0), dtype=np.int64)
            block = np.full((grid.shape[0], self.r), ZERO, dtype=np.int64)
            block[:, lead] = 0
            block[:, lead + 1:] = grid
            rows.append(block)
        return np.concatenate(rows, axis=0)

    def fp_blowup(self, rows) -> np.ndarray:
        """F_p coordinates of vectors (each host entry expands to e digits)."""
        rows = la.as_codes(rows)
        d = self.field.fp_digits(rows)
        return d.reshape(rows.shape[0], -1)


@dataclass(frozen=True, eq=False)
class ProjPoint:
    space: ProjSpace
    coords: tuple

    @classmethod
    def of(cls, space: ProjSpace, v) -> "ProjPoint":
        v = space.check_vector(v)
        return cls(space, tuple(int(c) for c in normalize_rows(space.field, v[None, :])[0]))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.space == other.space and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"<{format_vector(self.coords)}>"


@dataclass(frozen=True, eq=False)
class ProjSubspace:
    """Subspace given by its reduced row echelon basis."""

    space: ProjSpace
    basis: np.ndarray

    @classmethod
    def of(cls, space: ProjSpace, rows) -> "ProjSubspace":
        rows = la.as_codes(rows)
        if rows.shape[0] == 0:
            return space.empty()
        if rows.shape[1] != space.r:
            raise GeometryError("basis width does not match the space")
        return cls(space, la.row_basis(space.field, rows))

    @property
    def vdim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.vdim - 1

    @property
    def is_empty(self) -> bool:
        return self.vdim == 0

    def __eq__(self, other):
        return (
            isinstance(other, ProjSubspace)
            and self.space == other.space
            and self.basis.shape == other.basis.shape
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash(self.basis.tobytes())

    def key(self) -> bytes:
        return self.basis.tobytes()

    def contains(self, v) -> bool:
        if isinstance(v, ProjPoint):
            v = v.vector
        if isinstance(v, ProjSubspace):
            return all(self.contains(row) for row in v.basis)
        return la.contains(self.space.field, self.basis, v)

    def contains_rows(self, V) -> np.ndarray:
        """Vectorised membership of many vectors (rows of V)."""
        V = la.as_codes(V)
        F = self.space.field
        if self.vdim == 0:
            return np.all(V == ZERO, axis=1)
        # reduce each row against the echelon basis
        _, piv = la.rref(F, self.basis)
        R = V.copy()
        for row, c in zip(self.basis, piv):
            coef = R[:, c]
            R = F.vsub(R, F.vmul(coef[:, None], row[None, :]))
        return np.all(R == ZERO, axis=1)

    def points(self) -> np.ndarray:
        """Normalised points of the subspace as rows."""
        F = self.space.field
        if self.vdim == 0:
            return la.zeros((0, self.space.r))
        sub = ProjSpace(F, self.space.coord_degree, self.vdim)
        coeffs = sub.all_points()
        return normalize_rows(F, la.matmul(F, coeffs, self.basis))

    def frobenius(self, j: int) -> "ProjSubspace":
        return ProjSubspace.of(self.space, self.space.field.vfrob(self.basis, j))

    def __repr__(self):
        rows = ", ".join(format_vector(r) for r in self.basis)
        return f"ProjSubspace(dim={self.dim}, [{rows}])"


def span(*items) -> ProjSubspace:
    """Join of points, subspaces and raw vectors (all in one space)."""
    space = None
    rows = []
    for it in items:
        if isinstance(it, ProjPoint):
            space = space or it.space
            rows.append(it.vector[None, :])
        elif isinstance(it, ProjSubspace):
            space = space or it.space
            if it.vdim:
                rows.append(it.basis)
        else:
            rows.append(la.as_codes(it))
    if space is None:
        raise GeometryError("span needs at least one point or subspace")
    for it in items:
        if isinstance(it, (ProjPoint, ProjSubspace)) and it.space != space:
            raise GeometryError("space mismatch")
    if not rows:
        return space.empty()
    return ProjSubspace.of(space, np.concatenate(rows, axis=0))


def intersect(S1: ProjSubspace, S2: ProjSubspace) -> ProjSubspace:
    if S1.space != S2.space:
        raise GeometryError("space mismatch")
    if S1.is_empty or S2.is_empty:
        return S1.space.empty()
    return ProjSubspace.of(S1.space, la.intersect(S1.space.field, S1.basis, S2.basis))


# -- semilinear maps --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SemilinearMap:
    """v -> A v^(p^j) on column vectors; rows transform as v^(p^j) A^T."""

    space: ProjSpace
    matrix: np.ndarray
    frob_exp: int = 0

    def __post_init__(self):
        A = la.as_codes(self.matrix)
        if A.shape != (self.space.r, self.space.r):
            raise GeometryError("matrix size does not match the space")
        if la.rank(self.space.field, A) != self.space.r:
            raise GeometryError("singular matrix")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "frob_exp", self.frob_exp % self.space.field.e)

    @classmethod
    def identity(cls, space: ProjSpace) -> "SemilinearMap":
        return cls(space, la.identity(space.r), 0)

    def apply_rows(self, V) -> np.ndarray:
        F = self.space.field
        return la.matmul(F, F.vfrob(la.as_codes(V), self.frob_exp), self.matrix.T)

    def compose(self, other: "SemilinearMap") -> "SemilinearMap":
        """self after other."""
        F = self.space.field
        A = la.matmul(F, self.matrix, F.vfrob(other.matrix, self.frob_exp))
        return SemilinearMap(self.space, A, self.frob_exp + other.frob_exp)

    def inverse(self) -> "SemilinearMap":
        F = self.space.field
        Ainv = la.inverse(F, self.matrix)
        return SemilinearMap(self.space, F.vfrob(Ainv, -self.frob_exp), -self.frob_exp)


def apply_semilinear(M: SemilinearMap, x):
    if isinstance(x, ProjPoint):
        if x.space != M.space:
            raise GeometryError("space mismatch")
        return ProjPoint.of(M.space, M.apply_rows(x.vector[None, :])[0])
    if isinstance(x, ProjSubspace):
        if x.space != M.space:
            raise GeometryError("space mismatch")
        if x.is_empty:
            return x
        return ProjSubspace.of(M.space, M.apply_rows(x.basis))
    if isinstance(x, FqLinearSet):
        if x.space != M.space:
            raise GeometryError("space mismatch")
        return FqLinearSet(M.space, M.apply_rows(x.basis), x.q_degree, x.budget)
    raise TypeError(f"cannot apply a semilinear map to {type(x).__name__}")


# -- linear sets -------------------------------------------------------------

@dataclass(eq=False)
class FqLinearSet:
    """The linear set of the F_q-span of ``basis`` (rows), q = p^q_degree."""

    space: ProjSpace
    basis: np.ndarray
    q_degree: int
    budget: int = DEFAULT_ENUM_BUDGET
    _points: np.ndarray | None = dc_field(default=None, repr=False)
    _keys: np.ndarray | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        self.basis = la.as_codes(self.basis)
        if self.basis.shape[1] != self.space.r:
            raise GeometryError("basis width does not match the space")
        if self.space.coord_degree % self.q_degree:
            raise GeometryError("F_q must be a subfield of the coordinate field")
        k = self.basis.shape[0]
        F = self.space.field
        if fp_rank(self.space.fp_blowup(self._fp_rows()), F.p) != k * self.q_degree:
            raise GeometryError("basis is not F_q-independent")

    @property
    def q(self) -> int:
        return self.space.field.p**self.q_degree

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def t(self) -> int:
        return self.space.coord_degree // self.q_degree

    def _fp_rows(self) -> np.ndarray:
        F = self.space.field
        scal = F.fp_basis(self.q_degree)
        return np.concatenate([F.vmul(s, self.basis) for s in scal], axis=0)

    def vectors(self) -> np.ndarray:
        """All q^k vectors of U, zero first."""
        F = self.space.field
        if self.q**self.rank > self.budget:
            raise BudgetExceeded(f"q^k = {self.q ** self.rank} exceeds the enumeration budget {self.budget}")
        scal = np.array(F.subfield_codes(self.q_degree), dtype=np.int64)
        cur = la.zeros((1, self.space.r))
        for b in self.basis:
            mult = F.vmul(scal[:, None], b[None, :])  # (q, r)
            cur = F.vadd(cur[None, :, :], mult[:, None, :]).reshape(-1, self.space.r)
        return cur

    def _enumerate(self):
        if self._keys is None:
            V = self.vectors()[1:]
            pts = normalize_rows(self.space.field, V)
            keys = row_keys(self.space.field, pts)
            self._keys, idx = np.unique(keys, return_index=True)
            self._points = pts[idx]
            n = self._points.shape[0]
            q, k = self.q, self.rank
            assert n <= (q**k - 1) // (q - 1), "size bound violated"
            assert n % q == 1 % q, "size congruence violated"

    def points(self) -> np.ndarray:
        self._enumerate()
        return self._points

    def point_keys(self) -> np.ndarray:
        self._enumerate()
        return self._keys

    def size(self) -> int:
        return self.point_keys().shape[0]

    def point_set(self) -> frozenset:
        return frozenset(int(k) for k in self.point_keys())

    def contains_rows(self, V) -> np.ndarray:
        keys = row_keys(self.space.field, normalize_rows(self.space.field, la.as_codes(V)))
        return np.isin(keys, self.point_keys())

    def same_points(self, other: "FqLinearSet") -> bool:
        return np.array_equal(self.point_keys(), other.point_keys())


def enumerate_points(L: FqLinearSet) -> set:
    return {ProjPoint(L.space, tuple(int(c) for c in row)) for row in L.points()}


def _fp_subspace_rows(space: ProjSpace, S: ProjSubspace) -> np.ndarray:
    F = space.field
    scal = F.fp_basis(space.coord_degree)
    return np.concatenate([F.vmul(s, S.basis) for s in scal], axis=0)


def weight(S: ProjSubspace, L: FqLinearSet) -> int:
    """dim_{F_q}(U cap W), computed over F_p via the coordinate blow-up."""
    if S.space != L.space:
        raise GeometryError("space mismatch")
    if S.is_empty:
        return 0
    F = L.space.field
    Urows = L.space.fp_blowup(L._fp_rows())
    Wrows = L.space.fp_blowup(_fp_subspace_rows(L.space, S))
    rU = L.rank * L.q_degree
    rW = S.vdim * L.space.coord_degree
    rsum = fp_rank(np.concatenate([Urows, Wrows], axis=0), F.p)
    return (rU + rW - rsum) // L.q_degree


def weight_by_counting(S: ProjSubspace, L: FqLinearSet) -> int:
    """Same quantity by counting vectors of U inside W (small cases only)."""
    V = L.vectors()
    inside = int(np.count_nonzero(S.contains_rows(V)))
    return round(math.log(inside, L.q))


def point_weights(L: FqLinearSet) -> dict:
    """Weight of every point of L, keyed by point key, by vector counting."""
    V = L.vectors()[1:]
    keys = row_keys(L.space.field, normalize_rows(L.space.field, V))
    uniq, counts = np.unique(keys, return_counts=True)
    q = L.q
    return {int(k): round(math.log(int(c) + 1, q)) for k, c in zip(uniq, counts)}


def is_scattered(L: FqLinearSet) -> bool:
    q, k = L.q, L.rank
    return L.size() == (q**k - 1) // (q - 1)


# -- Grassmannians over F_q for exhaustive checks --------------------------

def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def fq_rref_subspaces(F: GaloisField, q_degree: int, N: int, k: int, cap: int = DEFAULT_ENUM_BUDGET):
    """Yield every k-subspace of F_q^N as a canonical k x N echelon matrix of codes."""
    q = F.p**q_degree
    if gaussian_binomial(N, k, q) > cap:
        raise BudgetExceeded("Grassmannian too large")
    scal = F.subfield_codes(q_degree)
    for piv in itertools.combinations(range(N), k):
        free = [(i, j) for i in range(k) for j in range(piv[i] + 1, N) if j not in piv]
        for vals in itertools.product(scal, repeat=len(free)):
            m = la.zeros((k, N))
            for i, c in enumerate(piv):
                m[i, c] = 0
            for (i, j), v in zip(free, vals):
                m[i, j] = v
            yield m


def fq_to_vectors(space: ProjSpace, q_degree: int, M) -> np.ndarray:
    """Read rows of F_q^{r t} as vectors of V(r, q^t) using the basis 1, w, ..., w^{t-1}."""
    F = space.field
    t = space.coord_degree // q_degree
    basis = F.relative_basis(q_degree, space.coord_degree)
    M = la.as_codes(M)
    out = la.zeros((M.shape[0], space.r))
    for i in range(space.r):
        for j in range(t):
            out[:, i] = F.vadd(out[:, i], F.vmul(M[:, i * t + j], basis[j]))
    return out


@dataclass
class BoundReport:
    r: int
    q: int
    t: int
    rank_checked: int
    subspaces: int
    scattered: int
    witness_rank: int
    witness_found: bool

    @property
    def holds(self) -> bool:
        return self.scattered == 0


def max_scattered_bound_check(r: int, q_degree: int, t: int, F: GaloisField | None = None,
                              cap: int = DEFAULT_ENUM_BUDGET) -> BoundReport:
    """Exhaust all F_q-subspaces of rank floor(rt/2)+1; none may be scattered.

    Also looks for a scattered witness of rank floor(rt/2).
    """
    if F is None:
        raise GeometryError("a host field is required")
    space = ProjSpace(F, q_degree * t, r)
    q = F.p**q_degree
    k = r * t // 2 + 1
    total = scattered = 0
    for M in fq_rref_subspaces(F, q_degree, r * t, k, cap):
        L = FqLinearSet(space, fq_to_vectors(space, q_degree, M), q_degree)
        total += 1
        if is_scattered(L):
            scattered += 1
    witness = False
    kw = r * t // 2
    if kw >= 1:
        for M in fq_rref_subspaces(F, q_degree, r * t, kw, cap):
            if is_scattered(FqLinearSet(space, fq_to_vectors(space, q_degree, M), q_degree)):
                witness = True
                break
    return BoundReport(r, q, t, k, total, scattered, kw, witness)
