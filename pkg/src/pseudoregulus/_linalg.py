"""Dense linear algebra over a GaloisField, on numpy arrays of element codes."""

from __future__ import annotations

import numpy as np

from .field_tower import ZERO, GaloisField


def as_codes(M) -> np.ndarray:
    a = np.array(M, dtype=np.int64)
    if a.ndim == 1:
        a = a[None, :]
    return a


def zeros(shape) -> np.ndarray:
    return np.full(shape, ZERO, dtype=np.int64)


def identity(n: int) -> np.ndarray:
    m = zeros((n, n))
    np.fill_diagonal(m, 0)
    return m


def matmul(F: GaloisField, A, B) -> np.ndarray:
    A = as_codes(A)
    B = as_codes(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError("shape mismatch")
    out = zeros((A.shape[0], B.shape[1]))
    for k in range(A.shape[1]):
        out = F.vadd(out, F.vmul(A[:, k, None], B[None, k, :]))
    return out


def vecmat(F: GaloisField, v, B) -> np.ndarray:
    return matmul(F, np.asarray(v, dtype=np.int64)[None, :], B)[0]


def rows_times(F: GaloisField, V, B) -> np.ndarray:
    """Each row of V (shape (m, k)) times B (shape (k, n)); vectorised over rows."""
    return matmul(F, V, B)


def rref(F: GaloisField, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (non-zero rows, pivot columns)."""
    m = as_codes(M).copy()
    nrows, ncols = m.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(m[r:, c] != ZERO)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = F.vmul(m[r], F.inv(int(m[r, c])))
        others = np.nonzero(m[:, c] != ZERO)[0]
        others = others[others != r]
        if others.size:
            m[others] = F.vsub(m[others], F.vmul(m[others, c, None], m[None, r, :]))
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(F: GaloisField, M) -> int:
    M = as_codes(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def solve(F: GaloisField, A, b):
    """A solution x of A x = b, or None when inconsistent."""
    A = as_codes(A)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.concatenate([A, b], axis=1)
    R, piv = rref(F, aug)
    n = A.shape[1]
    if n in piv:
        return None
    x = np.full(n, ZERO, dtype=np.int64)
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


def inverse(F: GaloisField, A) -> np.ndarray:
    A = as_codes(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix is not square")
    R, piv = rref(F, np.concatenate([A, identity(n)], axis=1))
    if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] >= n:
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def det(F: GaloisField, A) -> int:
    m = as_codes(A).copy()
    n = m.shape[0]
    d = 0
    for c in range(n):
        nz = np.nonzero(m[c:, c] != ZERO)[0]
        if nz.size == 0:
            return ZERO
        i = c + int(nz[0])
        if i != c:
            m[[c, i]] = m[[i, c]]
            d = F.neg(d)
        piv = int(m[c, c])
        d = F.mul(d, piv)
        below = np.arange(c + 1, n)
        if below.size:
            f = F.vmul(m[below, c], F.inv(piv))
            m[below] = F.vsub(m[below], F.vmul(f[:, None], m[None, c, :]))
    return d


def kernel(F: GaloisField, M) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    M = as_codes(M)
    n = M.shape[1]
    R, piv = rref(F, M)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = np.full(n, ZERO, dtype=np.int64)
        x[f] = 0
        for row, c in zip(R, piv):
            x[c] = F.neg(int(row[f]))
        basis.append(x)
    if not basis:
        return zeros((0, n))
    return np.array(basis, dtype=np.int64)


def left_kernel(F: GaloisField, M) -> np.ndarray:
    """Basis of {x : x M = 0}."""
    return kernel(F, as_codes(M).T)


def row_basis(F: GaloisField, M) -> np.ndarray:
    M = as_codes(M)
    if M.shape[0] == 0:
        return M
    return rref(F, M)[0]


def span_sum(F: GaloisField, *mats) -> np.ndarray:
    mats = [as_codes(m) for m in mats if as_codes(m).shape[0]]
    if not mats:
        raise ValueError("empty span")
    return row_basis(F, np.concatenate(mats, axis=0))


def intersect(F: GaloisField, U, W) -> np.ndarray:
    """Row-space intersection of U and W (rows are spanning vectors)."""
    U = row_basis(F, U)
    W = row_basis(F, W)
    n = U.shape[1] if U.size else W.shape[1]
    if U.shape[0] == 0 or W.shape[0] == 0:
        return zeros((0, n))
    K = left_kernel(F, np.concatenate([U, W], axis=0))
    if K.shape[0] == 0:
        return zeros((0, n))
    rows = matmul(F, K[:, : U.shape[0]], U)
    return row_basis(F, rows)


def contains(F: GaloisField, U, v) -> bool:
    U = as_codes(U)
    v = np.asarray(v, dtype=np.int64)
    if np.all(v == ZERO):
        return True
    if U.shape[0] == 0:
        return False
    return rank(F, np.concatenate([U, v[None, :]], axis=0)) == rank(F, U)


def same_space(F: GaloisField, U, W) -> bool:
    a, b = row_basis(F, U), row_basis(F, W)
    return a.shape == b.shape and np.array_equal(a, b)


def frob_matrix(F: GaloisField, M, j: int) -> np.ndarray:
    return F.vfrob(as_codes(M), j)
