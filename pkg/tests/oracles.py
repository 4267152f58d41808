"""Independent oracles shared by the unit and acceptance tests."""

import numpy as np

from pseudoregulus import _linalg as la
from pseudoregulus.proj_geometry import FqLinearSet, GeometryError, fq_to_vectors


def poly_mulmod(a, b, f, p):
    """Product of coefficient lists (low degree first) modulo monic f."""
    e = len(f) - 1
    out = [0] * (2 * e)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, e - 1, -1):
        c = out[k]
        if c:
            for i in range(e + 1):
                out[k - e + i] = (out[k - e + i] - c * f[i]) % p
    return out[:e]


def gen_powers(F):
    """Coefficient vectors of g^0 .. g^(q-2), by repeated multiplication by g."""
    if F.e == 1:
        g = F.to_int(1 % F.mult_order)
        return [[pow(g, k, F.p)] for k in range(F.p - 1)]
    x = [0, 1] + [0] * (F.e - 2)
    powers = []
    cur = [1] + [0] * (F.e - 1)
    for _ in range(F.p**F.e - 1):
        powers.append(cur)
        cur = poly_mulmod(cur, x, list(F.poly), F.p)
    return powers


def as_int(vec, p):
    return sum(c * p**i for i, c in enumerate(vec))


def check_field_axioms(F):
    """Exhaustive exp/Zech table check against polynomial arithmetic; returns a list of failures."""
    p, e = F.p, F.e
    q = p**e
    bad = []
    codes = np.arange(q - 1)
    if not np.all(F.vpow(codes, q - 1) == 0):
        bad.append("a^(q-1) != 1")
    ints = np.array([as_int(v, p) for v in gen_powers(F)])
    if ints.tolist() != [F.to_int(int(k)) for k in codes]:
        bad.append("exp table")
    if len(set(ints.tolist())) != q - 1 or 0 in ints:
        bad.append("generator not primitive")
    one_plus = F.vadd(0, codes)
    # 1 + g^k changes only the constant coefficient
    expected = ints - (ints % p) + ((ints % p) + 1) % p
    lookup = {v: k for k, v in enumerate(ints.tolist())}
    want = np.array([lookup.get(int(x), -1) if x else -1 for x in expected])
    if not np.array_equal(one_plus, want):
        bad.append("Zech table")
    if F.mult_order != q - 1:
        bad.append("multiplicative order")
    return bad


def random_subspace(F, space, q_degree, rng):
    """A random F_q-subspace of rank 1 .. rt, as a linear set."""
    t = space.coord_degree // q_degree
    k = int(rng.integers(1, space.r * t + 1))
    scal = F.subfield_codes(q_degree)
    while True:
        M = rng.choice(np.array(scal), size=(k, space.r * t))
        if la.rank(F, M) == k:
            try:
                return FqLinearSet(space, fq_to_vectors(space, q_degree, M), q_degree)
            except GeometryError:
                continue
