"""Finite fields GF(p^e) with Zech-logarithm arithmetic.

Elements are handled in two forms:

* raw integer *codes*: ``k`` in ``[0, p^e - 2]`` stands for ``g^k`` where ``g``
  is the field generator, and the tag :data:`ZERO` (``-1``) stands for zero.
  All bulk routines in the package work on codes (and numpy arrays of codes).
* :class:`FieldElement`, a thin immutable wrapper with operator overloading.

Subfields are never built separately: the subfield of degree ``d`` is the
fixed field of ``x -> x^(p^d)`` inside the one table of the host field.
"""

from __future__ import annotations

import functools
import io
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ZERO = -1
TABLE_BUDGET = 1 << 20
TABLE_MAGIC = b"GFZT"
TABLE_VERSION = 1


class FieldError(ValueError):
    pass


class FieldSizeError(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = 3
    while r * r <= n:
        if n % r == 0:
            return False
        r += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# -- polynomial helpers over F_p (coefficient lists, lowest degree first) ----

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = _ptrim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _ptrim(a)
    return a


def _pmulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, f, p)


def _ppowmod(a, k, f, p):
    result = [1]
    base = _pmod(list(a), f, p)
    while k:
        if k & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        k >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def poly_is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    e = len(f) - 1
    if e <= 0:
        return False
    if e == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**e, f, p), x, p):
        return False
    for r in prime_factors(e):
        h = _psub(_ppowmod(x, p ** (e // r), f, p), x, p)
        g = _pgcd(f, h, p)
        if len(g) > 1:
            return False
    return True


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ptrim(out)


def poly_root_is_primitive(f: list[int], p: int) -> bool:
    """True iff x has multiplicative order p^e - 1 modulo f."""
    e = len(f) - 1
    order = p**e - 1
    if f[0] % p == 0:
        return False
    x = [0, 1]
    if _ppowmod(x, order, f, p) != [1]:
        return False
    return all(_ppowmod(x, order // r, f, p) != [1] for r in prime_factors(order))


def lex_least_primitive_poly(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic primitive irreducible polynomial of degree e over F_p.

    Candidates x^e + c_{e-1}x^{e-1} + ... + c_0 are ordered by the integer
    sum(c_i p^i), i.e. lexicographically from the highest coefficient down.
    """
    for v in range(p**e):
        coeffs = [(v // p**i) % p for i in range(e)] + [1]
        if poly_is_irreducible(coeffs, p) and poly_root_is_primitive(coeffs, p):
            return tuple(coeffs)
    raise FieldError(f"no primitive polynomial of degree {e} over F_{p}")  # pragma: no cover


def format_poly(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
        terms.append(mono if (c == 1 and i) else (f"{c}" if i == 0 else f"{c}{mono}"))
    return "+".join(terms)


class GaloisField:
    """GF(p^e) realised by exp/log/Zech tables over a primitive generator.

    Use :func:`gf_create` instead of instantiating directly; it caches one
    object per ``(p, e)``.
    """

    def __init__(self, p: int, e: int, poly: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if e < 1:
            raise FieldError("extension degree must be positive")
        if p**e > TABLE_BUDGET:
            raise FieldSizeError(f"GF({p}^{e}) has {p**e} elements, over the 2^20 table budget")
        if poly is None:
            poly = lex_least_primitive_poly(p, e)
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != e + 1 or poly[-1] != 1:
            raise FieldError("defining polynomial must be monic of degree e")
        if not poly_is_irreducible(list(poly), p):
            raise FieldError(f"{format_poly(poly)} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.poly = poly
        self.order = p**e
        self.mult_order = self.order - 1
        self._build_tables()
        if e > 1 or p > 2:
            if len(set(self.exp)) != self.mult_order:
                raise FieldError(f"root of {format_poly(poly)} is not primitive")

    # -- construction -------------------------------------------------------

    def _build_tables(self):
        p, e, M = self.p, self.e, self.mult_order
        tail = [(-c) % p for c in self.poly[:e]]  # x^e = sum tail_i x^i
        exp = [0] * M
        digits = [0] * e
        digits[0] = 1
        pw = [p**i for i in range(e)]
        if e == 1:
            # prime field: generator is the least primitive root, i.e. -c_0
            g = tail[0]
            val = 1
            for k in range(M):
                exp[k] = val
                val = (val * g) % p
        else:
            for k in range(M):
                exp[k] = sum(d * w for d, w in zip(digits, pw))
                top = digits[-1]
                digits = [0] + digits[:-1]
                if top:
                    digits = [(d + top * t) % p for d, t in zip(digits, tail)]
        log = [ZERO] * self.order
        for k, v in enumerate(exp):
            log[v] = k
        self.exp = exp
        self.log = log
        zech = [ZERO] * M
        for k in range(M):
            v = exp[k]
            d0 = v % p
            w = v + 1 if d0 != p - 1 else v - (p - 1)
            zech[k] = log[w] if w else ZERO
        self.zech = zech
        self.exp_np = np.array(exp, dtype=np.int64)
        self.log_np = np.array(log, dtype=np.int64)
        self.zech_np = np.array(zech, dtype=np.int64)
        ints = np.arange(self.order, dtype=np.int64)
        self.digits_np = np.stack([(ints // p**i) % p for i in range(e)], axis=1)
        self._neg_shift = 0 if p == 2 else M // 2

    def __repr__(self):
        return f"GF({self.p}^{self.e})"

    def __reduce__(self):
        return (gf_create, (self.p, self.e))

    @property
    def spec(self) -> str:
        return f"GF({self.p}^{self.e})"

    # -- scalar arithmetic on codes ----------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        z = self.zech[(b - a) % self.mult_order]
        return ZERO if z == ZERO else (a + z) % self.mult_order

    def neg(self, a: int) -> int:
        if a == ZERO:
            return ZERO
        return (a + self._neg_shift) % self.mult_order

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % self.mult_order

    def inv(self, a: int) -> int:
        if a == ZERO:
            raise ZeroDivisionError("inverse of zero")
        return (-a) % self.mult_order

    def div(self, a: int, b: int) -> int:
        if b == ZERO:
            raise ZeroDivisionError("division by zero")
        if a == ZERO:
            return ZERO
        return (a - b) % self.mult_order

    def pow(self, a: int, k: int) -> int:
        if a == ZERO:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else ZERO
        return (a * k) % self.mult_order

    def frob(self, a: int, j: int) -> int:
        """a^(p^j)."""
        if a == ZERO:
            return ZERO
        return (a * pow(self.p, j % self.e, self.mult_order)) % self.mult_order

    def sum(self, codes) -> int:
        acc = ZERO
        for c in codes:
            acc = self.add(acc, c)
        return acc

    def from_int(self, v: int) -> int:
        """Code of the element whose F_p-coordinates are the base-p digits of v."""
        return self.log[v]

    def to_int(self, a: int) -> int:
        return 0 if a == ZERO else self.exp[a]

    def from_prime(self, c: int) -> int:
        """Code of the prime-field element c (mod p)."""
        return self.log[c % self.p]

    def elem(self, code: int) -> "FieldElement":
        if code != ZERO:
            code %= self.mult_order
        return FieldElement(self, code)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, ZERO)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def gen(self) -> "FieldElement":
        return FieldElement(self, 1 % self.mult_order)

    # -- subfields ---------------------------------------------------------

    def check_subdegree(self, d: int):
        if d < 1 or self.e % d:
            raise FieldError(f"{d} does not divide the extension degree {self.e}")

    def subfield_gen(self, d: int) -> int:
        """Code of the canonical generator g^((p^e-1)/(p^d-1)) of GF(p^d)."""
        self.check_subdegree(d)
        return (self.mult_order // (self.p**d - 1)) % self.mult_order

    def subfield_codes(self, d: int) -> list[int]:
        """All codes of GF(p^d), zero first, then increasing exponent."""
        self.check_subdegree(d)
        step = self.mult_order // (self.p**d - 1)
        return [ZERO] + list(range(0, self.mult_order, step))

    def in_subfield(self, a: int, d: int) -> bool:
        self.check_subdegree(d)
        return a == ZERO or self.frob(a, d) == a

    def norm(self, a: int, sub: int, sup: int | None = None) -> int:
        """Relative norm from GF(p^sup) to GF(p^sub)."""
        sup = self.e if sup is None else sup
        self.check_subdegree(sup)
        if sub < 1 or sup % sub:
            raise FieldError(f"{sub} does not divide {sup}")
        if a == ZERO:
            return ZERO
        Q, T = self.p**sub, sup // sub
        return self.pow(a, (Q**T - 1) // (Q - 1))

    def trace(self, a: int, sub: int, sup: int | None = None) -> int:
        """Relative trace from GF(p^sup) to GF(p^sub)."""
        sup = self.e if sup is None else sup
        self.check_subdegree(sup)
        if sub < 1 or sup % sub:
            raise FieldError(f"{sub} does not divide {sup}")
        return self.sum(self.frob(a, sub * i) for i in range(sup // sub))

    def fp_basis(self, d: int) -> list[int]:
        """F_p-basis 1, w, ..., w^(d-1) of GF(p^d), w its canonical generator."""
        w = self.subfield_gen(d)
        return [self.pow(w, i) for i in range(d)]

    def relative_basis(self, sub: int, sup: int) -> list[int]:
        """GF(p^sub)-basis of GF(p^sup): powers of the generator of GF(p^sup)."""
        if sup % sub:
            raise FieldError(f"{sub} does not divide {sup}")
        w = self.subfield_gen(sup)
        return [self.pow(w, i) for i in range(sup // sub)]

    # -- vectorised arithmetic on numpy arrays of codes ---------------------

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = (a + b) % self.mult_order
        return np.where((a < 0) | (b < 0), ZERO, out)

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        M = self.mult_order
        z = self.zech_np[(b - a) % M]
        out = np.where(z < 0, ZERO, (a + z) % M)
        out = np.where(a < 0, b, out)
        return np.where(b < 0, a, out)

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self._neg_shift == 0:
            return a.copy()
        return np.where(a < 0, ZERO, (a + self._neg_shift) % self.mult_order)

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a < 0):
            raise ZeroDivisionError("inverse of zero")
        return (-a) % self.mult_order

    def vfrob(self, a, j: int):
        a = np.asarray(a, dtype=np.int64)
        k = pow(self.p, j % self.e, self.mult_order)
        return np.where(a < 0, ZERO, (a * k) % self.mult_order)

    def vpow(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        return np.where(a < 0, ZERO if k else 0, (a * k) % self.mult_order)

    def fp_digits(self, codes):
        """F_p coordinates (polynomial basis) of codes; shape (..., e)."""
        codes = np.asarray(codes, dtype=np.int64)
        ints = np.where(codes < 0, 0, self.exp_np[np.where(codes < 0, 0, codes)])
        return self.digits_np[ints]

    def from_fp_digits(self, digits) -> int:
        v = 0
        for i, d in enumerate(digits):
            v += (int(d) % self.p) * self.p**i
        return self.log[v]

    # -- persistence ---------------------------------------------------------

    def dump_tables(self) -> bytes:
        buf = io.BytesIO()
        buf.write(TABLE_MAGIC)
        buf.write(struct.pack("<HII", TABLE_VERSION, self.p, self.e))
        buf.write(struct.pack(f"<{self.e + 1}I", *self.poly))
        buf.write(np.asarray(self.zech, dtype="<i4").tobytes())
        return buf.getvalue()

    def save_tables(self, path):
        Path(path).write_bytes(self.dump_tables())

    @classmethod
    def load_tables(cls, data: bytes | str | Path) -> "GaloisField":
        if not isinstance(data, (bytes, bytearray)):
            data = Path(data).read_bytes()
        if data[:4] != TABLE_MAGIC:
            raise FieldError("not a field table dump")
        version, p, e = struct.unpack_from("<HII", data, 4)
        if version != TABLE_VERSION:
            raise FieldError(f"unsupported table version {version}")
        off = 4 + struct.calcsize("<HII")
        poly = struct.unpack_from(f"<{e + 1}I", data, off)
        off += 4 * (e + 1)
        zech = np.frombuffer(data[off:], dtype="<i4")
        field = cls(p, e, poly)
        if zech.shape[0] != field.mult_order or not np.array_equal(zech, field.zech_np):
            raise FieldError("Zech table does not match the defining polynomial")
        return field


@functools.lru_cache(maxsize=None)
def gf_create(p: int, e: int = 1) -> GaloisField:
    """The deterministic field GF(p^e); repeated calls return the same object."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if e >= 1 and p**e > TABLE_BUDGET:
        raise FieldSizeError(f"GF({p}^{e}) has {p**e} elements, over the 2^20 table budget")
    return GaloisField(p, e)


def parse_field_spec(text: str) -> GaloisField:
    """Parse ``GF(p^e)`` or ``GF(p)``."""
    s = text.strip().replace(" ", "")
    if not (s.upper().startswith("GF(") and s.endswith(")")):
        raise FieldError(f"bad field spec {text!r}")
    body = s[3:-1]
    if "^" in body:
        p, e = body.split("^", 1)
    else:
        p, e = body, "1"
    return gf_create(int(p), int(e))


@dataclass(frozen=True)
class FieldElement:
    """An element of a :class:`GaloisField`: ZERO or a power of the generator."""

    field: GaloisField
    code: int

    @property
    def exp(self) -> int | None:
        return None if self.code == ZERO else self.code

    @property
    def is_zero(self) -> bool:
        return self.code == ZERO

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("elements of different fields")
            return other.code
        if isinstance(other, int):
            return self.field.from_prime(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(b, self.code))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.div(self.code, b))

    def __rtruediv__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.div(b, self.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __pow__(self, k: int):
        return FieldElement(self.field, self.field.pow(self.code, k))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.code))

    def frobenius(self, j: int = 1) -> "FieldElement":
        return FieldElement(self.field, self.field.frob(self.code, j))

    def to_int(self) -> int:
        return self.field.to_int(self.code)

    def __repr__(self):
        return "0" if self.code == ZERO else f"g^{self.code}"


@dataclass(frozen=True)
class FrobeniusAut:
    """x -> x^(p^j) on the host field; exponents compose additively mod e."""

    field: GaloisField
    j: int

    def __post_init__(self):
        object.__setattr__(self, "j", self.j % self.field.e)

    def __call__(self, a):
        if isinstance(a, FieldElement):
            if a.field is not self.field:
                raise FieldError("element of a different field")
            return FieldElement(self.field, self.field.frob(a.code, self.j))
        return self.field.frob(a, self.j)

    def compose(self, other: "FrobeniusAut") -> "FrobeniusAut":
        if other.field is not self.field:
            raise FieldError("automorphisms of different fields")
        return FrobeniusAut(self.field, self.j + other.j)

    def inverse(self) -> "FrobeniusAut":
        return FrobeniusAut(self.field, -self.j)

    @property
    def is_identity(self) -> bool:
        return self.j == 0

    @property
    def fixed_degree(self) -> int:
        """Degree over F_p of the fixed field."""
        return math.gcd(self.j, self.field.e)


# -- module-level operations ------------------------------------------------

def gf_arith(a: FieldElement, b: FieldElement | None, op: str, k: int | None = None) -> FieldElement:
    """Dispatch ``add, sub, mul, div, inv, pow`` on field elements."""
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** k
    if b is None:
        raise FieldError(f"operation {op} needs two operands")
    if a.field is not b.field:
        raise FieldError("elements of different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise FieldError(f"unknown operation {op!r}")


def frobenius(a: FieldElement, phi: FrobeniusAut) -> FieldElement:
    return phi(a)


def rel_norm(a: FieldElement, sub: int, sup: int) -> FieldElement:
    return a.field.elem(a.field.norm(a.code, sub, sup))


def rel_trace(a: FieldElement, sub: int, sup: int) -> FieldElement:
    return a.field.elem(a.field.trace(a.code, sub, sup))


def subfield_membership(a: FieldElement, sub: int) -> bool:
    return a.field.in_subfield(a.code, sub)


def fp_rank(rows, p: int) -> int:
    """Rank over F_p of an integer matrix."""
    m = np.array(rows, dtype=np.int64) % p
    if m.size == 0:
        return 0
    if m.ndim == 1:
        m = m[None, :]
    nrows, ncols = m.shape
    rank = 0
    inv = [0] + [pow(x, p - 2, p) for x in range(1, p)]
    for col in range(ncols):
        if rank == nrows:
            break
        piv = np.nonzero(m[rank:, col])[0]
        if piv.size == 0:
            continue
        r = rank + piv[0]
        if r != rank:
            m[[rank, r]] = m[[r, rank]]
        m[rank] = (m[rank] * inv[m[rank, col]]) % p
        others = np.nonzero(m[:, col])[0]
        others = others[others != rank]
        if others.size:
            m[others] = (m[others] - np.outer(m[others, col], m[rank])) % p
        rank += 1
    return rank
