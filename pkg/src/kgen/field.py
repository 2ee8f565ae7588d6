"""Word-level finite field arithmetic: GF(2^w) for w <= 64 and GF(p) for p < 2^63.

Elements are plain Python ints in canonical form (a bit-packed polynomial over
F_2, or a residue in [0, p)).  A context object carries the field structure
and is passed explicitly to every operation; contexts are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import random

import numpy as np


class FieldError(ValueError):
    """Invalid field construction or non-canonical operand."""


# --------------------------------------------------------------------------
# Carryless multiplication (polynomial multiplication over F_2)
# --------------------------------------------------------------------------

def clmul_portable(a: int, b: int) -> int:
    """Schoolbook shift-and-XOR product of a and b as polynomials in F_2[X]."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        b >>= 1
    return acc


_TO_BYTES01 = bytes.maketrans(b"01", bytes([0, 1]))
_FROM_BYTES01 = bytes.maketrans(bytes([0, 1]), b"01")


def clmul_wide(a: int, b: int) -> int:
    """Carryless product via the platform's wide integer multiplier.

    Bits are spread one-per-byte so that an ordinary integer product computes
    all coefficient column sums at once; for operands of up to 64 bits each
    column sum is < 256, so no carry crosses byte boundaries and the parity
    of every product byte is the corresponding output bit.  Bit-identical to
    clmul_portable.
    """
    if a == 0 or b == 0:
        return 0
    sa = int.from_bytes(format(a, "b").encode().translate(_TO_BYTES01), "big")
    sb = int.from_bytes(format(b, "b").encode().translate(_TO_BYTES01), "big")
    p = sa * sb
    nb = (p.bit_length() + 7) // 8
    p &= int.from_bytes(b"\x01" * (nb + 1), "big")
    return int(p.to_bytes(nb + 1, "big").translate(_FROM_BYTES01), 2)


def clmul(a: int, b: int) -> int:
    """Carryless multiply; fast path for word-sized operands."""
    if a < (1 << 64) and b < (1 << 64):
        return clmul_wide(a, b)
    return clmul_portable(a, b)


# --------------------------------------------------------------------------
# Small number-theory helpers
# --------------------------------------------------------------------------

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division plus Pollard rho."""
    factors: dict[int, int] = {}

    def add(p):
        factors[p] = factors.get(p, 0) + 1

    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            add(p)
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            add(m)
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return factors


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = _gcd(abs(x - y), n)
        if d != n:
            return d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# --------------------------------------------------------------------------
# GF(2^w)
# --------------------------------------------------------------------------

# Lowest-weight irreducible g = x^w + ... + 1, as ascending exponent tuples.
# Entries with w <= 16 are re-verified by brute force at construction time;
# the larger ones are trusted as table entries.
REDUCTION_POLYS: dict[int, tuple[int, ...]] = {
    1: (0, 1),
    2: (0, 1, 2),
    3: (0, 1, 3),
    4: (0, 1, 4),
    5: (0, 2, 5),
    6: (0, 1, 6),
    7: (0, 1, 7),
    8: (0, 1, 3, 4, 8),
    9: (0, 1, 9),
    10: (0, 3, 10),
    11: (0, 2, 11),
    12: (0, 3, 12),
    13: (0, 1, 3, 4, 13),
    14: (0, 5, 14),
    15: (0, 1, 15),
    16: (0, 1, 3, 5, 16),
    24: (0, 1, 3, 4, 24),
    32: (0, 2, 3, 7, 32),
    48: (0, 1, 3, 5, 48),
    64: (0, 1, 3, 4, 64),
}

_LOG_TABLE_MAX_W = 16


def _f2_poly_mod(a: int, g: int) -> int:
    gb = g.bit_length()
    while a.bit_length() >= gb:
        a ^= g << (a.bit_length() - gb)
    return a


def _f2_irreducible(g: int, w: int) -> bool:
    """Brute-force trial division by every polynomial of degree 1..w//2."""
    if g & 1 == 0:
        return False
    for d in range(2, 1 << (w // 2 + 1)):
        if _f2_poly_mod(g, d) == 0:
            return False
    return True


class Gf2w:
    """Context for GF(2^w) with a sparse (weight <= 5) reduction polynomial.

    Multiplication is carryless product followed by a sparse-polynomial
    Barrett-style reduction; for w <= 16 a discrete-log table is additionally
    built so that products cost three lookups.  Both routes are bit-identical.
    """

    char = 2

    def __init__(self, w: int, poly_exps: tuple[int, ...] | None = None):
        if not 1 <= w <= 64:
            raise FieldError(f"w must be in 1..64, got {w}")
        if poly_exps is None:
            if w not in REDUCTION_POLYS:
                raise FieldError(f"no built-in reduction polynomial for w={w}")
            poly_exps = REDUCTION_POLYS[w]
        poly_exps = tuple(sorted(poly_exps))
        if len(poly_exps) > 5:
            raise FieldError("reduction polynomial must have weight <= 5")
        if poly_exps[0] != 0 or poly_exps[-1] != w:
            raise FieldError("reduction polynomial needs constant term and degree w")
        g = 0
        for e in poly_exps:
            g |= 1 << e
        if w <= _LOG_TABLE_MAX_W:
            if not _f2_irreducible(g, w):
                raise FieldError(f"0x{g:x} is reducible over F_2")
        elif REDUCTION_POLYS.get(w) != poly_exps:
            raise FieldError(
                f"cannot verify irreducibility for w={w}; use the built-in polynomial"
            )
        self.w = w
        self.poly_exps = poly_exps
        self.g = g
        self.mask = (1 << w) - 1
        self.order = 1 << w
        self.mult_order = self.order - 1
        self.elem_bytes = (w + 7) // 8
        self.zero = 0
        self.one = 1
        # tail of g (everything below x^w), used by the reduction fold
        self._tail_exps = poly_exps[:-1]
        self._exp_table: list[int] | None = None
        self._log_table: list[int] | None = None
        if w <= _LOG_TABLE_MAX_W and w > 1:
            self._build_log_tables()

    def __repr__(self):
        return f"Gf2w(w={self.w}, g=0x{self.g:x})"

    def __eq__(self, other):
        return isinstance(other, Gf2w) and other.w == self.w and other.g == self.g

    def __hash__(self):
        return hash((Gf2w, self.w, self.g))

    # -- construction helpers ------------------------------------------------

    def _build_log_tables(self):
        order = self.mult_order
        factors = factorize(order)
        for cand in range(2, self.order):
            if all(self._pow_slow(cand, order // q) != 1 for q in factors):
                gen = cand
                break
        else:  # pragma: no cover - a generator always exists
            raise FieldError("no multiplicative generator found")
        exp = [1] * order
        for i in range(1, order):
            exp[i] = self._mul_slow(exp[i - 1], gen)
        log = [0] * self.order
        for i, v in enumerate(exp):
            log[v] = i
        self._exp_table = exp
        self._log_table = log

    def _mul_slow(self, a: int, b: int) -> int:
        return self.reduce(clmul_portable(a, b))

    def _pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def neg(self, a: int) -> int:
        return a

    def reduce(self, z: int) -> int:
        """Reduce a carryless product z (< 2^(2w-1)) modulo g.

        Sparse-polynomial Barrett fold: the quotient is the top w bits of
        zh*g, and the remainder follows from one more sparse product.  Each
        product with g unrolls into at most five shift-XORs.  Bit-identical
        to polynomial long division for products of canonical elements.
        """
        w = self.w
        zh = z >> w
        if zh == 0:
            return z
        t = 0
        for e in self.poly_exps:
            t ^= zh << e
        q = t >> w
        r = z
        for e in self._tail_exps:
            r ^= q << e
        return r & self.mask

    def mul(self, a: int, b: int) -> int:
        exp = self._exp_table
        if exp is not None:
            if a == 0 or b == 0:
                return 0
            return exp[(self._log_table[a] + self._log_table[b]) % self.mult_order]
        return self.reduce(clmul_wide(a, b))

    def mul_portable(self, a: int, b: int) -> int:
        """Shift-and-XOR route; used as the cross-check for the fast path."""
        return self.reduce(clmul_portable(a, b))

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise FieldError("negative exponent")
        r = 1
        a = a & self.mask
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.mult_order - 1)

    # -- vectorized lanes (numpy uint64), used by batch oracles ---------------

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Lane-wise mul of uint64 arrays; schoolbook + sparse reduction."""
        one = np.uint64(1)
        lo = np.zeros_like(a)
        hi = np.zeros_like(a)
        for j in range(self.w):
            jj = np.uint64(j)
            mask = np.uint64(0) - ((b >> jj) & one)
            lo ^= (a << jj) & mask
            hi ^= ((a >> np.uint64(63 - j)) >> one) & mask
        return self._reduce_vec(hi, lo)

    def _reduce_vec(self, hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
        w = self.w
        one = np.uint64(1)
        if w < 64:
            hi = (hi << np.uint64(64 - w)) | (lo >> np.uint64(w))
            lo = lo & np.uint64(self.mask)
        t_hi = np.zeros_like(hi)
        t_lo = np.zeros_like(lo)
        for e in self.poly_exps:
            if e == 0:
                t_lo ^= hi
            elif e == 64:
                t_hi ^= hi
            else:
                t_lo ^= hi << np.uint64(e)
                t_hi ^= (hi >> np.uint64(63 - e)) >> one
        if w < 64:
            q = (t_hi << np.uint64(64 - w)) | (t_lo >> np.uint64(w))
        else:
            q = t_hi
        r = lo
        for e in self._tail_exps:
            r = r ^ (q << np.uint64(e))
        return r & np.uint64(self.mask)

    # -- element plumbing ------------------------------------------------------

    def validate(self, a: int):
        if not isinstance(a, int) or a < 0 or a > self.mask:
            raise FieldError(f"not a canonical GF(2^{self.w}) element: {a!r}")

    def element_at(self, i: int) -> int:
        """Domain enumeration order for sequential evaluation: word order."""
        return i

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.order)

    def to_bytes(self, a: int) -> bytes:
        return a.to_bytes(self.elem_bytes, "little")

    def from_bytes(self, data: bytes) -> int:
        a = int.from_bytes(data, "little")
        self.validate(a)
        return a


# --------------------------------------------------------------------------
# GF(p)
# --------------------------------------------------------------------------

class Gfp:
    """Context for GF(p), p prime and < 2^63.

    Products are reduced with a precomputed 128-bit reciprocal (Barrett), so
    the hot path runs on multiplications and shifts only; at most one
    conditional subtraction is needed.
    """

    char_is_two = False

    def __init__(self, p: int):
        if not 2 <= p < (1 << 63):
            raise FieldError(f"p must be in [2, 2^63), got {p}")
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.order = p
        self.mult_order = p - 1
        self.elem_bytes = 8
        self.zero = 0
        self.one = 1 % p
        self._shift = 128
        self._recip = (1 << 128) // p

    def __repr__(self):
        return f"Gfp(p={self.p})"

    def __eq__(self, other):
        return isinstance(other, Gfp) and other.p == self.p

    def __hash__(self):
        return hash((Gfp, self.p))

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        s = a + b
        return s - self.p if s >= self.p else s

    def sub(self, a: int, b: int) -> int:
        s = a - b
        return s + self.p if s < 0 else s

    def neg(self, a: int) -> int:
        return self.p - a if a else 0

    def mul(self, a: int, b: int) -> int:
        t = a * b
        r = t - ((t * self._recip) >> 128) * self.p
        return r - self.p if r >= self.p else r

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise FieldError("negative exponent")
        r = self.one
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.p - 2)

    # -- element plumbing ------------------------------------------------------

    def validate(self, a: int):
        if not isinstance(a, int) or not 0 <= a < self.p:
            raise FieldError(f"not a canonical GF({self.p}) element: {a!r}")

    def element_at(self, i: int) -> int:
        return i

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def to_bytes(self, a: int) -> bytes:
        return a.to_bytes(self.elem_bytes, "little")

    def from_bytes(self, data: bytes) -> int:
        a = int.from_bytes(data, "little")
        self.validate(a)
        return a


def find_primitive_element(ctx: Gfp, factors: dict[int, int] | None = None,
                           rng: random.Random | None = None) -> int:
    """Las Vegas search for a generator of F_p^*.

    `factors` must be the complete prime factorization of p-1 when supplied
    (a wrong factorization is detected and rejected); by default it is
    computed here.  Candidates are sampled and accepted once
    omega^((p-1)/q) != 1 for every prime q | p-1.
    """
    p = ctx.p
    if p == 2:
        return 1
    if factors is None:
        factors = factorize(p - 1)
    else:
        n = 1
        for q, mult in factors.items():
            if not is_prime(q):
                raise FieldError(f"claimed factor {q} is not prime")
            n *= q ** mult
        if n != p - 1:
            raise FieldError("factorization does not multiply out to p-1")
    rng = rng or random.Random(0x5eed)
    primes = list(factors)
    while True:
        cand = rng.randrange(2, p)
        if all(ctx.pow(cand, (p - 1) // q) != 1 for q in primes):
            return cand


def field_spec_string(ctx) -> str:
    """Inverse of parse_field_spec."""
    if isinstance(ctx, Gf2w):
        return f"gf2w:{ctx.w}"
    if isinstance(ctx, Gfp):
        return f"gfp:{ctx.p}"
    raise FieldError(f"unknown field context {ctx!r}")


def parse_field_spec(spec: str):
    """Parse 'gf2w:64' or 'gfp:257' into a field context."""
    kind, _, arg = spec.partition(":")
    if not arg:
        raise FieldError(f"malformed field spec {spec!r}, want gf2w:W or gfp:P")
    try:
        value = int(arg, 0)
    except ValueError as exc:
        raise FieldError(f"malformed field spec {spec!r}") from exc
    if kind == "gf2w":
        return Gf2w(value)
    if kind == "gfp":
        return Gfp(value)
    raise FieldError(f"unknown field kind {kind!r}")
