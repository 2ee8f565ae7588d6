"""Batch evaluation of a degree < k polynomial at k structured points.

Two engines:

* an additive FFT over GF(2^w) that evaluates on an affine F_2-subspace
  (Taylor expansion at x^2 - x, two half-size transforms per level), and
* a multiplicative-coset DFT over GF(p) that walks the cosets
  omega^j * <omega_k>, which partition F_p^* exactly.
"""

from __future__ import annotations

from typing import Sequence

from .errors import PeriodExhausted
from .field import FieldError, Gf2w, Gfp


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _gf2_rank(words: Sequence[int]) -> int:
    basis = []
    for v in words:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


class _Level:
    __slots__ = ("lam", "inv_lam", "twists", "combos")

    def __init__(self, lam, inv_lam, twists, combos):
        self.lam = lam
        self.inv_lam = inv_lam
        self.twists = twists
        self.combos = combos


class AdditiveFftPlan:
    """Evaluation plan for one affine subspace shape over GF(2^w).

    The transform size is 2^s for a basis beta_1..beta_s of F_2-linearly
    independent field elements; output index b maps to the point
    shift + sum_i bit_i(b) * beta_{i+1}.  Defaults to the monomial basis
    1, x, x^2, ...
    """

    def __init__(self, field: Gf2w, s: int, basis: Sequence[int] | None = None):
        if not isinstance(field, Gf2w):
            raise FieldError("additive FFT requires a binary field")
        if not 0 <= s <= field.w:
            raise FieldError(f"transform log-size {s} out of range for w={field.w}")
        if basis is None:
            basis = [1 << i for i in range(s)]
        basis = list(basis)
        if len(basis) != s:
            raise FieldError("basis length must equal s")
        for b in basis:
            field.validate(b)
        if _gf2_rank(basis) != s:
            raise FieldError("basis elements are not F_2-linearly independent")
        self.field = field
        self.s = s
        self.size = 1 << s
        self.basis = tuple(basis)
        self.levels: list[_Level] = []
        self.op_counts = {"mul": 0, "add": 0}
        self.count_ops = False
        cur = basis
        for j in range(s, 0, -1):
            lam = cur[0]
            inv_lam = field.inv(lam)
            norm = [field.mul(b, inv_lam) for b in cur]
            twists = None
            if lam != 1:
                twists = [1] * (1 << j)
                for i in range(1, 1 << j):
                    twists[i] = field.mul(twists[i - 1], lam)
            combos = [0] * (1 << (j - 1))
            for b in range(1, 1 << (j - 1)):
                low = b & -b
                combos[b] = combos[b ^ low] ^ norm[1 + low.bit_length() - 1]
            self.levels.append(_Level(lam, inv_lam, twists, combos))
            cur = [field.add(field.mul(g, g), g) for g in norm[1:]]

    def points(self, shift: int = 0) -> list[int]:
        """The evaluation points in output order."""
        f = self.field
        out = [shift] * self.size
        for b in range(1, self.size):
            low = b & -b
            out[b] = out[b ^ low] ^ self.basis[low.bit_length() - 1]
        return out

    def evaluate(self, coeffs: Sequence[int], shift: int = 0) -> list[int]:
        """Evaluate the polynomial with the given coefficients (constant term
        first) at every point of shift + span(basis), in enumeration order."""
        if len(coeffs) > self.size:
            raise FieldError(
                f"polynomial of length {len(coeffs)} exceeds transform size {self.size}"
            )
        self.field.validate(shift)
        c = list(coeffs) + [0] * (self.size - len(coeffs))
        return self._eval(0, c, shift)

    def _eval(self, depth: int, c: list[int], shift: int) -> list[int]:
        f = self.field
        n = len(c)
        if n == 1:
            return c
        lvl = self.levels[depth]
        mul = f.mul
        if lvl.lam != 1:
            shift = mul(shift, lvl.inv_lam)
            tw = lvl.twists
            c = [mul(ci, ti) if ti != 1 else ci for ci, ti in zip(c, tw)]
            if self.count_ops:
                self.op_counts["mul"] += sum(1 for t in tw if t != 1)
        _taylor(c, 0, n)
        if self.count_ops:
            self.op_counts["add"] += _taylor_adds(n)
        sigma = mul(shift, shift) ^ shift
        g0 = self._eval(depth + 1, c[0::2], sigma)
        g1 = self._eval(depth + 1, c[1::2], sigma)
        combos = lvl.combos
        out = [0] * n
        for b in range(n >> 1):
            u = shift ^ combos[b]
            e = g0[b] ^ mul(u, g1[b])
            out[2 * b] = e
            out[2 * b + 1] = e ^ g1[b]
        if self.count_ops:
            half = n >> 1
            self.op_counts["mul"] += half
            self.op_counts["add"] += 2 * half + half  # two XORs plus the point offsets
        return out


def _taylor(c: list[int], lo: int, n: int):
    """In-place Taylor expansion at x^2 - x; XORs only.

    Afterwards c[2i], c[2i+1] are the coefficient pairs g0_i, g1_i with
    f(x) = sum_i (g0_i + g1_i x)(x^2 - x)^i.
    """
    while n > 2:
        half = n >> 1
        q = n >> 2
        for i in range(lo + half, lo + half + q):
            c[i] ^= c[i + q]
        for i in range(lo + q, lo + half):
            c[i] ^= c[i + q]
        _taylor(c, lo + half, half)
        n = half


def _taylor_adds(n: int) -> int:
    total = 0
    while n > 2:
        total += n >> 1
        total += _taylor_adds(n >> 1)
        n >>= 1
    return total


class CosetDftPlan:
    """Radix-2 DFT plan over GF(p) walking the cosets omega^j * <omega_k>.

    k must be a power of two dividing p-1.  The plan owns a coset cursor
    (index j and the running twist omega^j); advancing past the last coset
    raises PeriodExhausted.  Twiddle factors (k/2 powers of omega_k) are
    precomputed once and shared by all cosets.
    """

    def __init__(self, field: Gfp, k: int, omega: int):
        if not isinstance(field, Gfp):
            raise FieldError("coset DFT requires a prime field")
        p = field.p
        if not _is_pow2(k):
            raise FieldError(f"transform length {k} is not a power of two")
        if (p - 1) % k != 0:
            raise FieldError(f"k={k} does not divide p-1={p - 1}")
        field.validate(omega)
        if omega == 0:
            raise FieldError("omega must be a unit")
        omega_k = field.pow(omega, (p - 1) // k)
        if field.pow(omega_k, k) != 1 or (k > 1 and field.pow(omega_k, k // 2) == 1):
            raise FieldError("omega_k does not have multiplicative order k")
        self.field = field
        self.k = k
        self.omega = omega
        self.omega_k = omega_k
        self.num_cosets = (p - 1) // k
        self.j = 0
        self.twist_base = 1  # omega^j for the current coset
        half = k >> 1
        tw = [1] * max(half, 1)
        for i in range(1, half):
            tw[i] = field.mul(tw[i - 1], omega_k)
        self._twiddles = tw
        self._rev = _bit_reversal(k)

    def coset_points(self) -> list[int]:
        """The points omega^j * omega_k^r of the current coset, r = 0..k-1."""
        f = self.field
        pts = [self.twist_base] * self.k
        for r in range(1, self.k):
            pts[r] = f.mul(pts[r - 1], self.omega_k)
        return pts

    def twist_coefficients(self, coeffs: Sequence[int]) -> list[int]:
        """Scale a_i by omega^{j*i} using one running power."""
        if len(coeffs) != self.k:
            raise FieldError("coefficient count must equal the transform length")
        f = self.field
        out = list(coeffs)
        t = 1
        for i in range(1, self.k):
            t = f.mul(t, self.twist_base)
            out[i] = f.mul(out[i], t)
        return out

    def dft(self, coeffs: Sequence[int]) -> list[int]:
        """Length-k DFT: out[r] = sum_i c_i * omega_k^{r i}; O(k log k)."""
        if len(coeffs) != self.k:
            raise FieldError("coefficient count must equal the transform length")
        f = self.field
        k = self.k
        a = [coeffs[self._rev[i]] for i in range(k)]
        tw = self._twiddles
        size = 2
        while size <= k:
            half = size >> 1
            step = k // size
            for start in range(0, k, size):
                for i in range(half):
                    u = a[start + i]
                    v = f.mul(a[start + i + half], tw[i * step])
                    a[start + i] = f.add(u, v)
                    a[start + i + half] = f.sub(u, v)
            size <<= 1
        return a

    def evaluate_coset(self, coeffs: Sequence[int]) -> list[int]:
        """Evaluate h on the current coset: DFT of the twisted coefficients."""
        return self.dft(self.twist_coefficients(coeffs))

    def advance_coset(self):
        """Move to the next coset with a single multiplication."""
        if self.j >= self.num_cosets - 1:
            raise PeriodExhausted(
                f"all {self.num_cosets} cosets of F_{self.field.p}^* consumed"
            )
        self.j += 1
        self.twist_base = self.field.mul(self.twist_base, self.omega)


def _bit_reversal(n: int) -> list[int]:
    bits = n.bit_length() - 1
    rev = [0] * n
    for i in range(1, n):
        rev[i] = rev[i >> 1] >> 1 | ((i & 1) << (bits - 1))
    return rev
