"""Polynomials over a field context: Horner evaluation and the naive
multipoint oracle that every batch-evaluation path is checked against."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import FieldError, Gf2w


@dataclass(frozen=True)
class Polynomial:
    """Coefficient vector a_0..a_{k-1}, constant term first.

    Trailing zero coefficients are legal and preserved: a member of the
    k-wise independent family carries exactly k coefficients, not minimal
    degree.
    """

    field: object
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise FieldError("polynomial needs at least one coefficient")
        for c in self.coeffs:
            self.field.validate(c)

    def __len__(self):
        return len(self.coeffs)


def horner_eval(h: Polynomial, x: int) -> int:
    """a_0 + a_1 x + ... + a_{k-1} x^{k-1} with k-1 mults and k-1 adds."""
    f = h.field
    f.validate(x)
    acc = h.coeffs[-1]
    for c in reversed(h.coeffs[:-1]):
        acc = f.add(f.mul(acc, x), c)
    return acc


def naive_multipoint(h: Polynomial, points: Sequence[int]) -> list[int]:
    """Elementwise Horner evaluation; the correctness oracle for FFT paths.

    For wide binary fields the lanes are evaluated with the vectorized
    shift-and-XOR route, which is independent of (and cross-checked against)
    the scalar fast multiplication path.
    """
    f = h.field
    if isinstance(f, Gf2w) and f.w > 16 and len(points) >= 64:
        return _naive_multipoint_lanes(h, points)
    return [horner_eval(h, x) for x in points]


def _naive_multipoint_lanes(h: Polynomial, points: Sequence[int]) -> list[int]:
    f = h.field
    xs = np.array(points, dtype=np.uint64)
    one = np.uint64(1)
    # per-lane masks for the bits of x are fixed across Horner steps
    masks = [np.uint64(0) - ((xs >> np.uint64(j)) & one) for j in range(f.w)]
    acc = np.full_like(xs, np.uint64(h.coeffs[-1]))
    for c in reversed(h.coeffs[:-1]):
        lo = np.zeros_like(xs)
        hi = np.zeros_like(xs)
        for j, mask in enumerate(masks):
            jj = np.uint64(j)
            lo ^= (acc << jj) & mask
            hi ^= ((acc >> np.uint64(63 - j)) >> one) & mask
        acc = f._reduce_vec(hi, lo) ^ np.uint64(c)
    return [int(v) for v in acc]


def random_polynomial(field, k: int, rng: random.Random) -> Polynomial:
    """Uniform member of the k-wise independent family: k iid coefficients.

    This is the generator seed; k field elements of randomness.
    """
    if k < 1:
        raise FieldError("k must be >= 1")
    if k > field.order:
        raise FieldError(f"k={k} exceeds field size {field.order}")
    return Polynomial(field, tuple(field.random_element(rng) for _ in range(k)))
