"""Random unbalanced bipartite graphs, stacking, brute-force verification
oracles, and the failure-probability bound calculators that size them.

All bound arithmetic runs in log10 space with log-gamma factorials: the
interesting failure probabilities reach 1e-46, far below what direct floats
survive.
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import GuardExceeded

_LN10 = math.log(10.0)
_LOG10_E = math.log10(math.e)

BRUTE_FORCE_MAX_LEFT = 24
SUBSET_ENUM_BUDGET = 2_000_000


# --------------------------------------------------------------------------
# Graphs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BipartiteGraph:
    """Left side c*m vertices, right side m vertices, out-degree <= d.

    Adjacency lists are sorted and duplicate-free, so each list is exactly
    the support of the corresponding F_2 matrix row.
    """

    c: int
    m: int
    d: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.c < 1 or self.m < 1 or self.d < 1:
            raise ValueError("c, m, d must all be >= 1")
        if len(self.adjacency) != self.c * self.m:
            raise ValueError("adjacency must list every left vertex")
        for row in self.adjacency:
            if not 1 <= len(row) <= self.d:
                raise ValueError("adjacency rows must have 1..d entries")
            if list(row) != sorted(set(row)):
                raise ValueError("adjacency rows must be sorted and duplicate-free")
            if row[-1] >= self.m:
                raise ValueError("right index out of range")

    @property
    def n_left(self) -> int:
        return self.c * self.m

    def row_bitsets(self) -> list[int]:
        """Rows of the F_2 adjacency matrix as ints (bit y = edge to y)."""
        out = []
        for row in self.adjacency:
            bits = 0
            for y in row:
                bits |= 1 << y
            out.append(bits)
        return out


def sample_graph(c: int, m: int, d: int, rng: random.Random) -> BipartiteGraph:
    """For each left vertex independently: d uniform draws from [m], deduplicated."""
    if c < 1 or m < 1 or d < 1:
        raise ValueError("c, m, d must all be >= 1")
    adjacency = tuple(
        tuple(sorted({rng.randrange(m) for _ in range(d)}))
        for _ in range(c * m)
    )
    return BipartiteGraph(c, m, d, adjacency)


def stack(g: BipartiteGraph, b: int) -> BipartiteGraph:
    """Block-diagonal b-fold copy: a (c, b*m, d) graph.

    Preserves k-uniqueness and small-row-subset independence in both
    directions, since any offending subset restricts to a single block.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    if b == 1:
        return g
    rows = []
    for t in range(b):
        off = t * g.m
        for row in g.adjacency:
            rows.append(tuple(y + off for y in row))
    return BipartiteGraph(g.c, b * g.m, g.d, tuple(rows))


# --------------------------------------------------------------------------
# Brute-force verification oracles
# --------------------------------------------------------------------------

def is_k_unique_bruteforce(g: BipartiteGraph, k: int,
                           max_left: int = BRUTE_FORCE_MAX_LEFT) -> bool:
    """Exponential sweep: every nonempty S with |S| <= k must have a right
    vertex adjacent to exactly one member of S."""
    n = g.n_left
    if n > max_left:
        raise GuardExceeded(f"brute-force uniqueness sweep needs cm <= {max_left}, got {n}")
    for size in range(1, min(k, n) + 1):
        for subset in combinations(range(n), size):
            counts: dict[int, int] = {}
            for x in subset:
                for y in g.adjacency[x]:
                    counts[y] = counts.get(y, 0) + 1
            if 1 not in counts.values():
                return False
    return True


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over F_2 of rows given as int bitsets."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def all_small_row_subsets_independent(
    g: BipartiteGraph,
    k: int,
    max_enum: int = SUBSET_ENUM_BUDGET,
    samples: int = 20_000,
    rng: random.Random | None = None,
) -> bool:
    """True iff no nonempty subset of <= k rows of the F_2 adjacency matrix
    sums to zero; exactly the condition under which M*x carries k-wise
    independence through.

    Subset sizes 1 and 2 (zero rows, duplicate rows) are always resolved
    exactly in linear time.  Larger sizes use the exact subset sweep when the
    enumeration fits the budget; otherwise, for k <= 20, sampled k-row
    submatrices are rank-checked (a one-sided Monte Carlo filter: False is
    definitive, True is not a certificate).
    """
    rows = g.row_bitsets()
    n = len(rows)
    kk = min(k, n)
    if 0 in rows:
        return False
    if kk >= 2 and len(set(rows)) < n:
        return False
    if kk <= 2:
        return True
    total = 0
    for size in range(3, kk + 1):
        total += math.comb(n, size)
        if total > max_enum:
            break
    if total <= max_enum:
        for size in range(3, kk + 1):
            for subset in combinations(range(n), size):
                acc = 0
                for i in subset:
                    acc ^= rows[i]
                if acc == 0:
                    return False
        return True
    if k <= 20:
        rng = rng or random.Random(0)
        for _ in range(samples):
            picked = rng.sample(range(n), kk)
            if gf2_rank([rows[i] for i in picked]) < kk:
                return False
        return True
    raise GuardExceeded(
        f"subset sweep needs <= {max_enum} subsets or k <= 20; "
        f"got cm={n}, k={k}"
    )


# --------------------------------------------------------------------------
# Failure-probability bounds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundResult:
    """log10 of a failure-probability upper bound plus its per-subset-size
    breakdown (subset size i -> log10 of that term).

    log10_delta is the raw union-bound value and may exceed 0 (a vacuous
    bound); the linear `delta` view clamps to the trivial probability bound 1.
    """

    log10_delta: float
    per_size_log10: dict[int, float] = dc_field(repr=False, default_factory=dict)

    @property
    def delta(self) -> float:
        if self.log10_delta >= 0.0:
            return 1.0
        return 10.0 ** self.log10_delta if self.log10_delta > -307 else 0.0


def _logsumexp10(terms: np.ndarray) -> float:
    finite = terms[np.isfinite(terms)]
    if len(finite) == 0:
        return float("-inf")
    m = float(np.max(finite))
    return m + math.log10(float(np.sum(np.power(10.0, finite - m))))


def unique_failure_bound(c: int, m: int, d: int, k: int) -> BoundResult:
    """Union bound on a sampled graph failing to be a unique-neighbor
    expander: sum over subset sizes i of
    (c*m*e^{1+d/2} * ((d/2) * i^{1-1/(d/2)} / m)^{d/2})^i."""
    if k * d > m:
        raise ValueError(f"requires k*d <= m, got k*d={k * d} > m={m}")
    i = np.arange(1, k + 1, dtype=np.float64)
    half_d = d / 2.0
    bracket = (
        math.log10(c * m)
        + (1.0 + half_d) * _LOG10_E
        + half_d * (math.log10(half_d) + (1.0 - 1.0 / half_d) * np.log10(i) - math.log10(m))
    )
    terms = i * bracket
    return BoundResult(
        log10_delta=_logsumexp10(terms),
        per_size_log10={int(n): float(t) for n, t in zip(i, terms)},
    )


def delta_from_gamma(c: int, d: int, gamma: float) -> float:
    """Failure probability as a function of imbalance, degree and the
    oversizing factor gamma > 1 (with m = O(d k gamma)): e*c*d / gamma^(d/2-1)."""
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    return math.e * c * d / gamma ** (d / 2.0 - 1.0)


def beta_pair(i: int, d: int, m: int) -> float:
    """log10 of (i*d - 1)!! * (1/m)^(i*d/2): the pairing bound on i fixed
    rows XORing to zero.  Odd i*d has even parity probability zero => -inf."""
    n = i * d
    if n % 2 == 1:
        return float("-inf")
    # (n-1)!! = n! / (2^(n/2) * (n/2)!)
    log10_dfact = (gammaln(n + 1) - (n / 2) * math.log(2) - gammaln(n / 2 + 1)) / _LN10
    return float(log10_dfact - (n / 2) * math.log10(m))


def beta_poisson(i: int, d: int, m: int) -> float:
    """log10 of e*sqrt(i*d)*((1+e^(-2 i d / m))/2)^m: the Poisson-parity bound."""
    n = i * d
    inner = math.log1p(math.exp(-2.0 * n / m)) - math.log(2.0)
    return _LOG10_E + 0.5 * math.log10(n) + m * inner / _LN10


def rank_failure_bound(c: int, m: int, d: int, k: int) -> BoundResult:
    """Union bound over row subsets: sum_i C(c*m, i) * min(beta_pair, beta_poisson)."""
    cm = c * m
    i = np.arange(1, k + 1, dtype=np.float64)
    n = i * d
    log10_binom = (gammaln(cm + 1) - gammaln(i + 1) - gammaln(cm - i + 1)) / _LN10
    bp = np.where(
        (i.astype(np.int64) * d) % 2 == 0,
        (gammaln(n + 1) - (n / 2) * math.log(2) - gammaln(n / 2 + 1)) / _LN10
        - (n / 2) * math.log10(m),
        -np.inf,
    )
    inner = np.log1p(np.exp(-2.0 * n / m)) - math.log(2.0)
    bpo = _LOG10_E + 0.5 * np.log10(n) + m * inner / _LN10
    terms = log10_binom + np.minimum(bp, bpo)
    return BoundResult(
        log10_delta=_logsumexp10(terms),
        per_size_log10={int(v): float(t) for v, t in zip(i, terms)},
    )


# --------------------------------------------------------------------------
# Parameter search
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeModel:
    """Coarse per-value cost model T = FFT_{dk}/c + d random accesses.

    The constants approximate this implementation's measured magnitudes and
    only serve to rank feasible parameter triples; `kgen bench` measures
    real numbers.
    """

    fft_ns_per_value_base: float = 400.0
    fft_ns_per_value_log: float = 220.0
    lookup_ns_tiers: tuple[tuple[int, float], ...] = (
        (1 << 14, 60.0),
        (1 << 19, 90.0),
        (1 << 63, 140.0),
    )

    def fft_ns(self, n: int) -> float:
        return self.fft_ns_per_value_base + self.fft_ns_per_value_log * math.log2(max(n, 2))

    def lookup_ns(self, m: int) -> float:
        for cap, ns in self.lookup_ns_tiers:
            if m <= cap:
                return ns
        return self.lookup_ns_tiers[-1][1]

    def predict(self, c: int, m: int, d: int, k: int) -> float:
        return self.fft_ns(d * k) / c + d * self.lookup_ns(m)


@dataclass(frozen=True)
class SearchRow:
    c: int
    d: int
    m: int | None
    log10_delta: float | None
    predicted_ns: float | None

    @property
    def feasible(self) -> bool:
        return self.m is not None


@dataclass(frozen=True)
class SearchResult:
    k: int
    delta_target: float
    rows: tuple[SearchRow, ...]
    winner: SearchRow | None


def search_parameters(
    k: int,
    c_candidates: Sequence[int],
    d_candidates: Sequence[int],
    m_cap: int,
    delta_target: float,
    time_model: TimeModel | None = None,
    threads: int = 1,
) -> SearchResult:
    """For each (c, d): the least power-of-two m <= m_cap whose rank failure
    bound meets the target; feasible triples ranked by predicted time."""
    if not c_candidates or not d_candidates:
        raise ValueError("candidate sets must be non-empty")
    model = time_model or TimeModel()
    log10_target = math.log10(delta_target)
    grid = [(c, d) for c in sorted(c_candidates) for d in sorted(d_candidates)]

    def solve(cell):
        c, d = cell
        m = 2
        while m <= m_cap:
            bound = rank_failure_bound(c, m, d, k).log10_delta
            # the bound is a probability: anything above 1 is trivially 1
            if min(bound, 0.0) <= log10_target:
                return SearchRow(c, d, m, bound, model.predict(c, m, d, k))
            m <<= 1
        return SearchRow(c, d, None, None, None)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(solve, grid))
    else:
        rows = tuple(solve(cell) for cell in grid)
    feasible = [r for r in rows if r.feasible]
    winner = min(feasible, key=lambda r: (r.predicted_ns, r.c, r.d)) if feasible else None
    return SearchResult(k=k, delta_target=delta_target, rows=rows, winner=winner)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

_PAD = 0xFFFFFFFF


def graph_to_bytes(g: BipartiteGraph) -> bytes:
    """Header (c, m, d) as little-endian u32, then c*m*d little-endian u32
    neighbor indices, 0xFFFFFFFF padding the deduplicated slots."""
    out = [struct.pack("<III", g.c, g.m, g.d)]
    for row in g.adjacency:
        padded = list(row) + [_PAD] * (g.d - len(row))
        out.append(struct.pack(f"<{g.d}I", *padded))
    return b"".join(out)


def graph_from_bytes(data: bytes) -> BipartiteGraph:
    c, m, d = struct.unpack_from("<III", data, 0)
    rows = []
    off = 12
    for _ in range(c * m):
        entries = struct.unpack_from(f"<{d}I", data, off)
        off += 4 * d
        rows.append(tuple(y for y in entries if y != _PAD))
    return BipartiteGraph(c, m, d, tuple(rows))
