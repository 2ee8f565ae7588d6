"""Sequential k-independent generators: init(seed) once, emit() forever after
(until the declared period runs out).

Four kinds:

* horner      -- direct polynomial evaluation, k-1 mults per value;
* fft-batch   -- one size-k batch evaluation per k outputs (additive FFT
                 over GF(2^w), coset DFT over GF(p));
* expander    -- a d-regular random bipartite graph over a d*k-independent
                 right table; emits are d table lookups plus d-1 additions,
                 amortized constant time;
* cascade     -- a chain of expanders multiplying the output volume by c per
                 level, so the base generator's batch cost is amortized c^t-fold.

The horner and fft-batch kinds are exact (failure probability zero); the
sampled kinds declare the union-bound failure probability of their graphs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import ConfigError, PeriodExhausted
from .expander import (
    BipartiteGraph,
    rank_failure_bound,
    sample_graph,
)
from .fft import AdditiveFftPlan, CosetDftPlan
from .field import Gf2w, Gfp, field_spec_string, find_primitive_element
from .poly import Polynomial, horner_eval


@dataclass(frozen=True)
class GeneratorDescriptor:
    kind: str
    field: object
    k: int
    period: int
    delta: float
    seed_len: int

    def header_line(self) -> str:
        return (
            f"# kind={self.kind} field={field_spec_string(self.field)} k={self.k}"
            f" period={self.period} delta={self.delta:.6g} seedlen={self.seed_len}"
        )


def _check_seed(field, seed, want_len) -> tuple[int, ...]:
    seed = tuple(seed)
    if len(seed) != want_len:
        raise ConfigError(f"seed must be {want_len} field elements, got {len(seed)}")
    for s in seed:
        field.validate(s)
    return seed


class HornerGenerator:
    """Evaluates the seed polynomial over the field in enumeration order
    (0, 1, 2, ... as canonical words); period |F|, zero failure probability."""

    def __init__(self, field, k: int, seed):
        if k < 1:
            raise ConfigError("k must be >= 1")
        if k > field.order:
            raise ConfigError(f"k={k} exceeds field size {field.order}")
        self.field = field
        self.seed = _check_seed(field, seed, k)
        self.h = Polynomial(field, self.seed)
        self.descriptor = GeneratorDescriptor(
            "horner", field, k, field.order, 0.0, k
        )
        self._pos = 0

    def fork(self, seed) -> "HornerGenerator":
        return HornerGenerator(self.field, self.descriptor.k, seed)

    def emit(self) -> int:
        if self._pos >= self.descriptor.period:
            raise PeriodExhausted(f"period {self.descriptor.period} consumed")
        x = self.field.element_at(self._pos)
        self._pos += 1
        return horner_eval(self.h, x)

    def emit_batch(self, count: int) -> list[int]:
        if count > self.descriptor.period - self._pos:
            raise PeriodExhausted(
                f"{count} values requested, {self.descriptor.period - self._pos} remain"
            )
        return [self.emit() for _ in range(count)]


class FftBatchGenerator:
    """Evaluates the seed polynomial one structured batch at a time.

    Over GF(2^w) the batches are the affine subspaces W, W+delta_1, ... that
    cover the whole field, enumerated by Gray-coded coset representatives;
    period 2^w.  Over GF(p) the batches are the multiplicative cosets
    omega^j * <omega_k>, which cover F_p^* exactly; period p-1.
    """

    def __init__(self, field, k: int, seed, omega: int | None = None):
        if k < 1:
            raise ConfigError("k must be >= 1")
        if k > field.order:
            raise ConfigError(f"k={k} exceeds field size {field.order}")
        self.field = field
        self.seed = _check_seed(field, seed, k)
        self.h = Polynomial(field, self.seed)
        self._buffer: list[int] = []
        self._buf_pos = 0
        if isinstance(field, Gf2w):
            s = max(0, (k - 1).bit_length())
            self._plan = AdditiveFftPlan(field, s)
            self.batch_size = 1 << s
            self._num_batches = 1 << (field.w - s)
            self._next_batch = 0
            period = field.order
            self._mode = "additive"
        elif isinstance(field, Gfp):
            if (field.p - 1) % k != 0:
                raise ConfigError(f"k={k} does not divide p-1={field.p - 1}")
            if k & (k - 1):
                raise ConfigError(f"coset DFT path needs a power-of-two k, got {k}")
            if omega is None:
                omega = find_primitive_element(field)
            self._plan = CosetDftPlan(field, k, omega)
            self.batch_size = k
            self._num_batches = self._plan.num_cosets
            self._next_batch = 0
            period = field.p - 1
            self._mode = "coset"
        else:
            raise ConfigError(f"unsupported field context {field!r}")
        self.descriptor = GeneratorDescriptor("fft-batch", field, k, period, 0.0, k)
        self._emitted = 0

    def fork(self, seed) -> "FftBatchGenerator":
        omega = self._plan.omega if self._mode == "coset" else None
        return FftBatchGenerator(self.field, self.descriptor.k, seed, omega)

    def _refill(self):
        j = self._next_batch
        if j >= self._num_batches:
            raise PeriodExhausted(f"period {self.descriptor.period} consumed")
        if self._mode == "additive":
            shift = self._gray_shift(j)
            self._buffer = self._plan.evaluate(self.h.coeffs, shift)
        else:
            if j > 0:
                self._plan.advance_coset()
            self._buffer = self._plan.evaluate_coset(self.h.coeffs)
        self._buf_pos = 0
        self._next_batch = j + 1

    def _gray_shift(self, j: int) -> int:
        gray = j ^ (j >> 1)
        s = self._plan.s
        shift = 0
        bit = 0
        while gray:
            if gray & 1:
                shift |= 1 << (s + bit)
            gray >>= 1
            bit += 1
        return shift

    def emit(self) -> int:
        if self._emitted >= self.descriptor.period:
            raise PeriodExhausted(f"period {self.descriptor.period} consumed")
        if self._buf_pos >= len(self._buffer):
            self._refill()
        v = self._buffer[self._buf_pos]
        self._buf_pos += 1
        self._emitted += 1
        return v

    def emit_batch(self, count: int) -> list[int]:
        if count > self.descriptor.period - self._emitted:
            raise PeriodExhausted(
                f"{count} values requested, {self.descriptor.period - self._emitted} remain"
            )
        out = []
        while count:
            if self._buf_pos >= len(self._buffer):
                self._refill()
            take = min(count, len(self._buffer) - self._buf_pos)
            out.extend(self._buffer[self._buf_pos:self._buf_pos + take])
            self._buf_pos += take
            self._emitted += take
            count -= take
        return out


def required_independence(needed: int, inner_period: int) -> int:
    """Independence the inner stream must supply.

    Any subset of positions of a stream is capped by the stream length, so a
    fully independent period-P stream satisfies every requirement above P.
    """
    return min(needed, inner_period)


class ExpanderGenerator:
    """Graph-composed generator: output x is the field sum of the right-table
    entries adjacent to left vertex x.

    The right table holds m consecutive inner outputs; after c*m emits the
    table is refilled from the inner stream, which walks the blocks of the
    (virtually) stacked graph until the inner period is exhausted.
    """

    def __init__(self, field, k: int, graph: BipartiteGraph, inner, delta: float):
        inner_period = inner.descriptor.period
        if inner_period % graph.m != 0:
            raise ConfigError(
                f"right size m={graph.m} must divide the inner period {inner_period}"
            )
        need = required_independence(graph.d * k, inner_period)
        if inner.descriptor.k < need:
            raise ConfigError(
                f"inner generator supplies {inner.descriptor.k}-independence, "
                f"need {need}"
            )
        self.field = field
        self.graph = graph
        self.inner = inner
        blocks = inner_period // graph.m
        period = blocks * graph.c * graph.m
        self.descriptor = GeneratorDescriptor(
            "expander", field, k, period, delta, inner.descriptor.seed_len
        )
        self.seed = inner.seed
        self._block_size = graph.c * graph.m
        self._table: list[int] | None = None
        self._cursor = 0  # position within the current block
        self._emitted = 0

    def fork(self, seed) -> "ExpanderGenerator":
        return ExpanderGenerator(
            self.field, self.descriptor.k, self.graph,
            self.inner.fork(seed), self.descriptor.delta,
        )

    def emit(self) -> int:
        if self._emitted >= self.descriptor.period:
            raise PeriodExhausted(f"period {self.descriptor.period} consumed")
        if self._table is None or self._cursor >= self._block_size:
            self._table = self.inner.emit_batch(self.graph.m)
            self._cursor = 0
        table = self._table
        add = self.field.add
        acc = 0
        for y in self.graph.adjacency[self._cursor]:
            acc = add(acc, table[y])
        self._cursor += 1
        self._emitted += 1
        return acc

    def emit_batch(self, count: int) -> list[int]:
        if count > self.descriptor.period - self._emitted:
            raise PeriodExhausted(
                f"{count} values requested, {self.descriptor.period - self._emitted} remain"
            )
        return [self.emit() for _ in range(count)]


class CascadeGenerator:
    """Chained expander levels g_i(x) = sum of g_{i-1} over the neighbors of
    x in level graph i; the base stream feeds level 0 in chunks of m0."""

    def __init__(self, field, k: int, graphs: list[BipartiteGraph], base, delta: float):
        if not graphs:
            raise ConfigError("cascade needs at least one level; use the base directly")
        m0 = graphs[0].m
        prev_left = None
        for i, g in enumerate(graphs):
            if prev_left is not None and g.m != prev_left:
                raise ConfigError(
                    f"level {i + 1} right size {g.m} != level {i} left size {prev_left}"
                )
            prev_left = g.n_left
        base_period = base.descriptor.period
        if base_period % m0 != 0:
            raise ConfigError(f"m0={m0} must divide the base period {base_period}")
        d = graphs[0].d
        t = len(graphs)
        need = required_independence(d ** t * k, base_period)
        if base.descriptor.k < need:
            raise ConfigError(
                f"base generator supplies {base.descriptor.k}-independence, need {need}"
            )
        self.field = field
        self.graphs = graphs
        self.base = base
        blocks = base_period // m0
        self._block_size = graphs[-1].n_left
        period = blocks * self._block_size
        self.descriptor = GeneratorDescriptor(
            "cascade", field, k, period, delta, base.descriptor.seed_len
        )
        self.seed = base.seed
        self._m0 = m0
        self._table: list[int] | None = None
        self._cursor = 0
        self._emitted = 0

    def fork(self, seed) -> "CascadeGenerator":
        return CascadeGenerator(
            self.field, self.descriptor.k, self.graphs,
            self.base.fork(seed), self.descriptor.delta,
        )

    def _refill(self):
        add = self.field.add
        table = self.base.emit_batch(self._m0)
        for g in self.graphs:
            nxt = []
            for row in g.adjacency:
                acc = 0
                for y in row:
                    acc = add(acc, table[y])
                nxt.append(acc)
            table = nxt
        self._table = table
        self._cursor = 0

    def emit(self) -> int:
        if self._emitted >= self.descriptor.period:
            raise PeriodExhausted(f"period {self.descriptor.period} consumed")
        if self._table is None or self._cursor >= self._block_size:
            self._refill()
        v = self._table[self._cursor]
        self._cursor += 1
        self._emitted += 1
        return v

    def emit_batch(self, count: int) -> list[int]:
        if count > self.descriptor.period - self._emitted:
            raise PeriodExhausted(
                f"{count} values requested, {self.descriptor.period - self._emitted} remain"
            )
        return [self.emit() for _ in range(count)]


# --------------------------------------------------------------------------
# Builders
# --------------------------------------------------------------------------

def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def _make_inner(field, kind: str, k_needed: int, rng: random.Random,
                seed=None, omega: int | None = None):
    """Inner/base generator of the requested kind supplying >= k_needed
    independence (rounded up to what the kind supports)."""
    if kind == "horner":
        k_inner = k_needed
    elif kind == "fft-batch":
        k_inner = _next_pow2(k_needed)
        if isinstance(field, Gfp) and (field.p - 1) % k_inner != 0:
            raise ConfigError(
                f"fft-batch inner needs 2^ceil(log2({k_needed}))={k_inner} dividing p-1"
            )
    else:
        raise ConfigError(f"unsupported inner kind {kind!r}")
    if k_inner > field.order:
        raise ConfigError(
            f"inner independence {k_inner} exceeds field size {field.order}"
        )
    if seed is None:
        seed = tuple(field.random_element(rng) for _ in range(k_inner))
    if kind == "horner":
        return HornerGenerator(field, k_inner, seed)
    return FftBatchGenerator(field, k_inner, seed, omega)


def build_expander_generator(
    field,
    k: int,
    c: int,
    m: int,
    d: int,
    inner_kind: str = "fft-batch",
    rng: random.Random | None = None,
    seed=None,
    graph: BipartiteGraph | None = None,
    omega: int | None = None,
) -> ExpanderGenerator:
    """Sample (or accept) a (c, m, d) graph, compute its failure bound, and
    compose it with an inner generator of the requested kind."""
    rng = rng or random.Random(0)
    if graph is None:
        graph = sample_graph(c, m, d, rng)
    elif (graph.c, graph.m, graph.d) != (c, m, d):
        raise ConfigError("supplied graph does not match (c, m, d)")
    bound = rank_failure_bound(c, m, d, k)
    inner_period = field.order if inner_kind == "horner" else (
        field.order if isinstance(field, Gf2w) else field.p - 1
    )
    need = required_independence(d * k, inner_period)
    inner = _make_inner(field, inner_kind, need, rng, seed, omega)
    return ExpanderGenerator(field, k, graph, inner, bound.delta)


def build_cascade_generator(
    field,
    k: int,
    c: int,
    d: int,
    t: int,
    base_kind: str = "horner",
    rng: random.Random | None = None,
    m0: int | None = None,
    seed=None,
    graphs: list[BipartiteGraph] | None = None,
):
    """Cascade of t sampled levels over a base generator.

    Level i is a (c, c^(i-1)*m0, d) graph with independence target
    d^(t-i)*k; the declared failure probability is the union-bound sum of
    the level bounds.  t=0 degenerates to the base generator itself.
    """
    rng = rng or random.Random(0)
    base_period = field.order if base_kind == "horner" else (
        field.order if isinstance(field, Gf2w) else field.p - 1
    )
    if m0 is None:
        m0 = base_period
    need = required_independence(d ** t * k, base_period)
    base = _make_inner(field, base_kind, need, rng, seed)
    if t == 0:
        return base
    if graphs is None:
        graphs = [
            sample_graph(c, c ** (i - 1) * m0, d, rng) for i in range(1, t + 1)
        ]
    log_terms = []
    for i, g in enumerate(graphs, start=1):
        k_level = min(d ** (t - i) * k, g.n_left)
        log_terms.append(rank_failure_bound(g.c, g.m, g.d, k_level).log10_delta)
    top = max(log_terms)
    if top >= 0.0:
        delta = 1.0  # vacuous union bound: clamp to the trivial probability bound
    elif top > -307:
        delta = 10.0 ** top * sum(10.0 ** (x - top) for x in log_terms)
    else:
        delta = 0.0
    return CascadeGenerator(field, k, graphs, base, min(delta, 1.0))


def init(descriptor: GeneratorDescriptor, seed):
    """Instantiate a polynomial-seeded generator from its descriptor.

    The sampled kinds (expander, cascade) also need their graphs: build them
    with build_expander_generator / build_cascade_generator, then use
    .fork(seed) for fresh seeds over the same structure.
    """
    if descriptor.kind == "horner":
        return HornerGenerator(descriptor.field, descriptor.k, seed)
    if descriptor.kind == "fft-batch":
        return FftBatchGenerator(descriptor.field, descriptor.k, seed)
    raise ConfigError(
        f"kind {descriptor.kind!r} carries sampled structure; use its builder"
    )


# --------------------------------------------------------------------------
# Stream serialization
# --------------------------------------------------------------------------

def seed_to_hex(field, seed) -> str:
    width = 2 * field.elem_bytes
    return "".join(f"{s:0{width}x}" for s in seed)


def seed_from_hex(field, text: str) -> tuple[int, ...]:
    clean = text.replace(":", "").replace(",", "").replace(" ", "")
    width = 2 * field.elem_bytes
    if not clean or len(clean) % width:
        raise ConfigError(
            f"hex seed length must be a multiple of {width} chars for this field"
        )
    out = []
    for i in range(0, len(clean), width):
        v = int(clean[i:i + width], 16)
        field.validate(v)
        out.append(v)
    return tuple(out)


def write_stream(gen, fh, count: int, header: bool = False):
    """Raw little-endian fixed-width words, optionally preceded by a text
    descriptor line.  Returns the number of values written (short only if
    the period runs out mid-stream)."""
    field = gen.field
    if header:
        line = gen.descriptor.header_line() + f" seed={seed_to_hex(field, gen.seed)}\n"
        fh.write(line.encode())
    written = 0
    try:
        for _ in range(count):
            fh.write(field.to_bytes(gen.emit()))
            written += 1
    except PeriodExhausted:
        pass
    return written
