"""Timing harness: medians of repeated runs, warmup included.

Absolute numbers are hardware- and interpreter-dependent and never feed
acceptance decisions; only ratios and trends do.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Callable


def measure_ns_per_value(make_gen: Callable[[], object], values: int,
                         repetitions: int = 5, warmup: int = 1) -> float:
    """Median ns per emitted value over fresh generator instances.

    `values` should cover whole refill cycles of batch kinds so the
    amortized cost is what gets measured.
    """
    samples = []
    for rep in range(warmup + repetitions):
        gen = make_gen()
        t0 = time.perf_counter_ns()
        gen.emit_batch(values)
        dt = time.perf_counter_ns() - t0
        if rep >= warmup:
            samples.append(dt / values)
    return statistics.median(samples)


@dataclass(frozen=True)
class ExpanderCostSplit:
    """Per-value decomposition T = inner_share + lookup_share (the batch
    refill cost over imbalance c, plus d random accesses)."""

    total_ns: float
    inner_ns: float

    @property
    def lookup_ns(self) -> float:
        return max(0.0, self.total_ns - self.inner_ns)


def measure_expander_split(make_gen: Callable[[], object], values: int,
                           repetitions: int = 3) -> ExpanderCostSplit:
    """Total per-value time plus the share spent producing inner values."""
    total = measure_ns_per_value(make_gen, values, repetitions)
    probe = make_gen()
    m = probe.graph.m
    inner_values = (values + probe._block_size - 1) // probe._block_size * m
    inner_values = min(inner_values, probe.inner.descriptor.period)

    def make_inner():
        return probe.inner.fork(probe.inner.seed)

    inner_total = measure_ns_per_value(make_inner, inner_values, repetitions)
    inner_share = inner_total * inner_values / values
    return ExpanderCostSplit(total_ns=total, inner_ns=inner_share)
