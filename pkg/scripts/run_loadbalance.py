#!/usr/bin/env python3
"""Interval-task load balancing driven by a k-independent stream with
k = m*b: per-run peak loads as CSV plus the overflow frequency against the
Chernoff/union bound.

Usage: python scripts/run_loadbalance.py [repetitions]
"""

import sys

from kgen.cli import main

reps = sys.argv[1] if len(sys.argv) > 1 else "1000"
sys.exit(main([
    "loadbalance",
    "--field", "gf2w:16",
    "--kind", "fft-batch",
    "--k", "128",
    "--m-machines", "8",
    "--b", "16",
    "--eps", "0.5",
    "--workload", "burst:80",
    "--reps", reps,
]))
