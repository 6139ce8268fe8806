#!/usr/bin/env python3
"""Benchmark the connectivity kernel: numba JIT vs pure-Python fallback.

Runs the max-min propagation over phantom volumes of increasing size with
both backends and prints per-voxel throughput and the speedup. The pure
path is the same function object uncompiled, so the comparison is apples to
apples (and the results are asserted bitwise identical).

Usage:
    python benchmarks/bench_connectivity.py [--sizes 32,48,64] [--skip-python-above 64]

The package-wide backend can be forced to the fallback by setting
LUNGFIELD_NO_NUMBA=1 before importing lungfield.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lungfield._kernels import (
    BACKEND,
    maxmin_propagate_numba,
    maxmin_propagate_python,
    neighbor_offsets,
)
from lungfield.phantom import PhantomSpec, generate_thorax_phantom
from lungfield.seeding import extract_body_mask


def bench_one(size: int, run_python: bool) -> dict:
    spec = PhantomSpec(dims=(size, size, size), lung_noise_sd=50.0, rng_seed=1)
    volume, truth_left, _ = generate_thorax_phantom(spec)
    body = extract_body_mask(volume)
    seed = tuple(int(v) for v in np.argwhere(truth_left.as_bool())[0])
    nyz = size * size
    seeds = np.array([seed[0] * nyz + seed[1] * size + seed[2]], dtype=np.int64)
    offsets = neighbor_offsets(6)
    args = (volume.values, body.bits, seeds, offsets, -550.0, 150.0)

    row = {"size": size, "voxels": size**3}
    if maxmin_propagate_numba is not None:
        maxmin_propagate_numba(*args)  # warm the JIT cache before timing
        started = time.perf_counter()
        fast = maxmin_propagate_numba(*args)
        row["numba_s"] = time.perf_counter() - started
    else:
        fast = None

    if run_python:
        started = time.perf_counter()
        slow = maxmin_propagate_python(*args)
        row["python_s"] = time.perf_counter() - started
        if fast is not None:
            assert np.array_equal(fast.view(np.uint32), slow.view(np.uint32)), "backends diverged"
    return row


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,48,64")
    parser.add_argument(
        "--skip-python-above",
        type=int,
        default=64,
        help="skip the pure-Python pass for grids larger than this (it is slow)",
    )
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"selected backend at import: {BACKEND}")
    print(f"{'size':>6} {'voxels':>10} {'numba (s)':>10} {'python (s)':>11} {'speedup':>9}")
    for size in sizes:
        row = bench_one(size, run_python=size <= args.skip_python_above)
        numba_s = row.get("numba_s")
        python_s = row.get("python_s")
        numba_cell = f"{numba_s:10.3f}" if numba_s is not None else f"{'-':>10}"
        python_cell = f"{python_s:11.3f}" if python_s is not None else f"{'-':>11}"
        speedup = f"{python_s / numba_s:8.1f}x" if numba_s and python_s else f"{'-':>9}"
        print(f"{row['size']:>6} {row['voxels']:>10} {numba_cell} {python_cell} {speedup}")


if __name__ == "__main__":
    main()
