"""Hot inner loops for connectivity propagation.

The kernel is written once in nopython-compatible Python. When numba is
importable (and ``LUNGFIELD_NO_NUMBA`` is unset) the module compiles it with
``@njit``; otherwise the same function object runs under plain CPython. Both
paths produce bitwise-identical float32 scenes: link affinities are evaluated
in float64 with ``math.exp`` and cast to float32 before any min/max, and
min/max on floats is pure selection.

``benchmarks/bench_connectivity.py`` times the two backends against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _env_disabled() -> bool:
    return os.environ.get("LUNGFIELD_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


def _maxmin_propagate(values, domain, seeds, offsets, mean_hu, sigma_hu):
    """Best-first max-min propagation from seed voxels.

    values  : float32[nx, ny, nz]   calibrated HU
    domain  : uint8[nx, ny, nz]     1 where propagation is allowed
    seeds   : int64[k]              flat C-order indices, inside domain
    offsets : int64[m, 3]           adjacency offsets (6 or 26 neighborhood)
    returns : float32[nx, ny, nz]   connectivity strength in [0, 1]

    Each voxel is finalized exactly once (max-heap, lazy deletion); valid
    because max-min is a closed semiring, so the first finalization carries
    the voxel's true strength.
    """
    nx, ny, nz = values.shape
    nyz = ny * nz
    strength = np.zeros((nx, ny, nz), dtype=np.float32)
    visited = np.zeros((nx, ny, nz), dtype=np.uint8)

    cap = 4096
    heap_key = np.empty(cap, dtype=np.float32)
    heap_idx = np.empty(cap, dtype=np.int64)

    def push(heap_key, heap_idx, size, key, idx):
        if size == heap_key.shape[0]:
            grown_key = np.empty(size * 2, dtype=np.float32)
            grown_idx = np.empty(size * 2, dtype=np.int64)
            grown_key[:size] = heap_key
            grown_idx[:size] = heap_idx
            heap_key, heap_idx = grown_key, grown_idx
        heap_key[size] = key
        heap_idx[size] = idx
        i = size
        while i > 0:
            parent = (i - 1) >> 1
            if heap_key[parent] < heap_key[i]:
                heap_key[parent], heap_key[i] = heap_key[i], heap_key[parent]
                heap_idx[parent], heap_idx[i] = heap_idx[i], heap_idx[parent]
                i = parent
            else:
                break
        return heap_key, heap_idx, size + 1

    def pop(heap_key, heap_idx, size):
        top_key = heap_key[0]
        top_idx = heap_idx[0]
        size -= 1
        heap_key[0] = heap_key[size]
        heap_idx[0] = heap_idx[size]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= size:
                break
            big = left
            right = left + 1
            if right < size and heap_key[right] > heap_key[left]:
                big = right
            if heap_key[big] > heap_key[i]:
                heap_key[big], heap_key[i] = heap_key[i], heap_key[big]
                heap_idx[big], heap_idx[i] = heap_idx[i], heap_idx[big]
                i = big
            else:
                break
        return top_key, top_idx, size

    size = 0
    one = np.float32(1.0)
    for s in range(seeds.shape[0]):
        flat = seeds[s]
        x = flat // nyz
        rem = flat % nyz
        y = rem // nz
        z = rem % nz
        if strength[x, y, z] < one:
            strength[x, y, z] = one
            heap_key, heap_idx, size = push(heap_key, heap_idx, size, one, flat)

    denom = 2.0 * sigma_hu * sigma_hu
    n_off = offsets.shape[0]

    while size > 0:
        key, flat, size = pop(heap_key, heap_idx, size)
        x = flat // nyz
        rem = flat % nyz
        y = rem // nz
        z = rem % nz
        if visited[x, y, z] == 1:
            continue
        visited[x, y, z] = 1
        here = strength[x, y, z]
        # np.float64, not float(): numba's float() does not widen float32
        # before arithmetic, which would desync this path from CPython
        va = np.float64(values[x, y, z])
        for j in range(n_off):
            cx = x + offsets[j, 0]
            cy = y + offsets[j, 1]
            cz = z + offsets[j, 2]
            if cx < 0 or cx >= nx or cy < 0 or cy >= ny or cz < 0 or cz >= nz:
                continue
            if domain[cx, cy, cz] == 0 or visited[cx, cy, cz] == 1:
                continue
            vb = np.float64(values[cx, cy, cz])
            dev = (va + vb) * 0.5 - mean_hu
            aff = np.float32(math.exp(-(dev * dev) / denom))
            candidate = aff if aff < here else here
            if candidate > strength[cx, cy, cz]:
                strength[cx, cy, cz] = candidate
                heap_key, heap_idx, size = push(
                    heap_key, heap_idx, size, candidate, cx * nyz + cy * nz + cz
                )

    return strength


maxmin_propagate_python = _maxmin_propagate

try:
    if _env_disabled():
        raise ImportError("numba disabled via LUNGFIELD_NO_NUMBA")
    from numba import njit

    maxmin_propagate_numba = njit(cache=True)(_maxmin_propagate)
    BACKEND = "numba"
    maxmin_propagate = maxmin_propagate_numba
except ImportError:
    maxmin_propagate_numba = None
    BACKEND = "python"
    maxmin_propagate = maxmin_propagate_python


def neighbor_offsets(adjacency: int) -> np.ndarray:
    """Offset table for 6- (faces) or 26- (faces+edges+corners) connectivity."""
    if adjacency == 6:
        return np.array(
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
            dtype=np.int64,
        )
    if adjacency == 26:
        offs = [
            (dx, dy, dz)
            for dx in (-1, 0, 1)
            for dy in (-1, 0, 1)
            for dz in (-1, 0, 1)
            if (dx, dy, dz) != (0, 0, 0)
        ]
        return np.array(offs, dtype=np.int64)
    raise ValueError(f"adjacency must be 6 or 26, got {adjacency}")
