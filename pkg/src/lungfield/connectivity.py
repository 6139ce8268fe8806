"""Seed-to-voxel connectivity scenes via max-min (bottleneck) propagation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .affinity import AffinityParams
from .errors import SeedOutsideDomainError
from .grid import BinaryMask, HUVolume, VolumeGeometry, require_congruent


@dataclass
class ConnectivityScene:
    """Per-voxel strength of the best path to the seed set (float32 in [0, 1])."""

    geometry: VolumeGeometry
    strength: np.ndarray

    def __post_init__(self):
        if self.strength.shape != self.geometry.dims:
            raise ValueError("strength shape does not match geometry dims")


def compute_connectivity(
    volume: HUVolume,
    seeds,
    params: AffinityParams,
    domain: BinaryMask,
    backend=None,
) -> ConnectivityScene:
    """Propagate connectivity from ``seeds`` through ``domain``.

    strength(c) = max over paths from any seed to c of the weakest link
    affinity along the path; 1 at seeds, 0 outside the domain and at voxels
    unreachable through nonzero affinities. The result is the unique fixpoint
    of the max-min update, so it does not depend on heap tie-breaking.

    ``backend`` overrides the propagation kernel (used by the benchmark and
    parity tests); default is the module-selected one.
    """
    seeds = [tuple(int(v) for v in s) for s in seeds]
    if not seeds:
        raise ValueError("seed list must be nonempty")
    require_congruent(volume, domain)
    dims = volume.geometry.dims
    nyz = dims[1] * dims[2]
    flat = np.empty(len(seeds), dtype=np.int64)
    for i, s in enumerate(seeds):
        if not volume.geometry.contains(s):
            raise SeedOutsideDomainError(f"seed {s} outside volume bounds {dims}")
        if domain.bits[s] == 0:
            raise SeedOutsideDomainError(f"seed {s} outside the propagation domain")
        flat[i] = s[0] * nyz + s[1] * dims[2] + s[2]

    propagate = backend if backend is not None else _kernels.maxmin_propagate
    strength = propagate(
        volume.values,
        domain.bits,
        flat,
        _kernels.neighbor_offsets(params.adjacency),
        float(params.mean_hu),
        float(params.sigma_hu),
    )
    return ConnectivityScene(volume.geometry, strength)
