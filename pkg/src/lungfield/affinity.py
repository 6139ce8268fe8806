"""Fuzzy affinity between adjacent voxels: Gaussian of the pair-mean HU."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import HUVolume

DEFAULT_MEAN_HU = -550.0
DEFAULT_SIGMA_HU = 150.0


@dataclass(frozen=True)
class AffinityParams:
    """Intensity model of the target parenchyma plus the neighborhood choice."""

    mean_hu: float = DEFAULT_MEAN_HU
    sigma_hu: float = DEFAULT_SIGMA_HU
    adjacency: int = 6

    def __post_init__(self):
        if not math.isfinite(self.mean_hu):
            raise ValueError("mean_hu must be finite")
        if not (self.sigma_hu > 0 and math.isfinite(self.sigma_hu)):
            raise ValueError("sigma_hu must be positive and finite")
        if self.adjacency not in (6, 26):
            raise ValueError(f"adjacency must be 6 or 26, got {self.adjacency}")


def pair_affinity(hu_a: float, hu_b: float, params: AffinityParams) -> float:
    """Affinity of two already-adjacent voxels given their HU values.

    exp(-((a + b)/2 - mean)^2 / (2 sigma^2)), symmetric, in (0, 1]. The
    expression matches the propagation kernel term for term so that scenes
    and spot checks agree.
    """
    dev = (hu_a + hu_b) * 0.5 - params.mean_hu
    return math.exp(-(dev * dev) / (2.0 * params.sigma_hu * params.sigma_hu))


def _adjacent(c, d, adjacency: int) -> bool:
    dx = abs(c[0] - d[0])
    dy = abs(c[1] - d[1])
    dz = abs(c[2] - d[2])
    if adjacency == 6:
        return dx + dy + dz == 1
    return max(dx, dy, dz) == 1


def affinity(volume: HUVolume, params: AffinityParams, c, d) -> float:
    """Affinity between voxels c and d of the volume; 0 when not adjacent."""
    if not (volume.geometry.contains(c) and volume.geometry.contains(d)):
        raise ValueError(f"coordinates {c}, {d} out of bounds {volume.dims}")
    if not _adjacent(c, d, params.adjacency):
        return 0.0
    return pair_affinity(float(volume.values[tuple(c)]), float(volume.values[tuple(d)]), params)
