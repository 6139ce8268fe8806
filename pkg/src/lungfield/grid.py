"""Voxel-grid containers: geometry, calibrated HU volumes, and binary masks.

Arrays are indexed ``[x, y, z]`` (C-contiguous). Axis codes give the anatomical
direction of *increasing* index per axis, one of R/L, A/P, S/I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryMismatchError

PLANES = ("axial", "coronal", "sagittal")

# plane -> axis held fixed when slicing
PLANE_AXIS = {"axial": 2, "coronal": 1, "sagittal": 0}

# plane -> (first, second) in-plane axes; stroke points are (u, v) along these
PLANE_UV = {"axial": (0, 1), "coronal": (0, 2), "sagittal": (1, 2)}

_OPPOSITE = {"R": "L", "L": "R", "A": "P", "P": "A", "S": "I", "I": "S"}


@dataclass(frozen=True)
class VolumeGeometry:
    """Voxel lattice geometry: grid size, spacing (mm), world origin, orientation."""

    dims: tuple[int, int, int]
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis_codes: tuple[str, str, str] = ("R", "A", "S")

    def __post_init__(self):
        if len(self.dims) != 3 or any(int(d) < 1 for d in self.dims):
            raise ValueError(f"dims must be 3 positive integers, got {self.dims}")
        if len(self.spacing) != 3 or any(not np.isfinite(s) or s <= 0 for s in self.spacing):
            raise ValueError(f"spacing must be 3 positive finite reals, got {self.spacing}")
        for code in self.axis_codes:
            if code not in _OPPOSITE:
                raise ValueError(f"bad axis code {code!r}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        object.__setattr__(self, "axis_codes", tuple(self.axis_codes))

    @property
    def voxel_count(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    @property
    def voxel_volume_mm3(self) -> float:
        return self.spacing[0] * self.spacing[1] * self.spacing[2]

    def contains(self, coord) -> bool:
        x, y, z = coord
        return 0 <= x < self.dims[0] and 0 <= y < self.dims[1] and 0 <= z < self.dims[2]

    def left_right_axis(self) -> tuple[int, int]:
        """(axis index, sign) such that moving by +sign along that axis goes to the
        patient's anatomical left."""
        for i, code in enumerate(self.axis_codes):
            if code == "L":
                return i, +1
            if code == "R":
                return i, -1
        # orientation degenerate in-plane only; fall back to the first axis
        return 0, -1


def world_extent(geometry: VolumeGeometry) -> tuple[float, tuple[float, float, float]]:
    """Voxel volume in mm^3 and the physical span of the grid in mm per axis."""
    physical = tuple(d * s for d, s in zip(geometry.dims, geometry.spacing))
    return geometry.voxel_volume_mm3, physical


@dataclass
class HUVolume:
    """Dense scalar CT volume calibrated to Hounsfield units (float32)."""

    geometry: VolumeGeometry
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float32)
        if self.values.shape != self.geometry.dims:
            raise ValueError(
                f"values shape {self.values.shape} does not match dims {self.geometry.dims}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("HU values must be finite")

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.geometry.dims

    def hu_range(self) -> tuple[float, float]:
        return float(self.values.min()), float(self.values.max())


@dataclass
class BinaryMask:
    """0/1 voxel mask congruent with its source volume."""

    geometry: VolumeGeometry
    bits: np.ndarray
    label: str | None = None

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits)
        if self.bits.dtype == np.bool_:
            self.bits = self.bits.astype(np.uint8)
        if self.bits.dtype != np.uint8:
            if not np.isin(self.bits, (0, 1)).all():
                raise ValueError("mask bits must be 0 or 1")
            self.bits = self.bits.astype(np.uint8)
        elif self.bits.max(initial=0) > 1:
            raise ValueError("mask bits must be 0 or 1")
        if self.bits.shape != self.geometry.dims:
            raise ValueError(
                f"bits shape {self.bits.shape} does not match dims {self.geometry.dims}"
            )

    @classmethod
    def zeros(cls, geometry: VolumeGeometry, label: str | None = None) -> "BinaryMask":
        return cls(geometry, np.zeros(geometry.dims, dtype=np.uint8), label)

    def copy(self, label: str | None = None) -> "BinaryMask":
        return BinaryMask(self.geometry, self.bits.copy(), label or self.label)

    def count(self) -> int:
        return int(self.bits.sum())

    def as_bool(self) -> np.ndarray:
        return self.bits.view(np.bool_) if self.bits.dtype == np.uint8 else self.bits.astype(bool)


def require_congruent(a, b) -> None:
    """Raise GeometryMismatchError unless the two grids share dims and spacing."""
    ga, gb = a.geometry, b.geometry
    if ga.dims != gb.dims or ga.spacing != gb.spacing:
        raise GeometryMismatchError(
            f"geometry mismatch: {ga.dims}/{ga.spacing} vs {gb.dims}/{gb.spacing}"
        )
