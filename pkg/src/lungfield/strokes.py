"""Stroke painting: rasterize planar polylines into voxels, edit masks, undo.

A stroke lives on one slice of one viewing plane. Points are (u, v) pixel
coordinates along the plane's two in-plane axes (axial: x/y, coronal: x/z,
sagittal: y/z); the brush stamps a Euclidean disc at every point and along
each segment, sampled finely enough that the swept band has no gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRangeError, StaleRecordError, WrongModeError
from .grid import PLANE_AXIS, PLANE_UV, BinaryMask, VolumeGeometry

STROKE_MODES = ("add", "delete", "seed-left", "seed-right")
SEGMENT_STEP_PX = 0.5


@dataclass(frozen=True)
class Stroke:
    plane: str
    slice_index: int
    points: tuple[tuple[float, float], ...]
    radius_px: int = 0
    mode: str = "add"

    def __post_init__(self):
        if self.plane not in PLANE_AXIS:
            raise ValueError(f"unknown plane {self.plane!r}")
        if self.mode not in STROKE_MODES:
            raise ValueError(f"unknown stroke mode {self.mode!r}")
        if self.radius_px < 0:
            raise ValueError("radius_px must be >= 0")
        pts = tuple((float(u), float(v)) for u, v in self.points)
        if not pts:
            raise ValueError("a stroke needs at least one point")
        object.__setattr__(self, "points", pts)


@dataclass
class EditRecord:
    """Sparse inverse of one applied stroke: the flipped voxels' prior bits."""

    stroke: Stroke
    changed_voxels: list[tuple[tuple[int, int, int], int]]


def _disc_offsets(radius_px: int) -> np.ndarray:
    r = int(radius_px)
    span = np.arange(-r, r + 1)
    du, dv = np.meshgrid(span, span, indexing="ij")
    inside = du * du + dv * dv <= r * r
    return np.stack([du[inside], dv[inside]], axis=1)


def rasterize_stroke(stroke: Stroke, geometry: VolumeGeometry) -> set[tuple[int, int, int]]:
    """In-bounds voxels covered by the stroke's swept disc on its slice."""
    axis = PLANE_AXIS[stroke.plane]
    if not (0 <= stroke.slice_index < geometry.dims[axis]):
        raise IndexOutOfRangeError(
            f"slice {stroke.slice_index} outside {stroke.plane} range "
            f"0..{geometry.dims[axis] - 1}"
        )
    u_axis, v_axis = PLANE_UV[stroke.plane]
    u_max, v_max = geometry.dims[u_axis], geometry.dims[v_axis]
    offsets = _disc_offsets(stroke.radius_px)

    centers: list[tuple[float, float]] = list(stroke.points)
    for (u0, v0), (u1, v1) in zip(stroke.points, stroke.points[1:]):
        length = math.hypot(u1 - u0, v1 - v0)
        steps = max(1, int(math.ceil(length / SEGMENT_STEP_PX)))
        for k in range(1, steps):
            t = k / steps
            centers.append((u0 + t * (u1 - u0), v0 + t * (v1 - v0)))

    pixels: set[tuple[int, int]] = set()
    for cu, cv in centers:
        iu, iv = int(round(cu)), int(round(cv))
        for du, dv in offsets:
            u, v = iu + int(du), iv + int(dv)
            if 0 <= u < u_max and 0 <= v < v_max:
                pixels.add((u, v))

    voxels = set()
    for u, v in pixels:
        coord = [0, 0, 0]
        coord[axis] = stroke.slice_index
        coord[u_axis] = u
        coord[v_axis] = v
        voxels.add(tuple(coord))
    return voxels


def apply_stroke(mask: BinaryMask, stroke: Stroke, geometry: VolumeGeometry | None = None):
    """Apply an add/delete stroke; returns (new mask, undo record)."""
    if stroke.mode not in ("add", "delete"):
        raise WrongModeError(f"{stroke.mode} strokes carry seeds, not mask edits")
    geometry = geometry or mask.geometry
    target = 1 if stroke.mode == "add" else 0
    bits = mask.bits.copy()
    changed: list[tuple[tuple[int, int, int], int]] = []
    for coord in sorted(rasterize_stroke(stroke, geometry)):
        previous = int(bits[coord])
        if previous != target:
            bits[coord] = target
            changed.append((coord, previous))
    return BinaryMask(mask.geometry, bits, mask.label), EditRecord(stroke, changed)


def undo(mask: BinaryMask, record: EditRecord) -> BinaryMask:
    """Exact inverse of apply_stroke for the most recent record."""
    bits = mask.bits.copy()
    for coord, previous in record.changed_voxels:
        bits[coord] = previous
    return BinaryMask(mask.geometry, bits, mask.label)


class EditStack:
    """Session-side undo stack; rejects undo of anything but the latest edit."""

    def __init__(self):
        self._records: list[EditRecord] = []

    def push(self, record: EditRecord) -> None:
        self._records.append(record)

    def __len__(self) -> int:
        return len(self._records)

    def undo_latest(self, mask: BinaryMask, record: EditRecord | None = None) -> tuple[BinaryMask, EditRecord]:
        if not self._records:
            raise StaleRecordError("nothing to undo")
        if record is not None and record is not self._records[-1]:
            raise StaleRecordError("record is not the most recent edit")
        latest = self._records.pop()
        return undo(mask, latest), latest

    def clear(self) -> None:
        self._records.clear()


def seeds_from_stroke(stroke: Stroke, geometry: VolumeGeometry):
    """Seed voxels painted by a seed-left/seed-right stroke: (side, voxels)."""
    if stroke.mode not in ("seed-left", "seed-right"):
        raise WrongModeError(f"{stroke.mode} strokes edit the mask, not the seeds")
    side = stroke.mode.removeprefix("seed-")
    return side, sorted(rasterize_stroke(stroke, geometry))
