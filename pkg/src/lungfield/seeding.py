"""Automatic seed localization from geometric markers and strict HU thresholding.

Pipeline: body mask (skin boundary) -> rib cage -> parenchyma-band candidate
regions inside the per-slice rib hull -> per side, the most robust region's
minimum-HU voxels become the seeds. All ties break lexicographically so the
result is a pure function of the volume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.morphology import convex_hull_image

from .errors import MissingSideError, NoBodyFoundError, NoCandidateRegionError, OutOfBoundsError
from .grid import BinaryMask, HUVolume, require_congruent

BODY_THRESHOLD_HU = -500.0
BONE_THRESHOLD_HU = 200.0
PARENCHYMA_BAND_HU = (-700.0, -400.0)
PLAUSIBLE_SEED_HU = (-1000.0, -300.0)
MAX_SEEDS_PER_SIDE = 8

_STRUCT_6 = ndimage.generate_binary_structure(3, 1)


@dataclass(frozen=True)
class SeedSet:
    """Labeled seed voxels for the two lungs."""

    left: tuple[tuple[int, int, int], ...]
    right: tuple[tuple[int, int, int], ...]
    provenance: str = "manual-click"

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(tuple(int(v) for v in c) for c in self.left))
        object.__setattr__(self, "right", tuple(tuple(int(v) for v in c) for c in self.right))
        if set(self.left) & set(self.right):
            raise ValueError("left and right seed lists must be disjoint")
        if self.provenance not in ("automatic", "manual-click", "manual-stroke"):
            raise ValueError(f"bad provenance {self.provenance!r}")

    def side(self, name: str):
        return self.left if name == "left" else self.right


@dataclass
class CandidateRegion:
    """One connected component of the parenchyma threshold set."""

    mask: BinaryMask
    side: str
    voxel_count: int
    min_hu: float
    min_hu_locations: list[tuple[int, int, int]]
    centroid: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))


def extract_body_mask(volume: HUVolume) -> BinaryMask:
    """Patient body: threshold above soft-tissue floor, largest component,
    cavities filled per axial slice and in 3-D (so the lungs are inside)."""
    above = volume.values > BODY_THRESHOLD_HU
    labels, n = ndimage.label(above, structure=_STRUCT_6)
    if n == 0:
        raise NoBodyFoundError("no voxels above the body threshold")
    counts = np.bincount(labels.ravel())
    counts[0] = 0
    biggest = int(counts.argmax())
    if counts[biggest] < 0.01 * volume.geometry.voxel_count:
        raise NoBodyFoundError("largest bright component is below 1% of the grid")
    body = labels == biggest
    for z in range(body.shape[2]):
        body[:, :, z] = ndimage.binary_fill_holes(body[:, :, z])
    body = ndimage.binary_fill_holes(body)
    return BinaryMask(volume.geometry, body.astype(np.uint8), label="body")


def extract_rib_cage(volume: HUVolume, body: BinaryMask) -> BinaryMask:
    """Bone-density voxels inside the body (may be empty)."""
    require_congruent(volume, body)
    ribs = (volume.values >= BONE_THRESHOLD_HU) & body.as_bool()
    return BinaryMask(volume.geometry, ribs.astype(np.uint8), label="rib-cage")


def rib_hull_volume(ribs: BinaryMask) -> BinaryMask:
    """Per-axial-slice convex hull of the bone voxels; slices with fewer than
    3 bone voxels (or a degenerate hull) impose no constraint (all-ones)."""
    dims = ribs.geometry.dims
    allowed = np.ones(dims, dtype=bool)
    bone = ribs.as_bool()
    for z in range(dims[2]):
        bone_slice = bone[:, :, z]
        if int(bone_slice.sum()) < 3:
            continue
        try:
            hull = convex_hull_image(bone_slice)
        except Exception:
            continue
        if hull.any():
            allowed[:, :, z] = hull
    return BinaryMask(ribs.geometry, allowed.astype(np.uint8), label="rib-hull")


def candidate_regions(
    volume: HUVolume, body: BinaryMask, ribs: BinaryMask
) -> list[CandidateRegion]:
    """Connected components of the strict parenchyma threshold set, restricted
    to the body and the rib hull, large enough to matter, sided by their
    centroid relative to the body centroid along the patient left-right axis.
    Sorted by voxel count, descending."""
    require_congruent(volume, body)
    require_congruent(volume, ribs)
    lo, hi = PARENCHYMA_BAND_HU
    hull = rib_hull_volume(ribs)
    band = (
        (volume.values >= lo)
        & (volume.values <= hi)
        & body.as_bool()
        & hull.as_bool()
    )
    labels, n = ndimage.label(band, structure=_STRUCT_6)
    if n == 0:
        raise NoCandidateRegionError("parenchyma threshold set is empty")

    floor = max(1000, int(1e-4 * volume.geometry.voxel_count))
    axis, left_sign = volume.geometry.left_right_axis()
    body_centroid = ndimage.center_of_mass(body.as_bool())

    regions: list[CandidateRegion] = []
    objects = ndimage.find_objects(labels)
    for index, box in enumerate(objects, start=1):
        if box is None:
            continue
        local = labels[box] == index
        count = int(local.sum())
        if count < floor:
            continue
        full = np.zeros(volume.geometry.dims, dtype=np.uint8)
        full[box][local] = 1
        local_centroid = ndimage.center_of_mass(local)
        centroid = tuple(float(local_centroid[i] + box[i].start) for i in range(3))
        side = "left" if left_sign * (centroid[axis] - body_centroid[axis]) > 0 else "right"
        hu_in_region = volume.values[box][local]
        min_hu = float(hu_in_region.min())
        where = np.argwhere((volume.values[box] == min_hu) & local)
        locations = sorted(
            tuple(int(c + box[i].start) for i, c in enumerate(coord)) for coord in where
        )
        regions.append(
            CandidateRegion(
                mask=BinaryMask(volume.geometry, full),
                side=side,
                voxel_count=count,
                min_hu=min_hu,
                min_hu_locations=locations,
                centroid=centroid,
            )
        )
    if not regions:
        raise NoCandidateRegionError(
            f"all parenchyma components fall below the size floor ({floor} voxels)"
        )
    regions.sort(key=lambda r: (-r.voxel_count, r.centroid))
    return regions


def _robust_count(region: CandidateRegion) -> int:
    eroded = ndimage.binary_erosion(region.mask.as_bool(), structure=_STRUCT_6)
    return int(eroded.sum())


def select_seeds(regions: list[CandidateRegion]) -> SeedSet:
    """Seed voxels per side: the minimum-HU locations of the most robust
    region (largest after one 6-neighborhood erosion; ties by raw count, then
    smallest centroid), capped at MAX_SEEDS_PER_SIDE in lexicographic order."""
    if not regions:
        raise NoCandidateRegionError("no candidate regions to select seeds from")
    chosen: dict[str, list[tuple[int, int, int]]] = {}
    for side in ("left", "right"):
        sided = [r for r in regions if r.side == side]
        if not sided:
            raise MissingSideError(side)
        best = max(sided, key=lambda r: (_robust_count(r), r.voxel_count, tuple(-c for c in r.centroid)))
        chosen[side] = best.min_hu_locations[:MAX_SEEDS_PER_SIDE]
    return SeedSet(left=tuple(chosen["left"]), right=tuple(chosen["right"]), provenance="automatic")


def validate_manual_seeds(volume: HUVolume, seeds: SeedSet) -> tuple[SeedSet, list[str]]:
    """Bounds-check manual seeds; warn (without rejecting) on implausible HU."""
    warnings: list[str] = []
    for side in ("left", "right"):
        for coord in seeds.side(side):
            if not volume.geometry.contains(coord):
                raise OutOfBoundsError(f"{side} seed {coord} outside dims {volume.dims}")
            hu = float(volume.values[coord])
            if not (PLAUSIBLE_SEED_HU[0] <= hu <= PLAUSIBLE_SEED_HU[1]):
                warnings.append(
                    f"{side} seed {coord} has HU {hu:.0f}, outside the plausible "
                    f"lung band [{PLAUSIBLE_SEED_HU[0]:.0f}, {PLAUSIBLE_SEED_HU[1]:.0f}]"
                )
    return seeds, warnings
