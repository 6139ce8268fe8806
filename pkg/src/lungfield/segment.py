"""Connectivity thresholding, mask cleanup, and the full two-lung pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .affinity import AffinityParams
from .connectivity import ConnectivityScene, compute_connectivity
from .errors import EmptyResultError, InvalidThetaError, MissingSideError
from .grid import BinaryMask, HUVolume, require_congruent
from .seeding import (
    SeedSet,
    candidate_regions,
    extract_body_mask,
    extract_rib_cage,
    select_seeds,
)

DEFAULT_THETA = 0.5

_STRUCT_6 = ndimage.generate_binary_structure(3, 1)


@dataclass
class FcResult:
    """Everything produced by one segmentation run."""

    left_mask: BinaryMask
    right_mask: BinaryMask
    combined_mask: BinaryMask
    left_scene: ConnectivityScene
    right_scene: ConnectivityScene
    seeds: SeedSet
    params: AffinityParams
    theta: float


def threshold_scene(scene: ConnectivityScene, theta: float) -> BinaryMask:
    """Voxels whose connectivity strength reaches theta."""
    if not (0.0 < theta <= 1.0):
        raise InvalidThetaError(f"theta must be in (0, 1], got {theta}")
    return BinaryMask(scene.geometry, (scene.strength >= np.float32(theta)).astype(np.uint8))


def postprocess_mask(raw: BinaryMask, seeds, body: BinaryMask) -> BinaryMask:
    """Clean a thresholded mask: clip to the body, keep only seed-connected
    components, fill enclosed 2-D holes per axial slice (vessels, nodules)."""
    require_congruent(raw, body)
    inside = raw.as_bool() & body.as_bool()
    labels, n = ndimage.label(inside, structure=_STRUCT_6)
    if n == 0:
        raise EmptyResultError(message="thresholded mask is empty inside the body")
    keep = {int(labels[tuple(int(v) for v in s)]) for s in seeds}
    keep.discard(0)
    if not keep:
        raise EmptyResultError(message="no seed-connected component in the thresholded mask")
    kept = np.isin(labels, sorted(keep))
    for z in range(kept.shape[2]):
        kept[:, :, z] = ndimage.binary_fill_holes(kept[:, :, z])
    kept &= body.as_bool()
    return BinaryMask(raw.geometry, kept.astype(np.uint8))


def segment_lungs(
    volume: HUVolume,
    seeds: SeedSet,
    params: AffinityParams | None = None,
    theta: float = DEFAULT_THETA,
) -> FcResult:
    """Segment both lungs: connectivity per side over the body domain, then
    threshold and cleanup. Deterministic for fixed inputs."""
    params = params or AffinityParams()
    if not (0.0 < theta <= 1.0):
        raise InvalidThetaError(f"theta must be in (0, 1], got {theta}")
    body = extract_body_mask(volume)

    sides: dict[str, BinaryMask] = {}
    scenes: dict[str, ConnectivityScene] = {}
    for side in ("left", "right"):
        side_seeds = seeds.side(side)
        if not side_seeds:
            raise MissingSideError(side)
        scene = compute_connectivity(volume, side_seeds, params, body)
        raw = threshold_scene(scene, theta)
        try:
            sides[side] = postprocess_mask(raw, side_seeds, body)
        except EmptyResultError as err:
            raise EmptyResultError(side, f"{side}: {err.message}") from err
        sides[side].label = f"{side}-lung"
        scenes[side] = scene

    combined = BinaryMask(
        volume.geometry,
        (sides["left"].as_bool() | sides["right"].as_bool()).astype(np.uint8),
        label="combined",
    )
    return FcResult(
        left_mask=sides["left"],
        right_mask=sides["right"],
        combined_mask=combined,
        left_scene=scenes["left"],
        right_scene=scenes["right"],
        seeds=seeds,
        params=params,
        theta=theta,
    )


def auto_segment(
    volume: HUVolume,
    params: AffinityParams | None = None,
    theta: float = DEFAULT_THETA,
) -> FcResult:
    """The single-click pipeline: markers -> candidates -> seeds -> segmentation."""
    body = extract_body_mask(volume)
    ribs = extract_rib_cage(volume, body)
    seeds = select_seeds(candidate_regions(volume, body, ribs))
    return segment_lungs(volume, seeds, params, theta)
