"""Synthetic thorax volumes with analytically known lung masks.

The phantom is an elliptic body cylinder of soft-tissue HU containing two
disjoint lung ellipsoids (noisy air-like HU) and thin bone-density arcs near
the body surface; everything outside the body is air. Truth masks are the
exact rasterized ellipsoids.

Default shape parameters, as fractions of the grid's physical extent per axis:

* body ellipse semi-axes: 0.45 of the x and y extents
* lung ellipsoid semi-axes: (0.18, 0.28, 0.38) of the (x, y, z) extents
* lung centers: +-0.22 of the x extent from the midline, centered in y and z
* rib arcs: elliptic-radius band [0.93, 0.99] of the body ellipse, with
  anterior/posterior gaps, on periodic z bands

With these fractions the lungs always clear the rib band, so any dims >= 32
fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .grid import BinaryMask, HUVolume, VolumeGeometry

BODY_SEMI_FRACTION = 0.45
LUNG_SEMI_FRACTIONS = (0.18, 0.28, 0.38)
LUNG_OFFSET_FRACTION = 0.22
RIB_BAND = (0.93, 0.99)
RIB_GAP_HALF_RAD = 0.25


@dataclass(frozen=True)
class PhantomSpec:
    """Grid shape plus tissue intensities for one synthetic thorax."""

    dims: tuple[int, int, int] = (64, 64, 64)
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    lung_mean_hu: float = -550.0
    lung_noise_sd: float = 0.0
    body_hu: float = 0.0
    rib_hu: float = 700.0
    air_hu: float = -1000.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (self.lung_mean_hu < self.body_hu < self.rib_hu):
            raise InvalidSpecError("expected lung_mean_hu < body_hu < rib_hu")
        if self.air_hu > self.lung_mean_hu:
            raise InvalidSpecError("expected air_hu <= lung_mean_hu")
        if self.lung_noise_sd < 0:
            raise InvalidSpecError("lung_noise_sd must be >= 0")


def generate_thorax_phantom(spec: PhantomSpec) -> tuple[HUVolume, BinaryMask, BinaryMask]:
    """Build (volume, truth_left, truth_right), deterministic in rng_seed.

    "Left" is the patient's anatomical left per the geometry's axis codes
    (the default R/A/S orientation puts it at low x index).
    """
    dims = tuple(int(d) for d in spec.dims)
    if any(d < 32 for d in dims):
        raise InvalidSpecError(f"dims must each be >= 32 (got {dims}); shapes degenerate below that")
    geometry = VolumeGeometry(dims, spec.spacing)
    extent = np.array([d * s for d, s in zip(dims, spec.spacing)])

    # physical coordinates of voxel centers, relative to the grid center
    coords = [
        (np.arange(dims[i]) + 0.5) * spec.spacing[i] - extent[i] / 2.0 for i in range(3)
    ]
    gx = coords[0][:, None, None]
    gy = coords[1][None, :, None]
    gz = coords[2][None, None, :]

    body_a, body_b = BODY_SEMI_FRACTION * extent[0], BODY_SEMI_FRACTION * extent[1]
    elliptic_r2 = (gx / body_a) ** 2 + (gy / body_b) ** 2
    body = np.broadcast_to(elliptic_r2 <= 1.0, dims)

    semi = np.array(LUNG_SEMI_FRACTIONS) * extent
    offset = LUNG_OFFSET_FRACTION * extent[0]
    axis_idx, left_sign = geometry.left_right_axis()
    # lungs are offset along x; left_sign tells which x side is patient-left
    assert axis_idx == 0

    def ellipsoid(center_x: float) -> np.ndarray:
        return (
            ((gx - center_x) / semi[0]) ** 2
            + (gy / semi[1]) ** 2
            + (gz / semi[2]) ** 2
        ) <= 1.0

    left = ellipsoid(left_sign * offset)
    right = ellipsoid(-left_sign * offset)
    if not (left.any() and right.any()) or (left & right).any() or (left & ~body).any():
        raise InvalidSpecError("lung ellipsoids do not fit inside the body cylinder")

    # rib arcs: thin bands of the body ellipse on periodic z bands, with
    # anterior/posterior gaps; kept clear of the lungs by construction
    band = (elliptic_r2 >= RIB_BAND[0] ** 2) & (elliptic_r2 <= RIB_BAND[1] ** 2)
    theta = np.arctan2(gy / body_b, gx / body_a)
    gap = (np.abs(theta - np.pi / 2) < RIB_GAP_HALF_RAD) | (
        np.abs(theta + np.pi / 2) < RIB_GAP_HALF_RAD
    )
    period = max(4, dims[2] // 12)
    zband = (np.arange(dims[2]) % period) < 2
    ribs = band & ~gap & zband[None, None, :] & ~left & ~right

    values = np.full(dims, spec.air_hu, dtype=np.float32)
    values[body] = spec.body_hu
    lungs = left | right
    if spec.lung_noise_sd > 0:
        rng = np.random.default_rng(spec.rng_seed)
        noise = rng.normal(spec.lung_mean_hu, spec.lung_noise_sd, size=int(lungs.sum()))
        values[lungs] = np.clip(noise, spec.air_hu, spec.body_hu).astype(np.float32)
    else:
        values[lungs] = np.float32(spec.lung_mean_hu)
    values[ribs] = spec.rib_hu

    volume = HUVolume(geometry, values)
    truth_left = BinaryMask(geometry, left.astype(np.uint8), label="left-lung")
    truth_right = BinaryMask(geometry, right.astype(np.uint8), label="right-lung")
    return volume, truth_left, truth_right


def analytic_lung_volume_mm3(spec: PhantomSpec) -> float:
    """Closed-form volume of one lung ellipsoid (4/3 pi abc), in mm^3."""
    extent = [d * s for d, s in zip(spec.dims, spec.spacing)]
    a, b, c = (f * e for f, e in zip(LUNG_SEMI_FRACTIONS, extent))
    return 4.0 / 3.0 * np.pi * a * b * c
