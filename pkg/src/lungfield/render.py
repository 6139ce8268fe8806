"""Window/level slice rendering with optional mask overlay."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from .errors import IndexOutOfRangeError, InvalidWindowError
from .grid import PLANE_AXIS, PLANE_UV, BinaryMask, HUVolume

DEFAULT_WINDOW_CENTER = -500.0
DEFAULT_WINDOW_WIDTH = 1400.0

OVERLAY_OPACITY = 0.4
OVERLAY_COLOR = (0.0, 0.0, 255.0)  # annotation blue


def _slice2d(array: np.ndarray, plane: str, index: int) -> np.ndarray:
    axis = PLANE_AXIS[plane]
    taken = np.take(array, index, axis=axis)
    # after take, remaining axes stay in x<y<z order == the plane's (u, v)
    return taken


def render_slice(
    volume: HUVolume,
    mask: BinaryMask | None,
    plane: str,
    index: int,
    window_center: float = DEFAULT_WINDOW_CENTER,
    window_width: float = DEFAULT_WINDOW_WIDTH,
    overlay: bool = False,
) -> np.ndarray:
    """8-bit RGB slice image, shape (v, u, 3); HU at the window center maps to
    gray 128 (round-half-up). Overlay blends mask voxels at 40% blue."""
    if plane not in PLANE_AXIS:
        raise IndexOutOfRangeError(f"unknown plane {plane!r}")
    if not window_width > 0:
        raise InvalidWindowError(f"window width must be positive, got {window_width}")
    axis = PLANE_AXIS[plane]
    if not (0 <= index < volume.dims[axis]):
        raise IndexOutOfRangeError(
            f"{plane} index {index} outside 0..{volume.dims[axis] - 1}"
        )

    hu = _slice2d(volume.values, plane, index).astype(np.float64)
    low = window_center - window_width / 2.0
    norm = np.clip((hu - low) / window_width, 0.0, 1.0)
    gray = np.floor(norm * 255.0 + 0.5)  # round half up

    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    if overlay and mask is not None:
        on = _slice2d(mask.bits, plane, index).astype(bool)
        if on.any():
            blended = gray[:, :, None] * (1.0 - OVERLAY_OPACITY) + np.array(
                OVERLAY_COLOR
            ) * OVERLAY_OPACITY
            rgb[on] = np.floor(blended + 0.5)[on]

    # (u, v) -> image rows are v, columns are u
    return rgb.transpose(1, 0, 2).astype(np.uint8)


def encode_png(image: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(image, mode="RGB").save(buffer, format="PNG")
    return buffer.getvalue()


def slice_counts(volume: HUVolume) -> dict[str, int]:
    return {plane: volume.dims[PLANE_AXIS[plane]] for plane in PLANE_AXIS}
