"""NIfTI-1 and ANALYZE 7.5 reading/writing with HU calibration.

Reads single-file NIfTI (magic ``n+1``), NIfTI header/image pairs (``ni1``),
and ANALYZE 7.5 ``.hdr``/``.img`` pairs (no magic; detected by extension).
Gzip is sniffed by magic bytes on read and chosen by the ``.gz`` suffix on
write. Masks are written as single-file NIfTI, unsigned 8-bit, scl_slope 1 /
scl_inter 0.
"""

from __future__ import annotations

import gzip
import struct
import warnings
from pathlib import Path

import numpy as np

from .errors import CorruptHeaderError, UnsupportedFormatError
from .grid import BinaryMask, HUVolume, VolumeGeometry

HEADER_SIZE = 348
NIFTI_SINGLE_MAGIC = b"n+1\x00"
NIFTI_PAIR_MAGIC = b"ni1\x00"

# NIfTI datatype code -> numpy dtype (the supported subset)
_DTYPES = {
    2: np.dtype(np.uint8),
    4: np.dtype(np.int16),
    8: np.dtype(np.int32),
    16: np.dtype(np.float32),
}

_POSITIVE_CODES = ("R", "A", "S")
_NEGATIVE_CODES = ("L", "P", "I")


def _read_bytes(path: Path) -> bytes:
    data = path.read_bytes()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def _unpack_header(raw: bytes) -> dict:
    """Decode the 348-byte header, detecting byte order via sizeof_hdr."""
    if len(raw) < HEADER_SIZE:
        raise CorruptHeaderError(f"header shorter than {HEADER_SIZE} bytes")
    order = "<"
    (sizeof_hdr,) = struct.unpack_from("<i", raw, 0)
    if sizeof_hdr != HEADER_SIZE:
        (swapped,) = struct.unpack_from(">i", raw, 0)
        if swapped != HEADER_SIZE:
            raise CorruptHeaderError(f"sizeof_hdr is {sizeof_hdr}, expected {HEADER_SIZE}")
        order = ">"

    def field(fmt: str, offset: int, n: int = 1):
        vals = struct.unpack_from(order + fmt * n, raw, offset)
        return vals[0] if n == 1 else vals

    return {
        "byte_order": order,
        "dim": field("h", 40, 8),
        "datatype": field("h", 70),
        "pixdim": field("f", 76, 8),
        "vox_offset": field("f", 108),
        "scl_slope": field("f", 112),
        "scl_inter": field("f", 116),
        "qform_code": field("h", 252),
        "sform_code": field("h", 254),
        "quatern": field("f", 256, 3),
        "qoffset": field("f", 268, 3),
        "srow_x": field("f", 280, 4),
        "srow_y": field("f", 296, 4),
        "srow_z": field("f", 312, 4),
        "magic": raw[344:348],
    }


def _quaternion_rotation(b: float, c: float, d: float, qfac: float) -> np.ndarray:
    a_sq = 1.0 - (b * b + c * c + d * d)
    a = np.sqrt(a_sq) if a_sq > 0 else 0.0
    rot = np.array(
        [
            [a * a + b * b - c * c - d * d, 2 * b * c - 2 * a * d, 2 * b * d + 2 * a * c],
            [2 * b * c + 2 * a * d, a * a + c * c - b * b - d * d, 2 * c * d - 2 * a * b],
            [2 * b * d - 2 * a * c, 2 * c * d + 2 * a * b, a * a + d * d - c * c - b * b],
        ]
    )
    rot[:, 2] *= qfac
    return rot


def _direction_matrix(hdr: dict) -> tuple[np.ndarray, tuple[float, float, float]]:
    """Unit world-direction columns plus the world origin."""
    if hdr["sform_code"] > 0:
        affine = np.array([hdr["srow_x"][:3], hdr["srow_y"][:3], hdr["srow_z"][:3]], dtype=float)
        origin = (hdr["srow_x"][3], hdr["srow_y"][3], hdr["srow_z"][3])
        norms = np.linalg.norm(affine, axis=0)
        norms[norms == 0] = 1.0
        return affine / norms, origin
    if hdr["qform_code"] > 0:
        qfac = -1.0 if hdr["pixdim"][0] == -1.0 else 1.0
        rot = _quaternion_rotation(*hdr["quatern"], qfac)
        return rot, tuple(hdr["qoffset"])
    return np.eye(3), (0.0, 0.0, 0.0)


def _axis_codes_from_directions(directions: np.ndarray) -> tuple[str, str, str]:
    codes = []
    axes_used = []
    for axis in range(3):
        col = directions[:, axis]
        dominant = int(np.argmax(np.abs(col)))
        diag = abs(col[dominant])
        off = float(np.abs(col).sum()) - diag
        if diag > 0 and off > 0.1 * diag:
            warnings.warn(
                f"oblique orientation on axis {axis}: off-diagonal terms exceed "
                "10% of the dominant direction; axis codes use the dominant axis",
                stacklevel=3,
            )
        axes_used.append(dominant)
        codes.append(
            _POSITIVE_CODES[dominant] if col[dominant] >= 0 else _NEGATIVE_CODES[dominant]
        )
    if sorted(axes_used) != [0, 1, 2]:
        # degenerate orientation: two grid axes map to one world axis
        return ("R", "A", "S")
    return (codes[0], codes[1], codes[2])


def _code_direction(code: str) -> np.ndarray:
    vec = np.zeros(3)
    if code in _POSITIVE_CODES:
        vec[_POSITIVE_CODES.index(code)] = 1.0
    else:
        vec[_NEGATIVE_CODES.index(code)] = -1.0
    return vec


def _strip_suffixes(name: str) -> str:
    if name.endswith(".gz"):
        name = name[:-3]
    return name.rsplit(".", 1)[0] if "." in name else name


def _companion(path: Path, extension: str) -> Path:
    base = _strip_suffixes(path.name)
    for candidate in (extension, extension + ".gz"):
        sibling = path.with_name(base + candidate)
        if sibling.exists():
            return sibling
    raise FileNotFoundError(f"no {extension} companion next to {path}")


def load_volume(path) -> HUVolume:
    """Load a NIfTI-1 or ANALYZE 7.5 volume and calibrate values to HU.

    Raw values map to ``scl_slope * v + scl_inter`` when scl_slope is nonzero
    and are passed through unchanged otherwise. ANALYZE headers carry no
    scaling or orientation, so values pass through and axis codes default to
    R/A/S.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"volume file not found: {path}")
    is_img = path.name.endswith((".img", ".img.gz"))
    header_path = _companion(path, ".hdr") if is_img else path
    raw = _read_bytes(header_path)
    hdr = _unpack_header(raw)

    magic = hdr["magic"]
    if magic == NIFTI_SINGLE_MAGIC:
        data_bytes = raw
        data_offset = int(hdr["vox_offset"])
        is_nifti = True
    elif magic == NIFTI_PAIR_MAGIC:
        data_bytes = _read_bytes(_companion(path, ".img"))
        data_offset = max(int(hdr["vox_offset"]), 0)
        is_nifti = True
    elif header_path.name.endswith((".hdr", ".hdr.gz")) or is_img:
        data_bytes = _read_bytes(_companion(path, ".img"))
        data_offset = 0
        is_nifti = False
    else:
        raise UnsupportedFormatError(f"unrecognized magic {magic!r} in {path}")

    dim = hdr["dim"]
    ndim = dim[0]
    if not (1 <= ndim <= 4):
        raise CorruptHeaderError(f"number of dimensions {ndim} unsupported")
    if ndim == 4 and dim[4] > 1:
        raise UnsupportedFormatError("4-D volumes are not supported")
    if any(dim[i] <= 0 for i in range(1, min(ndim, 3) + 1)):
        raise CorruptHeaderError(f"nonpositive dims {dim[1:4]}")
    dims = tuple(int(dim[i]) if i <= ndim else 1 for i in (1, 2, 3))
    spacing = tuple(float(hdr["pixdim"][i]) if i <= ndim else 1.0 for i in (1, 2, 3))
    if any(not np.isfinite(s) or s <= 0 for s in spacing):
        raise CorruptHeaderError(f"nonpositive spacing {spacing}")

    if hdr["datatype"] not in _DTYPES:
        raise UnsupportedFormatError(f"datatype code {hdr['datatype']} unsupported")
    dtype = _DTYPES[hdr["datatype"]].newbyteorder(hdr["byte_order"])

    count = dims[0] * dims[1] * dims[2]
    end = data_offset + count * dtype.itemsize
    if data_offset < 0 or end > len(data_bytes):
        raise CorruptHeaderError(f"data section truncated: need {end} bytes, have {len(data_bytes)}")
    flat = np.frombuffer(data_bytes[data_offset:end], dtype=dtype)
    values = flat.reshape(dims, order="F").astype(np.float32)

    if is_nifti:
        slope, inter = hdr["scl_slope"], hdr["scl_inter"]
        if slope != 0.0 and (slope != 1.0 or inter != 0.0):
            values = values * np.float32(slope) + np.float32(inter)
        directions, origin = _direction_matrix(hdr)
        codes = _axis_codes_from_directions(directions)
    else:
        origin = (0.0, 0.0, 0.0)
        codes = ("R", "A", "S")

    geometry = VolumeGeometry(dims, spacing, origin, codes)
    return HUVolume(geometry, values)


def load_mask(path, label: str | None = None) -> BinaryMask:
    """Load a saved mask; any nonzero voxel counts as 1."""
    volume = load_volume(path)
    return BinaryMask(volume.geometry, (volume.values > 0.5).astype(np.uint8), label)


def _pack_header(geometry: VolumeGeometry, datatype: int, bitpix: int) -> bytes:
    hdr = bytearray(HEADER_SIZE)
    struct.pack_into("<i", hdr, 0, HEADER_SIZE)
    struct.pack_into("<c", hdr, 38, b"r")
    struct.pack_into("<8h", hdr, 40, 3, *geometry.dims, 1, 1, 1, 1)
    struct.pack_into("<h", hdr, 70, datatype)
    struct.pack_into("<h", hdr, 72, bitpix)
    struct.pack_into("<8f", hdr, 76, 1.0, *geometry.spacing, 0.0, 0.0, 0.0, 0.0)
    struct.pack_into("<f", hdr, 108, 352.0)  # vox_offset
    struct.pack_into("<f", hdr, 112, 1.0)  # scl_slope
    struct.pack_into("<f", hdr, 116, 0.0)  # scl_inter
    struct.pack_into("<b", hdr, 123, 10)  # xyzt_units: mm | sec
    struct.pack_into("<2h", hdr, 252, 0, 1)  # qform_code, sform_code
    rows = np.zeros((3, 4))
    for axis in range(3):
        rows[:, axis] = _code_direction(geometry.axis_codes[axis]) * geometry.spacing[axis]
    rows[:, 3] = geometry.origin
    struct.pack_into("<4f", hdr, 280, *rows[0])
    struct.pack_into("<4f", hdr, 296, *rows[1])
    struct.pack_into("<4f", hdr, 312, *rows[2])
    hdr[344:348] = NIFTI_SINGLE_MAGIC
    return bytes(hdr)


def _encode_nifti(array: np.ndarray, geometry: VolumeGeometry, datatype: int) -> bytes:
    header = _pack_header(geometry, datatype, array.dtype.itemsize * 8)
    # 4 zero bytes: no header extensions
    return header + b"\x00\x00\x00\x00" + array.tobytes(order="F")


def mask_to_bytes(mask: BinaryMask) -> bytes:
    """Uncompressed single-file NIfTI encoding of a mask (uint8 data)."""
    return _encode_nifti(mask.bits, mask.geometry, datatype=2)


def save_mask(mask: BinaryMask, path) -> None:
    """Write a mask as unsigned 8-bit NIfTI-1; gzipped iff the path ends in .gz."""
    _write(mask_to_bytes(mask), Path(path))


def save_volume(volume: HUVolume, path) -> None:
    """Write an HU volume as float32 NIfTI-1; gzipped iff the path ends in .gz."""
    _write(_encode_nifti(volume.values, volume.geometry, datatype=16), Path(path))


def save_labels(masks: dict[int, BinaryMask], path) -> None:
    """Write several masks into one uint8 label volume (later labels win overlaps)."""
    first = next(iter(masks.values()))
    data = np.zeros(first.geometry.dims, dtype=np.uint8)
    for value, mask in masks.items():
        data[mask.as_bool()] = value
    _write(_encode_nifti(data, first.geometry, datatype=2), Path(path))


def _write(payload: bytes, path: Path) -> None:
    if path.name.endswith(".gz"):
        # fixed mtime keeps byte-identical re-exports
        payload = gzip.compress(payload, mtime=0)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
