"""Volume/mask I/O: round trips, calibration, format detection, error paths."""

from __future__ import annotations

import gzip
import struct

import numpy as np
import pytest

from lungfield.errors import CorruptHeaderError, UnsupportedFormatError
from lungfield.grid import BinaryMask, HUVolume, VolumeGeometry, world_extent
from lungfield.nifti_io import (
    HEADER_SIZE,
    load_mask,
    load_volume,
    mask_to_bytes,
    save_mask,
    save_volume,
)


def random_mask(rng, dims=(8, 8, 8), spacing=(1.0, 1.0, 1.0)) -> BinaryMask:
    geom = VolumeGeometry(dims, spacing)
    return BinaryMask(geom, (rng.random(dims) > 0.5).astype(np.uint8))


@pytest.mark.parametrize("suffix", [".nii", ".nii.gz"])
def test_mask_round_trip(tmp_path, suffix):
    rng = np.random.default_rng(1)
    mask = random_mask(rng, dims=(9, 7, 5), spacing=(0.7, 0.7, 1.25))
    out = tmp_path / f"mask{suffix}"
    save_mask(mask, out)
    back = load_mask(out)
    assert back.geometry.dims == mask.geometry.dims
    assert np.allclose(back.geometry.spacing, mask.geometry.spacing, atol=1e-6)
    np.testing.assert_array_equal(back.bits, mask.bits)


def test_volume_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    geom = VolumeGeometry((6, 5, 4), (1.0, 1.5, 2.0), origin=(10.0, -20.0, 5.0))
    vol = HUVolume(geom, rng.uniform(-1000, 400, size=(6, 5, 4)).astype(np.float32))
    out = tmp_path / "vol.nii.gz"
    save_volume(vol, out)
    back = load_volume(out)
    np.testing.assert_array_equal(back.values, vol.values)
    assert back.geometry.dims == geom.dims
    assert np.allclose(back.geometry.spacing, geom.spacing, atol=1e-6)
    assert np.allclose(back.geometry.origin, geom.origin, atol=1e-4)
    assert back.geometry.axis_codes == geom.axis_codes


def test_axis_codes_round_trip(tmp_path):
    geom = VolumeGeometry((4, 4, 4), (1, 1, 1), axis_codes=("L", "P", "S"))
    mask = BinaryMask(geom, np.ones((4, 4, 4), dtype=np.uint8))
    save_mask(mask, tmp_path / "m.nii")
    assert load_mask(tmp_path / "m.nii").geometry.axis_codes == ("L", "P", "S")


def test_empty_mask_data_section_is_zero_bytes(tmp_path):
    geom = VolumeGeometry((8, 8, 8), (1, 1, 1))
    mask = BinaryMask.zeros(geom)
    payload = mask_to_bytes(mask)
    assert len(payload) == HEADER_SIZE + 4 + 512
    assert payload[HEADER_SIZE + 4 :] == b"\x00" * 512


def test_data_ordering_is_x_fastest(tmp_path):
    # voxel (x, y, z) must land at flat offset x + y*nx + z*nx*ny
    geom = VolumeGeometry((3, 2, 2), (1, 1, 1))
    bits = np.zeros((3, 2, 2), dtype=np.uint8)
    bits[1, 0, 0] = 1
    bits[0, 1, 0] = 1
    bits[0, 0, 1] = 1
    payload = mask_to_bytes(BinaryMask(geom, bits))
    data = payload[HEADER_SIZE + 4 :]
    assert data[1] == 1
    assert data[3] == 1
    assert data[6] == 1
    assert sum(data) == 3


def test_calibration_slope_intercept(tmp_path):
    # patch scl_slope/scl_inter into a written header and verify the mapping
    geom = VolumeGeometry((2, 2, 2), (1, 1, 1))
    vol = HUVolume(geom, np.full((2, 2, 2), 100.0, dtype=np.float32))
    out = tmp_path / "raw.nii"
    save_volume(vol, out)
    raw = bytearray(out.read_bytes())
    struct.pack_into("<f", raw, 112, 1.0)
    struct.pack_into("<f", raw, 116, -1024.0)
    out.write_bytes(bytes(raw))
    assert load_volume(out).values[0, 0, 0] == -924.0


def test_zero_slope_passthrough(tmp_path):
    geom = VolumeGeometry((2, 2, 2), (1, 1, 1))
    vol = HUVolume(geom, np.full((2, 2, 2), 77.0, dtype=np.float32))
    out = tmp_path / "raw.nii"
    save_volume(vol, out)
    raw = bytearray(out.read_bytes())
    struct.pack_into("<f", raw, 112, 0.0)
    struct.pack_into("<f", raw, 116, 500.0)
    out.write_bytes(bytes(raw))
    assert load_volume(out).values[0, 0, 0] == 77.0


def test_missing_file_raises():
    with pytest.raises(FileNotFoundError):
        load_volume("/nonexistent/volume.nii")


def test_all_zero_header_is_corrupt(tmp_path):
    bad = tmp_path / "zero.nii"
    bad.write_bytes(b"\x00" * 700)
    with pytest.raises(CorruptHeaderError):
        load_volume(bad)


def test_bad_magic_rejected(tmp_path):
    geom = VolumeGeometry((2, 2, 2), (1, 1, 1))
    save_mask(BinaryMask.zeros(geom), tmp_path / "m.nii")
    raw = bytearray((tmp_path / "m.nii").read_bytes())
    raw[344:348] = b"XXX\x00"
    bad = tmp_path / "bad.nii"
    bad.write_bytes(bytes(raw))
    with pytest.raises(UnsupportedFormatError):
        load_volume(bad)


def test_unsupported_datatype_rejected(tmp_path):
    geom = VolumeGeometry((2, 2, 2), (1, 1, 1))
    save_mask(BinaryMask.zeros(geom), tmp_path / "m.nii")
    raw = bytearray((tmp_path / "m.nii").read_bytes())
    struct.pack_into("<h", raw, 70, 64)  # float64: not in the supported set
    bad = tmp_path / "bad.nii"
    bad.write_bytes(bytes(raw))
    with pytest.raises(UnsupportedFormatError):
        load_volume(bad)


def test_nonpositive_spacing_rejected(tmp_path):
    geom = VolumeGeometry((2, 2, 2), (1, 1, 1))
    save_mask(BinaryMask.zeros(geom), tmp_path / "m.nii")
    raw = bytearray((tmp_path / "m.nii").read_bytes())
    struct.pack_into("<f", raw, 80, -2.0)  # pixdim[1]
    bad = tmp_path / "bad.nii"
    bad.write_bytes(bytes(raw))
    with pytest.raises(CorruptHeaderError):
        load_volume(bad)


def test_analyze_pair_reading(tmp_path):
    # strip the magic and split header/data into an .hdr/.img pair
    geom = VolumeGeometry((4, 3, 2), (1.0, 2.0, 3.0))
    rng = np.random.default_rng(3)
    vol = HUVolume(geom, rng.uniform(-500, 0, (4, 3, 2)).astype(np.float32))
    single = tmp_path / "v.nii"
    save_volume(vol, single)
    raw = single.read_bytes()
    header = bytearray(raw[:HEADER_SIZE])
    header[344:348] = b"\x00\x00\x00\x00"
    (tmp_path / "v.hdr").write_bytes(bytes(header))
    (tmp_path / "v.img").write_bytes(raw[HEADER_SIZE + 4 :])
    for entry in ("v.hdr", "v.img"):
        back = load_volume(tmp_path / entry)
        np.testing.assert_array_equal(back.values, vol.values)
        assert back.geometry.spacing == (1.0, 2.0, 3.0)


def test_nifti_pair_reading(tmp_path):
    geom = VolumeGeometry((4, 3, 2), (1.0, 1.0, 1.0))
    vol = HUVolume(geom, np.arange(24, dtype=np.float32).reshape((4, 3, 2)))
    single = tmp_path / "v.nii"
    save_volume(vol, single)
    raw = single.read_bytes()
    header = bytearray(raw[:HEADER_SIZE])
    header[344:348] = b"ni1\x00"
    struct.pack_into("<f", header, 108, 0.0)  # vox_offset in the .img
    (tmp_path / "v.hdr").write_bytes(bytes(header))
    (tmp_path / "v.img").write_bytes(raw[HEADER_SIZE + 4 :])
    back = load_volume(tmp_path / "v.hdr")
    np.testing.assert_array_equal(back.values, vol.values)


def test_byteswapped_header(tmp_path):
    # big-endian header detected via the size field
    geom = VolumeGeometry((2, 2, 2), (1.0, 1.0, 1.0))
    bits = np.zeros((2, 2, 2), dtype=np.uint8)
    bits[1, 1, 1] = 1
    payload = mask_to_bytes(BinaryMask(geom, bits))
    hdr = bytearray(payload[:HEADER_SIZE])
    be = bytearray(HEADER_SIZE)
    struct.pack_into(">i", be, 0, HEADER_SIZE)
    struct.pack_into(">8h", be, 40, 3, 2, 2, 2, 1, 1, 1, 1)
    struct.pack_into(">h", be, 70, 2)
    struct.pack_into(">h", be, 72, 8)
    struct.pack_into(">8f", be, 76, 1.0, 1.0, 1.0, 1.0, 0, 0, 0, 0)
    struct.pack_into(">f", be, 108, 352.0)
    be[344:348] = b"n+1\x00"
    out = tmp_path / "be.nii"
    out.write_bytes(bytes(be) + b"\x00" * 4 + payload[HEADER_SIZE + 4 :])
    back = load_mask(out)
    assert back.bits[1, 1, 1] == 1
    assert back.count() == 1
    assert hdr is not None


def test_world_extent_values():
    geom = VolumeGeometry((64, 64, 64), (1, 1, 1))
    assert world_extent(geom) == (1.0, (64.0, 64.0, 64.0))
    geom = VolumeGeometry((512, 512, 400), (0.7, 0.7, 1.25))
    vox, phys = world_extent(geom)
    assert vox == pytest.approx(0.6125, abs=1e-12)
    assert phys[0] == pytest.approx(358.4) and phys[2] == pytest.approx(500.0)
    geom = VolumeGeometry((1, 1, 1), (2, 2, 2.5))
    vox, phys = world_extent(geom)
    assert vox == pytest.approx(10.0, abs=1e-12)
    assert phys == (2.0, 2.0, 2.5)


def test_oblique_orientation_warns_and_uses_dominant_axis(tmp_path):
    geom = VolumeGeometry((4, 4, 4), (1, 1, 1))
    save_mask(BinaryMask.zeros(geom), tmp_path / "m.nii")
    raw = bytearray((tmp_path / "m.nii").read_bytes())
    # sform column 0 tilted 20% off the x axis
    struct.pack_into("<4f", raw, 280, 1.0, 0.0, 0.0, 0.0)
    struct.pack_into("<4f", raw, 296, 0.2, 1.0, 0.0, 0.0)
    struct.pack_into("<4f", raw, 312, 0.0, 0.0, 1.0, 0.0)
    oblique = tmp_path / "oblique.nii"
    oblique.write_bytes(bytes(raw))
    with pytest.warns(UserWarning, match="oblique"):
        volume = load_volume(oblique)
    assert volume.geometry.axis_codes == ("R", "A", "S")


def test_gzip_suffix_controls_compression(tmp_path):
    mask = random_mask(np.random.default_rng(4))
    save_mask(mask, tmp_path / "a.nii")
    save_mask(mask, tmp_path / "a.nii.gz")
    plain = (tmp_path / "a.nii").read_bytes()
    packed = (tmp_path / "a.nii.gz").read_bytes()
    assert plain[:2] != b"\x1f\x8b"
    assert packed[:2] == b"\x1f\x8b"
    assert gzip.decompress(packed) == plain
