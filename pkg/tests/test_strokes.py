"""Stroke rasterization and the edit/undo algebra."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lungfield.errors import IndexOutOfRangeError, StaleRecordError, WrongModeError
from lungfield.grid import BinaryMask, VolumeGeometry
from lungfield.strokes import (
    EditStack,
    Stroke,
    apply_stroke,
    rasterize_stroke,
    seeds_from_stroke,
    undo,
)

GEOM = VolumeGeometry((32, 32, 32), (1.0, 1.0, 1.0))


def empty_mask() -> BinaryMask:
    return BinaryMask.zeros(GEOM)


def test_single_point_radius_zero():
    stroke = Stroke("axial", 5, ((10, 12),), radius_px=0, mode="add")
    assert rasterize_stroke(stroke, GEOM) == {(10, 12, 5)}


def test_single_point_radius_two_disc():
    stroke = Stroke("axial", 0, ((16, 16),), radius_px=2, mode="add")
    voxels = rasterize_stroke(stroke, GEOM)
    assert len(voxels) == 13
    expected = {
        (16 + du, 16 + dv, 0)
        for du in range(-2, 3)
        for dv in range(-2, 3)
        if du * du + dv * dv <= 4
    }
    assert voxels == expected


def test_duplicate_point_same_as_single():
    one = rasterize_stroke(Stroke("axial", 3, ((8, 8),), 1, "add"), GEOM)
    two = rasterize_stroke(Stroke("axial", 3, ((8, 8), (8, 8)), 1, "add"), GEOM)
    assert one == two


def test_segment_sweep_has_no_gaps():
    stroke = Stroke("axial", 2, ((2, 2), (20, 11)), radius_px=0, mode="add")
    voxels = rasterize_stroke(stroke, GEOM)
    xs = sorted(v[0] for v in voxels)
    assert xs[0] == 2 and xs[-1] == 20
    # 8-connected continuity along the swept line
    path = sorted(voxels)
    for a, b in zip(path, path[1:]):
        assert abs(a[0] - b[0]) <= 1 and abs(a[1] - b[1]) <= 1


def test_planes_map_to_correct_axes():
    assert rasterize_stroke(Stroke("axial", 7, ((1, 2),), 0, "add"), GEOM) == {(1, 2, 7)}
    assert rasterize_stroke(Stroke("coronal", 7, ((1, 2),), 0, "add"), GEOM) == {(1, 7, 2)}
    assert rasterize_stroke(Stroke("sagittal", 7, ((1, 2),), 0, "add"), GEOM) == {(7, 1, 2)}


def test_out_of_bounds_points_clipped():
    stroke = Stroke("axial", 0, ((30, 31), (35, 31)), radius_px=1, mode="add")
    voxels = rasterize_stroke(stroke, GEOM)
    assert voxels
    assert all(0 <= x < 32 and 0 <= y < 32 for x, y, _ in voxels)


def test_bad_slice_index():
    with pytest.raises(IndexOutOfRangeError):
        rasterize_stroke(Stroke("axial", 32, ((1, 1),), 0, "add"), GEOM)


def test_apply_add_then_idempotent():
    mask = empty_mask()
    stroke = Stroke("axial", 4, ((5, 5), (9, 5)), radius_px=1, mode="add")
    footprint = rasterize_stroke(stroke, GEOM)
    once, record = apply_stroke(mask, stroke)
    assert once.count() == len(footprint)
    assert len(record.changed_voxels) == len(footprint)
    twice, record2 = apply_stroke(once, stroke)
    assert record2.changed_voxels == []
    np.testing.assert_array_equal(once.bits, twice.bits)


def test_delete_on_empty_changes_nothing():
    mask = empty_mask()
    _, record = apply_stroke(mask, Stroke("axial", 4, ((5, 5),), 2, "delete"))
    assert record.changed_voxels == []


def test_add_grows_delete_shrinks():
    mask = empty_mask()
    added, _ = apply_stroke(mask, Stroke("coronal", 10, ((4, 4), (10, 10)), 2, "add"))
    assert (added.bits >= mask.bits).all()
    removed, _ = apply_stroke(added, Stroke("coronal", 10, ((4, 4),), 1, "delete"))
    assert (removed.bits <= added.bits).all()


def test_locality_other_slices_untouched():
    rng = np.random.default_rng(0)
    bits = (rng.random((32, 32, 32)) > 0.5).astype(np.uint8)
    mask = BinaryMask(GEOM, bits)
    edited, _ = apply_stroke(mask, Stroke("axial", 9, ((1, 1), (30, 30)), 3, "add"))
    other = [z for z in range(32) if z != 9]
    np.testing.assert_array_equal(edited.bits[:, :, other], mask.bits[:, :, other])


def test_undo_restores_bitwise():
    rng = np.random.default_rng(1)
    mask = BinaryMask(GEOM, (rng.random((32, 32, 32)) > 0.7).astype(np.uint8))
    stroke = Stroke("sagittal", 15, ((3, 3), (20, 8)), 2, "add")
    edited, record = apply_stroke(mask, stroke)
    restored = undo(edited, record)
    np.testing.assert_array_equal(restored.bits, mask.bits)


def test_undo_of_empty_record_is_noop():
    mask = empty_mask()
    _, record = apply_stroke(mask, Stroke("axial", 0, ((1, 1),), 0, "delete"))
    np.testing.assert_array_equal(undo(mask, record).bits, mask.bits)


def test_overlapping_edits_undo_in_reverse():
    mask = empty_mask()
    stack = EditStack()
    add = Stroke("axial", 6, ((10, 10), (14, 10)), 2, "add")
    cut = Stroke("axial", 6, ((12, 10),), 2, "delete")
    m1, r1 = apply_stroke(mask, add)
    stack.push(r1)
    m2, r2 = apply_stroke(m1, cut)
    stack.push(r2)
    m1b, _ = stack.undo_latest(m2)
    np.testing.assert_array_equal(m1b.bits, m1.bits)
    m0, _ = stack.undo_latest(m1b)
    np.testing.assert_array_equal(m0.bits, mask.bits)


def test_stale_record_rejected():
    mask = empty_mask()
    stack = EditStack()
    m1, r1 = apply_stroke(mask, Stroke("axial", 1, ((2, 2),), 1, "add"))
    stack.push(r1)
    m2, r2 = apply_stroke(m1, Stroke("axial", 1, ((4, 4),), 1, "add"))
    stack.push(r2)
    with pytest.raises(StaleRecordError):
        stack.undo_latest(m2, record=r1)
    stack.undo_latest(m2, record=r2)
    with pytest.raises(StaleRecordError):
        EditStack().undo_latest(mask)


def test_wrong_mode_rejected():
    with pytest.raises(WrongModeError):
        apply_stroke(empty_mask(), Stroke("axial", 0, ((1, 1),), 0, "seed-left"))
    with pytest.raises(WrongModeError):
        seeds_from_stroke(Stroke("axial", 0, ((1, 1),), 0, "add"), GEOM)


def test_seeds_from_stroke():
    side, voxels = seeds_from_stroke(
        Stroke("axial", 3, ((1, 1), (2, 2), (3, 3), (4, 4), (5, 5)), 0, "seed-left"), GEOM
    )
    assert side == "left"
    assert {(i, i, 3) for i in range(1, 6)}.issubset(set(voxels))
    side, voxels = seeds_from_stroke(Stroke("coronal", 2, ((7, 9),), 0, "seed-right"), GEOM)
    assert side == "right" and voxels == [(7, 2, 9)]


def test_seed_stroke_clipped():
    side, voxels = seeds_from_stroke(
        Stroke("axial", 0, ((31, 31), (40, 31)), 0, "seed-left"), GEOM
    )
    assert side == "left"
    assert all(GEOM.contains(v) for v in voxels)


@st.composite
def stroke_strategy(draw):
    plane = draw(st.sampled_from(["axial", "coronal", "sagittal"]))
    mode = draw(st.sampled_from(["add", "delete"]))
    n_points = draw(st.integers(1, 4))
    points = tuple(
        (draw(st.integers(0, 31)), draw(st.integers(0, 31))) for _ in range(n_points)
    )
    return Stroke(plane, draw(st.integers(0, 31)), points, draw(st.integers(0, 3)), mode)


@given(st.lists(stroke_strategy(), min_size=1, max_size=6), st.integers(0, 2**16))
@settings(max_examples=40, deadline=None)
def test_full_undo_replay_restores_initial(strokes, seed):
    rng = np.random.default_rng(seed)
    initial = BinaryMask(GEOM, (rng.random((32, 32, 32)) > 0.5).astype(np.uint8))
    mask = initial
    stack = EditStack()
    for stroke in strokes:
        mask, record = apply_stroke(mask, stroke)
        stack.push(record)
    while len(stack):
        mask, _ = stack.undo_latest(mask)
    np.testing.assert_array_equal(mask.bits, initial.bits)
