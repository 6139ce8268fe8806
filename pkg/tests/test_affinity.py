"""Affinity function spot values and properties."""

from __future__ import annotations

import math

import numpy as np
import pytest

from lungfield.affinity import AffinityParams, affinity, pair_affinity
from lungfield.grid import HUVolume, VolumeGeometry


def volume_from(values):
    arr = np.asarray(values, dtype=np.float32)
    return HUVolume(VolumeGeometry(arr.shape, (1, 1, 1)), arr)


def test_equal_to_mean_gives_one():
    assert pair_affinity(-550.0, -550.0, AffinityParams()) == 1.0


def test_pair_mean_at_target_gives_one():
    # -700 and -400 average to the target mean
    assert pair_affinity(-700.0, -400.0, AffinityParams()) == 1.0


def test_one_sigma_deviation():
    got = pair_affinity(-400.0, -400.0, AffinityParams())
    assert got == pytest.approx(math.exp(-0.5), abs=1e-12)


def test_symmetry():
    p = AffinityParams()
    assert pair_affinity(-800.0, -300.0, p) == pair_affinity(-300.0, -800.0, p)


def test_non_adjacent_is_zero():
    vol = volume_from(np.full((4, 4, 4), -550.0))
    p = AffinityParams(adjacency=6)
    assert affinity(vol, p, (1, 1, 1), (2, 2, 1)) == 0.0  # diagonal under 6-adjacency
    assert affinity(vol, p, (1, 1, 1), (1, 1, 3)) == 0.0  # two steps away
    assert affinity(vol, p, (1, 1, 1), (2, 1, 1)) == 1.0
    p26 = AffinityParams(adjacency=26)
    assert affinity(vol, p26, (1, 1, 1), (2, 2, 1)) == 1.0
    assert affinity(vol, p26, (1, 1, 1), (2, 2, 2)) == 1.0
    assert affinity(vol, p26, (1, 1, 1), (3, 1, 1)) == 0.0


def test_out_of_bounds_rejected():
    vol = volume_from(np.zeros((3, 3, 3)))
    with pytest.raises(ValueError):
        affinity(vol, AffinityParams(), (0, 0, 0), (0, 0, 3))


def test_sigma_monotone_pointwise():
    lo = AffinityParams(sigma_hu=100.0)
    hi = AffinityParams(sigma_hu=200.0)
    for hu in (-900.0, -700.0, -550.0, -200.0, 0.0):
        assert pair_affinity(hu, hu, hi) >= pair_affinity(hu, hu, lo)


def test_param_validation():
    with pytest.raises(ValueError):
        AffinityParams(sigma_hu=0.0)
    with pytest.raises(ValueError):
        AffinityParams(sigma_hu=-1.0)
    with pytest.raises(ValueError):
        AffinityParams(mean_hu=float("nan"))
    with pytest.raises(ValueError):
        AffinityParams(adjacency=18)
