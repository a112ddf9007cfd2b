from dataclasses import replace

import numpy as np
import pytest

from tenttile.tiling import (
    UnknownTiling, control_fails, coverage_estimate, default_resolution, tiling_spec, verify_tiling,
)

KNOWN = [1, 3, -1, -3, 4, -4]


@pytest.mark.parametrize("i", KNOWN + [2, -2])
def test_lattice_bases_have_full_rank(i):
    spec = tiling_spec(i)
    assert len(spec.basis) == spec.dim
    assert spec.gram_determinant() > 1e-9


@pytest.mark.parametrize("i", [5, -5])
def test_unknown_tilings_are_refused(i):
    spec = tiling_spec(i)
    assert spec.status == "unknown" and spec.basis == ()
    with pytest.raises(UnknownTiling):
        verify_tiling(i)


def test_index_zero_has_no_spec():
    with pytest.raises(ValueError):
        tiling_spec(0)


@pytest.mark.parametrize("i", [1, -1, -3])
def test_planar_tilings_pass_at_moderate_resolution(i):
    v = verify_tiling(i, resolution=256)
    assert v.passed
    assert v.histogram.modal == 1
    assert v.histogram.boundary_fraction <= 0.02
    # the tile volume estimate is independent of the lattice; it must imply degree one
    assert abs(v.histogram.degree_estimate - 1) < 0.1


def test_doubled_lattice_is_rejected():
    v = verify_tiling(1, resolution=256, negative_control=True)
    assert v.passed
    neg = v.negative_control
    assert control_fails(neg)
    assert neg.fraction(0) > 0.3


def test_dropping_the_reflected_copy_is_rejected():
    spec = tiling_spec(-1)
    assert len(spec.protos) == 2
    half = replace(spec, protos=spec.protos[:1])
    hist = coverage_estimate(half, resolution=256)
    assert control_fails(hist)


def test_no_translates_covers_nothing():
    hist = coverage_estimate(tiling_spec(1).without_translates(), resolution=64)
    assert hist.counts == {0: 64 * 64}
    assert hist.translates == 0
    assert control_fails(hist)


def test_hit_mode_overcounts_fractal_boundaries():
    hit = coverage_estimate(tiling_spec(1), resolution=256, mode="hit")
    mass = coverage_estimate(tiling_spec(1), resolution=256, mode="mass")
    assert hit.modal == 1 and mass.modal == 1
    assert hit.boundary_fraction > mass.boundary_fraction
    assert hit.misfit_near_boundary == pytest.approx(1.0)


@pytest.mark.parametrize("i", [2, -2])
def test_one_dimensional_tilings(i):
    v = verify_tiling(i)
    assert v.passed and v.exact
    assert v.histogram.counts == {1: default_resolution(1)}


def test_histogram_serialises_without_the_grid():
    v = verify_tiling(3, resolution=128)
    js = v.to_json()
    assert "grid" not in js["histogram"]
    assert sum(js["histogram"]["counts"].values()) == 128 * 128
    assert isinstance(v.histogram.grid, np.ndarray) and v.histogram.grid.shape == (128, 128)


@pytest.mark.slow
@pytest.mark.parametrize("i", [4])
def test_three_dimensional_tiling(i):
    v = verify_tiling(i, resolution=64)
    assert v.passed
