from fractions import Fraction

from hypothesis import given, strategies as st
import numpy as np
import pytest

from tenttile.geometry import (
    AffineMap, BudgetExceeded, PointCloud, build_embedding, build_matrices, hausdorff_distance, render_tent_measure,
    render_tent_tile, tent_barycenter, tent_block_radii, tent_ifs, tent_interval_exact, tent_radius,
    verify_interval_lattice_tiling, verify_interval_set_equation,
)
from tenttile.numberfield import registry_lookup, unit_indices

PLANAR = [1, 3, 5, -1, -3, -5]
HIGHER = [i for i in unit_indices() if abs(i) != 2]


@pytest.mark.parametrize("i", unit_indices())
def test_contraction_pair_identities(i):
    _, pair = build_matrices(registry_lookup(i))
    eye = np.eye(pair.A.shape[0])
    np.testing.assert_allclose(np.linalg.inv(pair.A) + np.linalg.inv(pair.B), eye, atol=1e-12)
    np.testing.assert_allclose(pair.A @ pair.B, pair.A + pair.B, atol=1e-12)
    np.testing.assert_allclose(pair.A @ pair.B, pair.B @ pair.A, atol=1e-12)
    # |det A| + |det B| = 1 makes the tile a self-affine measure
    assert abs(abs(np.linalg.det(pair.A)) + abs(np.linalg.det(pair.B)) - 1) < 1e-12


@pytest.mark.parametrize("i", unit_indices())
def test_tent_maps_contract(i):
    for f in tent_ifs(registry_lookup(i)):
        assert f.is_contraction


@pytest.mark.parametrize("i", [1, -3, 4])
def test_depth_clouds_are_cauchy_with_geometric_rate(i):
    rec = registry_lookup(i)
    clouds = [render_tent_tile(rec, depth=k) for k in (8, 10, 12)]
    d1 = hausdorff_distance(clouds[0], clouds[1])
    d2 = hausdorff_distance(clouds[1], clouds[2])
    assert d2 < d1
    assert d1 <= clouds[0].cell_size and d2 <= clouds[1].cell_size


@pytest.mark.parametrize("i,target", [(i, 0.1) for i in PLANAR] + [(4, 0.5)])
def test_adaptive_cloud_is_within_its_cell_size_of_a_deep_cloud(i, target):
    rec = registry_lookup(i)
    deep = render_tent_tile(rec, depth=16)
    coarse = render_tent_tile(rec, target=target)
    assert coarse.cell_size <= target
    assert hausdorff_distance(coarse, deep) <= coarse.cell_size + deep.cell_size


@pytest.mark.parametrize("i", HIGHER)
def test_points_respect_the_certified_radii(i):
    rec = registry_lookup(i)
    cloud = render_tent_tile(rec, depth=14)
    assert np.linalg.norm(cloud.points, axis=1).max() <= tent_radius(rec)
    radii = tent_block_radii(rec)
    col = 0
    # block sizes follow the embedding layout: real blocks first, then complex pairs
    sizes = build_embedding(rec).block_sizes()
    for r, size in zip(radii, sizes):
        block = cloud.points[:, col:col + size]
        assert np.linalg.norm(block, axis=1).max() <= r + 1e-12
        col += size


@pytest.mark.parametrize("i", [1, -1, 4, -4])
def test_leaf_weights_sum_to_one(i):
    rec = registry_lookup(i)
    assert abs(render_tent_tile(rec, depth=10).weights.sum() - 1) < 1e-12
    assert abs(render_tent_measure(rec, 1e-3).weights.sum() - 1) < 1e-12


@pytest.mark.parametrize("i", [1, 3, -3, 4])
def test_barycenter_is_the_first_moment_of_the_measure_cloud(i):
    rec = registry_lookup(i)
    b = tent_barycenter(rec)
    for mass in (1e-2, 1e-4):
        cloud = render_tent_measure(rec, mass)
        mean = cloud.weights @ cloud.points
        np.testing.assert_allclose(mean, b, atol=1e-9)
    maps = tent_ifs(rec)
    dets = [abs(np.linalg.det(m.linear)) for m in maps]
    np.testing.assert_allclose(sum(w * m(b) for w, m in zip(dets, maps)), b, atol=1e-12)


def test_measure_cloud_rejects_bad_mass():
    with pytest.raises(ValueError):
        render_tent_measure(registry_lookup(1), 1.5)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        render_tent_tile(registry_lookup(1), depth=30, budget=1000)


pts2 = st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=30).map(np.array)


@given(pts2, pts2, st.floats(0.01, 3))
def test_hausdorff_distance_matches_brute_force_and_ignores_the_hint(a, b, hint):
    dm = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    ref = max(dm.min(axis=1).max(), dm.min(axis=0).max())
    assert hausdorff_distance(a, b) == pytest.approx(ref, abs=1e-12)
    assert hausdorff_distance(a, b, hint=hint) == pytest.approx(ref, abs=1e-12)
    assert hausdorff_distance(b, a) == pytest.approx(ref, abs=1e-12)


@given(pts2, st.floats(0.05, 2))
def test_thinning_keeps_a_covering(a, eps):
    cloud = PointCloud(a, 0, 0.0, None, np.full(len(a), 1.0 / len(a)))
    thin = cloud.thinned(eps)
    assert hausdorff_distance(cloud, thin) <= eps * np.sqrt(2) + 1e-12
    assert abs(thin.weights.sum() - 1) < 1e-12


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3))
def test_affine_inverse_and_composition(a, b, t):
    m = np.array([[1.5, a], [0.0, 2.0]])
    f = AffineMap(m, np.array([t, b]))
    x = np.array([[0.3, -1.2], [2.0, 0.5]])
    np.testing.assert_allclose(f.inverse()(f(x)), x, atol=1e-9)
    np.testing.assert_allclose(f.compose(f)(x), f(f(x)), atol=1e-9)


def test_quadratic_tiles_are_the_stated_intervals():
    phi = (1 + 5 ** 0.5) / 2
    lo, hi = tent_interval_exact(-2).numeric()
    assert (lo, hi) == pytest.approx((-phi, 0.0), abs=1e-14)
    lo, hi = tent_interval_exact(2).numeric()
    assert (lo, hi) == pytest.approx(((1 - phi) / 2, 0.5), abs=1e-14)
    for i in (-2, 2):
        iv = tent_interval_exact(i)
        assert verify_interval_set_equation(iv)
        assert verify_interval_lattice_tiling(iv)


def test_a_wrong_interval_fails_the_set_equation():
    iv = tent_interval_exact(-2)
    shifted = type(iv)(iv.record_index, iv.lo, iv.hi + Fraction(1, 3), iv.lattice_step)
    assert not verify_interval_set_equation(shifted)
    assert not verify_interval_lattice_tiling(shifted)
