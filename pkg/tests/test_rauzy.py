import itertools

from hypothesis import given, strategies as st
import numpy as np
import pytest

from tenttile.geometry import hausdorff_distance, render_tent_tile
from tenttile.numberfield import registry_lookup
from tenttile.rauzy import (
    correspondence_check, depth_for_cell, exact_correspondence_certificate, gifs_for, is_complete_code,
    RauzySubtiles, raster_overlap_fraction, render_rauzy, set_equation_residual, subtile_volumes,
    tent_tile_from_rauzy, walk_counts,
)
from tenttile.substitution import incidence_matrix, registry_substitution_indices, substitution_for

PAIRS = registry_substitution_indices()
PLANAR = [1, 3, 5, -1, -3, -5]

words = st.lists(st.text(alphabet="LR", max_size=4), max_size=8)


@given(words)
def test_complete_code_matches_exhaustive_check(ws):
    n = max([len(w) for w in ws], default=0)
    covered = all(any(s.startswith(w) for w in ws) for s in ("".join(p) for p in itertools.product("LR", repeat=n)))
    assert is_complete_code(ws) == (covered and bool(ws))


@pytest.mark.parametrize("i", PAIRS)
def test_exact_certificate_holds_for_every_pair(i):
    cert = exact_correspondence_certificate(i)
    assert cert.holds, cert.missing
    assert all(cert.complete)


def test_certificate_detects_a_missing_branch():
    cert = exact_correspondence_certificate(1)
    longest = max(range(len(cert.words)), key=lambda k: len(cert.words[k]))
    ws = list(cert.words[longest])
    assert len(ws) >= 2
    assert not is_complete_code(ws[1:])


@pytest.mark.parametrize("i", PAIRS)
def test_walk_counts_follow_the_incidence_matrix(i):
    gifs, _ = gifs_for(i)
    m = incidence_matrix(substitution_for(i)[0])
    for k in (1, 3, 6):
        expect = np.linalg.matrix_power(m.astype(object), k) @ np.ones(gifs.size, dtype=object)
        assert walk_counts(gifs, k) == [int(x) for x in expect]


@pytest.mark.parametrize("i", PLANAR)
def test_subtiles_satisfy_the_set_equations(i):
    gifs, _ = gifs_for(i)
    tiles = render_rauzy(gifs, depth_for_cell(gifs, 0.02))
    assert max(set_equation_residual(gifs, tiles)) <= 2 * tiles.cell_size


@pytest.mark.parametrize("i", [1, -3])
def test_rendering_converges_within_cell_sizes(i):
    gifs, _ = gifs_for(i)
    a = render_rauzy(gifs, 8)
    b = render_rauzy(gifs, 16)
    for ca, cb in zip(a.clouds, b.clouds):
        assert hausdorff_distance(ca, cb) <= a.cell_size + b.cell_size


@pytest.mark.parametrize("i", PLANAR)
def test_subtiles_overlap_in_measure_zero(i):
    gifs, _ = gifs_for(i)
    tiles = render_rauzy(gifs, depth_for_cell(gifs, 0.5 / 128))
    assert raster_overlap_fraction(tiles, resolution=128) <= 0.02


def test_overlap_negative_control_duplicated_subtile():
    gifs, _ = gifs_for(-1)
    tiles = render_rauzy(gifs, depth_for_cell(gifs, 0.5 / 128))
    biggest = max(tiles.clouds, key=lambda c: c.weights.sum())
    doubled = RauzySubtiles(tiles.clouds + [biggest], tiles.depth, tiles.cell_size)
    assert raster_overlap_fraction(doubled, resolution=128) > 0.1


@pytest.mark.parametrize("i", [1, -3])
def test_point_weights_are_volume_shares(i):
    gifs, _ = gifs_for(i)
    tiles = render_rauzy(gifs, 10)
    shares = np.array([c.weights.sum() for c in tiles.clouds])
    np.testing.assert_allclose(shares, subtile_volumes(gifs), atol=1e-12)
    assert abs(shares.sum() - 1) < 1e-12


@pytest.mark.parametrize("i", [1, 3, -1])
def test_tent_tile_reassembled_from_subtiles(i):
    rauzy = tent_tile_from_rauzy(i, 18)
    tent = render_tent_tile(registry_lookup(i), target=0.01)
    assert hausdorff_distance(rauzy, tent) <= rauzy.cell_size + tent.cell_size


def test_numeric_correspondence_at_coarse_resolution():
    rep = correspondence_check(1, rel_cell=1e-2)
    assert rep.passed
    assert rep.relative_cell <= 1e-2 * 1.01
