from fractions import Fraction
import itertools

from hypothesis import given, strategies as st
import numpy as np
import pytest

from tenttile.boundary import (
    box_dimension, boundary_context, build_boundary_graph, dimension_report, enumerate_lattice,
    graph_dominant_eigenvalue, irreducible_factor, less_than_eigenvalue, sign_change, tiling_property,
)
from tenttile.reference import BOUNDARY_TARGETS

PLANAR = [1, 3, 5, -1, -3, -5]


def graph_signature(g):
    keys = [v.key() for v in g.vertices]
    edges = {(keys[i], keys[j], s.coeffs) for i, j, s in g.edges}
    return set(keys), edges


@st.composite
def lattice_case(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(n, 3))
    rows = draw(st.lists(st.lists(st.floats(-2, 2), min_size=m, max_size=m), min_size=n, max_size=n))
    gen = np.array(rows) + 2.5 * np.eye(n, m)
    center = np.array(draw(st.lists(st.floats(-3, 3), min_size=m, max_size=m)))
    radius = draw(st.floats(0.5, 4))
    return gen, center, radius


@given(lattice_case())
def test_lattice_enumeration_matches_brute_force(case):
    gen, center, radius = case
    got = set(enumerate_lattice(gen, center, radius))
    box = range(-12, 13)
    ref = set()
    for c in itertools.product(box, repeat=gen.shape[0]):
        dist = np.linalg.norm(np.array(c) @ gen - center)
        if dist <= radius * (1 - 1e-9):
            ref.add(c)
        elif dist <= radius * (1 + 1e-9) and c in got:
            ref.add(c)
    assert got == ref


@pytest.mark.parametrize("i", PLANAR)
def test_tight_exploration_bound_gives_the_definition_graph(i):
    tight = build_boundary_graph(i, "sr", bound="tight")
    full = build_boundary_graph(i, "sr", bound="definition")
    assert graph_signature(tight) == graph_signature(full)
    assert tight.explored <= full.explored


@pytest.mark.parametrize("i", PLANAR)
def test_pruned_graph_is_a_fixpoint(i):
    g = build_boundary_graph(i, "sr")
    a = g.adjacency()
    # every vertex starts an infinite walk
    assert (a.sum(axis=1) > 0).all()


@pytest.mark.parametrize("i", [1, -1, 5])
def test_decisions_are_invariant_under_eigenvector_scaling(i):
    g1 = build_boundary_graph(boundary_context(i, scale=1), "sr")
    g2 = build_boundary_graph(boundary_context(i, scale=2), "sr")
    assert len(g1.vertices) == len(g2.vertices) and len(g1.edges) == len(g2.edges)
    m1, m2 = graph_dominant_eigenvalue(g1), graph_dominant_eigenvalue(g2)
    assert m1.component_poly == m2.component_poly


@pytest.mark.parametrize("i", PLANAR)
def test_eigenvalue_bracket_contains_the_float_eigenvalue(i):
    g = build_boundary_graph(i, "sr")
    mu = graph_dominant_eigenvalue(g)
    ref = max(abs(np.linalg.eigvals(g.adjacency().astype(float))))
    assert float(mu.lower) - 1e-12 <= ref <= float(mu.upper) + 1e-12
    assert mu.width < 1e-12
    assert sign_change(mu.component_poly.coeffs, mu.lower, mu.upper)


@given(st.lists(st.lists(st.integers(0, 2), min_size=4, max_size=4), min_size=4, max_size=4))
def test_dominant_eigenvalue_of_random_nonnegative_matrices(rows):
    a = np.array(rows)
    ref = max(abs(np.linalg.eigvals(a.astype(float))))
    mu = graph_dominant_eigenvalue(a)
    assert abs(mu.value - ref) < 1e-7


def test_irreducible_factor_picks_the_factor_with_the_root():
    # (t^3 - t - 1)(t^2 - 2): the plastic number lies in [1.3, 1.33]
    poly = [2, 2, -1, -3, 0, 1]
    assert irreducible_factor(poly, Fraction(13, 10), Fraction(133, 100)) == (-1, -1, 0, 1)
    assert irreducible_factor(poly, Fraction(141, 100), Fraction(142, 100)) == (-2, 0, 1)


@pytest.mark.parametrize("i", PLANAR)
def test_planar_dimensions_match_the_table(i):
    rep = dimension_report(i)
    target = BOUNDARY_TARGETS[i]
    assert rep.hausdorff_equal
    assert abs(rep.box_dimension - target.dimension) <= 1e-4
    assert 1 < rep.box_dimension < 2


def test_dimension_formula_limits():
    # mu equal to lambda0 gives the full dimension d
    assert box_dimension(2, 1.7, 1.7, 0.75) == pytest.approx(2.0)
    assert box_dimension(2, 1.7, 1.2, 0.75) < 2.0


@pytest.mark.parametrize("i", [1, 3, -1, -3])
def test_tiling_property_and_lattice_graph(i):
    assert tiling_property(i)
    gs = build_boundary_graph(i, "sr")
    gl = build_boundary_graph(i, "lat")
    ms, ml = graph_dominant_eigenvalue(gs), graph_dominant_eigenvalue(gl)
    assert ml.lower <= ms.upper and ms.lower <= ml.upper


def test_less_than_eigenvalue_decides_both_ways():
    ctx = boundary_context(1)
    mu = graph_dominant_eigenvalue(build_boundary_graph(ctx, "sr"))
    lam = ctx.perron.lambda0
    assert less_than_eigenvalue(mu, lam)
    assert not less_than_eigenvalue(mu, lam.field.one)


def test_literal_rule_changes_the_graph():
    derived = graph_dominant_eigenvalue(build_boundary_graph(1, "sr", rule="derived"))
    literal = graph_dominant_eigenvalue(build_boundary_graph(1, "sr", rule="literal"))
    assert derived.component_poly != literal.component_poly


def test_invalid_arguments():
    with pytest.raises(ValueError):
        build_boundary_graph(1, "bogus")
    with pytest.raises(ValueError):
        build_boundary_graph(1, rule="bogus")
