from fractions import Fraction

from hypothesis import given, strategies as st
import numpy as np
import pytest
import sympy

from tenttile.numberfield import registry_lookup
from tenttile.spectral import (
    char_poly, charpoly_rational, perron_data, pi_numeric, poly_divmod, poly_gcd, poly_mul, poly_squarefree_part,
)
from tenttile.geometry import build_embedding
from tenttile.substitution import incidence_matrix, registry_substitution_indices, substitution_for


def sympy_charpoly(mat):
    t = sympy.Symbol("t")
    p = sympy.Matrix(mat).charpoly(t)
    return tuple(int(c) for c in reversed(p.all_coeffs()))


int_matrix = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n))


@given(int_matrix)
def test_modular_charpoly_matches_sympy(mat):
    assert char_poly(mat).coeffs == sympy_charpoly(mat)


@given(int_matrix)
def test_rational_charpoly_agrees_with_modular(mat):
    assert tuple(int(c) for c in charpoly_rational(mat)) == char_poly(mat).coeffs


def test_charpoly_of_large_nonnegative_matrix():
    rng = np.random.default_rng(7)
    mat = (rng.random((40, 40)) < 0.1).astype(int) * rng.integers(1, 4, (40, 40))
    assert char_poly(mat).coeffs == sympy_charpoly(mat.tolist())


poly = st.lists(st.integers(-5, 5), min_size=1, max_size=6).filter(lambda p: p[-1] != 0)


@given(poly, poly)
def test_polynomial_division_identity(p, q):
    quo, rem = poly_divmod(p, q)
    back = [a + b for a, b in zip(poly_mul(quo, q) + [0] * len(p), rem + [0] * (len(p) + len(q)))]
    assert [Fraction(x) for x in back[: len(p)]] == [Fraction(x) for x in p]
    assert all(x == 0 for x in back[len(p):])


@given(poly, poly)
def test_gcd_divides_both(p, q):
    g = poly_gcd(p, q)
    for f in (p, q):
        _, rem = poly_divmod(f, g)
        assert all(r == 0 for r in rem)


@given(poly)
def test_squarefree_part_of_a_square_is_the_square_free_kernel(p):
    sq = poly_squarefree_part(poly_mul(p, p))
    t = sympy.Symbol("t")
    ref = sympy.Poly(list(reversed(p)), t).sqf_part()
    ours = sympy.Poly([sympy.Rational(c) for c in reversed(sq)], t)
    assert sympy.div(ours, ref)[1] == 0 and ours.degree() == ref.degree()


@pytest.mark.parametrize("i", registry_substitution_indices())
def test_perron_vector_is_an_exact_left_eigenvector(i):
    rec = registry_lookup(i)
    sigma, corr = substitution_for(i)
    per = perron_data(sigma, rec, corr)
    m = incidence_matrix(sigma)
    for j in range(sigma.size):
        col = rec.field.zero
        for k in range(sigma.size):
            col = col + per.u[k] * int(m[k, j])
        assert col == per.lambda0 * per.u[j]
    # the dominant eigenvalue is also a root of the incidence characteristic polynomial
    cp = char_poly(m)
    assert abs(cp(per.lambda0.value())) < 1e-8


@pytest.mark.parametrize("i", [1, -3, 4])
def test_projection_is_linear_and_intertwines_the_eigenvalue(i):
    rec = registry_lookup(i)
    sigma, corr = substitution_for(i)
    per = perron_data(sigma, rec, corr)
    emb = build_embedding(rec)
    rng = np.random.default_rng(i + 10)
    x = rng.integers(-5, 6, sigma.size)
    y = rng.integers(-5, 6, sigma.size)
    zx, zy = per.pi_exact(x), per.pi_exact(y)
    np.testing.assert_allclose(pi_numeric(zx + zy, emb), pi_numeric(zx, emb) + pi_numeric(zy, emb), atol=1e-9)
    # pi(M x) = h(pi(x))
    mx = incidence_matrix(sigma) @ x
    assert per.pi_exact(mx) == per.h_apply(zx)
