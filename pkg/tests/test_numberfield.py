from fractions import Fraction

from hypothesis import given, strategies as st
import pytest
import sympy

from tenttile.numberfield import (
    FieldMismatch, all_records, beta_of, compare, conjugates, isolate_roots, minimal_polynomial_of,
    registry_lookup, sign_at_dominant_root, unit_indices, verify_dependency,
)

UNITS = unit_indices()
small = st.integers(-6, 6)


def element(rec, coeffs):
    return rec.field.element(coeffs[: rec.degree])


def test_registry_has_eleven_records_and_index_zero_is_not_a_unit():
    recs = all_records()
    assert [r.index for r in recs] == list(range(-5, 6))
    assert not registry_lookup(0).is_unit
    assert all(registry_lookup(i).is_unit for i in UNITS)
    with pytest.raises(KeyError):
        registry_lookup(6)


@pytest.mark.parametrize("i", UNITS)
def test_minimal_polynomials_are_irreducible_with_a_single_root_outside_the_unit_disc(i):
    rec = registry_lookup(i)
    t = sympy.Symbol("t")
    p = sympy.Poly(list(reversed(rec.minpoly.coeffs)), t)
    assert p.is_irreducible
    roots = [complex(r) for r in sympy.Poly(p).nroots(n=30)]
    outside = [r for r in roots if abs(r) > 1]
    assert len(outside) == 1 and abs(outside[0].imag) < 1e-12
    assert abs(outside[0].real - rec.field.root_float) < 1e-12


@pytest.mark.parametrize("i", UNITS)
def test_beta_is_the_partner_and_the_dependency_holds(i):
    rec = registry_lookup(i)
    partner = registry_lookup(rec.partner)
    b = beta_of(rec)
    # beta has the partner's minimal polynomial
    assert minimal_polynomial_of(b) == partner.minpoly.coeffs
    assert verify_dependency(rec)
    assert beta_of(b) == rec.alpha


@pytest.mark.parametrize("i", [1, -3, 4])
@given(a=st.lists(small, min_size=4, max_size=4), b=st.lists(small, min_size=4, max_size=4),
       c=st.lists(small, min_size=4, max_size=4))
def test_field_axioms(i, a, b, c):
    rec = registry_lookup(i)
    x, y, z = element(rec, a), element(rec, b), element(rec, c)
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    if not y.is_zero():
        assert (x / y) * y == x


@pytest.mark.parametrize("i", [1, 3, -5])
@given(a=st.lists(small, min_size=3, max_size=3))
def test_multiplication_agrees_with_sympy_reduction(i, a):
    rec = registry_lookup(i)
    t = sympy.Symbol("t")
    mp = sympy.Poly(list(reversed(rec.minpoly.coeffs)), t)
    x = element(rec, a)
    sq = x * x
    ref = sympy.rem(sympy.Poly(list(reversed(a)), t) ** 2, mp)
    ref_coeffs = list(reversed(ref.all_coeffs()))
    ref_coeffs += [0] * (rec.degree - len(ref_coeffs))
    assert [Fraction(v) for v in sq.coeffs] == [Fraction(int(v)) for v in ref_coeffs]


@pytest.mark.parametrize("i", [1, -1, 4])
@given(a=st.lists(small, min_size=4, max_size=4))
def test_exact_sign_matches_high_precision_evaluation(i, a):
    rec = registry_lookup(i)
    x = element(rec, a)
    s = sign_at_dominant_root(x)
    t = sympy.Symbol("t")
    root = sympy.Poly(list(reversed(rec.minpoly.coeffs)), t).nroots(n=60)
    dom = max((r for r in root if abs(sympy.im(r)) < 1e-40), key=lambda r: sympy.re(r))
    val = sum(sympy.Rational(c) * dom ** k for k, c in enumerate(x.coeffs))
    expect = 0 if x.is_zero() else (1 if val > 0 else -1)
    assert s == expect


def test_compare_is_antisymmetric_and_rejects_other_fields():
    a = registry_lookup(1).alpha
    assert compare(a, a * a) == -1 and compare(a * a, a) == 1 and compare(a, a) == 0
    with pytest.raises((FieldMismatch, ValueError)):
        _ = a + registry_lookup(3).alpha


@pytest.mark.parametrize("i", UNITS)
def test_conjugates_of_alpha_multiply_to_the_constant_term(i):
    rec = registry_lookup(i)
    conj = conjugates(rec.alpha)
    prod = rec.alpha.value()
    for z, _ in conj:
        prod *= z
    sign = (-1) ** rec.degree
    assert abs(prod - sign * rec.minpoly.coeffs[0]) < 1e-9


@pytest.mark.parametrize("i", UNITS)
def test_root_isolation_boxes_are_disjoint(i):
    iso = isolate_roots(registry_lookup(i).field, bits=64)
    lo, hi = iso.dominant
    assert lo < hi and hi - lo <= Fraction(1, 2 ** 60)
