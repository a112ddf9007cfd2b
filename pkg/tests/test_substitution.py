from hypothesis import given, strategies as st
import numpy as np
import pytest

from tenttile.numberfield import registry_lookup
from tenttile.spectral import perron_data
from tenttile.substitution import (
    Substitution, abelianize, incidence_matrix, is_primitive, prefix_graph, registry_substitution_indices,
    strong_coincidence, substitution_for, theta_prime_q, theta_q, weak_coincidence, zeta_p, zeta_prime_p,
)


@st.composite
def substitutions(draw, max_letters=3, max_len=3):
    n = draw(st.integers(2, max_letters))
    images = [draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=max_len)) for _ in range(n)]
    return Substitution.from_lists(images)


def brute_first_coincidence(s, a1, a2, k_max):
    """Smallest k with sigma^k(a1), sigma^k(a2) sharing a letter at equal letter-count prefixes."""
    for k in range(1, k_max + 1):
        w1, w2 = s.iterate(a1, k), s.iterate(a2, k)
        seen = set()
        for i, a in enumerate(w1):
            seen.add((a, tuple(abelianize(w1[:i], s.size))))
        for j, b in enumerate(w2):
            if (b, tuple(abelianize(w2[:j], s.size))) in seen:
                return k
    return None


@given(substitutions())
def test_incidence_matrix_counts_letters_and_equals_prefix_graph_adjacency(s):
    m = incidence_matrix(s)
    for b, img in enumerate(s.images):
        assert list(m[:, b]) == list(abelianize(img, s.size))
    np.testing.assert_array_equal(prefix_graph(s).adjacency_counts(), m)


@given(substitutions(), st.integers(0, 4))
def test_abelianization_is_a_morphism(s, k):
    w = s.iterate(0, k)
    m = incidence_matrix(s)
    np.testing.assert_array_equal(abelianize(s.apply(w), s.size), m @ abelianize(w, s.size))


@given(substitutions())
def test_json_round_trip(s):
    assert Substitution.from_json(s.to_json()).images == s.images


@given(substitutions(max_letters=3, max_len=3))
def test_strong_coincidence_search_matches_brute_force(s):
    k_max = 5
    res = strong_coincidence(s, k_max=k_max)
    for a1 in range(s.size):
        for a2 in range(a1 + 1, s.size):
            k = brute_first_coincidence(s, a1, a2, k_max)
            if k is None:
                assert (a1, a2) in res.failed_pairs
            else:
                assert res.witnesses[(a1, a2)][0] == k


def test_invalid_substitutions_are_rejected():
    with pytest.raises(ValueError):
        Substitution.from_lists([[0], []])
    with pytest.raises(ValueError):
        Substitution.from_lists([[0, 2], [1]])
    with pytest.raises(ValueError):
        zeta_prime_p(2)


@pytest.mark.parametrize("make,param,size", [(zeta_p, 3, 3), (zeta_p, 5, 5), (theta_q, 3, 6), (theta_q, 5, 10),
                                              (theta_prime_q, 3, 6), (theta_prime_q, 4, 4), (theta_prime_q, 5, 10),
                                              (zeta_prime_p, 3, 6)])
def test_family_members_are_primitive_with_expected_alphabets(make, param, size):
    s = make(param)
    assert s.size == size
    assert is_primitive(s)


@pytest.mark.parametrize("i", registry_substitution_indices())
def test_dominant_eigenvalue_is_the_record_alpha_or_beta_power(i):
    rec = registry_lookup(i)
    sigma, corr = substitution_for(i)
    per = perron_data(sigma, rec, corr)
    spectrum = np.linalg.eigvals(incidence_matrix(sigma).astype(float))
    assert abs(max(abs(spectrum)) - per.lambda0.value()) < 1e-9


@pytest.mark.parametrize("p", [3, 4, 5])
def test_zeta_strong_coincidence_within_p_minus_one(p):
    res = strong_coincidence(zeta_p(p), k_max=p - 1)
    assert res.holds and res.witness_k <= p - 1


@pytest.mark.parametrize("q", [3, 4, 5])
def test_theta_images_of_length_2q_start_with_the_same_letter(q):
    s = theta_q(q)
    starts = {s.iterate(a, 2 * q)[0] for a in range(s.size)}
    assert starts == {2 * q - 1}
    assert strong_coincidence(s, k_max=2 * q).holds


def test_theta_prime_five_weak_but_not_strong():
    sigma, corr = substitution_for(-5)
    per = perron_data(sigma, registry_lookup(-5), corr)
    # default horizon: alphabet size squared
    assert not strong_coincidence(sigma).holds
    weak = weak_coincidence(sigma, per.u)
    assert weak.holds and weak.witness_k > 12


def test_weak_coincidence_is_invariant_under_eigenvector_scaling():
    sigma, corr = substitution_for(1)
    per = perron_data(sigma, registry_lookup(1), corr)
    a = weak_coincidence(sigma, per.u, k_max=6)
    b = weak_coincidence(sigma, [2 * x for x in per.u], k_max=6)
    assert a.holds == b.holds and a.witnesses == b.witnesses
