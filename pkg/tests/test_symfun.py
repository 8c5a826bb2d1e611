"""Tests for elementary symmetric polynomial machinery."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phessian.symfun import (
    identity_residuals,
    sigma,
    sigma_all,
    sigma_brute,
    sigma_trunc,
)


def test_sigma_hand_values():
    assert sigma(2, [1.0, 2.0, 3.0]) == 11.0
    assert sigma(0, [7.0, -4.0]) == 1.0
    assert sigma(4, [1.0, 2.0, 3.0]) == 0.0
    assert sigma(-1, [1.0, 2.0]) == 0.0


def test_sigma_trunc_hand_values():
    mu = [1.0, 2.0, 3.0]
    assert sigma_trunc(2, mu, [2]) == 3.0        # sigma_2(1, 0, 3)
    assert sigma_trunc(1, mu, [1, 1]) == 0.0     # repeated index
    assert sigma_trunc(1, mu, [2, 3]) == 1.0     # complement rule


def test_sigma_trunc_bad_index():
    with pytest.raises(ValueError, match="out of range"):
        sigma_trunc(1, [1.0, 2.0], [3])


def test_empty_vector_rejected():
    with pytest.raises(ValueError):
        sigma(1, [])
    with pytest.raises(ValueError):
        sigma(1, np.nan * np.ones(3))


def test_sigma_against_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = rng.integers(1, 11)
        mu = rng.uniform(-10, 10, n)
        for p in range(n + 1):
            a = sigma(p, mu)
            b = sigma_brute(p, mu)
            # scale by the summand magnitude; cancellation can leave the
            # result far smaller than the terms that produced it
            scale = max(1.0, sigma(p, np.abs(mu)))
            assert abs(a - b) <= 1e-13 * scale


def test_sigma_batched_matches_scalar():
    rng = np.random.default_rng(1)
    mu = rng.uniform(-5, 5, (20, 4))
    batched = sigma(2, mu)
    for i in range(20):
        assert batched[i] == sigma(2, mu[i])


def test_sigma_all_consistent():
    rng = np.random.default_rng(2)
    mu = rng.uniform(-5, 5, (10, 5))
    e = sigma_all(mu)
    for p in range(6):
        np.testing.assert_allclose(e[:, p], sigma(p, mu), rtol=1e-14)


@given(
    st.lists(st.floats(-10, 10), min_size=2, max_size=8),
    st.integers(0, 8),
)
@settings(max_examples=200, deadline=None)
def test_sigma_symmetric(entries, p):
    mu = np.array(entries)
    perm = np.sort(mu)[::-1]
    a, b = sigma(p, mu), sigma(p, perm)
    assert abs(a - b) <= 1e-13 * max(1.0, abs(a), abs(b))


def test_trunc_equals_complement():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = rng.integers(2, 9)
        mu = rng.uniform(-10, 10, n)
        m = rng.integers(1, n)
        J = 1 + rng.choice(n, size=m, replace=False)
        comp = [mu[k] for k in range(n) if k + 1 not in set(J)]
        for p in range(n - m + 1):
            a = sigma_trunc(p, mu, J)
            b = sigma(p, np.array(comp)) if comp else (1.0 if p == 0 else 0.0)
            assert abs(a - b) <= 1e-13 * max(1.0, abs(a), abs(b))


def test_identity_residuals_hand_case():
    res = identity_residuals(2, [1.0, 2.0, 3.0])
    assert all(v <= 1e-12 for v in res.values())
    # identity (a) with j=1 by hand: 1*sigma_1(0,2,3) + sigma_2(0,2,3) = 11
    assert 1.0 * 5.0 + 6.0 == sigma(2, [1.0, 2.0, 3.0])


def test_identity_residuals_zero_vector():
    res = identity_residuals(1, [0.0, 0.0, 0.0])
    assert all(v == 0.0 for v in res.values())


def test_identity_residuals_random_sweep():
    rng = np.random.default_rng(7)
    for n in range(2, 9):
        mu = rng.uniform(-10, 10, (200, n))
        for p in range(n + 1):
            res = identity_residuals(p, mu)
            worst = max(float(np.max(v)) for v in res.values())
            assert worst <= 1e-10, (n, p, worst)


def test_expansion_with_partial_index_list():
    rng = np.random.default_rng(11)
    mu = rng.uniform(-5, 5, 6)
    res = identity_residuals(3, mu, expansion_indices=[2, 5, 1])
    assert res["expansion"] <= 1e-12


def test_expansion_rejects_repeats():
    with pytest.raises(ValueError, match="distinct"):
        identity_residuals(2, [1.0, 2.0, 3.0], expansion_indices=[1, 1])
