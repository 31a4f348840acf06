import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundlim.dist import FiniteDistribution, make_uniform
from fundlim.envelope import (ALPHA_MAX, InfiniteDivergenceError, LabeledDistribution, bayes_error,
                              envelope_regret, kl_divergence, l1_distance, redundancy_bounds, scheffe_set,
                              shannon_entropy)

D = FiniteDistribution


def _random_dist(rng, S):
    w = rng.random(S) ** 3
    return D(w / w.sum())


def test_entropy_examples():
    assert shannon_entropy(D([1.0, 0.0])) == 0.0
    assert shannon_entropy(make_uniform(8)) == pytest.approx(3.0, abs=1e-15)
    assert shannon_entropy(D([0.5, 0.25, 0.25])) == pytest.approx(1.5, abs=1e-15)
    with pytest.raises(ValueError):
        shannon_entropy(D.relaxed_from([0.5, 0.6]))


def test_l1_examples():
    p = D([0.5, 0.5])
    assert l1_distance(p, p) == 0.0
    assert l1_distance(D([1, 0]), D([0, 1])) == 2.0
    assert l1_distance(p, D([0.25, 0.75])) == 0.5
    with pytest.raises(ValueError):
        l1_distance(p, make_uniform(3))


def test_bayes_error_examples():
    p = D([0.5, 0.5])
    assert bayes_error(LabeledDistribution(p, p)) == 0.5
    assert bayes_error(LabeledDistribution(D([1, 0]), D([0, 1]))) == 0.0
    assert bayes_error(LabeledDistribution(p, D([0.25, 0.75]))) == 0.375


def test_kl_examples():
    p = D([0.5, 0.5])
    assert kl_divergence(p, p) == 0.0
    assert kl_divergence(p, D([0.25, 0.75])) == pytest.approx(0.20752, abs=1e-5)
    assert kl_divergence(D([1, 0]), p) == 1.0
    with pytest.raises(InfiniteDivergenceError):
        kl_divergence(p, D([1, 0]))


def test_redundancy_examples():
    b = redundancy_bounds(0.1)
    assert b.lower_bits == pytest.approx(0.1056563503152003, abs=1e-12)
    assert b.upper_bits == pytest.approx(0.2534007814476134, abs=1e-12)
    assert b.c_alpha > 1 and b.b_alpha > 0
    assert redundancy_bounds(0.2).lower_bits < redundancy_bounds(0.2).upper_bits
    near = redundancy_bounds(ALPHA_MAX * (1 - 1e-9))
    assert 0 < near.lower_bits < 1e-8
    for bad in (0.0, -0.1, ALPHA_MAX, 0.5):
        with pytest.raises(ValueError):
            redundancy_bounds(bad)


def test_redundancy_grid_is_ordered():
    for a in np.linspace(0.001, ALPHA_MAX - 0.001, 100):
        b = redundancy_bounds(a)
        assert b.lower_bits <= b.upper_bits


def test_envelope_regret_examples():
    r, q = D([0.5, 0.3, 0.2]), D([0.2, 0.3, 0.5])
    ld = LabeledDistribution(r, q)
    A = scheffe_set(r, q)
    assert envelope_regret(A, ld) == 0.0
    assert envelope_regret(~A, ld) == pytest.approx(l1_distance(r, q) / 2, abs=1e-15)
    disjoint = LabeledDistribution(D([1, 0]), D([0, 1]))
    assert envelope_regret(np.zeros(2, bool), disjoint) == 0.5


def test_labeled_from_marginal_roundtrip():
    px = D([0.2, 0.3, 0.5])
    eta = np.array([0.1, 0.5, 0.9])
    ld = LabeledDistribution.from_marginal(px, eta)
    assert np.allclose(ld.marginal(), px.probs) and np.allclose(ld.eta(), eta)


def test_concavity_spot_check():
    rng = np.random.default_rng(0)
    q = _random_dist(rng, 20)
    for _ in range(50):
        p1, p2 = _random_dist(rng, 20), _random_dist(rng, 20)
        for lam in (0.25, 0.5, 0.75):
            mix = D(lam * p1.probs + (1 - lam) * p2.probs)
            h = lam * shannon_entropy(p1) + (1 - lam) * shannon_entropy(p2)
            assert shannon_entropy(mix) >= h - 1e-12
            be = lam * bayes_error(LabeledDistribution(p1, q)) + (1 - lam) * bayes_error(LabeledDistribution(p2, q))
            assert bayes_error(LabeledDistribution(mix, q)) >= be - 1e-12


def test_general_prior_form_agrees_at_half():
    rng = np.random.default_rng(1)
    for _ in range(100):
        r, q = _random_dist(rng, 30), _random_dist(rng, 30)
        ld = LabeledDistribution(r, q)
        general = math.fsum(np.minimum(0.5 * r.probs, 0.5 * q.probs).tolist())
        assert abs(bayes_error(ld) - general) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32))
def test_l1_is_a_metric(S, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (_random_dist(rng, S) for _ in range(3))
    assert l1_distance(a, b) == l1_distance(b, a)
    assert l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12
    assert 0 <= l1_distance(a, b) <= 2


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32))
def test_regret_non_negative_and_zero_on_scheffe(S, seed):
    rng = np.random.default_rng(seed)
    ld = LabeledDistribution(_random_dist(rng, S), _random_dist(rng, S))
    assert envelope_regret(rng.random(S) < 0.5, ld) >= 0
    assert envelope_regret(scheffe_set(ld.r, ld.q), ld) == 0.0
