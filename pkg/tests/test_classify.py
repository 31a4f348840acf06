import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundlim.classify import (MLE_RULE, TQ_RULE, BudgetExceededError, DecisionRegime, RegretMethod, ThresholdRule,
                              bayes_regime, erm_classifier, expected_regret_erm, expected_regret_exact,
                              expected_regret_mc, mle_classifier, rate_bound, regime_warning, tq_classifier)
from fundlim.dist import EmpiricalCounts, FiniteDistribution, SamplingMode, make_uniform
from fundlim.envelope import LabeledDistribution

D = FiniteDistribution


def _random_dist(rng, S):
    w = rng.random(S) ** 2
    return D(w / w.sum())


def test_bayes_regime_examples():
    p = D([0.5, 0.5])
    assert bayes_regime(LabeledDistribution(p, p)).symbols() == []
    assert bayes_regime(LabeledDistribution(D([1, 0]), D([0, 1]))).symbols() == [1]
    ld = LabeledDistribution(D([0.5, 0.3, 0.2]), D([0.2, 0.3, 0.5]))
    assert bayes_regime(ld).symbols() == [1]


def test_bayes_regime_scale_invariant():
    r, q = np.array([0.5, 0.3, 0.2]), np.array([0.2, 0.3, 0.5])
    for c in (0.1, 3.0, 1e6):
        assert np.array_equal(c * r > c * q, r > q)


def test_mle_examples():
    q = make_uniform(3)
    assert mle_classifier(EmpiricalCounts([9, 0, 0], 9), q).symbols() == [1]
    assert mle_classifier(EmpiricalCounts([0, 0], 10, SamplingMode.POISSONIZED), D([0.5, 0.5])).symbols() == []
    assert mle_classifier(EmpiricalCounts([6, 4], 10), D([0.5, 0.5])).symbols() == [1]


def test_tq_examples():
    S = 6
    q = D(np.r_[np.zeros(S - 1), 1.0])
    reg = tq_classifier(EmpiricalCounts([0, 1, 0, 0, 0, 3], 4), q, 4)
    assert set(range(1, S)) <= set(reg.symbols())
    assert tq_classifier(EmpiricalCounts([4, 6], 10), D([0.5, 0.5]), 10).symbols() == [2]
    # q_i = 1/n exactly does not trigger the small-q clause
    assert tq_classifier(EmpiricalCounts([0, 10], 10), D([0.1, 0.9]), 10).symbols() == [2]


def test_regime_predict_maps_to_labels():
    reg = DecisionRegime(np.array([True, False, True]))
    assert np.array_equal(reg.predict([0, 1, 2]), [0, 1, 0])
    assert reg.symbols() == [1, 3] and reg.support_size == 3


def test_exact_regret_examples():
    ld = LabeledDistribution(D([0.5, 0.3, 0.2]), D([0.2, 0.3, 0.5]))
    oracle = ThresholdRule.constant(bayes_regime(ld).members)
    rep = expected_regret_exact(oracle, ld, 50)
    assert rep.regret == 0.0 and rep.method is RegretMethod.EXACT and rep.mc_stderr == 0.0


def test_counterexample_closed_form():
    S, n = 1001, 1000
    ld = LabeledDistribution(D(np.r_[np.full(S - 1, 1 / n), 0.0]), D(np.r_[np.zeros(S - 1), 1.0]))
    closed = float(Fraction(1, 2) * (1 - Fraction(1, n)) ** n)
    assert abs(expected_regret_exact(MLE_RULE, ld, n).regret - closed) <= 1e-10
    assert abs(expected_regret_exact(TQ_RULE, ld, n).regret) <= 1e-12


def test_exact_regret_budget():
    ld = LabeledDistribution(make_uniform(2), make_uniform(2))
    with pytest.raises(BudgetExceededError):
        expected_regret_exact(MLE_RULE, ld, 10**7 + 1)


def test_exact_matches_brute_force_multinomial():
    # enumerate every count vector for a tiny alphabet
    r, q, n = np.array([0.5, 0.3, 0.2]), np.array([0.3, 0.45, 0.25]), 6
    ld = LabeledDistribution(D(r), D(q))
    for rule in (MLE_RULE, TQ_RULE):
        total = 0.0
        for c in itertools.product(range(n + 1), repeat=3):
            if sum(c) != n:
                continue
            prob = math.factorial(n) / math.prod(math.factorial(k) for k in c) * math.prod(r ** np.array(c))
            members = rule.predicate(np.array(c), q, n)
            d = r - q
            total += prob * 0.5 * np.sum(np.abs(d)[(d > 0) != members])
        assert expected_regret_exact(rule, ld, n).regret == pytest.approx(total, abs=1e-14)


def test_mc_agrees_with_exact():
    rng = np.random.default_rng(2024)
    for k in range(20):
        S = int(rng.integers(2, 30))
        n = int(rng.integers(5, 400))
        ld = LabeledDistribution(_random_dist(rng, S), _random_dist(rng, S))
        rule = (MLE_RULE, TQ_RULE)[k % 2]
        ex = expected_regret_exact(rule, ld, n).regret
        trials = 2000
        mc = expected_regret_mc(rule, ld, n, trials=trials, seed=k)
        # events rarer than about 3/trials may never be drawn (rule of three)
        unseen = 3 / trials * np.abs(ld.r.probs - ld.q.probs).sum() / 2
        assert abs(mc.regret - ex) <= 3 * mc.mc_stderr + unseen


def test_mc_poissonized_agrees_with_exact():
    ld = LabeledDistribution(make_uniform(10), D(np.linspace(1, 2, 10) / np.linspace(1, 2, 10).sum()))
    ex = expected_regret_exact(MLE_RULE, ld, 80, SamplingMode.POISSONIZED).regret
    mc = expected_regret_mc(MLE_RULE, ld, 80, 4000, seed=1, mode=SamplingMode.POISSONIZED)
    assert abs(mc.regret - ex) <= 3 * mc.mc_stderr


def test_mc_examples():
    ld = LabeledDistribution(make_uniform(5), _random_dist(np.random.default_rng(0), 5))
    a = expected_regret_mc(MLE_RULE, ld, 30, trials=1, seed=4)
    b = expected_regret_mc(MLE_RULE, ld, 30, trials=1, seed=4)
    assert a == b
    disjoint = LabeledDistribution(D([1, 0]), D([0, 1]))
    rep = expected_regret_mc(ThresholdRule.constant([False, False]), disjoint, 10, trials=50)
    assert rep.regret == 0.5 and rep.mc_stderr == 0.0


def test_erm_examples():
    assert erm_classifier([5], [3]).symbols() == [1]
    assert erm_classifier([2], [2]).symbols() == [1]
    assert erm_classifier([0, 1], [0, 0]).symbols() == [1, 2]


def _erm_brute(px, eta, n):
    S = len(px)
    cells = [(x, y, px[x] * (eta[x] if y else 1 - eta[x])) for x in range(S) for y in (0, 1)]
    j0 = np.array([px[x] * (1 - eta[x]) for x in range(S)])
    j1 = np.array([px[x] * eta[x] for x in range(S)])
    total = 0.0
    for draw in itertools.product(range(len(cells)), repeat=n):
        prob = math.prod(cells[i][2] for i in draw)
        n0, n1 = np.zeros(S), np.zeros(S)
        for i in draw:
            x, y, _ = cells[i]
            (n1 if y else n0)[x] += 1
        picks0 = n0 >= n1
        bayes0 = j1 < j0
        total += prob * np.sum(np.abs(j1 - j0)[picks0 != bayes0])
    return total


def test_erm_exact_small_cases():
    ld = LabeledDistribution.from_marginal(D([1.0]), np.array([1.0]))
    assert expected_regret_erm(ld, 5).regret == 0.0
    px, eta = np.array([0.5, 0.5]), np.array([0.9, 0.1])
    ld = LabeledDistribution.from_marginal(D(px), eta)
    assert expected_regret_erm(ld, 1).regret == pytest.approx(0.24, abs=1e-14)
    for n in (1, 2, 3, 4):
        assert expected_regret_erm(ld, n).regret == pytest.approx(_erm_brute(px, eta, n), abs=1e-14)
    skew = LabeledDistribution.from_marginal(D([0.2, 0.5, 0.3]), np.array([0.7, 0.4, 0.5]))
    assert expected_regret_erm(skew, 3).regret == pytest.approx(_erm_brute([0.2, 0.5, 0.3], [0.7, 0.4, 0.5], 3),
                                                               abs=1e-14)


def test_erm_exact_matches_monte_carlo():
    ld = LabeledDistribution.from_marginal(make_uniform(20), np.where(np.arange(20) % 2, 0.4, 0.65))
    ex = expected_regret_erm(ld, 150).regret
    mc = expected_regret_erm(ld, 150, RegretMethod.MONTE_CARLO, trials=4000, seed=3)
    assert abs(mc.regret - ex) <= 3 * mc.mc_stderr


def test_erm_budget():
    ld = LabeledDistribution.from_marginal(make_uniform(2), np.array([0.3, 0.6]))
    with pytest.raises(BudgetExceededError):
        expected_regret_erm(ld, 2001, max_exact_n=2000)


def test_erm_rate_band():
    S = 100
    eta = np.where(np.arange(S) % 2 == 0, 0.6, 0.4)
    ld = LabeledDistribution.from_marginal(make_uniform(S), eta)
    scaled = [expected_regret_erm(ld, n).regret * math.sqrt(n / S) for n in (100, 200, 400, 800, 1600, 3200, 6400)]
    assert max(scaled) / min(scaled) <= 3


def test_tq_within_guard_of_mle():
    rng = np.random.default_rng(5)
    for _ in range(30):
        S = int(rng.integers(2, 200))
        n = int(rng.integers(10, 2000))
        q = _random_dist(rng, S)
        ld = LabeledDistribution(_random_dist(rng, S), q)
        tq = expected_regret_exact(TQ_RULE, ld, n).regret
        mle = expected_regret_exact(MLE_RULE, ld, n).regret
        assert tq <= mle + 4 * rate_bound(q, n)


def test_rate_bound_and_warning():
    q = make_uniform(4)
    assert rate_bound(q, 100) == pytest.approx(4 * min(0.25, math.sqrt(0.25 / 100)))
    assert "exceeds ln n" in regime_warning(make_uniform(1000), 100)
    assert regime_warning(make_uniform(10), 1) is not None
    # the upper condition read with constant 1 fails whenever sqrt(S) < n, so it always warns here
    assert "constant-1" in regime_warning(make_uniform(10), 10**6)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(1, 300), st.integers(0, 2**32), st.sampled_from(["mle", "tq", "const"]))
def test_regret_is_non_negative(S, n, seed, kind):
    rng = np.random.default_rng(seed)
    ld = LabeledDistribution(_random_dist(rng, S), _random_dist(rng, S))
    rule = {"mle": MLE_RULE, "tq": TQ_RULE, "const": ThresholdRule.constant(rng.random(S) < 0.5)}[kind]
    for mode in SamplingMode:
        assert expected_regret_exact(rule, ld, n, mode).regret >= 0
