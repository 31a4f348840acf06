"""Classifiers over a finite feature alphabet and their exact expected regret.

A classifier is identified with its class-0 decision regime ``Â``:
``t(x) = 1[x not in Â]``. The rules here decide each symbol from that
symbol's own count, so their expected regret only needs the one-dimensional
count marginals (binomial under multinomial sampling, Poisson under
Poissonization).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .dist import EmpiricalCounts, FiniteDistribution, RngSeed, SamplingMode, _as_generator
from .envelope import LabeledDistribution, regime_regret
from .probability import binomial_cdf, binomial_sf, poisson_sf

EXACT_MAX_N = 10**7


class RegretMethod(str, enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


class RuleTag(str, enum.Enum):
    MLE = "MLE"
    TQ = "TQ"
    EMPIRICAL_SCHEFFE = "EmpiricalScheffe"
    CUSTOM = "Custom"


class BudgetExceededError(ValueError):
    """Exact evaluation requested beyond its size budget; use Monte Carlo."""


@dataclass(frozen=True, eq=False)
class DecisionRegime:
    """Boolean membership vector of the class-0 regime ``Â``."""

    members: np.ndarray

    def __post_init__(self):
        m = np.array(self.members, dtype=bool).reshape(-1)
        m.setflags(write=False)
        object.__setattr__(self, "members", m)

    @property
    def support_size(self) -> int:
        return int(self.members.size)

    def symbols(self) -> list[int]:
        """1-based symbols in the regime."""
        return (np.nonzero(self.members)[0] + 1).tolist()

    def predict(self, x) -> np.ndarray:
        """Labels ``t(x)`` for 0-based symbols ``x``."""
        return (~self.members[np.asarray(x, dtype=int)]).astype(int)

    def __eq__(self, other):
        if not isinstance(other, DecisionRegime):
            return NotImplemented
        return np.array_equal(self.members, other.members)

    def __repr__(self):
        return f"DecisionRegime({self.symbols()})"


@dataclass(frozen=True)
class ThresholdRule:
    """Coordinatewise rule: symbol ``i`` joins the regime iff ``predicate(count_i, q_i, n)``.

    ``predicate`` is vectorised over symbols and must be non-decreasing in the
    count; exact regret evaluation relies on that monotonicity.
    """

    tag: RuleTag
    predicate: Callable[[np.ndarray, np.ndarray, int], np.ndarray]

    def regime(self, counts, q: FiniteDistribution, n: int | None = None) -> DecisionRegime:
        c = counts.counts if isinstance(counts, EmpiricalCounts) else np.asarray(counts)
        if n is None:
            n = counts.nominal_n if isinstance(counts, EmpiricalCounts) else int(c.sum())
        return DecisionRegime(self.predicate(c, q.probs, n))

    @classmethod
    def constant(cls, members) -> "ThresholdRule":
        """A rule that ignores the data (e.g. an oracle regime)."""
        m = np.asarray(members, dtype=bool)
        return cls(RuleTag.CUSTOM, lambda c, q, n: np.broadcast_to(m, np.shape(c)).copy())


def _mle_predicate(counts, q, n):
    return np.asarray(counts) / n > q


def _tq_predicate(counts, q, n):
    return (np.asarray(counts) / n > q) | (q < 1.0 / n)


MLE_RULE = ThresholdRule(RuleTag.MLE, _mle_predicate)
TQ_RULE = ThresholdRule(RuleTag.TQ, _tq_predicate)


@dataclass(frozen=True)
class RegretReport:
    regret: float
    rate_bound: float
    ratio: float
    method: RegretMethod
    mc_stderr: float = 0.0


def rate_bound(q: FiniteDistribution, n: int) -> float:
    """``sum_i min(q_i, sqrt(q_i / n))`` with no leading constant."""
    qq = q.probs
    return math.fsum(np.minimum(qq, np.sqrt(qq / n)).tolist())


def _report(regret, q, n, method, stderr=0.0) -> RegretReport:
    rb = rate_bound(q, n)
    ratio = regret / rb if rb > 0 else (0.0 if regret == 0 else math.inf)
    return RegretReport(float(regret), rb, ratio, RegretMethod(method), float(stderr))


def bayes_regime(ld: LabeledDistribution) -> DecisionRegime:
    """The Scheffé set ``{i : r_i > q_i}`` (ties go to class 1)."""
    if not ld.balanced:
        raise ValueError("bayes_regime assumes P(Y = 1) = 1/2")
    return DecisionRegime(ld.r.probs > ld.q.probs)


def mle_classifier(counts: EmpiricalCounts, q: FiniteDistribution) -> DecisionRegime:
    """Maximum likelihood classifier with known ``q``: ``i`` in regime iff ``count_i / n > q_i``."""
    return MLE_RULE.regime(counts, q)


def tq_classifier(counts: EmpiricalCounts, q: FiniteDistribution, n: int | None = None) -> DecisionRegime:
    """MLE regime plus every symbol with ``q_i < 1/n``."""
    return TQ_RULE.regime(counts, q, n)


def erm_classifier(n0, n1) -> DecisionRegime:
    """Majority vote per symbol from labelled counts; ties go to class 0."""
    n0 = np.asarray(n0)
    n1 = np.asarray(n1)
    if n0.shape != n1.shape:
        raise ValueError("label count vectors differ in length")
    return DecisionRegime(n0 >= n1)


def _count_ceiling(r, n, mode) -> int:
    if mode is SamplingMode.MULTINOMIAL:
        return int(n)
    lam = float(np.max(n * r)) if r.size else 0.0
    return int(math.ceil(lam + 40 * math.sqrt(lam) + 60))


def _membership_thresholds(rule: ThresholdRule, q, n, kmax):
    """Smallest count putting each symbol in the regime (``kmax + 1`` if none)."""
    S = q.size
    lo = np.full(S, -1, dtype=np.int64)          # predicate false at lo (virtual -1)
    hi = np.full(S, kmax + 1, dtype=np.int64)     # predicate true at hi (virtual kmax + 1)
    at0 = np.asarray(rule.predicate(np.zeros(S, dtype=np.int64), q, n), dtype=bool)
    hi[at0] = 0
    atmax = np.asarray(rule.predicate(np.full(S, kmax, dtype=np.int64), q, n), dtype=bool)
    active = ~at0 & atmax
    hi[~at0 & ~atmax] = kmax + 1
    lo[active] = 0
    hi[active] = kmax
    while True:
        open_ = active & (hi - lo > 1)
        if not open_.any():
            break
        mid = (lo + hi) // 2
        val = np.asarray(rule.predicate(np.where(open_, mid, 0), q, n), dtype=bool)
        hi = np.where(open_ & val, mid, hi)
        lo = np.where(open_ & ~val, mid, lo)
    return hi


def membership_probabilities(rule: ThresholdRule, r, q, n, mode=SamplingMode.MULTINOMIAL) -> np.ndarray:
    """``P(i in Â)`` per symbol when count ``i`` has the Binomial(n, r_i) / Poisson(n r_i) law."""
    mode = SamplingMode(mode)
    r = np.asarray(r, dtype=float)
    q = np.asarray(q, dtype=float)
    kmax = _count_ceiling(r, n, mode)
    k0 = _membership_thresholds(rule, q, n, kmax)
    if mode is SamplingMode.MULTINOMIAL:
        return np.where(k0 > kmax, 0.0, binomial_sf(n, np.clip(r, 0, 1), k0 - 1))
    return np.where(k0 > kmax, 0.0, poisson_sf(n * r, k0 - 1))


def expected_regret_exact(rule: ThresholdRule, ld: LabeledDistribution, n: int,
                          mode=SamplingMode.MULTINOMIAL) -> RegretReport:
    """Exact ``E[l(Â; R, Q)]`` for a coordinatewise rule.

    ``(1/2) [sum_{r_i > q_i} (r_i - q_i) P(i not in Â) + sum_{r_i <= q_i} (q_i - r_i) P(i in Â)]``
    """
    if not ld.balanced:
        raise ValueError("threshold-rule regret assumes P(Y = 1) = 1/2")
    if n > EXACT_MAX_N:
        raise BudgetExceededError(f"n = {n} is beyond the exact budget; use expected_regret_mc")
    r, q = ld.r.probs, ld.q.probs
    p_in = membership_probabilities(rule, r, q, n, mode)
    d = r - q
    terms = np.where(d > 0, d * (1 - p_in), -d * p_in)
    regret = 0.5 * math.fsum(terms.tolist())
    return _report(regret, ld.q, n, RegretMethod.EXACT)


def expected_regret_mc(rule: ThresholdRule, ld: LabeledDistribution, n: int, trials: int, seed=0,
                       mode=SamplingMode.MULTINOMIAL) -> RegretReport:
    """Monte Carlo mean of the realised regret over ``trials`` count draws."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not ld.balanced:
        raise ValueError("threshold-rule regret assumes P(Y = 1) = 1/2")
    mode = SamplingMode(mode)
    rng = _as_generator(seed)
    r, q = ld.r.probs, ld.q.probs
    if mode is SamplingMode.MULTINOMIAL:
        draws = rng.multinomial(n, r / r.sum(), size=trials)
    else:
        draws = rng.poisson(n * r, size=(trials, r.size))
    vals = np.array([regime_regret(rule.predicate(c, q, n), r, q) for c in draws])
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return _report(float(vals.mean()), ld.q, n, RegretMethod.MONTE_CARLO, stderr)


def _erm_symbol_regret(weight, px, eta, n):
    """Excess risk contributed by one symbol under the majority-vote rule."""
    if weight == 0 or px == 0:
        return 0.0
    N = np.arange(n + 1)
    pN = stats.binom.pmf(N, n, px)
    keep = pN > 1e-300
    N, pN = N[keep], pN[keep]
    # ERM picks class 0 iff n1 <= floor(N / 2)
    picks0 = binomial_cdf(N, eta, N // 2)
    wrong = picks0 if eta >= 0.5 else 1.0 - picks0
    return weight * math.fsum((pN * wrong).tolist())


def erm_regret_of(regime: DecisionRegime, ld: LabeledDistribution) -> float:
    """Excess risk of a fixed regime for a joint law with arbitrary class prior."""
    j0, j1 = ld.joint()
    bayes_class0 = j1 < j0      # t*(x) = 1[eta(x) >= 1/2]
    wrong = regime.members != bayes_class0
    return math.fsum(np.abs(j1 - j0)[wrong].tolist())


def expected_regret_erm(ld: LabeledDistribution, n: int, mode=RegretMethod.EXACT,
                        trials: int = 1000, seed=0, max_exact_n: int = EXACT_MAX_N) -> RegretReport:
    """Expected excess risk of the ERM (majority) classifier over ``t*(x) = 1[eta(x) >= 1/2]``.

    Exact mode conditions on the symbol's total count ``N ~ Bin(n, P(x))``;
    given ``N`` the class-1 count is ``Bin(N, eta(x))``.
    """
    mode = RegretMethod(mode)
    px = ld.marginal()
    eta = ld.eta()
    weights = np.abs(2 * eta - 1) * px
    if mode is RegretMethod.EXACT:
        if n > max_exact_n:
            raise BudgetExceededError(f"n = {n} exceeds the exact ERM budget {max_exact_n}")
        regret = math.fsum(_erm_symbol_regret(w, p, e, n) for w, p, e in zip(weights, px, eta))
        return _report(regret, ld.q, n, RegretMethod.EXACT)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = _as_generator(seed)
    j0, j1 = ld.joint()
    cells = np.concatenate([j0, j1])
    draws = rng.multinomial(n, cells / cells.sum(), size=trials)
    S = ld.support_size
    vals = np.array([erm_regret_of(erm_classifier(d[:S], d[S:]), ld) for d in draws])
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return _report(float(vals.mean()), ld.q, n, RegretMethod.MONTE_CARLO, stderr)


def two_sample_rule_regret(regime: DecisionRegime, ld: LabeledDistribution) -> float:
    """Realised regret of a data-dependent regime (balanced classes)."""
    return regime_regret(regime.members, ld.r.probs, ld.q.probs)


def regime_warning(q: FiniteDistribution, n: int) -> str | None:
    """Flag configurations outside ``ln S <= ln n <= ln(sum sqrt(q) ^ q sqrt(n ln n))`` read with constant 1."""
    S = q.support_size
    if n < 2:
        return "n < 2: rate regime undefined"
    upper = float(np.sum(np.minimum(np.sqrt(q.probs), q.probs * math.sqrt(n * math.log(n)))))
    if math.log(S) > math.log(n):
        return f"ln S = {math.log(S):.3f} exceeds ln n = {math.log(n):.3f}"
    if upper <= 0 or math.log(n) > math.log(upper):
        return "ln n exceeds ln(sum_i sqrt(q_i) ^ q_i sqrt(n ln n)) (constant-1 reading)"
    return None
