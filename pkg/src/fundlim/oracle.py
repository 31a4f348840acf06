"""Exact small-scale checks: tail bounds, Poisson difference bounds, the lower-bound prior.

Everything here evaluates exact binomial/Poisson probabilities rather than
sampling, so a failing check is a real counterexample and not noise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .classify import DecisionRegime, ThresholdRule, membership_probabilities
from .dist import FiniteDistribution, SamplingMode, _as_generator
from .probability import binomial_cdf, binomial_sf, poisson_cdf, poisson_sf

__all__ = [
    "binomial_cdf", "poisson_cdf", "LowerBoundPrior", "LemmaCheckReport", "FixtureResult",
    "verify_poisson_tail", "verify_poisson_difference", "bayes_regret_lower_fixture",
    "DEFAULT_LAMBDAS", "DEFAULT_NS", "oracle_regime",
]

C_MAX = math.sqrt(math.e) / 4
DEFAULT_LAMBDAS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0)
DEFAULT_DELTAS = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0, 1.5, 2.0, 5.0)
DEFAULT_NS = (30, 100, 1000)
DIFFERENCE_GUARD = 5.0
EXHAUSTIVE_MAX_S = 20
# counts are integers; thresholds computed in floating point get this much slack
# in the direction that makes the exact probability larger
_SLACK = 1e-9


@dataclass(frozen=True)
class LemmaCheckReport:
    grid: str
    points: int
    max_ratio_M1: float
    max_ratio_M2: float
    pass_: bool
    worst: tuple = ()

    @property
    def passed(self) -> bool:
        return self.pass_

    def csv_rows(self) -> list[str]:
        return ["grid,points,max_ratio_M1,max_ratio_M2,pass",
                f"{self.grid},{self.points},{self.max_ratio_M1:.17g},{self.max_ratio_M2:.17g},"
                f"{'true' if self.pass_ else 'false'}"]


def _join(values) -> str:
    return " ".join(repr(v) for v in values)


def _laws(lam, ns):
    """(label, P(X >= k), P(X <= k)) for Poisson(lam) and Binomial(n, lam/n), lam <= n."""
    yield ("poisson", lambda k: poisson_sf(lam, k - 1), lambda k: poisson_cdf(lam, k))
    for n in ns:
        if lam <= n:
            p = lam / n
            yield (f"binomial(n={n})", lambda k, n=n, p=p: binomial_sf(n, p, k - 1),
                   lambda k, n=n, p=p: binomial_cdf(n, p, k))


def verify_poisson_tail(lambdas=DEFAULT_LAMBDAS, deltas=DEFAULT_DELTAS, ns=DEFAULT_NS) -> LemmaCheckReport:
    """Check the multiplicative Chernoff tails on a grid, with exact tail probabilities.

    Upper: ``P(X >= (1+d) lam) <= (e^d / (1+d)^(1+d))^lam <= max(e^{-d^2 lam/3}, e^{-d lam/3})``.
    Lower: ``P(X <= (1-d) lam) <= e^{-d^2 lam / 2}``.
    The reported ratios are the largest exact-probability / bound values seen
    for the upper (``M1`` slot) and lower (``M2`` slot) tails; both must be <= 1.
    """
    if any(d <= 0 for d in deltas):
        raise ValueError("delta must be positive")
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("lambda must be positive")
    up_max = lo_max = 0.0
    worst_up = worst_lo = ()
    points = 0
    ok = True
    for lam in lambdas:
        for law, ge, le in _laws(lam, ns):
            for d in deltas:
                points += 1
                k_up = math.ceil((1 + d) * lam - _SLACK)
                p_up = float(ge(k_up))
                chernoff = math.exp(lam * (d - (1 + d) * math.log1p(d)))
                simple = max(math.exp(-d * d * lam / 3), math.exp(-d * lam / 3))
                ok &= p_up <= chernoff * (1 + 1e-12) and chernoff <= simple * (1 + 1e-12)
                if p_up / simple > up_max:
                    up_max, worst_up = p_up / simple, (law, lam, d)
                if d < 1:
                    p_lo = float(le(math.floor((1 - d) * lam + _SLACK)))
                    bound = math.exp(-d * d * lam / 2)
                    ok &= p_lo <= bound * (1 + 1e-12)
                    if p_lo / bound > lo_max:
                        lo_max, worst_lo = p_lo / bound, (law, lam, d)
    grid = f"lambda={_join(lambdas)};delta={_join(deltas)};n={_join(ns)}"
    ok = bool(ok and up_max <= 1 and lo_max <= 1)
    return LemmaCheckReport(grid, points, up_max, lo_max, ok, (worst_up, worst_lo))


def verify_poisson_difference(lambdas=DEFAULT_LAMBDAS, ns=DEFAULT_NS,
                              guard: float = DIFFERENCE_GUARD) -> LemmaCheckReport:
    """Measure the constants in the Poisson/binomial difference bounds.

    Part 1 (``0 <= lam1 <= lam2 <= n``): ``(lam2 - lam1) P(X >= lam2) / min(lam2, sqrt(lam2))``.
    Part 2 (``lam1 >= lam2 >= 1``): ``(lam1 - lam2) P(X <= lam2) / sqrt(lam2)``.
    ``X`` is Poisson(lam1) or Binomial(n, lam1/n). Passes when both maxima are
    finite and at most ``guard``.
    """
    lams = sorted(set(float(v) for v in lambdas) | {0.0})
    m1 = m2 = 0.0
    worst1 = worst2 = ()
    points = 0
    for lam1 in lams:
        laws = list(_laws(lam1, ns)) if lam1 > 0 else [("poisson", lambda k: float(k <= 0), lambda k: 1.0)]
        for law, ge, le in laws:
            nmax = math.inf if law == "poisson" else int(law.split("=")[1].rstrip(")"))
            for lam2 in lams:
                if lam1 <= lam2 <= nmax and lam2 > 0:
                    points += 1
                    lhs = (lam2 - lam1) * float(ge(math.ceil(lam2 - _SLACK)))
                    ratio = lhs / min(lam2, math.sqrt(lam2))
                    if ratio > m1:
                        m1, worst1 = ratio, (law, lam1, lam2)
                if lam1 >= lam2 >= 1:
                    points += 1
                    lhs = (lam1 - lam2) * float(le(math.floor(lam2 + _SLACK)))
                    ratio = lhs / math.sqrt(lam2)
                    if ratio > m2:
                        m2, worst2 = ratio, (law, lam1, lam2)
    grid = f"lambda={_join(lambdas)};n={_join(ns)}"
    ok = bool(math.isfinite(m1) and math.isfinite(m2) and m1 <= guard and m2 <= guard)
    return LemmaCheckReport(grid, points, m1, m2, ok, (worst1, worst2))


@dataclass(frozen=True, eq=False)
class LowerBoundPrior:
    """Perturbations ``R_tau = q + tau * c * delta`` around a known ``q``.

    ``delta_i = q_i`` when ``q_i <= 1/n`` and ``sqrt(q_i / n)`` otherwise; the
    sign vector ``tau`` is uniform on ``{-1, +1}^S``. The ``R_tau`` are
    non-negative but not normalised.
    """

    q: FiniteDistribution
    n: int
    c: float = 0.4

    def __post_init__(self):
        if not 0 < self.c <= C_MAX:
            raise ValueError(f"c must lie in (0, sqrt(e)/4] = (0, {C_MAX:.6f}]")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def support_size(self) -> int:
        return self.q.support_size

    @property
    def delta(self) -> np.ndarray:
        q = self.q.probs
        return self.c * np.where(q <= 1 / self.n, q, np.sqrt(q / self.n))

    def r_tau(self, tau) -> np.ndarray:
        tau = np.asarray(tau)
        if tau.shape != (self.support_size,) or not np.all(np.abs(tau) == 1):
            raise ValueError("tau must be a +-1 vector over the alphabet")
        return self.q.probs + tau * self.delta

    def separation(self) -> float:
        """``L1(R_tau, q)``, the same for every tau."""
        return math.fsum(self.delta.tolist())

    def bound(self) -> float:
        """``(c/8) sum_i min(q_i, sqrt(q_i/n))``."""
        q = self.q.probs
        return self.c / 8 * math.fsum(np.minimum(q, np.sqrt(q / self.n)).tolist())

    def all_taus(self):
        if self.support_size > EXHAUSTIVE_MAX_S:
            raise ValueError(f"exhaustive tau enumeration is limited to S <= {EXHAUSTIVE_MAX_S}")
        for t in itertools.product((-1, 1), repeat=self.support_size):
            yield np.array(t)

    def sample_taus(self, k: int, seed=0) -> np.ndarray:
        rng = _as_generator(seed)
        return rng.choice(np.array([-1, 1]), size=(k, self.support_size))


@dataclass(frozen=True)
class FixtureResult:
    value: float
    stderr: float
    bound: float
    taus: int

    @property
    def holds(self) -> bool:
        return self.value >= self.bound - 3 * self.stderr


def _regret_given_tau(prior: LowerBoundPrior, rule, tau) -> float:
    r = prior.r_tau(tau)
    q = prior.q.probs
    d = r - q
    if isinstance(rule, ThresholdRule):
        p_in = membership_probabilities(rule, r, q, prior.n, SamplingMode.POISSONIZED)
    elif callable(rule):
        # a per-tau regime (e.g. the oracle Bayes regime); not count-measurable
        p_in = np.asarray(getattr(rule(r, q), "members", rule(r, q)), dtype=float)
    else:
        raise TypeError("rule must be a ThresholdRule or a callable (r, q) -> regime")
    terms = np.where(d > 0, d * (1 - p_in), -d * p_in)
    return 0.5 * math.fsum(terms.tolist())


def oracle_regime(r, q) -> DecisionRegime:
    """The Bayes regime of each ``R_tau``; it sees ``tau``, so it is not a count-based rule."""
    return DecisionRegime(np.asarray(r) > np.asarray(q))


def bayes_regret_lower_fixture(prior: LowerBoundPrior, rule, mode: str = "exact", taus: int = 2000,
                               seed=0) -> FixtureResult:
    """Average over tau of the exact Poissonized expected regret of ``rule``.

    ``mode="exact"`` enumerates every tau (``S <= 20``); ``"monte_carlo"``
    averages over ``taus`` sampled sign vectors and reports the standard error.
    """
    if mode == "exact":
        vals = [_regret_given_tau(prior, rule, t) for t in prior.all_taus()]
        return FixtureResult(math.fsum(vals) / len(vals), 0.0, prior.bound(), len(vals))
    if mode == "monte_carlo":
        if taus < 2:
            raise ValueError("need at least two sampled tau vectors")
        vals = np.array([_regret_given_tau(prior, rule, t) for t in prior.sample_taus(taus, seed)])
        return FixtureResult(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(taus)),
                             prior.bound(), taus)
    raise ValueError("mode must be 'exact' or 'monte_carlo'")
