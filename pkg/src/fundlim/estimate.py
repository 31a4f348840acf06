"""Estimators of the Bayes envelope: plug-in, polynomial-approximation and compression.

The polynomial ("optimal") estimators replace a non-smooth functional near
its kink by its best uniform polynomial approximation and estimate that
polynomial without bias from the counts. Powers of ``(p - c)/W`` have
unbiased count statistics given by a three-term recurrence (Krawtchouk
polynomials under multinomial sampling, Charlier polynomials under
Poissonization), which is numerically far better behaved than expanding
falling factorials in the monomial basis.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln, xlogy

from .classify import DecisionRegime
from .dist import (DegenerateSampleError, EmpiricalCounts, FiniteDistribution, SamplingMode,
                   _as_generator, empirical_distribution)
from .envelope import LabeledDistribution, bayes_error
from .polyapprox import MAX_DEGREE, remez_best_approx

LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class EstimateReport:
    """One estimate; ``pre_clamp`` keeps the value before range clamping."""

    estimate: float
    estimator_id: str
    truth: float | None = None
    abs_error: float | None = None
    pre_clamp: float | None = None

    def __post_init__(self):
        if self.pre_clamp is None:
            object.__setattr__(self, "pre_clamp", self.estimate)
        if self.truth is not None and self.abs_error is None:
            object.__setattr__(self, "abs_error", abs(self.estimate - self.truth))

    def with_truth(self, truth: float) -> "EstimateReport":
        return replace(self, truth=float(truth), abs_error=abs(self.estimate - float(truth)))

    @property
    def clamped(self) -> bool:
        return self.pre_clamp != self.estimate


@dataclass(frozen=True)
class PolyConstants:
    """Tuning of a polynomial estimator.

    ``c1`` sets the decision threshold between the polynomial and plug-in
    regimes, ``c2`` the approximation interval and ``degree_factor`` the
    degree ``ceil(degree_factor * ln n)``.
    """

    c1: float
    c2: float
    degree_factor: float
    max_degree: int = 40

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0 or self.degree_factor <= 0:
            raise ValueError("estimator constants must be positive")
        if not 1 <= self.max_degree <= MAX_DEGREE:
            raise ValueError(f"max_degree must lie in 1..{MAX_DEGREE}")

    def degree(self, n: int) -> int:
        return int(min(self.max_degree, max(1, math.ceil(self.degree_factor * math.log(n)))))


L1_CONSTANTS = PolyConstants(c1=2.0, c2=6.0, degree_factor=0.7)
ENTROPY_CONSTANTS = PolyConstants(c1=2.0, c2=4.0, degree_factor=1.5)


# ---------------------------------------------------------------- moments

def unbiased_powers(x, n: int, center, width, degree: int, mode=SamplingMode.MULTINOMIAL) -> np.ndarray:
    """Unbiased estimates of ``((p - center)/width)**k`` for ``k = 0..degree``.

    ``x`` holds counts distributed as Binomial(n, p) (or Poisson(n p)), one
    per row; ``center`` and ``width`` broadcast against ``x``. The result has
    shape ``x.shape + (degree + 1,)``.
    """
    mode = SamplingMode(mode)
    x = np.asarray(x, dtype=float)
    c = np.broadcast_to(np.asarray(center, dtype=float), x.shape)
    w = np.broadcast_to(np.asarray(width, dtype=float), x.shape)
    if mode is SamplingMode.MULTINOMIAL and degree > n:
        raise ValueError("a binomial sample of size n has no unbiased estimate of degree > n")
    d = np.zeros(x.shape + (degree + 1,))
    d[..., 0] = 1.0
    if degree >= 1:
        d[..., 1] = (x / n - c) / w
    for k in range(1, degree):
        if mode is SamplingMode.POISSONIZED:
            d[..., k + 1] = ((x - n * c - k) * d[..., k] - k * c * d[..., k - 1] / w) / (n * w)
        else:
            d[..., k + 1] = (((x - n * c + (2 * c - 1) * k) * d[..., k]
                              - c * (1 - c) * k * d[..., k - 1] / w) / ((n - k) * w))
    return d


@functools.lru_cache(maxsize=4096)
def _abs_coeffs(t0: float, degree: int) -> np.ndarray:
    """Monomial coefficients in ``u - t0`` of the best approximation of ``|u - t0|`` on [0, 1]."""
    bp = (t0,) if 0 < t0 < 1 else ()
    p = remez_best_approx(lambda u: np.abs(u - t0), (0.0, 1.0), degree, breakpoints=bp)
    return p.to_monomial(center=t0, scale=1.0)


@functools.lru_cache(maxsize=256)
def _sym_abs_coeffs(degree: int) -> np.ndarray:
    """Monomial coefficients of the best approximation of ``|v|`` on [-1, 1]."""
    p = remez_best_approx(np.abs, (-1.0, 1.0), degree, breakpoints=(0.0,))
    return p.to_monomial()


@functools.lru_cache(maxsize=256)
def _entropy_coeffs(degree: int) -> np.ndarray:
    """Monomial coefficients of the best approximation of ``-u ln u`` on [0, 1]."""
    p = remez_best_approx(lambda u: -xlogy(u, u), (0.0, 1.0), degree)
    return p.to_monomial()


def _split(counts: EmpiricalCounts, seed):
    """Two independent halves of the sample: hypergeometric split or Poisson thinning."""
    rng = _as_generator(seed)
    x = counts.counts.astype(np.int64)
    n1 = counts.nominal_n // 2
    if counts.mode is SamplingMode.MULTINOMIAL:
        x1 = rng.multivariate_hypergeometric(x, n1)
    else:
        x1 = rng.binomial(x, 0.5)
        n1 = counts.nominal_n / 2
    return x1, n1, x - x1, counts.nominal_n - n1


def _check_n(n: int) -> None:
    if n < 4:
        raise ValueError("the polynomial estimators need n >= 4")


# ---------------------------------------------------------------- L1 / Bayes error

def plugin_l1(counts: EmpiricalCounts, q: FiniteDistribution) -> EstimateReport:
    if counts.support_size != q.support_size:
        raise ValueError("counts and q have different support sizes")
    if counts.nominal_n == 0:
        raise DegenerateSampleError("empty sample")
    v = math.fsum(np.abs(counts.counts / counts.nominal_n - q.probs).tolist())
    return EstimateReport(v, "plugin")


def plugin_bayes_error(counts: EmpiricalCounts, q: FiniteDistribution) -> EstimateReport:
    """Bayes error of (empirical distribution, q) with equal priors."""
    if counts.support_size != q.support_size:
        raise ValueError("counts and q have different support sizes")
    emp = empirical_distribution(counts)
    if emp.relaxed:
        return EstimateReport(0.5 - plugin_l1(counts, q).estimate / 4, "plugin")
    return EstimateReport(bayes_error(LabeledDistribution(emp, q)), "plugin")


def _l1_windows(q, n, c):
    ln = math.log(n)
    s = np.maximum(q, ln / n)
    width = np.sqrt(c.c2 * s * ln / n)
    decide = np.sqrt(c.c1 * s * ln / n)
    lo = np.maximum(0.0, q - width)
    return lo, q + width, width, decide


def _l1_poly_terms(x, n, qi, constants, degree, mode):
    lo, hi, width, _ = _l1_windows(np.array([qi]), n, constants)
    length = float(hi[0] - lo[0])
    t0 = round(float((qi - lo[0]) / length), 9)
    a = _abs_coeffs(t0, degree)
    # the coefficients are in powers of (u - t0) = (p - q) / length
    w = float(width[0])
    a = a * (w / length) ** np.arange(degree + 1)
    return length * (unbiased_powers(x, n, qi, w, degree, mode) @ a)


def optimal_l1_estimator(counts: EmpiricalCounts, q: FiniteDistribution, n: int | None = None,
                         constants: PolyConstants = L1_CONSTANTS, split: bool = False,
                         seed=0) -> EstimateReport:
    """Polynomial-approximation estimate of ``||p - q||_1`` from counts of ``p``.

    For each symbol the approximation window is centred at ``q_i`` with half
    width ``sqrt(c2 s ln n / n)``, ``s = max(q_i, ln n / n)``. Counts whose
    frequency falls within ``sqrt(c1 s ln n / n)`` of ``q_i`` are estimated by
    the unbiased statistic of the best polynomial approximation of
    ``|p - q_i|`` on that window; the rest use ``|x_i / n - q_i|``, which is
    already unbiased away from the kink. With ``split=True`` the regime is
    chosen from one half of the sample and the estimate taken on the other.
    """
    if counts.support_size != q.support_size:
        raise ValueError("counts and q have different support sizes")
    n = counts.nominal_n if n is None else int(n)
    if n != counts.nominal_n:
        raise ValueError("n must equal the nominal sample size of the counts")
    _check_n(n)
    qv = q.probs
    if split:
        x_dec, n_dec, x_est, n_est = _split(counts, seed)
    else:
        x_dec, n_dec, x_est, n_est = counts.counts, n, counts.counts, n
    _check_n(n_est)
    n_est_i = int(round(n_est))
    degree = constants.degree(n_est_i)
    if counts.mode is SamplingMode.MULTINOMIAL:
        degree = min(degree, n_est_i)
    _, _, _, decide = _l1_windows(qv, n_dec, constants)
    near = np.abs(x_dec / n_dec - qv) <= decide
    x_est = np.asarray(x_est, dtype=float)
    terms = np.abs(x_est / n_est - qv)
    for qi in np.unique(qv[near]):
        idx = near & (qv == qi)
        terms[idx] = _l1_poly_terms(x_est[idx], n_est_i, float(qi), constants, degree, counts.mode)
    raw = math.fsum(terms.tolist())
    return EstimateReport(min(max(raw, 0.0), 2.0), "optimal", pre_clamp=raw)


def optimal_bayes_error(counts: EmpiricalCounts, q: FiniteDistribution, n: int | None = None,
                        **kwargs) -> EstimateReport:
    l1 = optimal_l1_estimator(counts, q, n, **kwargs)
    raw = 0.5 - l1.pre_clamp / 4
    return EstimateReport(min(max(raw, 0.0), 0.5), "optimal", pre_clamp=raw)


# ---------------------------------------------------------------- entropy

def plugin_entropy(counts: EmpiricalCounts) -> EstimateReport:
    """Entropy (bits) of the empirical distribution."""
    total = counts.total
    if total == 0:
        raise DegenerateSampleError("counts total must be positive")
    p = counts.counts[counts.counts > 0] / total
    h = -math.fsum((p * np.log2(p)).tolist())
    return EstimateReport(min(max(h, 0.0), math.log2(counts.support_size)), "plugin")


def optimal_entropy_estimator(counts: EmpiricalCounts, n: int | None = None,
                              constants: PolyConstants = ENTROPY_CONSTANTS, split: bool = False,
                              seed=0) -> EstimateReport:
    """Polynomial-approximation entropy estimate in bits.

    Symbols with at most ``c1 ln n`` occurrences contribute the unbiased
    estimate of the best polynomial approximation of ``-p ln p`` on
    ``[0, c2 ln n / n]``; the others contribute ``-p_hat lg p_hat`` plus the
    first-order bias correction ``(1 - p_hat) lg(e) / (2n)``.
    """
    n = counts.nominal_n if n is None else int(n)
    if n != counts.nominal_n:
        raise ValueError("n must equal the nominal sample size of the counts")
    _check_n(n)
    if split:
        x_dec, n_dec, x_est, n_est = _split(counts, seed)
    else:
        x_dec, n_dec, x_est, n_est = counts.counts, n, counts.counts, n
    _check_n(n_est)
    n_est_i = int(round(n_est))
    ln = math.log(n_est)
    degree = constants.degree(n_est_i)
    if counts.mode is SamplingMode.MULTINOMIAL:
        degree = min(degree, n_est_i)
    delta = min(1.0, constants.c2 * ln / n_est)
    small = x_dec * (n_est / n_dec) <= constants.c1 * ln
    x_est = np.asarray(x_est, dtype=float)
    ph = x_est / n_est
    terms = -xlogy(ph, ph) + (1.0 - ph) / (2 * n_est)
    if np.any(small):
        a = _entropy_coeffs(degree)
        d = unbiased_powers(x_est[small], n_est_i, 0.0, delta, degree, counts.mode)
        # -p ln p = delta * (-u ln u) - p ln delta with p = delta * u
        terms[small] = delta * (d @ a) - delta * d[:, 1] * math.log(delta)
    raw = math.fsum(terms.tolist()) * LOG2E
    hi = math.log2(counts.support_size)
    return EstimateReport(min(max(raw, 0.0), hi), "optimal", pre_clamp=raw)


# ---------------------------------------------------------------- compression

@dataclass
class AddBeta:
    """Add-beta sequential probability assignment over ``{0..S-1}``.

    The running count vector is per-sequence state; use :meth:`fresh` to get
    an independent copy for another sequence.
    """

    support_size: int
    beta: float = 0.5

    def __post_init__(self):
        if self.support_size < 1:
            raise ValueError("support size must be at least 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        self.counts = np.zeros(self.support_size, dtype=np.int64)

    @property
    def seen(self) -> int:
        return int(self.counts.sum())

    def fresh(self) -> "AddBeta":
        return AddBeta(self.support_size, self.beta)

    def probabilities(self) -> np.ndarray:
        return (self.counts + self.beta) / (self.seen + self.support_size * self.beta)

    def predict(self, x: int) -> float:
        return sequential_predictive(self, self.counts, x)

    def update(self, x: int) -> None:
        self.counts[x] += 1


CodingScheme = AddBeta


def sequential_predictive(scheme: AddBeta, history_counts, x: int) -> float:
    """``(count_x + beta) / (i - 1 + S beta)`` after ``i - 1`` symbols."""
    h = np.asarray(history_counts)
    if h.shape != (scheme.support_size,):
        raise ValueError("history counts must cover the whole alphabet")
    if not 0 <= x < scheme.support_size:
        raise ValueError("symbol out of range")
    return float((h[x] + scheme.beta) / (h.sum() + scheme.support_size * scheme.beta))


def compression_code_length(sequence, scheme: AddBeta) -> np.ndarray:
    """Per-symbol ideal code lengths ``-lg Q(x_i | x^{i-1})`` (bits)."""
    x = np.asarray(sequence, dtype=np.int64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("sequence must be a non-empty 1-d array")
    if x.min() < 0 or x.max() >= scheme.support_size:
        raise ValueError("symbols must lie in 0..S-1")
    # number of earlier occurrences of x_i, via a stable sort by symbol
    order = np.argsort(x, kind="stable")
    xs = x[order]
    starts = np.r_[0, np.flatnonzero(np.diff(xs)) + 1]
    run = np.arange(x.size) - np.repeat(starts, np.diff(np.r_[starts, x.size]))
    prior = np.empty_like(run)
    prior[order] = run
    start = scheme.counts[x]
    i = np.arange(x.size) + scheme.seen
    prob = (prior + start + scheme.beta) / (i + scheme.support_size * scheme.beta)
    return -np.log2(prob)


def compression_entropy_estimator(sequence, scheme: AddBeta | None = None,
                                  support_size: int | None = None) -> EstimateReport:
    """Per-symbol code length of the sequence under the add-beta mixture (bits)."""
    if scheme is None:
        if support_size is None:
            raise ValueError("give a scheme or a support size")
        scheme = AddBeta(support_size)
    bits = compression_code_length(sequence, scheme)
    return EstimateReport(math.fsum(bits.tolist()) / bits.size, "compression")


def compression_entropy_from_counts(counts: EmpiricalCounts, beta: float = 0.5) -> EstimateReport:
    """Same value as :func:`compression_entropy_estimator`, from counts alone.

    The add-beta mixture is exchangeable, so the sequence probability is
    ``prod_x G(c_x + b)/G(b) * G(S b)/G(n + S b)``.
    """
    c = counts.counts.astype(float)
    n = c.sum()
    if n == 0:
        raise DegenerateSampleError("counts total must be positive")
    S = c.size
    log_prob = (np.sum(gammaln(c + beta)) - S * gammaln(beta)
                + gammaln(S * beta) - gammaln(n + S * beta))
    return EstimateReport(float(-log_prob * LOG2E / n), "compression")


def predictive_distribution(counts: EmpiricalCounts, beta: float = 0.5) -> FiniteDistribution:
    """``(counts_i + beta) / (n + S beta)``: never assigns zero probability."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    c = counts.counts.astype(float)
    p = (c + beta) / (c.sum() + c.size * beta)
    return FiniteDistribution(p / p.sum())


# ---------------------------------------------------------------- two unknown distributions

def _two_sample_check(counts_r: EmpiricalCounts, counts_q: EmpiricalCounts):
    if counts_r.support_size != counts_q.support_size:
        raise ValueError("count vectors have different support sizes")
    if counts_r.nominal_n == 0 or counts_q.nominal_n == 0:
        raise DegenerateSampleError("empty sample")


def two_sample_plugin_l1(counts_r: EmpiricalCounts, counts_q: EmpiricalCounts) -> EstimateReport:
    _two_sample_check(counts_r, counts_q)
    d = counts_r.counts / counts_r.nominal_n - counts_q.counts / counts_q.nominal_n
    return EstimateReport(math.fsum(np.abs(d).tolist()), "two_sample_plugin")


def two_sample_regime(counts_r: EmpiricalCounts, counts_q: EmpiricalCounts) -> DecisionRegime:
    """Empirical Scheffé regime ``{i : r_hat_i > q_hat_i}``."""
    _two_sample_check(counts_r, counts_q)
    return DecisionRegime(counts_r.counts / counts_r.nominal_n > counts_q.counts / counts_q.nominal_n)


def two_sample_optimal_l1(counts_r: EmpiricalCounts, counts_q: EmpiricalCounts,
                          constants: PolyConstants = L1_CONSTANTS) -> EstimateReport:
    """Polynomial estimate of ``||r - q||_1`` when both laws are only sampled.

    Near-tied symbols use the best approximation of ``|v|`` on [-1, 1] with
    ``v = (r_i - q_i) / W``; powers of ``v`` are assembled from the two
    independent samples' unbiased powers around the pooled frequency.
    """
    _two_sample_check(counts_r, counts_q)
    n, m = counts_r.nominal_n, counts_q.nominal_n
    N = min(n, m)
    _check_n(N)
    x = counts_r.counts.astype(float)
    y = counts_q.counts.astype(float)
    ln = math.log(N)
    center = (x + y) / (n + m)
    s = np.maximum(center, ln / N)
    width = np.sqrt(2 * constants.c2 * s * ln / N)
    decide = np.sqrt(2 * constants.c1 * s * ln / N)
    diff = x / n - y / m
    terms = np.abs(diff)
    near = np.abs(diff) <= decide
    if np.any(near):
        degree = constants.degree(N)
        if counts_r.mode is SamplingMode.MULTINOMIAL:
            degree = min(degree, N)
        a = _sym_abs_coeffs(degree)
        c, w = center[near], width[near]
        dr = unbiased_powers(x[near], n, c, w, degree, counts_r.mode)
        dq = unbiased_powers(y[near], m, c, w, degree, counts_q.mode)
        dq = dq * (-1.0) ** np.arange(degree + 1)
        binom = np.array([[math.comb(k, j) for j in range(degree + 1)] for k in range(degree + 1)])
        vk = np.zeros_like(dr)
        for k in range(degree + 1):
            j = np.arange(k + 1)
            vk[:, k] = (binom[k, j] * dr[:, j] * dq[:, k - j]).sum(axis=1)
        terms[near] = w * (vk @ a)
    raw = math.fsum(terms.tolist())
    return EstimateReport(min(max(raw, 0.0), 2.0), "two_sample_optimal", pre_clamp=raw)
