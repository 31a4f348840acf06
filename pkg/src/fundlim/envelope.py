"""Bayes envelopes on finite alphabets and the large-alphabet redundancy bounds.

All information quantities are in bits. Sums go through :func:`math.fsum`
(exactly rounded), which is at least as accurate as Kahan summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import FiniteDistribution

ALPHA_MAX = math.e / (2 * math.pi)


class InfiniteDivergenceError(ValueError):
    """KL divergence is infinite: ``p`` puts mass where ``q`` has none."""


def _fsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _check_same_support(p: FiniteDistribution, q: FiniteDistribution) -> None:
    if p.support_size != q.support_size:
        raise ValueError(f"support sizes differ: {p.support_size} vs {q.support_size}")


@dataclass(frozen=True)
class LabeledDistribution:
    """Joint law of (X, Y) given by the two class conditionals and P(Y = 1).

    ``r`` is the law of X given Y = 0, ``q`` the law of X given Y = 1.
    """

    r: FiniteDistribution
    q: FiniteDistribution
    prior1: float = 0.5

    def __post_init__(self):
        _check_same_support(self.r, self.q)
        if not 0.0 <= self.prior1 <= 1.0:
            raise ValueError("prior1 must lie in [0, 1]")

    @classmethod
    def from_marginal(cls, px: FiniteDistribution, eta) -> "LabeledDistribution":
        """Build from the feature marginal and ``eta(x) = P(Y=1 | X=x)``."""
        eta = np.asarray(eta, dtype=float)
        if eta.shape != px.probs.shape or np.any((eta < 0) | (eta > 1)):
            raise ValueError("eta must be a vector in [0, 1] matching the support")
        joint1 = px.probs * eta
        joint0 = px.probs * (1 - eta)
        prior1 = float(joint1.sum())
        S = px.support_size
        r = joint0 / joint0.sum() if joint0.sum() > 0 else np.full(S, 1.0 / S)
        q = joint1 / joint1.sum() if joint1.sum() > 0 else np.full(S, 1.0 / S)
        return cls(FiniteDistribution(r / r.sum()), FiniteDistribution(q / q.sum()), prior1)

    @property
    def support_size(self) -> int:
        return self.r.support_size

    @property
    def balanced(self) -> bool:
        return self.prior1 == 0.5

    def joint(self) -> tuple[np.ndarray, np.ndarray]:
        """``(P(X=x, Y=0), P(X=x, Y=1))`` as two vectors."""
        return (1 - self.prior1) * self.r.probs, self.prior1 * self.q.probs

    def marginal(self) -> np.ndarray:
        j0, j1 = self.joint()
        return j0 + j1

    def eta(self) -> np.ndarray:
        j0, j1 = self.joint()
        px = j0 + j1
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(px > 0, j1 / np.where(px > 0, px, 1), 0.5)


@dataclass(frozen=True)
class RedundancyBounds:
    alpha: float
    lower_bits: float
    upper_bits: float
    c_alpha: float
    b_alpha: float


def shannon_entropy(p: FiniteDistribution) -> float:
    """Shannon entropy in bits, with ``0 lg(1/0) = 0``."""
    p.require_strict("shannon_entropy")
    x = p.probs[p.probs > 0]
    h = _fsum(-x * np.log2(x))
    return min(max(h, 0.0), math.log2(p.support_size))


def l1_distance(p: FiniteDistribution, q: FiniteDistribution) -> float:
    _check_same_support(p, q)
    return _fsum(np.abs(p.probs - q.probs))


def bayes_error(ld: LabeledDistribution) -> float:
    """Minimum misclassification probability ``E[min(eta, 1 - eta)]``."""
    if ld.balanced:
        return 0.5 - l1_distance(ld.r, ld.q) / 4
    j0, j1 = ld.joint()
    return _fsum(np.minimum(j0, j1))


def kl_divergence(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """``D(p || q)`` in bits. Raises when ``p`` is not absolutely continuous wrt ``q``."""
    _check_same_support(p, q)
    mask = p.probs > 0
    if np.any(q.probs[mask] == 0):
        raise InfiniteDivergenceError("p has mass on a symbol where q is zero")
    pp, qq = p.probs[mask], q.probs[mask]
    return max(_fsum(pp * np.log2(pp / qq)), 0.0)


def redundancy_bounds(alpha: float) -> RedundancyBounds:
    """Per-symbol minimax redundancy bounds (bits) when ``S = alpha * n``."""
    if not 0 < alpha < ALPHA_MAX:
        raise ValueError(f"alpha must lie in (0, e/(2 pi)) = (0, {ALPHA_MAX:.6f})")
    lower = alpha / 2 * math.log2(math.e / (2 * math.pi * alpha))
    c = 0.5 + 0.5 * math.sqrt(1 + 4 / alpha)
    b = alpha * c ** (alpha + 2) * math.exp(-1 / c)
    return RedundancyBounds(alpha, lower, math.log2(b), c, b)


def scheffe_set(r: FiniteDistribution, q: FiniteDistribution) -> np.ndarray:
    """Boolean mask of ``{i : r_i > q_i}``."""
    _check_same_support(r, q)
    return r.probs > q.probs


def regime_regret(members, r, q) -> float:
    """Excess risk of the class-0 regime ``members`` for conditionals ``r``, ``q``.

    Uses ``(1/2) sum_i (r_i - q_i) (1[i in A] - 1[i in members])``, which is
    non-negative term by term and equals ``L1/4 - (R(Â) - Q(Â))/2`` whenever
    ``r`` and ``q`` carry the same total mass.
    """
    r = np.asarray(r, dtype=float)
    q = np.asarray(q, dtype=float)
    m = np.asarray(members, dtype=bool)
    d = r - q
    wrong = (d > 0) != m
    return 0.5 * _fsum(np.abs(d[wrong]))


def envelope_regret(regime, ld: LabeledDistribution) -> float:
    """Exact excess risk of ``t(x) = 1[x not in regime]`` over the Bayes classifier."""
    if not ld.balanced:
        raise ValueError("envelope_regret assumes P(Y = 1) = 1/2")
    members = getattr(regime, "members", regime)
    members = np.asarray(members, dtype=bool)
    if members.shape != (ld.support_size,):
        raise ValueError("regime length does not match the alphabet")
    return regime_regret(members, ld.r.probs, ld.q.probs)
