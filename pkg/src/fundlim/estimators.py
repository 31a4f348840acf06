"""scikit-learn style wrappers.

Samples are integer symbols in ``0..S-1`` given as a 1-d array or a single
column. The functional estimators learn nothing beyond the counts, so
``fit`` stores the counts and the estimate; ``predict`` on the classifiers
maps symbols to labels through the learned decision regime.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import estimate as est
from .classify import erm_classifier, mle_classifier, tq_classifier
from .dist import EmpiricalCounts, FiniteDistribution

__all__ = ["EntropyEstimator", "BayesErrorEstimator", "ThresholdClassifier", "ERMClassifier"]


def _symbols(X, support_size=None, *, allow_empty=False):
    X = check_array(X, ensure_2d=False, dtype=None, ensure_min_samples=0 if allow_empty else 1)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError("expected a single column of symbols")
        X = X[:, 0]
    if X.size and not np.all(np.equal(np.mod(X, 1), 0)):
        raise ValueError("symbols must be integers")
    X = X.astype(np.int64)
    if X.size and X.min() < 0:
        raise ValueError("symbols must be non-negative")
    if support_size is not None and X.size and X.max() >= support_size:
        raise ValueError(f"symbol {int(X.max())} is outside the alphabet of size {support_size}")
    return X


def _as_q(q) -> FiniteDistribution:
    return q if isinstance(q, FiniteDistribution) else FiniteDistribution(np.asarray(q, dtype=float))


class EntropyEstimator(BaseEstimator):
    """Shannon entropy (bits) of the source that generated ``X``.

    ``method`` is ``"plugin"``, ``"optimal"`` or ``"compression"`` (add-beta
    mixture with ``beta``).
    """

    def __init__(self, support_size=None, method="optimal", beta=0.5):
        self.support_size = support_size
        self.method = method
        self.beta = beta

    def fit(self, X, y=None):
        x = _symbols(X, self.support_size)
        S = self.support_size if self.support_size is not None else int(x.max()) + 1
        self.counts_ = EmpiricalCounts.from_sequence(x, S)
        if self.method == "plugin":
            rep = est.plugin_entropy(self.counts_)
        elif self.method == "optimal":
            rep = est.optimal_entropy_estimator(self.counts_)
        elif self.method == "compression":
            rep = est.compression_entropy_estimator(x, est.AddBeta(S, self.beta))
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.report_ = rep
        self.entropy_ = rep.estimate
        return self

    def predict(self, X=None):
        check_is_fitted(self, "entropy_")
        return self.entropy_


class BayesErrorEstimator(BaseEstimator):
    """Bayes error of the balanced problem (source of ``X``, known ``q``)."""

    def __init__(self, q=None, method="optimal", split=False, random_state=0):
        self.q = q
        self.method = method
        self.split = split
        self.random_state = random_state

    def fit(self, X, y=None):
        if self.q is None:
            raise ValueError("q must be given")
        q = _as_q(self.q)
        x = _symbols(X, q.support_size)
        self.counts_ = EmpiricalCounts.from_sequence(x, q.support_size)
        if self.method == "plugin":
            l1 = est.plugin_l1(self.counts_, q)
            be = est.plugin_bayes_error(self.counts_, q)
        elif self.method == "optimal":
            l1 = est.optimal_l1_estimator(self.counts_, q, split=self.split, seed=self.random_state)
            raw = 0.5 - l1.pre_clamp / 4
            be = est.EstimateReport(min(max(raw, 0.0), 0.5), "optimal", pre_clamp=raw)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.l1_ = l1.estimate
        self.bayes_error_ = be.estimate
        self.report_ = be
        return self

    def predict(self, X=None):
        check_is_fitted(self, "bayes_error_")
        return self.bayes_error_


class ThresholdClassifier(ClassifierMixin, BaseEstimator):
    """Class-0 regime learned from class-0 samples ``X`` with a known class-1 law ``q``.

    ``rule="t_Q"`` adds every symbol with ``q_i < 1/n`` to the regime;
    ``rule="t_MLE"`` uses ``{x_i / n > q_i}`` only. ``predict`` returns
    ``0`` on the regime and ``1`` elsewhere.
    """

    def __init__(self, q=None, rule="t_Q"):
        self.q = q
        self.rule = rule

    def fit(self, X, y=None):
        if self.q is None:
            raise ValueError("q must be given")
        q = _as_q(self.q)
        x = _symbols(X, q.support_size)
        counts = EmpiricalCounts.from_sequence(x, q.support_size)
        if self.rule == "t_Q":
            self.regime_ = tq_classifier(counts, q, counts.nominal_n)
        elif self.rule == "t_MLE":
            self.regime_ = mle_classifier(counts, q)
        else:
            raise ValueError(f"unknown rule {self.rule!r}")
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "regime_")
        x = _symbols(X, len(self.regime_.members), allow_empty=True)
        return np.asarray(self.regime_.predict(x), dtype=int)


class ERMClassifier(ClassifierMixin, BaseEstimator):
    """Majority vote per symbol; ties and unseen symbols go to class 0."""

    def __init__(self, support_size=None):
        self.support_size = support_size

    def fit(self, X, y):
        X, y = check_X_y(np.asarray(X).reshape(len(X), -1), y, dtype=None)
        x = _symbols(X, self.support_size)
        labels = unique_labels(y)
        if not set(labels.tolist()) <= {0, 1}:
            raise ValueError("labels must be 0 or 1")
        S = self.support_size if self.support_size is not None else int(x.max()) + 1
        y = np.asarray(y, dtype=np.int64)
        n0 = np.bincount(x[y == 0], minlength=S)
        n1 = np.bincount(x[y == 1], minlength=S)
        self.regime_ = erm_classifier(n0, n1)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "regime_")
        x = _symbols(X, len(self.regime_.members), allow_empty=True)
        return np.asarray(self.regime_.predict(x), dtype=int)
