"""Estimating and achieving fundamental limits on finite alphabets.

Bayes envelopes (entropy, Bayes error), their plug-in, polynomial and
compression-based estimators, the classifiers that achieve them, and a
seeded simulation harness.
"""

from .classify import (MLE_RULE, TQ_RULE, DecisionRegime, RegretReport, ThresholdRule, erm_classifier,
                       expected_regret_erm, expected_regret_exact, expected_regret_mc, mle_classifier,
                       rate_bound, tq_classifier)
from .dist import (DegenerateSampleError, EmpiricalCounts, FiniteDistribution, RngSeed, SamplingMode,
                   empirical_distribution, make_distribution, make_uniform, make_zipf, sample_counts,
                   sample_sequence)
from .envelope import (LabeledDistribution, bayes_error, envelope_regret, kl_divergence, l1_distance,
                       redundancy_bounds, scheffe_set, shannon_entropy)
from .estimate import (AddBeta, EstimateReport, PolyConstants, compression_entropy_estimator,
                       compression_entropy_from_counts, optimal_bayes_error, optimal_entropy_estimator,
                       optimal_l1_estimator, plugin_bayes_error, plugin_entropy, plugin_l1,
                       predictive_distribution, sequential_predictive, two_sample_optimal_l1,
                       two_sample_plugin_l1, two_sample_regime)
from .polyapprox import PolyApprox, chebyshev_interpolant, eval_poly, remez_best_approx

__version__ = "0.1.0"
