"""Acceptance suite: one check per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v`` (the pass/fail lines appear in
the terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import filecmp
import math
import sys

import numpy as np
import pytest

from fundlim import cli
from fundlim.classify import MLE_RULE, TQ_RULE, ThresholdRule, expected_regret_exact
from fundlim.dist import FiniteDistribution, make_uniform, make_zipf, sample_counts
from fundlim.envelope import ALPHA_MAX, LabeledDistribution, redundancy_bounds, shannon_entropy
from fundlim.estimate import compression_entropy_from_counts, plugin_entropy
from fundlim.experiments import (ENLARGEMENT_BASE, FIG_GRID, enlargement_check, enlargement_config, erm_config,
                                 fig1_config, fit_rate_slope, rates_config, run_experiment, summarize)
from fundlim.oracle import LowerBoundPrior, bayes_regret_lower_fixture

# Upper bound at alpha = 0.1 evaluated with mpmath at 40 digits, then frozen.
ALPHA01_LOWER = 0.1056563503152003
ALPHA01_UPPER = 0.2534007814476134
# (1/2)(1 - 1/1000)^1000 from exact rational arithmetic, then frozen.
COUNTEREXAMPLE_MLE = 0.18384771238548203


def _inversions(values):
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


# ---------------------------------------------------------------- checks

def check_1():
    recs = run_experiment(fig1_config(7))
    err = summarize(recs, "abs_error")
    reg = summarize(recs, "regret")
    a = all(err[("optimal", n)][0] < err[("plugin", n)][0] for n in FIG_GRID)
    inv = {m: _inversions([err[(m, n)][0] for n in FIG_GRID]) for m in ("plugin", "optimal")}
    b = all(v <= 1 for v in inv.values())
    slack = []
    for n in FIG_GRID:
        (mq, sq, _), (mm, sm, _) = reg[("t_Q", n)], reg[("t_MLE", n)]
        slack.append(mm + 2 * math.hypot(sq, sm) - mq)
    c = min(slack) >= 0
    detail = (f"(a) optimal<plugin at {sum(err[('optimal', n)][0] < err[('plugin', n)][0] for n in FIG_GRID)}/10; "
              f"(b) inversions plugin={inv['plugin']} optimal={inv['optimal']}; "
              f"(c) min slack {min(slack):.3g}")
    return a and b and c, detail


def check_2():
    S, n = 1001, 1000
    q = FiniteDistribution(np.r_[np.zeros(S - 1), 1.0])
    r = FiniteDistribution(np.r_[np.full(S - 1, 1.0 / n), 0.0])
    ld = LabeledDistribution(r, q)
    mle = expected_regret_exact(MLE_RULE, ld, n).regret
    tq = expected_regret_exact(TQ_RULE, ld, n).regret
    ok = abs(mle - COUNTEREXAMPLE_MLE) <= 1e-10 and abs(tq) <= 1e-12
    return ok, f"t_MLE={mle!r} (|diff|={abs(mle - COUNTEREXAMPLE_MLE):.2g}), t_Q={tq!r}"


def check_3():
    rates = fit_rate_slope(run_experiment(rates_config(7)), "plugin")
    erm = fit_rate_slope(run_experiment(erm_config(7)), "erm")
    ok = abs(rates.slope + 0.5) <= 0.1 and abs(erm.slope + 0.5) <= 0.15
    return ok, f"(a) plug-in slope {rates.slope:.4f}; (b) ERM regret slope {erm.slope:.4f}"


def check_4():
    table = enlargement_check(run_experiment(enlargement_config(7)), base_ns=ENLARGEMENT_BASE)
    ok = all(0.25 <= row.ratio <= 4 for row in table.rows) and not any(r.interpolated for r in table.rows)
    ratios = ", ".join(f"n={r.n}: {r.ratio:.3f}" for r in table.rows)
    return ok, f"ratios {ratios}"


def _bias_sources(S=50):
    two = np.zeros(S)
    two[:2] = (0.9, 0.1)
    return {"uniform": make_uniform(S), "zipf1": make_zipf(S, 1.0), "two-point": FiniteDistribution(two)}


def check_5(trials=10_000, n=200, seed=7):
    ok = True
    parts = []
    for k, (name, p) in enumerate(_bias_sources().items()):
        h = shannon_entropy(p)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(k,))))
        plug = np.empty(trials)
        comp = np.empty(trials)
        for t in range(trials):
            c = sample_counts(p, n, seed=rng)
            plug[t] = plugin_entropy(c).estimate
            comp[t] = compression_entropy_from_counts(c).estimate
        sp = plug.std(ddof=1) / math.sqrt(trials)
        sc = comp.std(ddof=1) / math.sqrt(trials)
        down = plug.mean() <= h + 3 * sp
        up = comp.mean() >= h - 3 * sc
        path = bool(np.all(comp >= plug - 1e-10))
        ok &= down and up and path
        parts.append(f"{name}: H={h:.4f} plug={plug.mean():.4f} comp={comp.mean():.4f} pathwise={path}")
    return ok, "; ".join(parts)


def check_6(trials=200, n=5000, seed=7):
    b = redundancy_bounds(0.1)
    grid = np.linspace(0.001, ALPHA_MAX - 0.001, 100)
    ordered = all(redundancy_bounds(a).lower_bits <= redundancy_bounds(a).upper_bits for a in grid)
    close = abs(b.lower_bits - ALPHA01_LOWER) <= 1e-4 and abs(b.upper_bits - ALPHA01_UPPER) <= 1e-4
    S = round(0.2 * n)
    p = make_uniform(S)
    h = shannon_entropy(p)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    red = np.array([compression_entropy_from_counts(sample_counts(p, n, seed=rng)).estimate - h
                    for _ in range(trials)])
    floor = redundancy_bounds(0.2).lower_bits - 0.02
    ok = close and ordered and red.mean() > floor
    return ok, (f"alpha=0.1 -> {b.lower_bits:.6f}, {b.upper_bits:.6f}; grid ordered={ordered}; "
                f"add-half redundancy {red.mean():.4f} > {floor:.4f}")


def check_7():
    codes = {lem: cli.main(["verify", "--lemma", lem]) for lem in ("6", "8")}
    ok = all(c == 0 for c in codes.values())
    return ok, f"exit codes lemma 6: {codes['6']}, lemma 8: {codes['8']}"


def check_8():
    prior = LowerBoundPrior(make_uniform(10), 100, 0.4)
    rules = {"t_MLE": MLE_RULE, "t_Q": TQ_RULE,
             "all": ThresholdRule.constant(np.ones(10, bool)), "none": ThresholdRule.constant(np.zeros(10, bool))}
    res = {k: bayes_regret_lower_fixture(prior, r) for k, r in rules.items()}
    ok = all(v.holds for v in res.values())
    vals = ", ".join(f"{k}={v.value:.5f}" for k, v in res.items())
    return ok, f"bound {prior.bound():.5f}; {vals}"


def check_9(tmpdir):
    outs = []
    for name, threads in (("a", 1), ("b", 8), ("c", 1)):
        path = str(tmpdir / f"fig1_{name}.csv")
        rc = cli.main(["simulate", "--preset", "fig1", "--seed", "7", "--threads", str(threads), "--out", path])
        if rc != 0:
            return False, f"simulate exited with {rc}"
        outs.append(path)
    same_threads = filecmp.cmp(outs[0], outs[1], shallow=False)
    same_runs = filecmp.cmp(outs[0], outs[2], shallow=False)
    return same_threads and same_runs, f"1 vs 8 threads identical={same_threads}; repeat identical={same_runs}"


# ---------------------------------------------------------------- pytest entry points

def _run(number, check, record_criterion, *args):
    passed, detail = check(*args)
    record_criterion(number, passed, detail)
    assert passed, detail


def test_fig1_ordering_and_monotonicity(record_criterion):
    _run(1, check_1, record_criterion)


def test_mle_counterexample_exact(record_criterion):
    _run(2, check_2, record_criterion)


def test_rate_slopes(record_criterion):
    _run(3, check_3, record_criterion)


def test_enlargement_ratios(record_criterion):
    _run(4, check_4, record_criterion)


@pytest.mark.slow
def test_bias_directions(record_criterion):
    _run(5, check_5, record_criterion)


def test_redundancy_bounds(record_criterion, capsys):
    _run(6, check_6, record_criterion)


def test_lemma_verifiers(record_criterion, capsys):
    _run(7, check_7, record_criterion)


def test_lower_bound_fixture(record_criterion):
    _run(8, check_8, record_criterion)


def test_simulate_is_deterministic(record_criterion, tmp_path, capsys):
    _run(9, check_9, record_criterion, tmp_path)


if __name__ == "__main__":
    import contextlib
    import io
    import pathlib
    import tempfile

    failed = 0
    with tempfile.TemporaryDirectory() as d:
        for k, fn in enumerate((check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8), 1):
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
                passed, detail = fn()
            failed += not passed
            print(f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}")
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            passed, detail = check_9(pathlib.Path(d))
        failed += not passed
        print(f"criterion 9: {'PASS' if passed else 'FAIL'}  {detail}")
    sys.exit(1 if failed else 0)
