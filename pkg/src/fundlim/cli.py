"""Command-line front end.

stdout carries only CSV or a single number; diagnostics go to stderr.
Exit codes: 0 success, 1 invalid input, 2 runtime failure (including a
failed lemma verification).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import estimate as est
from .dist import EmpiricalCounts, FiniteDistribution
from .envelope import ALPHA_MAX, redundancy_bounds
from .experiments import (PRESETS, ConfigError, emit_csv, enlargement_check, fit_rate_slope, load_config,
                          read_csv, run_experiment, summarize, write_sidecar)
from .oracle import DEFAULT_DELTAS, DEFAULT_LAMBDAS, DEFAULT_NS, verify_poisson_difference, verify_poisson_tail

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; this tool reserves 2 for runtime failures
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(v) -> str:
    return repr(float(v))


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_lines(path, parse, what):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc.strerror}") from exc
    while raw and not raw[-1].strip():
        raw.pop()
    out = []
    for i, line in enumerate(raw, 1):
        s = line.strip()
        try:
            out.append(parse(s))
        except ValueError:
            raise UsageError(f"{path}: line {i}: expected {what}, got {s!r}") from None
    if not out:
        raise UsageError(f"{path}: no values")
    return out


def _count(s: str) -> int:
    v = int(s)
    if v < 0:
        raise ValueError
    return v


def _prob(s: str) -> float:
    v = float(s)
    if not (math.isfinite(v) and v >= 0):
        raise ValueError
    return v


# ---------------------------------------------------------------- subcommands

def cmd_simulate(args) -> int:
    if (args.config is None) == (args.preset is None):
        raise UsageError("give exactly one of --config or --preset")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    try:
        cfg = load_config(args.config) if args.config else PRESETS[args.preset]()
        cfg = cfg.with_seed(args.seed)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config!r}: {exc.strerror}") from exc
    records = run_experiment(cfg, threads=args.threads, timing=args.timing)
    emit_csv(records, args.out)
    write_sidecar(records, args.out + ".meta.json")
    print("n,method,mean_abs_error,mean_regret,trials")
    err, reg = summarize(records, "abs_error"), summarize(records, "regret")
    for n in cfg.n_grid:
        for m in cfg.methods:
            e, r = err.get((m, n)), reg.get((m, n))
            cnt = (e or r or (0, 0, 0))[2]
            print(f"{n},{m},{_num(e[0]) if e else ''},{_num(r[0]) if r else ''},{cnt}")
    _err(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def cmd_rates(args) -> int:
    try:
        records = read_csv(args.csv)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv!r}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.enlargement:
        table = enlargement_check(records)
        print("n,m,optimal_error,plugin_error,ratio,interpolated")
        for r in table.rows:
            print(f"{r.n},{r.m},{_num(r.optimal_error)},{_num(r.plugin_error)},{_num(r.ratio)},"
                  f"{'true' if r.interpolated else 'false'}")
        return EXIT_OK
    methods = args.method or sorted({r.method for r in records})
    print("method,slope,intercept,r_squared,points")
    for m in methods:
        try:
            fit = fit_rate_slope(records, m)
        except ValueError as exc:
            if args.method:
                raise UsageError(str(exc)) from exc
            _err(f"skipping {m}: {exc}")
            continue
        print(f"{m},{_num(fit.slope)},{_num(fit.intercept)},{_num(fit.r_squared)},{fit.points}")
    return EXIT_OK


def _alpha_grid(spec: str):
    try:
        a, b, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise UsageError("--alpha-grid must look like A:B:STEP") from None
    if not step > 0 or b < a:
        raise UsageError("--alpha-grid needs STEP > 0 and A <= B")
    k = int(math.floor((b - a) / step + 1e-9))
    return [round(a + i * step, 12) for i in range(k + 1)]


def cmd_bounds(args) -> int:
    alphas = [args.alpha] if args.alpha is not None else _alpha_grid(args.alpha_grid)
    bad = [a for a in alphas if not 0 < a < ALPHA_MAX]
    if bad:
        raise UsageError(f"alpha must lie in (0, e/(2 pi)) = (0, {ALPHA_MAX:.6f}); got {bad[0]!r}")
    print("alpha,lower_bits,upper_bits")
    for a in alphas:
        b = redundancy_bounds(a)
        print(f"{_num(a)},{_num(b.lower_bits)},{_num(b.upper_bits)}")
    return EXIT_OK


def _parse_grid(spec: str | None):
    grid = {"lambda": DEFAULT_LAMBDAS, "delta": DEFAULT_DELTAS, "n": DEFAULT_NS}
    if not spec:
        return grid
    for part in spec.split(";"):
        if not part.strip():
            continue
        key, _, vals = part.partition("=")
        key = key.strip()
        if key not in grid or not vals:
            raise UsageError(f"bad --grid entry {part!r}; use lambda=..;delta=..;n=..")
        try:
            grid[key] = tuple(int(v) if key == "n" else float(v) for v in vals.split(","))
        except ValueError:
            raise UsageError(f"bad number in --grid entry {part!r}") from None
        if any(v <= 0 for v in grid[key]):
            raise UsageError(f"--grid values for {key} must be positive")
    return grid


def cmd_verify(args) -> int:
    if args.lemma not in ("6", "8"):
        raise UsageError(f"unknown lemma {args.lemma!r}; supported: 6, 8")
    g = _parse_grid(args.grid)
    if args.lemma == "6":
        rep = verify_poisson_tail(g["lambda"], g["delta"], g["n"])
    else:
        rep = verify_poisson_difference(g["lambda"], g["n"])
    for row in rep.csv_rows():
        print(row)
    _err(f"worst grid points: {rep.worst}")
    return EXIT_OK if rep.pass_ else EXIT_RUNTIME


def cmd_estimate(args) -> int:
    counts = EmpiricalCounts.from_counts(np.array(_read_lines(args.counts, _count, "a non-negative integer")))
    if counts.nominal_n == 0:
        raise UsageError("counts sum to zero")
    q = None
    if args.task in ("bayes-error", "l1"):
        if args.q is None:
            raise UsageError(f"--q is required for task {args.task}")
        qv = np.array(_read_lines(args.q, _prob, "a probability"))
        if abs(qv.sum() - 1.0) > 1e-9:
            raise UsageError(f"{args.q}: probabilities sum to {qv.sum()!r}, expected 1 within 1e-9")
        if qv.size != counts.support_size:
            raise UsageError(f"--q has {qv.size} entries but --counts has {counts.support_size}")
        q = FiniteDistribution(qv / qv.sum())
    methods = {
        "entropy": {"plugin": lambda: est.plugin_entropy(counts),
                    "optimal": lambda: est.optimal_entropy_estimator(counts),
                    "compression": lambda: est.compression_entropy_from_counts(counts)},
        "bayes-error": {"plugin": lambda: est.plugin_bayes_error(counts, q),
                        "optimal": lambda: est.optimal_bayes_error(counts, q)},
        "l1": {"plugin": lambda: est.plugin_l1(counts, q),
               "optimal": lambda: est.optimal_l1_estimator(counts, q)},
    }[args.task]
    if args.method not in methods:
        raise UsageError(f"method {args.method!r} is not available for task {args.task}; "
                         f"choose from {sorted(methods)}")
    if args.method == "optimal" and counts.nominal_n < 4:
        raise UsageError("the optimal estimators need at least 4 samples")
    rep = methods[args.method]()
    if args.truth is None:
        print(_num(rep.estimate))
    else:
        rep = rep.with_truth(args.truth)
        print("estimate,truth,abs_error")
        print(f"{_num(rep.estimate)},{_num(rep.truth)},{_num(rep.abs_error)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fundlim", description="Estimate and achieve fundamental limits on finite alphabets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a preset or config file and write CSV")
    s.add_argument("--config")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--timing", action="store_true", help="fill wallclock_ms (output is then not reproducible)")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("rates", help="fit log-log slopes or the enlargement table from a result CSV")
    r.add_argument("--csv", required=True)
    r.add_argument("--method", action="append")
    r.add_argument("--enlargement", action="store_true")
    r.set_defaults(func=cmd_rates)

    b = sub.add_parser("bounds", help="minimax redundancy bounds for S = alpha n")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float)
    g.add_argument("--alpha-grid")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="check the Poisson/binomial tail lemmas on a grid")
    v.add_argument("--lemma", required=True)
    v.add_argument("--grid", help="e.g. 'lambda=0.5,2,10;delta=0.5,1;n=30,100'")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("estimate", help="estimate a fundamental limit from a count file")
    e.add_argument("--task", required=True, choices=["entropy", "bayes-error", "l1"])
    e.add_argument("--counts", required=True)
    e.add_argument("--q")
    e.add_argument("--method", required=True)
    e.add_argument("--truth", type=float)
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        _err(f"error: {exc}")
        return EXIT_INVALID
    except SystemExit as exc:       # --help
        return int(exc.code or 0)
    except Exception as exc:        # noqa: BLE001
        _err(f"runtime error: {type(exc).__name__}: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
