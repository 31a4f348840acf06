"""Config-driven Monte Carlo harness, CSV/JSON I/O and rate fitting.

Each (n, trial) unit draws from its own Philox stream
``(master_seed, n_index * trials + trial)``, so the output does not depend on
how units are scheduled across threads. Records are sorted by
``(n, trial, method)`` before they are returned.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import estimate as est
from .classify import (MLE_RULE, TQ_RULE, erm_classifier, erm_regret_of, expected_regret_erm,
                       expected_regret_exact, mle_classifier, rate_bound, regime_warning, tq_classifier)
from .dist import (EmpiricalCounts, FiniteDistribution, RngSeed, SamplingMode, make_distribution,
                   make_uniform, make_zipf, sample_counts)
from .envelope import LabeledDistribution, bayes_error, l1_distance, regime_regret, shannon_entropy

CSV_HEADER = ["experiment_id", "n", "trial", "seed", "method", "value", "truth", "abs_error",
              "regret", "rate_bound", "wallclock_ms"]

TASKS = ("bayes_error", "l1", "entropy", "erm")
KNOWN_Q_ESTIMATORS = ("plugin", "optimal")
UNKNOWN_Q_ESTIMATORS = ("two_sample_plugin", "two_sample_optimal")
ENTROPY_ESTIMATORS = ("plugin", "optimal", "compression")
KNOWN_Q_CLASSIFIERS = ("t_Q", "t_MLE")
UNKNOWN_Q_CLASSIFIERS = ("empirical_scheffe",)
ERM_CLASSIFIERS = ("erm",)


class ConfigError(ValueError):
    """Schema violation in an experiment configuration."""


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class Family:
    """``zipf`` (with ``beta``), ``uniform`` or ``explicit`` (with ``probs``)."""

    family: str
    beta: float | None = None
    probs: tuple | None = None

    def __post_init__(self):
        if self.family not in ("zipf", "uniform", "explicit"):
            raise ConfigError(f"unknown distribution family {self.family!r}")
        if self.family == "zipf" and (self.beta is None or self.beta < 0):
            raise ConfigError("zipf family needs a non-negative 'beta'")
        if self.family == "explicit":
            if not self.probs:
                raise ConfigError("explicit family needs 'probs'")
            object.__setattr__(self, "probs", tuple(float(v) for v in self.probs))

    def build(self, S: int) -> FiniteDistribution:
        if self.family == "zipf":
            return make_zipf(S, self.beta)
        if self.family == "uniform":
            return make_uniform(S)
        if len(self.probs) != S:
            raise ConfigError(f"explicit probs have length {len(self.probs)}, support_size is {S}")
        return make_distribution(self.probs)

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    support_size: int
    p_family: Family
    q_family: Family | None
    q_known: bool
    n_grid: tuple
    trials: int
    master_seed: int
    estimators: tuple = ()
    classifiers: tuple = ()
    task: str = "bayes_error"
    sampling: str = "multinomial"
    split: bool = False
    erm_kappa: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(v) for v in self.n_grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "classifiers", tuple(self.classifiers))
        self.validate()

    def validate(self) -> None:
        if not self.experiment_id or "," in self.experiment_id:
            raise ConfigError("experiment_id must be a non-empty string without commas")
        if self.support_size < 1:
            raise ConfigError("support_size must be at least 1")
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be non-empty and strictly increasing")
        if self.n_grid[0] < 1:
            raise ConfigError("n_grid entries must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}")
        SamplingMode(self.sampling)
        if self.task != "entropy" and self.q_family is None:
            raise ConfigError(f"task {self.task!r} needs q_family")
        if self.task == "entropy":
            allowed_e, allowed_c = ENTROPY_ESTIMATORS, ()
        elif self.task == "erm":
            allowed_e, allowed_c = (), ERM_CLASSIFIERS
        elif self.q_known:
            allowed_e, allowed_c = KNOWN_Q_ESTIMATORS, KNOWN_Q_CLASSIFIERS
        else:
            allowed_e, allowed_c = UNKNOWN_Q_ESTIMATORS, UNKNOWN_Q_CLASSIFIERS
        if self.task == "l1":
            allowed_c = ()
        for tag in self.estimators:
            if tag not in allowed_e:
                raise ConfigError(f"estimator {tag!r} is not available for task {self.task!r}"
                                  f" (q_known={self.q_known}); choose from {allowed_e}")
        for tag in self.classifiers:
            if tag not in allowed_c:
                raise ConfigError(f"classifier {tag!r} is not available for task {self.task!r}"
                                  f" (q_known={self.q_known}); choose from {allowed_c}")
        if not self.estimators and not self.classifiers:
            raise ConfigError("configure at least one estimator or classifier")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("method tags must be unique")
        if SamplingMode(self.sampling) is SamplingMode.POISSONIZED and self.task != "l1" and self.task != "entropy":
            raise ConfigError("poissonized sampling is only supported for the l1 and entropy tasks")
        if not self.erm_kappa > 0:
            raise ConfigError("erm_kappa must be positive")

    @property
    def methods(self) -> tuple:
        return self.estimators + self.classifiers

    def with_seed(self, seed: int) -> "ExperimentConfig":
        d = self.to_dict()
        d["master_seed"] = int(seed)
        return config_from_dict(d)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Family):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


_REQUIRED = ("experiment_id", "support_size", "p_family", "q_family", "q_known", "n_grid", "trials",
             "master_seed")
_TYPES = {"experiment_id": str, "support_size": int, "q_known": bool, "n_grid": list, "trials": int,
          "master_seed": int, "estimators": list, "classifiers": list, "task": str, "sampling": str,
          "split": bool, "erm_kappa": (int, float)}


def _family_from(value, where):
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(value) - {"family", "beta", "probs"}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    if "family" not in value:
        raise ConfigError(f"{where}: missing 'family'")
    return Family(value["family"], value.get("beta"), value.get("probs"))


def config_from_dict(d: dict, lines: dict | None = None) -> ExperimentConfig:
    """Validate a decoded config document; ``lines`` maps keys to source lines for diagnostics."""
    lines = lines or {}

    def at(key):
        return f"line {lines[key]}, field {key!r}" if key in lines else f"field {key!r}"

    if not isinstance(d, dict):
        raise ConfigError("config document must be an object")
    names = {f.name for f in fields(ExperimentConfig)}
    unknown = [k for k in d if k not in names]
    if unknown:
        raise ConfigError("; ".join(f"{at(k)}: unknown key" for k in unknown))
    for k in _REQUIRED:
        if k not in d:
            raise ConfigError(f"field {k!r}: required key missing")
    for k, typ in _TYPES.items():
        if k in d and not isinstance(d[k], typ) or (k in d and typ is int and isinstance(d[k], bool)):
            raise ConfigError(f"{at(k)}: expected {getattr(typ, '__name__', 'number')}")
    kw = dict(d)
    try:
        kw["p_family"] = _family_from(d["p_family"], at("p_family"))
        kw["q_family"] = _family_from(d["q_family"], at("q_family"))
        if kw["p_family"] is None:
            raise ConfigError(f"{at('p_family')}: required")
        return ExperimentConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _key_lines(text: str) -> dict:
    out = {}
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith('"') and '":' in s:
            out.setdefault(s[1:s.index('"', 1)], i)
    return out


def load_config(path) -> ExperimentConfig:
    """Read a JSON config document; unknown keys and type errors name the offending line."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(d, _key_lines(text))


def dump_config(config: ExperimentConfig, path=None) -> str:
    text = json.dumps(config.to_dict(), indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------- presets

FIG_GRID = tuple(range(10_000, 100_001, 10_000))


def fig1_config(master_seed: int = 7) -> ExperimentConfig:
    return ExperimentConfig("fig1", 1000, Family("zipf", beta=0.3), Family("uniform"), True, FIG_GRID, 20,
                            master_seed, ("plugin", "optimal"), ("t_Q", "t_MLE"))


def fig2_config(master_seed: int = 7) -> ExperimentConfig:
    return ExperimentConfig("fig2", 1000, Family("zipf", beta=0.3), Family("uniform"), False, FIG_GRID, 20,
                            master_seed, ("two_sample_plugin", "two_sample_optimal"), ("empirical_scheffe",))


def entropy_config(master_seed: int = 7) -> ExperimentConfig:
    return ExperimentConfig("entropy", 1000, Family("uniform"), None, True, (500, 1000, 2000, 4000, 8000), 50,
                            master_seed, ENTROPY_ESTIMATORS, (), task="entropy")


ENLARGEMENT_BASE = (2000, 4000, 8000)


def enlargement_grid(base=ENLARGEMENT_BASE) -> tuple:
    return tuple(sorted(set(base) | {round(n * math.log(n)) for n in base}))


def enlargement_config(master_seed: int = 7) -> ExperimentConfig:
    return ExperimentConfig("enlargement", 1000, Family("uniform"), Family("uniform"), True,
                            enlargement_grid(), 50, master_seed, ("plugin", "optimal"), (), task="l1")


def rates_config(master_seed: int = 7) -> ExperimentConfig:
    return ExperimentConfig("rates", 1000, Family("uniform"), Family("uniform"), True,
                            (2000, 4000, 8000, 16000, 32000), 50, master_seed, ("plugin",), ())


def erm_config(master_seed: int = 7) -> ExperimentConfig:
    return ExperimentConfig("erm", 100, Family("uniform"), Family("uniform"), True,
                            (200, 400, 800, 1600, 3200, 6400), 50, master_seed, (), ("erm",), task="erm")


PRESETS = {"fig1": fig1_config, "fig2": fig2_config, "entropy": entropy_config,
           "enlargement": enlargement_config, "rates": rates_config, "erm": erm_config}


# ---------------------------------------------------------------- records

@dataclass(frozen=True)
class ResultRecord:
    experiment_id: str
    n: int
    trial: int
    seed: int
    method: str
    value: float
    truth: float | None = None
    abs_error: float | None = None
    regret: float | None = None
    rate_bound: float | None = None
    wallclock_ms: float | None = None

    def __post_init__(self):
        if self.truth is not None and self.abs_error is None:
            object.__setattr__(self, "abs_error", abs(self.value - self.truth))
        if self.regret is not None and self.regret < 0:
            raise ValueError("regret must be non-negative")

    def sort_key(self):
        return (self.n, self.trial, self.method)


class RecordList(list):
    """List of records plus run metadata (warnings, clamp counts) for the sidecar file."""

    def __init__(self, items=(), metadata=None):
        super().__init__(items)
        self.metadata = metadata or {}


@dataclass(frozen=True)
class RateFit:
    method_id: str
    slope: float
    intercept: float
    r_squared: float
    points: int = 0


def erm_instance(S: int, n: int, kappa: float, px: FiniteDistribution) -> LabeledDistribution:
    """Hard instance at sample size n: ``eta = 1/2 +- kappa sqrt(S/n)``, alternating signs."""
    eps = min(0.5, kappa * math.sqrt(S / n))
    sign = np.where(np.arange(S) % 2 == 0, 1.0, -1.0)
    return LabeledDistribution.from_marginal(px, 0.5 + sign * eps)


class _Context:
    """Everything about one run that is computed once, before trials start."""

    def __init__(self, config: ExperimentConfig, timing: bool):
        self.config = config
        self.timing = timing
        S = config.support_size
        self.mode = SamplingMode(config.sampling)
        self.p = config.p_family.build(S)
        self.q = config.q_family.build(S) if config.q_family is not None else None
        self.truth = {}
        self.exact_regret = {}
        self.warnings = {}
        if config.task == "entropy":
            self.truth["entropy"] = shannon_entropy(self.p)
        elif config.task == "erm":
            self.erm = {n: erm_instance(S, n, config.erm_kappa, self.p) for n in config.n_grid}
            for n, ld in self.erm.items():
                self.exact_regret[("erm", n)] = expected_regret_erm(ld, n).regret
        else:
            self.ld = LabeledDistribution(self.p, self.q)
            self.truth["bayes_error"] = bayes_error(self.ld)
            self.truth["l1"] = l1_distance(self.p, self.q)
            for n in config.n_grid:
                w = regime_warning(self.q, n)
                if w:
                    self.warnings[str(n)] = w
                if config.q_known:
                    for tag, rule in (("t_Q", TQ_RULE), ("t_MLE", MLE_RULE)):
                        if tag in config.classifiers:
                            self.exact_regret[(tag, n)] = expected_regret_exact(rule, self.ld, n).regret

    def rate(self, n):
        return rate_bound(self.q, n) if self.q is not None else None


def _timed(fn, timing):
    t = time.perf_counter()
    out = fn()
    return out, ((time.perf_counter() - t) * 1e3 if timing else None)


def _run_unit(ctx: _Context, n_index: int, trial: int):
    cfg = ctx.config
    n = cfg.n_grid[n_index]
    stream = n_index * cfg.trials + trial
    rng = RngSeed(cfg.master_seed, stream).generator()
    recs, clamps = [], {}

    def add(method, value, truth=None, regret=None, rate=None, ms=None, report=None):
        if report is not None and report.clamped:
            clamps[method] = clamps.get(method, 0) + 1
        recs.append(ResultRecord(cfg.experiment_id, n, trial, stream, method, float(value),
                                 truth, None, regret, rate, ms))

    if cfg.task == "erm":
        ld = ctx.erm[n]
        j0, j1 = ld.joint()
        cells = np.concatenate([j0, j1])
        draw = rng.multinomial(n, cells / cells.sum())
        S = cfg.support_size
        reg, ms = _timed(lambda: erm_regret_of(erm_classifier(draw[:S], draw[S:]), ld), ctx.timing)
        add("erm", reg, ctx.exact_regret[("erm", n)], reg, math.sqrt(S / n), ms)
        return recs, clamps

    counts = sample_counts(ctx.p, n, ctx.mode, rng)
    if cfg.task == "entropy":
        truth = ctx.truth["entropy"]
        fns = {"plugin": lambda: est.plugin_entropy(counts),
               "optimal": lambda: est.optimal_entropy_estimator(counts, split=cfg.split, seed=rng),
               "compression": lambda: est.compression_entropy_from_counts(counts)}
        for tag in cfg.estimators:
            rep, ms = _timed(fns[tag], ctx.timing)
            add(tag, rep.estimate, truth, ms=ms, report=rep)
        return recs, clamps

    rate = ctx.rate(n)
    if cfg.q_known:
        if cfg.task == "l1":
            truth = ctx.truth["l1"]
            fns = {"plugin": lambda: est.plugin_l1(counts, ctx.q),
                   "optimal": lambda: est.optimal_l1_estimator(counts, ctx.q, split=cfg.split, seed=rng)}
        else:
            truth = ctx.truth["bayes_error"]
            fns = {"plugin": lambda: est.plugin_bayes_error(counts, ctx.q),
                   "optimal": lambda: est.optimal_bayes_error(counts, ctx.q, split=cfg.split, seed=rng)}
        for tag in cfg.estimators:
            rep, ms = _timed(fns[tag], ctx.timing)
            add(tag, rep.estimate, truth, ms=ms, report=rep)
        builders = {"t_Q": lambda: tq_classifier(counts, ctx.q, n), "t_MLE": lambda: mle_classifier(counts, ctx.q)}
        for tag in cfg.classifiers:
            regime, ms = _timed(builders[tag], ctx.timing)
            reg = regime_regret(regime.members, ctx.p.probs, ctx.q.probs)
            add(tag, reg, ctx.exact_regret[(tag, n)], reg, rate, ms)
        return recs, clamps

    counts_q = sample_counts(ctx.q, n, ctx.mode, rng)
    if cfg.task == "l1":
        truth = ctx.truth["l1"]
        conv = lambda rep: rep  # noqa: E731
    else:
        truth = ctx.truth["bayes_error"]

        def conv(rep):
            raw = 0.5 - rep.pre_clamp / 4
            return est.EstimateReport(min(max(raw, 0.0), 0.5), rep.estimator_id, pre_clamp=raw)
    fns = {"two_sample_plugin": lambda: est.two_sample_plugin_l1(counts, counts_q),
           "two_sample_optimal": lambda: est.two_sample_optimal_l1(counts, counts_q)}
    for tag in cfg.estimators:
        rep, ms = _timed(lambda: conv(fns[tag]()), ctx.timing)
        add(tag, rep.estimate, truth, ms=ms, report=rep)
    for tag in cfg.classifiers:
        regime, ms = _timed(lambda: est.two_sample_regime(counts, counts_q), ctx.timing)
        reg = regime_regret(regime.members, ctx.p.probs, ctx.q.probs)
        add(tag, reg, None, reg, rate, ms)
    return recs, clamps


def run_experiment(config: ExperimentConfig, threads: int = 1, timing: bool = False) -> RecordList:
    """Run every (n, trial) unit and return records sorted by ``(n, trial, method)``.

    ``wallclock_ms`` is only filled when ``timing=True``; it is left empty by
    default so that identical configs give byte-identical CSV output.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    ctx = _Context(config, timing)
    units = [(i, t) for i in range(len(config.n_grid)) for t in range(config.trials)]
    if threads == 1:
        results = [_run_unit(ctx, i, t) for i, t in units]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda u: _run_unit(ctx, *u), units))
    records, clamps = [], {}
    for recs, cl in results:
        records.extend(recs)
        for k, v in cl.items():
            clamps[k] = clamps.get(k, 0) + v
    records.sort(key=ResultRecord.sort_key)
    meta = {"experiment_id": config.experiment_id, "master_seed": config.master_seed,
            "regime_warnings": ctx.warnings, "clamped": dict(sorted(clamps.items()))}
    return RecordList(records, meta)


# ---------------------------------------------------------------- CSV

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("unexpected boolean in record")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def emit_csv(records, path) -> None:
    """Write records with the fixed header; floats carry 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.experiment_id, r.n, r.trial, r.seed, r.method] +
                       [_fmt(getattr(r, k)) for k in CSV_HEADER[5:]])


def write_sidecar(records, path) -> None:
    meta = getattr(records, "metadata", {})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_csv(path) -> list[ResultRecord]:
    def num(s):
        return None if s == "" else float(s)

    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        out = []
        for lineno, row in enumerate(rd, 2):
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            out.append(ResultRecord(row[0], int(row[1]), int(row[2]), int(row[3]), row[4], float(row[5]),
                                    num(row[6]), num(row[7]), num(row[8]), num(row[9]), num(row[10])))
    return out


# ---------------------------------------------------------------- summaries

def summarize(records, statistic: str = "abs_error") -> dict:
    """``{(method, n): (mean, stderr, count)}`` of a record column."""
    groups = {}
    for r in records:
        v = getattr(r, statistic)
        if v is not None:
            groups.setdefault((r.method, r.n), []).append(v)
    out = {}
    for key, vals in sorted(groups.items()):
        a = np.asarray(vals, dtype=float)
        se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
        out[key] = (float(a.mean()), se, int(a.size))
    return out


def fit_rate_slope(records, method_id: str, statistic: str | None = None) -> RateFit:
    """Least-squares slope of log(mean statistic) against log n.

    The statistic defaults to ``regret`` for classifiers and to ``abs_error``
    for estimators. Needs at least 4 sample sizes with 5 trials each.
    """
    recs = [r for r in records if r.method == method_id]
    if statistic is None:
        statistic = "regret" if any(r.regret is not None for r in recs) else "abs_error"
    summ = {n: m for (meth, n), m in summarize(recs, statistic).items() if m[2] >= 5}
    if len(summ) < 4:
        raise ValueError(f"need at least 4 sample sizes with >= 5 trials for {method_id!r}, got {len(summ)}")
    ns = np.array(sorted(summ), dtype=float)
    ys = np.array([summ[int(n)][0] for n in ns])
    if np.any(ys <= 0):
        raise ValueError("mean error must be positive at every n to fit a log-log slope")
    x, y = np.log(ns), np.log(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1 - float(np.sum(resid ** 2)) / ss_tot))
    return RateFit(method_id, float(slope), float(intercept), r2, len(summ))


@dataclass(frozen=True)
class EnlargementRow:
    n: int
    m: int
    optimal_error: float
    plugin_error: float
    ratio: float
    interpolated: bool


@dataclass(frozen=True)
class EnlargementTable:
    rows: tuple
    max_deviation: float = field(init=False)

    def __post_init__(self):
        dev = max((abs(r.ratio - 1) for r in self.rows), default=0.0)
        object.__setattr__(self, "max_deviation", dev)


def _mean_errors(records, method):
    return {n: m[0] for (meth, n), m in summarize([r for r in records if r.method == method]).items()}


def enlargement_check(records, method_pair=("optimal", "plugin"), base_ns=None, m_of=None) -> EnlargementTable:
    """Ratios ``error(first method, n) / error(second method, m(n))`` with ``m(n) = round(n ln n)``.

    When ``m(n)`` is not on the record grid the second method's error is
    interpolated on its log-log least-squares line and the row is flagged.
    """
    first, second = method_pair
    m_of = m_of or (lambda n: round(n * math.log(n)))
    e1, e2 = _mean_errors(records, first), _mean_errors(records, second)
    if not e1 or not e2:
        raise ValueError("both methods must be present in the records")
    if base_ns is None:
        # prefer the rows whose m(n) was actually simulated
        base_ns = [n for n in sorted(e1) if int(m_of(n)) in e2] or sorted(e1)
    fit = None
    rows = []
    for n in base_ns:
        m = int(m_of(n))
        interp = m not in e2
        if interp:
            if fit is None:
                fit = fit_rate_slope(records, second)
            err2 = math.exp(fit.intercept + fit.slope * math.log(m))
        else:
            err2 = e2[m]
        err1 = e1[n]
        ratio = 1.0 if err1 == 0 and err2 == 0 else (math.inf if err2 == 0 else err1 / err2)
        rows.append(EnlargementRow(n, m, err1, err2, ratio, interp))
    return EnlargementTable(tuple(rows))
