"""Finite-alphabet distributions, seeded samplers and empirical distributions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

STRICT_ATOL = 1e-12


class DegenerateSampleError(ValueError):
    """Raised when a sample carries no mass to normalise."""


class SamplingMode(str, enum.Enum):
    MULTINOMIAL = "multinomial"
    POISSONIZED = "poissonized"


@dataclass(frozen=True)
class RngSeed:
    """A (master_seed, stream_index) pair naming one independent random stream.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys and
    drive a counter-based Philox generator, so stream ``t`` is the same no
    matter which worker draws it or in which order.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(ss))


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, RngSeed):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    return RngSeed(int(seed)).generator()


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability vector over the alphabet ``{1..S}`` (stored 0-based).

    ``relaxed=True`` marks vectors that are non-negative but only approximately
    normalised (Poissonized empirical distributions, perturbed fixtures).
    Strict operations refuse relaxed inputs.
    """

    probs: np.ndarray
    relaxed: bool = False
    tolerance: float = field(default=STRICT_ATOL)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size == 0:
            raise ValueError("distribution must have a non-empty support")
        if not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        if not self.relaxed and abs(p.sum() - 1.0) > self.tolerance:
            raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1 within {self.tolerance}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def relaxed_from(cls, probs, epsilon: float | None = None) -> "FiniteDistribution":
        """Build a relaxed vector; with ``epsilon`` require ``|sum - 1| < epsilon``."""
        d = cls(probs, relaxed=True)
        if epsilon is not None and not abs(d.total - 1.0) < epsilon:
            raise ValueError(f"total mass {d.total!r} is not within {epsilon} of 1")
        return d

    @property
    def support_size(self) -> int:
        return int(self.probs.size)

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def require_strict(self, what: str = "operation") -> None:
        if self.relaxed:
            raise ValueError(f"{what} requires a normalised (strict) distribution")

    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.probs)
        c[-1] = max(c[-1], 1.0)
        return c

    def __len__(self):
        return self.support_size

    def __eq__(self, other):
        if not isinstance(other, FiniteDistribution):
            return NotImplemented
        return self.relaxed == other.relaxed and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.relaxed, self.probs.tobytes()))

    def __repr__(self):
        kind = "relaxed" if self.relaxed else "strict"
        return f"FiniteDistribution(S={self.support_size}, {kind})"


@dataclass(frozen=True, eq=False)
class EmpiricalCounts:
    """Integer counts over the alphabet plus the nominal sample size."""

    counts: np.ndarray
    nominal_n: int
    mode: SamplingMode = SamplingMode.MULTINOMIAL

    def __post_init__(self):
        c = np.array(self.counts).reshape(-1)
        if c.size == 0:
            raise ValueError("counts must be non-empty")
        if not np.all(np.equal(np.mod(c, 1), 0)):
            raise ValueError("counts must be integers")
        c = c.astype(np.int64)
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        mode = SamplingMode(self.mode)
        n = int(self.nominal_n)
        if n < 0:
            raise ValueError("nominal_n must be non-negative")
        if mode is SamplingMode.MULTINOMIAL and int(c.sum()) != n:
            raise ValueError(f"multinomial counts sum to {int(c.sum())}, expected {n}")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "nominal_n", n)
        object.__setattr__(self, "mode", mode)

    @classmethod
    def from_counts(cls, counts) -> "EmpiricalCounts":
        c = np.asarray(counts)
        return cls(c, int(c.sum()))

    @classmethod
    def from_sequence(cls, symbols, support_size: int) -> "EmpiricalCounts":
        x = np.asarray(symbols, dtype=np.int64)
        if x.size and (x.min() < 0 or x.max() >= support_size):
            raise ValueError("symbols must lie in 0..S-1")
        return cls(np.bincount(x, minlength=support_size), int(x.size))

    @property
    def support_size(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, EmpiricalCounts):
            return NotImplemented
        return (self.nominal_n == other.nominal_n and self.mode == other.mode
                and np.array_equal(self.counts, other.counts))

    def __repr__(self):
        return f"EmpiricalCounts(S={self.support_size}, n={self.nominal_n}, mode={self.mode.value})"


def make_uniform(S: int) -> FiniteDistribution:
    if S < 1:
        raise ValueError("support size must be at least 1")
    return FiniteDistribution(np.full(S, 1.0 / S), tolerance=max(STRICT_ATOL, 4 * S * np.finfo(float).eps))


def make_zipf(S: int, beta: float) -> FiniteDistribution:
    """Zipf law on ``{1..S}``: ``p_i`` proportional to ``i**-beta``."""
    if S < 1:
        raise ValueError("support size must be at least 1")
    if beta < 0:
        raise ValueError("Zipf exponent must be non-negative")
    w = np.arange(1, S + 1, dtype=float) ** (-float(beta))
    return FiniteDistribution(w / w.sum(), tolerance=max(STRICT_ATOL, 4 * S * np.finfo(float).eps))


def make_distribution(probs) -> FiniteDistribution:
    """Strict distribution from an explicit vector, renormalising float round-off only."""
    p = np.asarray(probs, dtype=float)
    s = p.sum()
    if abs(s - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {s!r}, expected 1")
    return FiniteDistribution(p / s)


def sample_counts(dist: FiniteDistribution, n: int, mode=SamplingMode.MULTINOMIAL, seed=0) -> EmpiricalCounts:
    """Draw one count vector: multinomial(n, dist) or independent Poisson(n p_i)."""
    if n < 1:
        raise ValueError("sample size must be positive")
    mode = SamplingMode(mode)
    rng = _as_generator(seed)
    if mode is SamplingMode.MULTINOMIAL:
        dist.require_strict("multinomial sampling")
        p = dist.probs / dist.probs.sum()
        counts = rng.multinomial(n, p)
    else:
        counts = rng.poisson(n * dist.probs)
    return EmpiricalCounts(counts, n, mode)


def sample_sequence(dist: FiniteDistribution, n: int, seed=0) -> np.ndarray:
    """I.i.d. symbols (0-based) by inverse CDF on the cumulative vector."""
    if n < 1:
        raise ValueError("sample size must be positive")
    dist.require_strict("sequence sampling")
    rng = _as_generator(seed)
    u = rng.random(n)
    x = np.searchsorted(dist.cdf(), u, side="right")
    return np.minimum(x, dist.support_size - 1)


def empirical_distribution(counts: EmpiricalCounts) -> FiniteDistribution:
    """Counts divided by the nominal sample size.

    Multinomial counts give a strict distribution; Poissonized counts give a
    relaxed one whose total mass is random.
    """
    if counts.mode is SamplingMode.POISSONIZED:
        if counts.total == 0:
            raise DegenerateSampleError("all Poissonized counts are zero")
        return FiniteDistribution(counts.counts / counts.nominal_n, relaxed=True)
    if counts.nominal_n == 0:
        raise DegenerateSampleError("empty sample")
    return FiniteDistribution(counts.counts / counts.nominal_n)
