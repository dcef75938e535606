"""Exact samplers for power-law species distributions and CRP partitions.

Species labels produced by the i.i.d. samplers are float64 arrays holding
integer values (1, 2, ...).  Labels above 2**53 can in principle collide
after rounding; such draws have probability far below anything a Monte-Carlo
run can resolve.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
from scipy.special import zeta

from .partition import Fingerprint, SampleCounts

log = logging.getLogger(__name__)

BIT_GENERATOR = "PCG64"


@dataclass(frozen=True)
class SeededRng:
    """Root seed plus the rule deriving one independent stream per replicate.

    Child streams hash ``(seed, replicate)`` through numpy's ``SeedSequence``
    and drive a PCG64 generator.
    """

    seed: int

    def child(self, replicate: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(int(replicate),))
        return np.random.Generator(np.random.PCG64(ss))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SeededRng):
        return rng.generator()
    return SeededRng(int(rng)).generator()


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class Zipf:
    """``p_j = j**-s / zeta(s)`` on j = 1, 2, ..."""

    s: float

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError(f"Zipf exponent must exceed 1, got {self.s!r}")

    @classmethod
    def from_tail_index(cls, alpha: float) -> "Zipf":
        return cls(1.0 / alpha)

    @property
    def tail_index(self) -> float:
        return 1.0 / self.s

    @cached_property
    def normalizer(self) -> float:
        return float(zeta(self.s, 1))

    def mass(self, j):
        return np.asarray(j, dtype=float) ** -self.s / self.normalizer

    def tail_mass(self, j0: int) -> float:
        """Total mass of atoms ``j >= j0``."""
        return float(zeta(self.s, j0)) / self.normalizer

    def power_sum_tail(self, power: int, j0: int) -> float:
        """``sum_{j >= j0} p_j ** power``."""
        return float(zeta(power * self.s, j0)) / self.normalizer**power

    @property
    def max_mass(self) -> float:
        return 1.0 / self.normalizer

    def survival(self, x: float) -> int:
        return _power_count(x * self.normalizer, self.s, 1, None)


@dataclass(frozen=True)
class DoubleZipf:
    """``p_j`` proportional to ``j**(-1/alpha)`` for j <= J and ``j**(-1/beta)`` beyond.

    The tail index is ``beta``.
    """

    alpha: float
    beta: float
    J: int

    def __post_init__(self):
        if not 0 < self.beta <= self.alpha < 1:
            raise ValueError("need 0 < beta <= alpha < 1")
        if int(self.J) != self.J or self.J < 1:
            raise ValueError("J must be a positive integer")

    @property
    def tail_index(self) -> float:
        return self.beta

    @cached_property
    def head_weights(self) -> np.ndarray:
        return np.arange(1, self.J + 1, dtype=float) ** (-1.0 / self.alpha)

    @cached_property
    def head_sum(self) -> float:
        return math.fsum(self.head_weights)

    @cached_property
    def tail_sum(self) -> float:
        # Hurwitz zeta: sum_{j > J} j^{-1/beta}
        return float(zeta(1.0 / self.beta, self.J + 1))

    @property
    def normalizer(self) -> float:
        return self.head_sum + self.tail_sum

    @property
    def head_weight(self) -> float:
        """Probability that a draw falls in ``{1, ..., J}``."""
        return self.head_sum / self.normalizer

    def mass(self, j):
        j = np.asarray(j, dtype=float)
        expo = np.where(j <= self.J, -1.0 / self.alpha, -1.0 / self.beta)
        return j**expo / self.normalizer

    def tail_mass(self, j0: int) -> float:
        return self.power_sum_tail(1, j0)

    def power_sum_tail(self, power: int, j0: int) -> float:
        z = self.normalizer
        tail = float(zeta(power / self.beta, max(j0, self.J + 1)))
        if j0 <= self.J:
            tail += math.fsum(self.head_weights[j0 - 1 :] ** power)
        return tail / z**power

    @property
    def max_mass(self) -> float:
        return 1.0 / self.normalizer

    def survival(self, x: float) -> int:
        y = x * self.normalizer
        head = _power_count(y, 1.0 / self.alpha, 1, self.J)
        if head < self.J:
            return head
        return head + _power_count(y, 1.0 / self.beta, self.J + 1, None)


@dataclass(frozen=True)
class Discrete:
    """Finite distribution given by explicit masses (sorted nonincreasing)."""

    masses: tuple

    def __post_init__(self):
        p = np.asarray(self.masses, dtype=float)
        if p.ndim != 1 or p.size == 0 or p.min() <= 0:
            raise ValueError("masses must be a nonempty vector of positive numbers")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("masses must sum to one")
        object.__setattr__(self, "masses", tuple(sorted(p.tolist(), reverse=True)))

    @property
    def tail_index(self) -> float:
        return 0.0

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.masses)

    def mass(self, j):
        j = np.asarray(j, dtype=np.int64)
        out = np.zeros(j.shape)
        ok = (j >= 1) & (j <= self.array.size)
        out[ok] = self.array[j[ok] - 1]
        return out

    def tail_mass(self, j0: int) -> float:
        return math.fsum(self.array[j0 - 1 :])

    def power_sum_tail(self, power: int, j0: int) -> float:
        return math.fsum(self.array[j0 - 1 :] ** power)

    @property
    def max_mass(self) -> float:
        return self.masses[0]

    @property
    def min_mass(self) -> float:
        return self.masses[-1]

    def survival(self, x: float) -> int:
        return int(np.count_nonzero(self.array > x))


@dataclass(frozen=True)
class Crp:
    """(alpha, 0) Chinese restaurant process; no fixed masses."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("CRP alpha must lie in (0, 1)")

    @property
    def tail_index(self) -> float:
        return self.alpha


DistributionSpec = Zipf | DoubleZipf | Discrete | Crp


def _power_count(y: float, s: float, first: int, last: int | None) -> int:
    """Count of ``j`` in ``[first, last]`` with ``j**-s > y``, i.e. ``j < y**(-1/s)``.

    The floating-point inversion is corrected by direct comparison at the edge.
    """
    bound = y ** (-1.0 / s)
    j = math.ceil(bound) - 1 if bound < 2**62 else int(bound)
    if last is not None:
        j = min(j, last)
    j = max(j, first - 1)
    while j >= first and not j**-s > y:
        j -= 1
    while (last is None or j < last) and (j + 1) ** -s > y:
        j += 1
    return j - first + 1


def survival_function(spec, x: float) -> int:
    """Number of atoms with mass strictly greater than ``x``."""
    if isinstance(spec, Crp):
        raise ValueError("CRP is a random measure: no fixed masses")
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    if x >= spec.max_mass:
        return 0
    return spec.survival(x)


# ---------------------------------------------------------------- draws


def _power_tail_draws(a: float, j0: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. draws with ``P(j)`` proportional to ``j**-a`` on ``j >= j0``.

    Rejection from ``floor(j0 * U**(-1/(a-1)))``.  The likelihood ratio of
    target to proposal is ``h(j) = T / (j (T - 1))`` with
    ``T = (1 + 1/j)**(a-1)``, which decreases in ``j``; accepting with
    probability ``h(X) / h(j0)`` is exact.  For ``j0 = 1`` this is
    Devroye's Zipf generator.
    """
    am1 = a - 1.0

    def h(j):
        tm1 = np.expm1(am1 * np.log1p(1.0 / j))
        return (1.0 + tm1) / (j * tm1)

    h0 = float(h(np.float64(j0)))
    out = np.empty(size)
    filled = 0
    proposals = 0
    rate = acceptance_probability(a, j0)
    while filled < size:
        need = size - filled
        batch = int(need / rate * 1.05) + 32
        u = 1.0 - rng.random(batch)
        v = rng.random(batch)
        with np.errstate(over="ignore"):
            x = np.floor(j0 * u ** (-1.0 / am1))
        finite = np.isfinite(x)
        accept = np.zeros(batch, dtype=bool)
        accept[finite] = v[finite] * h0 <= h(x[finite])
        got = x[accept][:need]
        out[filled : filled + got.size] = got
        filled += got.size
        proposals += batch
    log.debug("power-tail sampler a=%.4g j0=%d: %.3f proposals per draw", a, j0, proposals / max(size, 1))
    return out


def acceptance_probability(a: float, j0: int = 1) -> float:
    """Per-proposal acceptance rate of :func:`_power_tail_draws`.

    Equals ``j0**(a-1) * zeta(a, j0) / h(j0)``; for ``j0 = 1`` this is
    ``zeta(a) * (b - 1) / b`` with ``b = 2**(a-1)``, bounded away from zero
    for every fixed ``a > 1``.
    """
    am1 = a - 1.0
    tm1 = math.expm1(am1 * math.log1p(1.0 / j0))
    h0 = (1.0 + tm1) / (j0 * tm1)
    return math.exp(am1 * math.log(j0)) * float(zeta(a, j0)) / h0


def zipf_draws(spec: Zipf, size: int, rng) -> np.ndarray:
    return _power_tail_draws(spec.s, 1, size, as_generator(rng))


def double_zipf_draws(spec: DoubleZipf, size: int, rng) -> np.ndarray:
    rng = as_generator(rng)
    in_head = rng.random(size) < spec.head_weight
    k = int(in_head.sum())
    out = np.empty(size)
    cdf = np.cumsum(spec.head_weights)
    cdf /= cdf[-1]
    head = np.searchsorted(cdf, rng.random(k), side="right") + 1
    out[in_head] = np.minimum(head, spec.J)
    out[~in_head] = _power_tail_draws(1.0 / spec.beta, spec.J + 1, size - k, rng)
    return out


def discrete_draws(spec: Discrete, size: int, rng) -> np.ndarray:
    rng = as_generator(rng)
    return rng.choice(len(spec.masses), size=size, p=spec.array).astype(float) + 1.0


def draws(spec, size: int, rng) -> np.ndarray:
    """I.i.d. species labels from a spec with explicit masses."""
    if size < 0:
        raise ValueError("size must be nonnegative")
    if isinstance(spec, Zipf):
        return zipf_draws(spec, size, rng)
    if isinstance(spec, DoubleZipf):
        return double_zipf_draws(spec, size, rng)
    if isinstance(spec, Discrete):
        return discrete_draws(spec, size, rng)
    raise ValueError(f"no i.i.d. sampler for {type(spec).__name__}")


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")


def zipf_sample(spec: Zipf, n: int, rng) -> SampleCounts:
    _check_n(n)
    return SampleCounts.from_observations(zipf_draws(spec, n, rng))


def double_zipf_sample(spec: DoubleZipf, n: int, rng) -> SampleCounts:
    _check_n(n)
    return SampleCounts.from_observations(double_zipf_draws(spec, n, rng))


@numba.njit(cache=True)
def _assign_tables(alpha, pick, coin):
    # A new customer copies the table of a uniformly chosen earlier customer;
    # if that customer founded its table, a new table opens with probability
    # alpha instead.  This gives join prob (n_i - alpha)/t and new-table
    # prob k*alpha/t after t customers.
    n = pick.size + 1
    table_of = np.empty(n, np.int64)
    founder = np.zeros(n, np.bool_)
    table_of[0] = 0
    founder[0] = True
    k = 1
    for t in range(1, n):
        c = int(pick[t - 1] * t)
        if c >= t:
            c = t - 1
        if founder[c] and coin[t - 1] < alpha:
            table_of[t] = k
            founder[t] = True
            k += 1
        else:
            table_of[t] = table_of[c]
    return table_of


def crp_assignments(spec: Crp, n: int, rng) -> np.ndarray:
    """Table index of each of ``n`` customers, in arrival order."""
    _check_n(n)
    rng = as_generator(rng)
    pick = rng.random(n - 1)
    coin = rng.random(n - 1)
    return _assign_tables(spec.alpha, pick, coin)


def crp_block_sizes(spec: Crp, n: int, rng) -> np.ndarray:
    return np.bincount(crp_assignments(spec, n, rng))


def crp_sample(spec: Crp, n: int, rng) -> Fingerprint:
    """Fingerprint of an (alpha, 0) CRP partition of ``n`` customers."""
    sizes = crp_block_sizes(spec, n, rng)
    return Fingerprint(np.bincount(sizes)[1:], n)


def spec_to_dict(spec) -> dict:
    if isinstance(spec, Zipf):
        return {"kind": "zipf", "s": spec.s}
    if isinstance(spec, DoubleZipf):
        return {"kind": "double_zipf", "alpha": spec.alpha, "beta": spec.beta, "J": spec.J}
    if isinstance(spec, Crp):
        return {"kind": "crp", "alpha": spec.alpha}
    if isinstance(spec, Discrete):
        return {"kind": "discrete", "masses": list(spec.masses)}
    raise TypeError(type(spec).__name__)


def spec_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "zipf":
        if "s" in d:
            return Zipf(float(d["s"]))
        return Zipf.from_tail_index(float(d["alpha"]))
    if kind == "double_zipf":
        return DoubleZipf(float(d["alpha"]), float(d["beta"]), int(d["J"]))
    if kind == "crp":
        return Crp(float(d["alpha"]))
    if kind == "discrete":
        return Discrete(tuple(d["masses"]))
    raise ValueError(f"unknown distribution kind {kind!r}")
