"""Power-law plausibility checks and exact expectation oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats
from scipy.special import gammaln

from .partition import CumulativeCounts
from .samplers import Crp, Discrete, DoubleZipf, Zipf, survival_function


class InsufficientPointsError(ValueError):
    pass


@dataclass(frozen=True)
class SignatureFit:
    A: float
    B: float
    residual_rms: float
    j_range: tuple[int, int]
    points: int


DEFAULT_MIN_COUNT = 100


def default_j_max(c: CumulativeCounts, min_count: int = DEFAULT_MIN_COUNT) -> int:
    """Largest ``j`` with ``C[j] >= min_count`` (at least 3).

    ``Var(log C[j])`` is roughly ``1 / C[j]``; the default keeps every cell's
    log-scale noise near 0.1 or below.  With a small floor the fit is swamped
    by thousands of highly correlated cells set by the few largest blocks.
    """
    ok = np.flatnonzero(c.c >= min_count)
    return max(int(ok[-1]) + 1 if ok.size else 0, 3)


def fit_power_signature(c: CumulativeCounts, j_max: int | None = None) -> SignatureFit:
    """Least-squares fit of ``log C[j] = log(Gamma(j - A) / Gamma(j)) + B``.

    The intercept is profiled out (mean residual at fixed ``A``), leaving a
    bounded 1-d search over ``A`` in (0, 1).
    """
    if j_max is None:
        j_max = default_j_max(c)
    j = np.arange(1, min(j_max, c.c.size) + 1)
    cj = c.c[: j.size]
    j = j[cj > 0]
    if j.size < 3:
        raise InsufficientPointsError(f"need >= 3 positive cumulative counts, got {j.size}")
    y = np.log(c.c[j - 1].astype(float))
    lgj = gammaln(j)

    def sse(a):
        r = y - (gammaln(j - a) - lgj)
        r = r - r.mean()
        return float(r @ r)

    grid = np.linspace(1e-4, 1 - 1e-4, 200)
    vals = [sse(a) for a in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(sse, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    a = float(res.x)
    b = float(np.mean(y - (gammaln(j - a) - lgj)))
    return SignatureFit(a, b, math.sqrt(sse(a) / j.size), (int(j[0]), int(j[-1])), int(j.size))


# ----------------------------------------------------------- expectations


def _explicit(spec):
    if isinstance(spec, Crp):
        raise ValueError("CRP has no fixed masses")
    return spec


def _head_size(spec, n: int, cutoff: float) -> int:
    """Number of atoms with mass above ``cutoff / n``."""
    if isinstance(spec, Discrete):
        return len(spec.masses)
    x = cutoff / n
    return 0 if x >= spec.max_mass else spec.survival(x)


def _log_comb(a: int, b: int) -> float:
    return gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1)


def _tail_series(spec, n: int, k: int, j0: int, rtol: float = 1e-17) -> float:
    """``sum_{j >= j0} P(Bin(n, p_j) >= k)`` via the power-series expansion

    ``P(Bin(n, p) >= k) = sum_{i >= k} (-1)^(i-k) C(i-1, k-1) C(n, i) p^i``

    and exact power sums of the tail masses.  Converges geometrically once
    ``n * p_j0`` is small.
    """
    if isinstance(spec, Discrete) and j0 > len(spec.masses):
        return 0.0
    terms = []
    for i in range(k, n + 1):
        psum = spec.power_sum_tail(i, j0)
        if psum <= 0.0:
            break
        t = math.exp(_log_comb(i - 1, k - 1) + _log_comb(n, i) + math.log(psum))
        terms.append(t if (i - k) % 2 == 0 else -t)
        if t <= rtol * abs(terms[0]):
            break
    return math.fsum(terms)


def expected_cumulative(spec, n: int, k: int, cutoff: float = 1e-3) -> float:
    """``E[C_{n,k}] = sum_j P(Bin(n, p_j) >= k)`` for an i.i.d. sample of size ``n``.

    Atoms with ``n p_j > cutoff`` are summed directly; the rest through
    :func:`_tail_series`.
    """
    spec = _explicit(spec)
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    if k > n:
        return 0.0
    head = _head_size(spec, n, cutoff)
    p = spec.mass(np.arange(1, head + 1))
    total = math.fsum(stats.binom.sf(k - 1, n, p)) if head else 0.0
    return total + _tail_series(spec, n, k, head + 1)


def expected_distinct(spec, n: int, cutoff: float = 1e-4) -> float:
    """``E[K_n] = sum_j (1 - (1 - p_j)^n)``, evaluated independently of
    :func:`expected_cumulative` (own head formula and truncation point)."""
    spec = _explicit(spec)
    head = _head_size(spec, n, cutoff)
    p = spec.mass(np.arange(1, head + 1))
    with np.errstate(divide="ignore"):
        total = math.fsum(-np.expm1(n * np.log1p(-p))) if head else 0.0
    if isinstance(spec, Discrete) and head >= len(spec.masses):
        return total
    # 1 - (1-p)^n = sum_{i=1}^n (-1)^(i+1) C(n, i) p^i
    terms = []
    for i in range(1, n + 1):
        psum = spec.power_sum_tail(i, head + 1)
        if psum <= 0.0:
            break
        t = math.exp(_log_comb(n, i) + math.log(psum))
        terms.append(t if i % 2 == 1 else -t)
        if t <= 1e-17 * terms[0]:
            break
    return total + math.fsum(terms)


def expected_fingerprint(spec, n: int, k: int) -> float:
    """``E[M_{n,k}] = E[C_{n,k}] - E[C_{n,k+1}]``."""
    upper = expected_cumulative(spec, n, k + 1) if k < n else 0.0
    return expected_cumulative(spec, n, k) - upper


# ----------------------------------------------------------- class margin


@dataclass(frozen=True)
class ClassMembership:
    alpha: float
    L: float
    margin: float
    x_at_sup: float


def tail_constant(spec, alpha: float) -> float:
    """``lim_{x -> 0} x**alpha * Fbar(x)``; infinite if ``alpha`` is below the tail index."""
    if isinstance(spec, Discrete):
        return 0.0
    if isinstance(spec, Zipf):
        idx, z = spec.tail_index, spec.normalizer
    elif isinstance(spec, DoubleZipf):
        idx, z = spec.beta, spec.normalizer
    else:
        raise ValueError("CRP has no fixed masses")
    if math.isclose(alpha, idx, rel_tol=1e-12):
        return z**-alpha
    return 0.0 if alpha > idx else math.inf


def class_margin(spec, alpha: float, grid: int = 10_000, x_min: float | None = None) -> ClassMembership:
    """Grid approximation (a lower bound) of
    ``sup_x |x^alpha Fbar(x) - L| / sqrt(x^alpha log(e/x))``.

    The grid is log-spaced on ``[x_min, 1]``; ``x_min`` defaults to half the
    smallest mass for finite supports and ``1e-12`` otherwise.
    """
    spec = _explicit(spec)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if grid < 2:
        raise ValueError("grid must have at least two points")
    L = tail_constant(spec, alpha)
    if x_min is None:
        x_min = spec.min_mass / 2 if isinstance(spec, Discrete) else 1e-12
    if math.isinf(L):
        return ClassMembership(alpha, L, math.inf, x_min)
    xs = np.logspace(math.log10(x_min), 0.0, grid)
    fbar = np.array([survival_function(spec, x) if x < spec.max_mass else 0 for x in xs], dtype=float)
    xa = xs**alpha
    dev = np.abs(xa * fbar - L) / np.sqrt(xa * np.log(math.e / xs))
    i = int(np.argmax(dev))
    return ClassMembership(alpha, L, float(dev[i]), float(xs[i]))
