"""Maximum-likelihood tail index under the alpha-stable partition model.

The likelihood of an observed partition under the (alpha, 0) Chinese
restaurant process is log-concave in alpha, and its maximiser is the unique
root in (0, 1) of the score

    phi(alpha) = sum_{k=1}^{n-1} alpha / (k - alpha) * C[k+1] - (C[1] - 1).

Sums over ``k`` are regrouped by block size: a block of size ``l`` contributes
to ``C[2..l]``, and ``sum_{k=1}^{l-1} 1/(k - a) = psi(l - a) - psi(1 - a)``,
so each evaluation costs one digamma call per distinct block size.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, polygamma, psi

from .partition import CumulativeCounts, Fingerprint

LOWER = 1e-9
UPPER = 1.0 - 1e-9
DEFAULT_TOL = 1e-10


class Boundary(str, enum.Enum):
    INTERIOR = "interior"
    ALL_SINGLETONS = "all_singletons"
    SINGLE_BLOCK = "single_block"


@dataclass(frozen=True)
class TailIndexEstimate:
    alpha_hat: float
    boundary: Boundary
    iterations: int = 0
    residual: float = 0.0


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def _blocks(stats: Fingerprint | CumulativeCounts) -> tuple[np.ndarray, np.ndarray, int]:
    """(distinct block sizes, multiplicities, K_n) from either representation."""
    if isinstance(stats, CumulativeCounts):
        c = stats.c
        m = c - np.append(c[1:], 0)
    else:
        m = stats.m
    sizes = np.flatnonzero(m) + 1
    return sizes, m[sizes - 1].astype(float), int(m.sum())


def score(alpha: float, stats: Fingerprint | CumulativeCounts) -> float:
    """Score function phi_n at ``alpha``; accepts C or M representations."""
    _check_alpha(alpha)
    sizes, mult, k = _blocks(stats)
    big = sizes > 1
    harmonic = psi(sizes[big] - alpha) - psi(1.0 - alpha)
    return alpha * math.fsum(mult[big] * harmonic) - (k - 1)


def score_derivative(alpha: float, stats: Fingerprint | CumulativeCounts) -> float:
    _check_alpha(alpha)
    sizes, mult, _ = _blocks(stats)
    big = sizes > 1
    s = sizes[big]
    # sum_{k<l} k/(k-a)^2 = sum 1/(k-a) + a * sum 1/(k-a)^2
    first = psi(s - alpha) - psi(1.0 - alpha)
    second = polygamma(1, 1.0 - alpha) - polygamma(1, s - alpha)
    return math.fsum(mult[big] * (first + alpha * second))


def solve_mle(fp: Fingerprint, tol: float = DEFAULT_TOL, max_iter: int = 200) -> TailIndexEstimate:
    """Root of the score in (0, 1) by Newton steps kept inside a bisection bracket.

    All-singleton samples return alpha = 1 and single-block samples alpha = 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = fp.distinct
    if k == fp.n:
        return TailIndexEstimate(1.0, Boundary.ALL_SINGLETONS)
    if k == 1:
        return TailIndexEstimate(0.0, Boundary.SINGLE_BLOCK)

    lo, hi = LOWER, UPPER
    x = 0.5
    f = score(x, fp)
    it = 0
    for it in range(1, max_iter + 1):
        if abs(f) <= tol:
            break
        if f < 0:
            lo = x
        else:
            hi = x
        d = score_derivative(x, fp)
        step = x - f / d if d > 0 else 0.5 * (lo + hi)
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        if step == x or hi - lo <= 4 * np.finfo(float).eps:
            break
        x = step
        f = score(x, fp)
    return TailIndexEstimate(float(x), Boundary.INTERIOR, it, abs(f))


def log_eppf(alpha: float, fp: Fingerprint) -> float:
    """Log-probability of the fingerprint under the (alpha, 0) partition law."""
    _check_alpha(alpha)
    return float(_log_eppf_grid(np.array([alpha]), fp)[0])


def _log_eppf_grid(alphas: np.ndarray, fp: Fingerprint) -> np.ndarray:
    sizes, mult, k = _blocks(fp)
    n = fp.n
    a = np.asarray(alphas, dtype=float)[:, None]
    # prod_{i=0}^{j-2} (1 - a + i) = Gamma(j - a) / Gamma(1 - a)
    rising = gammaln(sizes[None, :] - a) - gammaln(1.0 - a)
    out = (k - 1) * np.log(a[:, 0]) + gammaln(k) - gammaln(n) + rising @ mult
    return out


def mle_grid_oracle(fp: Fingerprint, grid_size: int = 1000, refinements: int = 2) -> float:
    """Brute-force maximiser of :func:`log_eppf` on a uniform grid, refined locally.

    Only meant as a test oracle for :func:`solve_mle`.
    """
    k = fp.distinct
    if k in (1, fp.n):
        raise ValueError("maximum likelihood estimate is on the boundary")
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    lo, hi = 0.0, 1.0
    best = 0.5
    for _ in range(refinements + 1):
        grid = np.linspace(lo, hi, grid_size + 2)[1:-1]
        grid = grid[(grid > 0) & (grid < 1)]
        values = _log_eppf_grid(grid, fp)
        i = int(np.argmax(values))
        best = float(grid[i])
        step = grid[1] - grid[0]
        lo, hi = max(best - step, 0.0), min(best + step, 1.0)
    return best


def grid_oracle_resolution(grid_size: int = 1000, refinements: int = 2) -> float:
    """Spacing of the finest grid used by :func:`mle_grid_oracle`."""
    step = 1.0 / (grid_size + 1)
    for _ in range(refinements):
        step = 2 * step / (grid_size + 1)
    return step


def estimate_alpha(stats) -> TailIndexEstimate:
    """Convenience wrapper accepting a fingerprint or cumulative counts."""
    if isinstance(stats, CumulativeCounts):
        c = stats.c
        stats = Fingerprint(c - np.append(c[1:], 0), stats.n)
    return solve_mle(stats)


__all__ = [
    "Boundary",
    "TailIndexEstimate",
    "score",
    "score_derivative",
    "solve_mle",
    "log_eppf",
    "mle_grid_oracle",
    "grid_oracle_resolution",
]
