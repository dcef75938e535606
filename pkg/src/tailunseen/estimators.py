"""Estimators of the number of unseen species.

``plugin_unseen`` extrapolates the distinct count with an estimated tail
index; ``good_toulmin`` and ``smoothed_gt`` are the fingerprint-series
baselines.  All take the fingerprint of the observed sample and the
extrapolation ratio ``lam = m / n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import stats

from .partition import Fingerprint

DEFAULT_THRESHOLD_C = 1.0


@dataclass(frozen=True)
class UnseenEstimate:
    value: float
    thresholded: bool
    alpha_used: float
    lam: float
    n: int


@dataclass(frozen=True)
class SmoothingSpec:
    """Distribution of the truncation variable ``L`` damping the series.

    ``kind='none'`` keeps every term (plain Good-Toulmin).
    """

    kind: Literal["none", "poisson", "binomial"] = "none"
    rate: float = 0.0
    trials: int = 0
    prob: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "poisson", "binomial"):
            raise ValueError(f"unknown smoothing kind {self.kind!r}")
        if self.rate < 0:
            raise ValueError("poisson rate must be >= 0")
        if self.trials < 0 or int(self.trials) != self.trials:
            raise ValueError("binomial trials must be a nonnegative integer")
        if not 0 <= self.prob <= 1:
            raise ValueError("binomial success probability must lie in [0, 1]")

    def tail_probabilities(self, i: np.ndarray) -> np.ndarray:
        """``P(L >= i)`` for integer ``i >= 1``."""
        i = np.asarray(i)
        if self.kind == "none":
            return np.ones(i.shape)
        if self.kind == "poisson":
            return stats.poisson.sf(i - 1, self.rate)
        return stats.binom.sf(i - 1, self.trials, self.prob)


def _check_lambda(lam: float) -> None:
    if not lam > 0 or not math.isfinite(lam):
        raise ValueError(f"lambda must be positive, got {lam!r}")


def threshold_passes(lam: float, alpha_hat: float, n: int, threshold_c: float = DEFAULT_THRESHOLD_C) -> bool:
    """``log(lam) <= C * sqrt(n**alpha_hat / log(n))``."""
    if n < 2:
        return True
    return math.log(lam) <= threshold_c * math.sqrt(n**alpha_hat / math.log(n))


def plugin_unseen(
    fp: Fingerprint, alpha_hat: float, lam: float, threshold_c: float = DEFAULT_THRESHOLD_C
) -> UnseenEstimate:
    """``K_n ((1 + lam)**alpha_hat - 1)``, zeroed when ``log lam`` exceeds the threshold."""
    _check_lambda(lam)
    if not 0 <= alpha_hat <= 1:
        raise ValueError("alpha_hat must lie in [0, 1]")
    if not threshold_c > 0:
        raise ValueError("threshold constant must be positive")
    n = fp.n
    if not threshold_passes(lam, alpha_hat, n, threshold_c):
        return UnseenEstimate(0.0, True, alpha_hat, lam, n)
    value = fp.distinct * math.expm1(alpha_hat * math.log1p(lam))
    return UnseenEstimate(value, False, alpha_hat, lam, n)


def loss(u: float, v: float, alpha: float, lam: float, n: int) -> float:
    """Squared error normalised by ``(lam * n)**(2 alpha)``."""
    _check_lambda(lam)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not n > 0:
        raise ValueError("n must be positive")
    return (u - v) ** 2 / (lam * n) ** (2 * alpha)


def _alternating_sum(fp: Fingerprint, lam: float, weights=None) -> float:
    i = fp.sizes()
    if i.size == 0:
        return 0.0
    m = fp.m[i - 1].astype(float)
    w = np.ones(i.size) if weights is None else weights(i)
    keep = w > 0
    i, m, w = i[keep], m[keep], w[keep]
    # -(-lam)^i = (-1)^(i+1) lam^i; magnitudes via logs to survive lam^i overflow
    sign = np.where(i % 2 == 1, 1.0, -1.0)
    with np.errstate(over="ignore"):
        terms = sign * np.exp(i * math.log(lam) + np.log(m) + np.log(w))
    if not np.all(np.isfinite(terms)):
        return float(np.sum(terms))
    return math.fsum(terms.tolist())


def good_toulmin(fp: Fingerprint, lam: float) -> float:
    """``-sum_i (-lam)**i M_i``; diverges for ``lam > 1`` and is returned as is."""
    _check_lambda(lam)
    return _alternating_sum(fp, lam)


def smoothed_gt(fp: Fingerprint, lam: float, smoothing: SmoothingSpec) -> float:
    """``-sum_i (-lam)**i P(L >= i) M_i`` with ``L`` drawn from ``smoothing``."""
    _check_lambda(lam)
    if smoothing.kind == "none":
        return _alternating_sum(fp, lam)
    return _alternating_sum(fp, lam, smoothing.tail_probabilities)


def default_smoothings(n: int, lam: float) -> dict[str, SmoothingSpec]:
    """The three standard smoothing choices for extrapolation ratio ``lam > 1``.

    Poisson rate ``log(n (lam+1)^2 / (lam-1)) / (2 lam)``; binomial with
    ``k = ceil(log2(n lam^2 / (lam-1)) / 2)`` trials and success probability
    ``2/(lam+2)`` or ``1/(lam+1)``.  For ``lam <= 1`` the unsmoothed series
    already converges and is used for all three.
    """
    if lam <= 1:
        plain = SmoothingSpec("none")
        return {"et-poisson": plain, "et-binomial-2": plain, "et-binomial-1": plain}
    r = math.log(n * (lam + 1) ** 2 / (lam - 1)) / (2 * lam)
    k = max(0, math.ceil(0.5 * math.log2(n * lam**2 / (lam - 1))))
    return {
        "et-poisson": SmoothingSpec("poisson", rate=r),
        "et-binomial-2": SmoothingSpec("binomial", trials=k, prob=2 / (lam + 2)),
        "et-binomial-1": SmoothingSpec("binomial", trials=k, prob=1 / (lam + 1)),
    }
