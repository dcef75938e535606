"""Monte-Carlo risk experiments and the subsample-split evaluation protocol.

Every replicate ``r`` draws from its own child stream ``SeededRng(seed).child(r)``,
so results do not depend on execution order or on the number of workers.
Per-replicate scalars are reduced with ``math.fsum``, which is exactly
rounded and therefore order independent.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .estimators import (
    DEFAULT_THRESHOLD_C,
    default_smoothings,
    good_toulmin,
    plugin_unseen,
    smoothed_gt,
)
from .partition import Fingerprint, SampleCounts, fingerprint_from_count_array
from .samplers import (
    BIT_GENERATOR,
    Crp,
    DoubleZipf,
    SeededRng,
    crp_assignments,
    crp_block_sizes,
    draws,
    spec_to_dict,
)
from .tail_index import solve_mle

log = logging.getLogger(__name__)

SMOOTHED = ("et-poisson", "et-binomial-2", "et-binomial-1")
ESTIMATORS = ("plugin", "plugin-known-alpha", "good-toulmin", *SMOOTHED, "null")
SEED_RULE = f"SeedSequence(entropy=seed, spawn_key=(replicate,)) -> {BIT_GENERATOR}"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    spec: object
    n: int
    lam: float = 1.0
    replicates: int = 100
    seed: int = 0
    estimators: tuple = ("plugin",)
    threshold_c: float = DEFAULT_THRESHOLD_C
    name: str = ""

    def errors(self) -> list[str]:
        out = []
        if not isinstance(self.replicates, int) or self.replicates < 1:
            out.append(f"replicates must be a positive integer, got {self.replicates!r}")
        if not isinstance(self.n, int) or self.n < 1:
            out.append(f"n must be a positive integer, got {self.n!r}")
        if not (isinstance(self.lam, (int, float)) and self.lam > 0 and math.isfinite(self.lam)):
            out.append(f"lambda must be positive, got {self.lam!r}")
        if not self.threshold_c > 0:
            out.append(f"threshold_c must be positive, got {self.threshold_c!r}")
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            out.append(f"unknown estimators {unknown}; choose from {list(ESTIMATORS)}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            out.append("seed must be a 64-bit nonnegative integer")
        return out

    def validate(self) -> "ExperimentConfig":
        errs = self.errors()
        if errs:
            raise ConfigError("; ".join(errs))
        return self

    @property
    def m(self) -> int:
        return int(math.floor(self.lam * self.n))

    @property
    def true_alpha(self) -> float:
        return self.spec.tail_index

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "spec": spec_to_dict(self.spec),
            "n": self.n,
            "lambda": self.lam,
            "replicates": self.replicates,
            "seed": self.seed,
            "estimators": list(self.estimators),
            "threshold_c": self.threshold_c,
        }


@dataclass
class RiskReport:
    replicates_used: int
    seed: int
    alpha_risk: float | None = None
    alpha_risk_se: float | None = None
    unseen_risk_by_estimator: dict = field(default_factory=dict)
    unseen_risk_se: dict = field(default_factory=dict)
    mean_unseen: float | None = None
    mean_unseen_se: float | None = None
    unseen_replicates: int | None = None
    config: dict = field(default_factory=dict)

    @property
    def best_smoothed(self) -> float | None:
        vals = [self.unseen_risk_by_estimator[k] for k in SMOOTHED if k in self.unseen_risk_by_estimator]
        return min(vals) if vals else None

    def to_dict(self) -> dict:
        d = {
            "config": self.config,
            "seed": self.seed,
            "seed_rule": SEED_RULE,
            "replicates_used": self.replicates_used,
            "alpha_risk": self.alpha_risk,
            "alpha_risk_se": self.alpha_risk_se,
            "unseen_risk": dict(sorted(self.unseen_risk_by_estimator.items())),
            "unseen_risk_se": dict(sorted(self.unseen_risk_se.items())),
            "mean_unseen": self.mean_unseen,
            "mean_unseen_se": self.mean_unseen_se,
            "unseen_replicates": self.unseen_replicates,
        }
        if self.best_smoothed is not None:
            d["unseen_risk_best_smoothed"] = self.best_smoothed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RiskReport":
        return cls(
            replicates_used=d["replicates_used"],
            seed=d["seed"],
            alpha_risk=d.get("alpha_risk"),
            alpha_risk_se=d.get("alpha_risk_se"),
            unseen_risk_by_estimator=dict(d.get("unseen_risk", {})),
            unseen_risk_se=dict(d.get("unseen_risk_se", {})),
            mean_unseen=d.get("mean_unseen"),
            mean_unseen_se=d.get("mean_unseen_se"),
            unseen_replicates=d.get("unseen_replicates"),
            config=d.get("config", {}),
        )


# ------------------------------------------------------------ aggregation


def mean_and_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    n = x.size
    mu = math.fsum(x.tolist()) / n
    if n < 2:
        return mu, math.nan
    var = math.fsum(((x - mu) ** 2).tolist()) / (n - 1)
    return mu, math.sqrt(var / n)


def ratio_risk(estimates, truth) -> tuple[float, float]:
    """``mean((est - truth)^2) / mean(truth)^2`` with a delta-method standard error."""
    est = np.asarray(estimates, dtype=float)
    u = np.asarray(truth, dtype=float)
    sq = (est - u) ** 2
    a, _ = mean_and_se(sq)
    b, _ = mean_and_se(u)
    if b == 0:
        return math.inf, math.nan
    risk = a / b**2
    n = u.size
    if n < 2:
        return risk, math.nan
    cov = np.cov(np.vstack([sq, u]), ddof=1) / n
    grad = np.array([1.0 / b**2, -2.0 * a / b**3])
    return risk, float(math.sqrt(max(grad @ cov @ grad, 0.0)))


# ------------------------------------------------------------- replicates


def _alpha_hat(fp: Fingerprint) -> float:
    return solve_mle(fp).alpha_hat


def _prefix_stats(spec, n: int, total: int, rng) -> tuple[Fingerprint, int]:
    """Fingerprint of the first ``n`` draws and the distinct count of all ``total``."""
    if isinstance(spec, Crp):
        table_of = crp_assignments(spec, total, rng)
        prefix = np.bincount(table_of[:n])
        prefix = prefix[prefix > 0]
        return fingerprint_from_count_array(prefix), int(table_of.max()) + 1
    x = draws(spec, total, rng)
    _, counts = np.unique(x[:n], return_counts=True)
    k_total = counts.size if total == n else distinct_labels(x)
    return fingerprint_from_count_array(counts), int(k_total)


def distinct_labels(x: np.ndarray, dense_below: int = 1 << 22) -> int:
    """Number of distinct positive integer-valued labels in ``x``.

    Small labels are marked in a dense table; only the rest are sorted.
    """
    small = x < dense_below
    seen = np.zeros(dense_below, dtype=bool)
    seen[x[small].astype(np.int64)] = True
    return int(np.count_nonzero(seen)) + int(np.unique(x[~small]).size)


def _alpha_replicate(spec, n: int, seed: int, r: int) -> float:
    rng = SeededRng(seed).child(r)
    if isinstance(spec, Crp):
        sizes = crp_block_sizes(spec, n, rng)
        fp = fingerprint_from_count_array(sizes)
    else:
        _, counts = np.unique(draws(spec, n, rng), return_counts=True)
        fp = fingerprint_from_count_array(counts)
    return _alpha_hat(fp)


def evaluate_estimators(fp: Fingerprint, lam: float, estimators, threshold_c: float, true_alpha=None) -> dict:
    """Value of every requested estimator on one observed fingerprint."""
    out = {}
    smooth = None
    a_hat = None
    for name in estimators:
        if name == "plugin":
            if a_hat is None:
                a_hat = _alpha_hat(fp)
            out[name] = plugin_unseen(fp, a_hat, lam, threshold_c).value
        elif name == "plugin-known-alpha":
            out[name] = fp.distinct * math.expm1(true_alpha * math.log1p(lam))
        elif name == "good-toulmin":
            out[name] = good_toulmin(fp, lam)
        elif name in SMOOTHED:
            if smooth is None:
                smooth = default_smoothings(fp.n, lam)
            out[name] = smoothed_gt(fp, lam, smooth[name])
        elif name == "null":
            out[name] = 0.0
        else:
            raise ConfigError(f"unknown estimator {name!r}")
    return out


def _unseen_replicate(config: ExperimentConfig, r: int) -> tuple[int, dict]:
    rng = SeededRng(config.seed).child(r)
    n, m = config.n, config.m
    fp, k_total = _prefix_stats(config.spec, n, n + m, rng)
    u = k_total - fp.distinct
    est = evaluate_estimators(fp, config.lam, config.estimators, config.threshold_c, config.true_alpha)
    return u, est


def _run(func, args_list, threads: int):
    if threads <= 1 or len(args_list) < 2:
        return [func(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, *zip(*args_list), chunksize=max(1, len(args_list) // (4 * threads))))


# ---------------------------------------------------------------- drivers


def mc_alpha_risk(config: ExperimentConfig, threads: int = 1) -> RiskReport:
    """Monte-Carlo mean of ``(alpha_hat - alpha_0)^2`` over independent samples of size ``n``."""
    config.validate()
    a0 = config.true_alpha
    args = [(config.spec, config.n, config.seed, r) for r in range(config.replicates)]
    alphas = np.array(_run(_alpha_replicate, args, threads))
    risk, se = mean_and_se((alphas - a0) ** 2)
    return RiskReport(
        replicates_used=config.replicates,
        seed=config.seed,
        alpha_risk=risk,
        alpha_risk_se=se,
        config=config.to_dict(),
    )


def mc_unseen_risk(config: ExperimentConfig, threads: int = 1) -> RiskReport:
    """Normalised risk ``E[(U_hat - U)^2] / E[U]^2`` of each configured estimator.

    Each replicate draws ``n + floor(lam n)`` observations in one stream; the
    truth is ``K_{n+m} - K_n`` and estimators see only the first ``n``.
    """
    config.validate()
    args = [(config, r) for r in range(config.replicates)]
    results = _run(_unseen_replicate, args, threads)
    u = np.array([res[0] for res in results], dtype=float)
    risks, ses = {}, {}
    for name in config.estimators:
        est = np.array([res[1][name] for res in results])
        risks[name], ses[name] = ratio_risk(est, u)
    mu, mu_se = mean_and_se(u)
    return RiskReport(
        replicates_used=config.replicates,
        seed=config.seed,
        unseen_risk_by_estimator=risks,
        unseen_risk_se=ses,
        mean_unseen=mu,
        mean_unseen_se=mu_se,
        unseen_replicates=config.replicates,
        config=config.to_dict(),
    )


def rate_fit(points) -> float:
    """Slope ``r`` of the least-squares line ``log risk = -r log n + C``."""
    return rate_fit_full(points)[0]


def rate_fit_full(points) -> tuple[float, float]:
    """``(r, C)`` of the least-squares line ``log risk = -r log n + C``."""
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 2:
        raise ValueError("rate fit needs at least two points")
    if any(n <= 0 or v <= 0 for n, v in pts):
        raise ValueError("sample sizes and risks must be positive")
    x = np.log([p[0] for p in pts])
    if np.ptp(x) == 0:
        raise ValueError("rate fit needs at least two distinct sample sizes")
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return float(-slope), float(intercept)


def double_zipf_sweep(
    alpha: float,
    beta: float,
    J_values,
    n: int,
    lam: float,
    replicates: int,
    seed: int,
    unseen_replicates: int | None = None,
    estimators=("plugin",),
    threshold_c: float = DEFAULT_THRESHOLD_C,
    threads: int = 1,
) -> list[RiskReport]:
    """Alpha risk (against ``beta``) and unseen risk across ``J``, with common seeds."""
    if not 0 < beta < alpha < 1:
        raise ValueError("need 0 < beta < alpha < 1")
    unseen_replicates = replicates if unseen_replicates is None else unseen_replicates
    out = []
    for J in J_values:
        spec = DoubleZipf(alpha, beta, int(J))
        base = ExperimentConfig(spec, n, lam, replicates, seed, tuple(estimators), threshold_c, name=f"J={J}")
        a = mc_alpha_risk(base, threads)
        u = mc_unseen_risk(replace(base, replicates=unseen_replicates), threads)
        a.unseen_risk_by_estimator = u.unseen_risk_by_estimator
        a.unseen_risk_se = u.unseen_risk_se
        a.mean_unseen = u.mean_unseen
        a.mean_unseen_se = u.mean_unseen_se
        a.unseen_replicates = unseen_replicates
        out.append(a)
    return out


# -------------------------------------------------------- split protocol


@dataclass
class SplitEvalReport:
    lam: float
    n_used: int
    N: int
    mse_hat: dict
    per_split_errors: dict
    excluded_splits: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "n_used": self.n_used,
            "N": self.N,
            "mse_hat": dict(sorted(self.mse_hat.items())),
            "per_split_errors": {k: list(v) for k, v in sorted(self.per_split_errors.items())},
            "excluded_splits": self.excluded_splits,
            "seed": self.seed,
            "seed_rule": SEED_RULE,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SplitEvalReport":
        return cls(
            d["lambda"], d["n_used"], d["N"], dict(d["mse_hat"]),
            {k: list(v) for k, v in d["per_split_errors"].items()}, d["excluded_splits"], d["seed"],
        )


def realdata_protocol(
    dataset: SampleCounts,
    lam: float,
    splits: int = 100,
    seed: int = 0,
    estimators=("plugin", *SMOOTHED),
    threshold_c: float = DEFAULT_THRESHOLD_C,
) -> SplitEvalReport:
    """Subsample ``n = floor(N / (1 + lam))`` individuals without replacement and
    score each estimator's prediction of the species found only in the rest.

    Splits where the held-out part reveals no new species are excluded (the
    normalised error is undefined there) and counted.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if splits < 1:
        raise ValueError("splits must be >= 1")
    bad = [e for e in estimators if e not in ESTIMATORS or e == "plugin-known-alpha"]
    if bad:
        raise ConfigError(f"unsupported estimators {bad}")
    N = dataset.n
    n = int(math.floor(N / (1 + lam)))
    if n < 1 or n >= N:
        raise ValueError(f"N = {N} and lambda = {lam} leave an empty subsample or held-out part")
    k_full = dataset.distinct
    individuals = np.repeat(np.arange(k_full), dataset.counts)
    errors = {e: [] for e in estimators}
    excluded = 0
    root = SeededRng(seed)
    for i in range(splits):
        rng = root.child(i)
        idx = rng.choice(N, size=n, replace=False)
        sub = np.bincount(individuals[idx], minlength=k_full)
        sub = sub[sub > 0]
        u = k_full - sub.size
        if u == 0:
            excluded += 1
            continue
        fp = fingerprint_from_count_array(sub)
        vals = evaluate_estimators(fp, lam, estimators, threshold_c)
        for e in estimators:
            errors[e].append((vals[e] - u) / u)
    if excluded:
        warnings.warn(f"{excluded} of {splits} splits had no unseen species and were excluded")
    mse = {}
    for e, errs in errors.items():
        mse[e] = math.fsum(x * x for x in errs) / len(errs) if errs else math.nan
    return SplitEvalReport(lam, n, N, mse, errors, excluded, seed)
