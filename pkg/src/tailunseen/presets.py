"""Named experiment configurations reproducing the published simulations.

``paper-table2`` uses n = 10_000: the published unseen means match that
sample size (at n = 1000 they come out a factor 10**alpha0 smaller).  The
threshold constant is set to 10 wherever the published risks require the
indicator never to fire.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .harness import SMOOTHED, ConfigError, ExperimentConfig
from .samplers import Zipf, spec_from_dict

TABLE1_ALPHAS = (0.2, 0.5, 0.8)
TABLE1_NS = (1_000, 10_000, 100_000, 1_000_000)
TABLE2_LAMBDAS = (1.1, 1.5, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 40)
LARGE_LAMBDAS = (100, 200, 500, 1_000, 2_000, 5_000, 10_000)
DOUBLE_ZIPF_J = tuple(range(10, 291, 20))
SIM_THRESHOLD_C = 10.0


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str  # "alpha", "unseen" or "double-zipf"
    configs: tuple = ()
    sweep: dict = field(default_factory=dict)


def _table1(seed: int) -> Preset:
    cfgs = tuple(
        ExperimentConfig(Zipf.from_tail_index(a), n, 1.0, 1000, seed, (), name=f"alpha0={a},n={n}")
        for a in TABLE1_ALPHAS
        for n in TABLE1_NS
    )
    return Preset("paper-table1", "alpha", cfgs)


def _table2(seed: int) -> Preset:
    cfgs = tuple(
        ExperimentConfig(
            Zipf.from_tail_index(a), 10_000, float(lam), 1000, seed, ("plugin", *SMOOTHED),
            SIM_THRESHOLD_C, name=f"alpha0={a},lambda={lam}",
        )
        for a in TABLE1_ALPHAS
        for lam in TABLE2_LAMBDAS
    )
    return Preset("paper-table2", "unseen", cfgs)


def _large_lambda(seed: int) -> Preset:
    cfgs = tuple(
        ExperimentConfig(
            Zipf.from_tail_index(0.8), 1000, float(lam), 100, seed, ("plugin",),
            SIM_THRESHOLD_C, name=f"alpha0=0.8,lambda={lam}",
        )
        for lam in LARGE_LAMBDAS
    )
    return Preset("paper-large-lambda", "unseen", cfgs)


def _double_zipf(seed: int) -> Preset:
    sweep = dict(
        alpha=0.5, beta=0.4, J_values=list(DOUBLE_ZIPF_J), n=1000, lam=50.0,
        replicates=1000, unseen_replicates=100, seed=seed,
        estimators=["plugin"], threshold_c=SIM_THRESHOLD_C,
    )
    return Preset("paper-double-zipf", "double-zipf", sweep=sweep)


PRESETS = {
    "paper-table1": _table1,
    "paper-table2": _table2,
    "paper-large-lambda": _large_lambda,
    "paper-double-zipf": _double_zipf,
}


def get_preset(name: str, seed: int = 0) -> Preset:
    try:
        return PRESETS[name](seed)
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def experiment_from_dict(doc: dict, seed: int | None = None) -> Preset:
    """Build a preset from a config document's ``experiment`` section.

    Every problem found is collected and raised together as a ``ConfigError``.
    """
    errors: list[str] = []
    if not isinstance(doc, dict) or "experiment" not in doc:
        raise ConfigError("config document needs an 'experiment' section")
    if doc.get("schema", "v1") != "v1":
        errors.append(f"unsupported schema {doc.get('schema')!r}")
    exp = doc["experiment"]
    if not isinstance(exp, dict):
        raise ConfigError("'experiment' must be a mapping")
    seed = exp.get("seed", 0) if seed is None else seed

    if "preset" in exp:
        name = exp["preset"]
        if name not in PRESETS:
            errors.append(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        if errors:
            raise ConfigError("; ".join(errors))
        return get_preset(name, seed)

    kind = exp.get("kind")
    if kind not in ("alpha", "unseen", "double-zipf"):
        errors.append(f"experiment.kind must be 'alpha', 'unseen' or 'double-zipf', got {kind!r}")
    if kind == "double-zipf":
        required = ("alpha", "beta", "J_values", "n", "lambda", "replicates")
        errors += [f"missing field experiment.{k}" for k in required if k not in exp]
        if errors:
            raise ConfigError("; ".join(errors))
        sweep = dict(
            alpha=exp["alpha"], beta=exp["beta"], J_values=list(exp["J_values"]), n=exp["n"],
            lam=exp["lambda"], replicates=exp["replicates"],
            unseen_replicates=exp.get("unseen_replicates", exp["replicates"]), seed=seed,
            estimators=list(exp.get("estimators", ["plugin"])),
            threshold_c=exp.get("threshold_c", 1.0),
        )
        if not 0 < sweep["beta"] < sweep["alpha"] < 1:
            errors.append("need 0 < beta < alpha < 1")
        if errors:
            raise ConfigError("; ".join(errors))
        return Preset("custom", "double-zipf", sweep=sweep)

    spec = None
    if "spec" not in exp:
        errors.append("missing field experiment.spec")
    else:
        try:
            spec = spec_from_dict(exp["spec"])
        except (ValueError, KeyError, TypeError) as err:
            errors.append(f"experiment.spec: {err}")
    for k in ("n", "replicates"):
        if k not in exp:
            errors.append(f"missing field experiment.{k}")
    if kind == "unseen" and "lambda" not in exp:
        errors.append("missing field experiment.lambda")
    estimators = tuple(exp.get("estimators", ("plugin",) if kind == "unseen" else ()))
    threshold_c = exp.get("threshold_c", 1.0)
    if not isinstance(threshold_c, (int, float)):
        errors.append(f"threshold_c must be a number, got {threshold_c!r}")
        threshold_c = 1.0
    cfg = ExperimentConfig(
        spec, exp.get("n", 1), exp.get("lambda", 1.0), exp.get("replicates", 1), seed,
        estimators, threshold_c, name=exp.get("name", ""),
    )
    errors += cfg.errors()
    if errors:
        raise ConfigError("; ".join(errors))
    return Preset("custom", kind, (cfg,))
