"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numeric-domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import DataError, ReportDocument, dumps, read_sample, to_csv, write_counts_csv, write_report
from .diagnostics import InsufficientPointsError, fit_power_signature
from .estimators import DEFAULT_THRESHOLD_C, default_smoothings, good_toulmin, plugin_unseen, smoothed_gt
from .harness import (
    ESTIMATORS,
    SMOOTHED,
    ConfigError,
    double_zipf_sweep,
    mc_alpha_risk,
    mc_unseen_risk,
    realdata_protocol,
)
from .partition import SampleCounts, cumulative_from_fingerprint, fingerprint_from_counts
from .presets import PRESETS, experiment_from_dict, get_preset
from .samplers import BIT_GENERATOR, Crp, DoubleZipf, SeededRng, Zipf, crp_assignments, draws
from .tail_index import Boundary, solve_mle

EXIT_USAGE, EXIT_DATA, EXIT_DOMAIN = 2, 3, 4


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit nonnegative integer")
    return v


def _emit(doc: ReportDocument, args) -> None:
    out = to_csv(doc) if args.format == "csv" else dumps(doc)
    sys.stdout.write(out)


def _load(args) -> SampleCounts:
    return read_sample(args.input, args.input_format)


def _sample_summary(sample: SampleCounts) -> dict:
    return {"n": sample.n, "K_n": sample.distinct}


# --------------------------------------------------------------- commands


def cmd_alpha(args) -> int:
    sample = _load(args)
    fp = fingerprint_from_counts(sample)
    est = solve_mle(fp)
    if est.boundary is not Boundary.INTERIOR:
        print(f"warning: boundary case ({est.boundary.value}); alpha_hat set to {est.alpha_hat:g} by convention",
              file=sys.stderr)
    results = {
        "alpha_hat": est.alpha_hat,
        "boundary": est.boundary.value,
        "iterations": est.iterations,
        "residual": est.residual,
        **_sample_summary(sample),
    }
    _emit(ReportDocument("alpha", {"input": str(args.input)}, results), args)
    return 0


def cmd_unseen(args) -> int:
    sample = _load(args)
    fp = fingerprint_from_counts(sample)
    if args.alpha is not None:
        alpha, boundary = args.alpha, "override"
    else:
        est = solve_mle(fp)
        alpha, boundary = est.alpha_hat, est.boundary.value
    u = plugin_unseen(fp, alpha, args.lam, args.threshold_c)
    results = {
        "value": u.value,
        "thresholded": u.thresholded,
        "alpha_used": u.alpha_used,
        "alpha_source": boundary,
        "lambda": u.lam,
        **_sample_summary(sample),
    }
    if u.thresholded:
        results["note"] = "log(lambda) exceeds threshold_c * sqrt(n^alpha / log n); estimate set to 0"
    config = {"input": str(args.input), "lambda": args.lam, "threshold_c": args.threshold_c}
    _emit(ReportDocument("unseen", config, results), args)
    return 0


def cmd_gt(args) -> int:
    sample = _load(args)
    fp = fingerprint_from_counts(sample)
    results = {"good-toulmin": good_toulmin(fp, args.lam), **_sample_summary(sample)}
    for name, sm in default_smoothings(fp.n, args.lam).items():
        results[name] = smoothed_gt(fp, args.lam, sm)
    if args.lam > 1:
        results["note"] = "unsmoothed Good-Toulmin is unstable for lambda > 1"
    overflow = [k for k, v in results.items() if isinstance(v, float) and not np.isfinite(v)]
    for k in overflow:
        results[k] = None
    if overflow:
        results["overflow"] = overflow
    _emit(ReportDocument("gt", {"input": str(args.input), "lambda": args.lam}, results), args)
    return 0


def cmd_diagnose(args) -> int:
    sample = _load(args)
    fp = fingerprint_from_counts(sample)
    fit = fit_power_signature(cumulative_from_fingerprint(fp), args.j_max)
    est = solve_mle(fp)
    results = {
        "A": fit.A,
        "B": fit.B,
        "residual_rms": fit.residual_rms,
        "j_range": list(fit.j_range),
        "points": fit.points,
        "alpha_hat": est.alpha_hat,
        **_sample_summary(sample),
    }
    _emit(ReportDocument("diagnose", {"input": str(args.input), "j_max": args.j_max}, results), args)
    return 0


def _spec_from_args(args):
    if args.dist == "zipf":
        if args.s is None and args.alpha is None:
            raise ConfigError("zipf needs --s or --alpha")
        return Zipf(args.s) if args.s is not None else Zipf.from_tail_index(args.alpha)
    if args.dist == "double-zipf":
        if None in (args.alpha, args.beta, args.J):
            raise ConfigError("double-zipf needs --alpha, --beta and --J")
        return DoubleZipf(args.alpha, args.beta, args.J)
    if args.alpha is None:
        raise ConfigError("crp needs --alpha")
    return Crp(args.alpha)


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    rng = SeededRng(args.seed).generator()
    if isinstance(spec, Crp):
        sample = SampleCounts.from_observations(crp_assignments(spec, args.n, rng) + 1)
    else:
        sample = SampleCounts.from_observations(draws(spec, args.n, rng))
    if args.output:
        write_counts_csv(sample, args.output)
    else:
        write_counts_csv(sample, "/dev/stdout")
    return 0


def _filter(configs, args):
    out = []
    for c in configs:
        if args.alpha0 and not any(abs(c.spec.tail_index - a) < 1e-12 for a in args.alpha0):
            continue
        if args.n and c.n not in args.n:
            continue
        if args.lam and not any(abs(c.lam - x) < 1e-12 for x in args.lam):
            continue
        if args.replicates:
            c = replace(c, replicates=args.replicates)
        out.append(c)
    return out


def cmd_risk(args) -> int:
    if (args.config is None) == (args.preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    if args.preset is not None:
        preset = get_preset(args.preset, args.seed)
    else:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as err:
            raise ConfigError(f"{args.config}: invalid JSON ({err})") from None
        preset = experiment_from_dict(doc, args.seed if args.seed_given else None)

    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    reports = []
    if preset.kind == "double-zipf":
        sweep = dict(preset.sweep)
        if args.replicates:
            sweep["replicates"] = args.replicates
            sweep["unseen_replicates"] = min(sweep["unseen_replicates"], args.replicates)
        for rep in double_zipf_sweep(**sweep, threads=args.threads):
            reports.append(rep.to_dict())
        config = {"preset": preset.name, **sweep}
    else:
        configs = _filter(preset.configs, args)
        if not configs:
            raise ConfigError("no experiment left after filtering")
        errors = [f"{c.name or i}: {e}" for i, c in enumerate(configs) for e in c.errors()]
        if errors:
            raise ConfigError("; ".join(errors))
        runner = mc_alpha_risk if preset.kind == "alpha" else mc_unseen_risk
        for c in configs:
            reports.append(runner(c, args.threads).to_dict())
        config = {"preset": preset.name, "experiments": [c.to_dict() for c in configs]}

    meta = {"started_utc": started, "elapsed_seconds": round(time.perf_counter() - t0, 3),
            "bit_generator": BIT_GENERATOR, "version": __version__}
    doc = ReportDocument(f"risk-{preset.kind}", config, reports, {"root_seed": args.seed}, meta)
    if args.output:
        write_report(doc, args.output)
    _emit(doc, args)
    return 0


def cmd_split_eval(args) -> int:
    sample = _load(args)
    results = []
    for lam in args.lam:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = realdata_protocol(sample, lam, args.splits, args.seed, tuple(args.estimators), args.threshold_c)
        d = rep.to_dict()
        if not args.per_split:
            d.pop("per_split_errors")
        results.append(d)
    config = {"input": str(args.input), "lambda": args.lam, "splits": args.splits,
              "estimators": args.estimators, "threshold_c": args.threshold_c}
    _emit(ReportDocument("split-eval", config, results, {"root_seed": args.seed}), args)
    return 0


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=argparse.SUPPRESS, help="root seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=_positive_int, default=argparse.SUPPRESS,
                        help="worker processes for Monte-Carlo replicates")

    p = argparse.ArgumentParser(prog="tailunseen", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp):
        sp.add_argument("input", help="counts CSV (species,count) or token file")
        sp.add_argument("--input-format", choices=("counts", "tokens"), default=None,
                        help="default: counts for .csv files, tokens otherwise")

    sp = sub.add_parser("alpha", parents=[common], help="maximum-likelihood tail index")
    with_input(sp)
    sp.set_defaults(func=cmd_alpha)

    sp = sub.add_parser("unseen", parents=[common], help="plug-in estimate of unseen species")
    with_input(sp)
    sp.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    sp.add_argument("--threshold-c", type=_positive_float, default=DEFAULT_THRESHOLD_C)
    sp.add_argument("--alpha", type=float, default=None, help="use this tail index instead of estimating it")
    sp.set_defaults(func=cmd_unseen)

    sp = sub.add_parser("gt", parents=[common], help="Good-Toulmin and smoothed variants")
    with_input(sp)
    sp.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    sp.set_defaults(func=cmd_gt)

    sp = sub.add_parser("diagnose", parents=[common], help="power-law signature fit of cumulative counts")
    with_input(sp)
    sp.add_argument("--j-max", type=_positive_int, default=None)
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("simulate", parents=[common], help="draw a synthetic sample as counts CSV")
    sp.add_argument("--dist", choices=("zipf", "double-zipf", "crp"), required=True)
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--J", type=_positive_int, default=None)
    sp.add_argument("-n", type=_positive_int, required=True)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("risk", parents=[common], help="Monte-Carlo risk experiments")
    sp.add_argument("--config", default=None, help="JSON document with an 'experiment' section")
    sp.add_argument("--preset", choices=sorted(PRESETS), default=None)
    sp.add_argument("--alpha0", type=float, nargs="+", default=None, help="keep only these true tail indices")
    sp.add_argument("--n", type=_positive_int, nargs="+", default=None, help="keep only these sample sizes")
    sp.add_argument("--lambda", dest="lam", type=_positive_float, nargs="+", default=None)
    sp.add_argument("--replicates", type=_positive_int, default=None, help="override replicate count")
    sp.add_argument("--output", "-o", default=None, help="also write the report to this file")
    sp.set_defaults(func=cmd_risk)

    sp = sub.add_parser("split-eval", parents=[common], help="subsample-split evaluation on a dataset")
    with_input(sp)
    sp.add_argument("--lambda", dest="lam", type=_positive_float, nargs="+", required=True)
    sp.add_argument("--splits", type=_positive_int, default=100)
    sp.add_argument("--estimators", nargs="+", default=["plugin", *SMOOTHED],
                    choices=[e for e in ESTIMATORS if e != "plugin-known-alpha"])
    sp.add_argument("--threshold-c", type=_positive_float, default=DEFAULT_THRESHOLD_C)
    sp.add_argument("--per-split", action="store_true", help="include every split's normalised error")
    sp.set_defaults(func=cmd_split_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = hasattr(args, "seed")
    for name, default in (("seed", 0), ("format", "json"), ("threads", 1)):
        if not hasattr(args, name):
            setattr(args, name, default)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, InsufficientPointsError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
