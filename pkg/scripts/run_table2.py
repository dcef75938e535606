"""Normalised unseen-species risk of the plug-in and smoothed Good-Toulmin estimators on Zipf data."""
import argparse

from tailunseen.dataio import ReportDocument, write_report
from tailunseen.harness import SMOOTHED, ExperimentConfig, mc_unseen_risk
from tailunseen.presets import SIM_THRESHOLD_C, TABLE1_ALPHAS, TABLE2_LAMBDAS
from tailunseen.samplers import Zipf


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("-n", type=int, default=10_000)
    p.add_argument("--alphas", type=float, nargs="+", default=list(TABLE1_ALPHAS))
    p.add_argument("--lambdas", type=float, nargs="+", default=list(TABLE2_LAMBDAS))
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--threshold-c", type=float, default=SIM_THRESHOLD_C)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", default="table2.json")
    args = p.parse_args()

    rows = []
    print(f"{'alpha0':>6} {'lambda':>7} {'E[U]':>10} {'plug-in':>10} {'best ET':>10}")
    for a0 in args.alphas:
        for lam in args.lambdas:
            cfg = ExperimentConfig(Zipf.from_tail_index(a0), args.n, lam, args.replicates, args.seed,
                                   ("plugin", *SMOOTHED), args.threshold_c)
            rep = mc_unseen_risk(cfg, args.threads)
            rows.append(rep.to_dict())
            print(f"{a0:>6} {lam:>7} {rep.mean_unseen:10.2f} {rep.unseen_risk_by_estimator['plugin']:10.3e} "
                  f"{rep.best_smoothed:10.3e}")
    write_report(ReportDocument("table2", vars(args), rows, {"root_seed": args.seed}), args.output)


if __name__ == "__main__":
    main()
