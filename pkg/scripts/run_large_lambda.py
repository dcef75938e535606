"""Plug-in risk for extrapolation ratios far beyond the sample size (alpha0 = 0.8, n = 1000)."""
import argparse
import math

from tailunseen.harness import ExperimentConfig, mc_unseen_risk
from tailunseen.presets import LARGE_LAMBDAS, SIM_THRESHOLD_C
from tailunseen.samplers import Zipf


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha0", type=float, default=0.8)
    p.add_argument("-n", type=int, default=1000)
    p.add_argument("--lambdas", type=float, nargs="+", default=list(LARGE_LAMBDAS))
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()

    for lam in args.lambdas:
        cfg = ExperimentConfig(Zipf.from_tail_index(args.alpha0), args.n, lam, args.replicates, args.seed,
                               ("plugin",), SIM_THRESHOLD_C)
        rep = mc_unseen_risk(cfg, args.threads)
        r = rep.unseen_risk_by_estimator["plugin"]
        print(f"lambda={lam:>8g} log(lambda)={math.log(lam):6.2f} E[U]={rep.mean_unseen:10.1f} "
              f"risk={r:.3e} (se {rep.unseen_risk_se['plugin']:.1e})")


if __name__ == "__main__":
    main()
