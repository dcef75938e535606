"""Convergence-rate exponent r from log risk = -r log n + C over a grid of n."""
import argparse

from tailunseen.harness import ExperimentConfig, mc_alpha_risk, rate_fit_full
from tailunseen.samplers import Zipf


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ns", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    p.add_argument("--alphas", type=float, nargs="+", default=[0.2, 0.5, 0.8])
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()

    for a0 in args.alphas:
        pts = []
        for n in args.ns:
            cfg = ExperimentConfig(Zipf.from_tail_index(a0), n, replicates=args.replicates, seed=args.seed, estimators=())
            pts.append((n, mc_alpha_risk(cfg, args.threads).alpha_risk))
        r, c = rate_fit_full(pts)
        print(f"alpha0={a0}: r={r:.3f} C={c:.3f}  " + "  ".join(f"n={n}: {v:.3e}" for n, v in pts))


if __name__ == "__main__":
    main()
