"""Rejection rate of the envelope test versus SNR, with Clopper-Pearson intervals.

    python3 scripts/power_study.py --snrs 0,0.5,2,20 --reps 50 --m 39 --k 2
"""

import argparse

from zeroscope import GridSpec, TestConfig, estimate_power
from zeroscope import io
from zeroscope.cli import default_chirp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=int, default=256)
    ap.add_argument("--snrs", default="0,0.5,2,20")
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--statistic", choices=["L", "F"], default="F")
    ap.add_argument("--m", type=int, default=39)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    grid = GridSpec.square(args.K)
    cfg = TestConfig(statistic=args.statistic, m=args.m, k=args.k, grid=grid, seed=args.seed)
    chirp = default_chirp(grid)
    rows = []
    for snr in (float(s) for s in args.snrs.split(",")):
        est = estimate_power(chirp, snr, cfg, args.reps)[0]
        lo, hi = est.cp_interval
        rows.append((snr, est.r_max, est.beta_hat, lo, hi))
        print(f"SNR {snr:6g}: beta {est.beta_hat:.3f}  CP ({lo:.3f}, {hi:.3f})  "
              f"alpha {cfg.alpha:.3f}")
    if args.out:
        io.write_csv(args.out, ["snr", "r_max", "beta_hat", "cp_lo", "cp_hi"],
                     [list(c) for c in zip(*rows)])


if __name__ == "__main__":
    main()
