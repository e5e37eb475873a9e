"""Envelope test on a chirp buried in noise, as a function of r_max.

    python3 scripts/envelope_demo.py --snr 20 --out envelope.csv
"""

import argparse

import numpy as np

from zeroscope import GridSpec, TestConfig, envelope_curves, mix_snr, white_noise, zeros_of_signal
from zeroscope import io
from zeroscope.cli import default_chirp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=int, default=256)
    ap.add_argument("--snr", type=float, default=20.0)
    ap.add_argument("--statistic", choices=["L", "F"], default="F")
    ap.add_argument("--m", type=int, default=199)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--n-rmax", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    grid = GridSpec.square(args.K)
    cfg = TestConfig(statistic=args.statistic, m=args.m, k=args.k, grid=grid, seed=args.seed)
    noise = white_noise(grid.N + 1, grid.fs, args.seed, "real", (0,))
    data = zeros_of_signal(mix_snr(default_chirp(grid), noise, args.snr), grid)
    r_max = np.linspace(cfg.half_window / args.n_rmax, cfg.half_window, args.n_rmax)
    rows = envelope_curves(data, cfg, r_max)
    for row in rows:
        print(f"r_max {row['r_max']:.3f}  t_exp {row['t_exp']:.4f}  t_k {row['t_k']:.4f}"
              f"  {'reject' if row['reject'] else ''}")
    if args.out:
        io.write_csv(args.out, ["r_max", "t_exp", "t_k", "reject"],
                     [[row[c] for row in rows] for c in ("r_max", "t_exp", "t_k", "reject")])


if __name__ == "__main__":
    main()
