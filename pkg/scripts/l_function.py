"""Pooled L - r of spectrogram zeros and of a Poisson control against theory.

    python3 scripts/l_function.py --K 1024 --seeds 50 --out L.csv
"""

import argparse

import numpy as np

from zeroscope import GridSpec, theory, white_noise, zeros_of_signal
from zeroscope import io
from zeroscope._random import POISSON, stream
from zeroscope.ppstats import pooled_L, poisson_pattern


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=int, default=1024)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--kind", choices=["real", "complex"], default="real")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    grid = GridSpec(2 * args.K, args.K)
    r = np.linspace(0.1, 2.0, 191)
    zeros = [zeros_of_signal(white_noise(grid.N + 1, grid.fs, args.seed, args.kind, (0, i)), grid)
             for i in range(args.seeds)]
    pois = [poisson_pattern(grid.crop_window, 1.0, stream(args.seed, POISSON, i))
            for i in range(args.seeds)]
    L_hat = pooled_L(zeros, r).values
    L_pois = pooled_L(pois, r).values
    L0 = theory.K0_L0("gaf", r)[1].values
    print(f"zeros:   max |L_hat - L0| = {np.max(np.abs(L_hat - L0)):.4f}")
    print(f"Poisson: max |L_hat - r|  = {np.max(np.abs(L_pois - r)):.4f}")
    if args.out:
        io.write_csv(args.out, ["r", "L_hat_minus_r", "L0_minus_r", "L_poisson_minus_r"],
                     [r, L_hat - r, L0 - r, L_pois - r])


if __name__ == "__main__":
    main()
