"""Pooled pair correlation of spectrogram zeros against the planar-GAF formula.

    python3 scripts/pair_correlation.py --spectrograms 2000 --out pcf.csv
"""

import argparse

import numpy as np

from zeroscope import GridSpec, theory, white_noise, zeros_of_signal
from zeroscope import io
from zeroscope.ppstats import pooled_pcf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=int, default=512)
    ap.add_argument("--spectrograms", type=int, default=500)
    ap.add_argument("--bandwidth", type=float, default=0.05)
    ap.add_argument("--no-refine", action="store_true", help="use raw lattice positions")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    grid = GridSpec.square(args.K)
    r = np.round(np.arange(0.2, 2.0 + 1e-9, 0.01), 10)
    patterns = (zeros_of_signal(white_noise(grid.N + 1, grid.fs, args.seed, "complex", (0, i)),
                                grid, refine=not args.no_refine)
                for i in range(args.spectrograms))
    g_hat = pooled_pcf(patterns, r, args.bandwidth).values
    g0 = theory.g0_planar_gaf(r)
    i1 = int(np.argmin(np.abs(r - 1)))
    print(f"max |g_hat - g0| = {np.max(np.abs(g_hat - g0)):.4f}; "
          f"g_hat(1) = {g_hat[i1]:.4f} (theory {g0[i1]:.4f})")
    if args.out:
        io.write_csv(args.out, ["r", "g_hat", "g0"], [r, g_hat, g0])


if __name__ == "__main__":
    main()
