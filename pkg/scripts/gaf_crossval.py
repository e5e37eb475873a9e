"""GAF route against the spectrogram route: pooled L of the zeros, plus the
symmetric-GAF real-axis zero density.

    python3 scripts/gaf_crossval.py --gaf-samples 80 --spectrograms 50
"""

import argparse
import math

import numpy as np

from zeroscope import Disk, GridSpec, find_zeros, real_zeros, sample_gaf, theory
from zeroscope import white_noise, zeros_of_signal
from zeroscope import io
from zeroscope.ppstats import pooled_L


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gaf-samples", type=int, default=80)
    ap.add_argument("--spectrograms", type=int, default=50)
    ap.add_argument("--R", type=float, default=6.5)
    ap.add_argument("--radius", type=float, default=6.0)
    ap.add_argument("--symmetric-samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    r = np.linspace(0.2, 1.5, 131)
    disk = Disk(0.0, 0.0, args.radius)
    gafs = [find_zeros(sample_gaf("planar", args.R, args.seed, (s,)), disk)
            for s in range(args.gaf_samples)]
    grid = GridSpec.square(1024)
    specs = [zeros_of_signal(white_noise(grid.N + 1, grid.fs, args.seed, "complex", (0, i)), grid)
             for i in range(args.spectrograms)]
    L_gaf, L_stft = pooled_L(gafs, r).values, pooled_L(specs, r).values
    L0 = theory.K0_L0("gaf", r)[1].values
    print(f"max |L_gaf - L_stft| = {np.max(np.abs(L_gaf - L_stft)):.4f}, "
          f"max |L_gaf - L0| = {np.max(np.abs(L_gaf - L0)):.4f}")

    counts = [len(real_zeros(sample_gaf("symmetric", 10.5, args.seed, (s,)), -10.0, 10.0))
              for s in range(args.symmetric_samples)]
    density = np.mean(counts) / 20
    se = np.std(counts, ddof=1) / math.sqrt(len(counts)) / 20
    print(f"symmetric GAF real zeros: {density:.4f} +- {se:.4f} per unit length "
          f"(Kac-Rice 1/sqrt(pi) = {theory.real_zero_density_symmetric():.4f})")
    if args.out:
        io.write_csv(args.out, ["r", "L_gaf", "L_stft", "L0"], [r, L_gaf, L_stft, L0])


if __name__ == "__main__":
    main()
