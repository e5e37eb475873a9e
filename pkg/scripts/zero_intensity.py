"""Mean zero count in the crop window of white-noise spectrograms.

Compares the crop count with the crop area (unit intensity) and the full
half-plane count with N/2.

    python3 scripts/zero_intensity.py --K 1024 --seeds 50
"""

import argparse
import math

import numpy as np

from zeroscope import GridSpec, extract_zeros, spectrogram, white_noise
from zeroscope import io
from zeroscope.stft import count_zeros_full


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=int, default=1024)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kind", choices=["real", "complex"], default="real")
    ap.add_argument("--out", default=None, help="CSV of per-seed counts")
    args = ap.parse_args()

    grid = GridSpec(2 * args.K, args.K)
    crop, full = [], []
    for i in range(args.seeds):
        spec = spectrogram(white_noise(grid.N + 1, grid.fs, args.seed, args.kind, (0, i)), grid)
        crop.append(extract_zeros(spec).n)
        full.append(count_zeros_full(spec))
    area = grid.crop_window.area
    se = np.std(crop, ddof=1) / math.sqrt(len(crop))
    print(f"crop: mean {np.mean(crop):.2f} +- {se:.2f}, area {area:.2f}, "
          f"z = {(np.mean(crop) - area) / se:+.2f}")
    print(f"full half plane: mean {np.mean(full):.1f}, N/2 = {grid.N // 2}")
    if args.out:
        io.write_csv(args.out, ["seed", "crop", "full"], [np.arange(len(crop)), crop, full])


if __name__ == "__main__":
    main()
