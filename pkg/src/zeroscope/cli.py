"""Command-line front end: ``python3 -m zeroscope <command> ...``.

Every command resolves its parameters as built-in defaults, then the optional
``--config`` JSON file, then explicit flags (flags win). The resolved
parameters are logged to standard error; ``--print-config`` prints them as
JSON and exits. Exit status: 0 success, 2 invalid input, 3 runtime failure.
"""

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import detect, gaf, io, ppstats, signals, stft, theory
from ._parallel import default_workers
from .errors import InvalidArgument, Unsupported, ZeroscopeError
from .ppstats import Disk

log = logging.getLogger("zeroscope")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


# defaults per command; flag names map to these keys (dashes -> underscores)
DEFAULTS = {
    "noise": dict(n=4096, fs=None, K=None, a=1.0, seed=0, kind="real", out=None),
    "chirp": dict(n=4096, fs=None, K=None, a=1.0, f0=None, f1=None, t_start=None,
                  t_end=None, taper=0.1, out=None),
    "mix": dict(signal=None, noise=None, snr=None, seed=0, kind="real", out=None),
    "spectrogram": dict(input=None, K=1024, a=None, n_samples=None, out=None, oracle=None),
    "zeros": dict(input=None, K=1024, a=None, n_samples=None, refine=False, out=None),
    "gaf-zeros": dict(kind="planar", R=6.5, radius=6.0, seed=0, out=None),
    "stats": dict(input=None, stat="L", rmax=None, steps=512, bandwidth=None,
                  ref_spacing=0.05, out=None),
    "theory": dict(curve="g0_gaf", rmax=2.0, steps=512, y=None, out=None),
    "test": dict(input=None, signal=None, K=256, a=None, n_samples=None, statistic="F",
                 norm="two", r_min=0.0, r_max=None, m=199, k=10,
                 null_curve="pointwise_average", seed=0, n_r=512, refine=False, out=None),
    "envelope": dict(input=None, signal=None, K=256, a=None, n_samples=None, statistic="F",
                     norm="two", r_max=None, m=199, k=10, null_curve="pointwise_average",
                     seed=0, n_r=512, refine=False, n_rmax=32, out=None),
    "power": dict(signal=None, K=256, a=None, n_samples=None, statistic="F", norm="two",
                  r_min=0.0, r_max=None, m=199, k=10, null_curve="pointwise_average",
                  seed=0, n_r=512, refine=False, snrs="0.5,2,20", reps=50,
                  confidence=0.95, rmax_values=None, cached_null=False, out=None),
}


def _build_parser():
    S = argparse.SUPPRESS
    p = argparse.ArgumentParser(prog="zeroscope", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        c = sub.add_parser(name, help=help_text, argument_default=S)
        c.add_argument("--config", help="JSON file of parameters; flags override it")
        c.add_argument("--print-config", action="store_true", default=False,
                       help="print the resolved parameters and exit")
        c.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $ZEROSCOPE_THREADS or all cores)")
        c.add_argument("-v", "--verbose", action="store_true", default=False)
        return c

    def grid_args(c, window_flags=("--K", "--k")):
        c.add_argument(*window_flags, dest="K", type=int, help="window length K (even)")
        c.add_argument("--a", type=float, help="window parameter a (fs = a sqrt(K))")
        c.add_argument("--n-samples", type=int, help="grid length N (default: signal length - 1)")

    def test_args(c):
        grid_args(c, ("--K",))
        c.add_argument("--input", help="point-pattern CSV of the data zeros")
        c.add_argument("--signal", help="signal CSV; zeros are extracted on the grid")
        c.add_argument("--statistic", choices=["L", "F"])
        c.add_argument("--norm", choices=["sup", "two"])
        c.add_argument("--r-max", type=float)
        c.add_argument("--m", type=int, help="number of null simulations")
        c.add_argument("--k", type=int, help="rank: reject if t_exp beats the k-th largest")
        c.add_argument("--null-curve", choices=["pointwise_average", "theoretical"])
        c.add_argument("--seed", type=int)
        c.add_argument("--n-r", type=int, help="number of radii in the r grid")
        c.add_argument("--refine", action="store_true")
        c.add_argument("--out")

    c = command("noise", "sampled real or complex white noise")
    c.add_argument("--n", type=int)
    c.add_argument("--fs", type=float, help="sampling rate (or give --K and --a)")
    c.add_argument("--K", type=int, help="window length used to derive fs = a sqrt(K)")
    c.add_argument("--a", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--kind", choices=["real", "complex"])
    c.add_argument("--out")

    c = command("chirp", "tapered linear chirp")
    for name in ("--fs", "--a", "--f0", "--f1", "--t-start", "--t-end", "--taper"):
        c.add_argument(name, type=float)
    c.add_argument("--n", type=int)
    c.add_argument("--K", type=int)
    c.add_argument("--out")

    c = command("mix", "signal plus white noise at a given SNR")
    c.add_argument("--signal")
    c.add_argument("--noise", help="noise CSV (default: fresh noise from --seed)")
    c.add_argument("--snr", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--kind", choices=["real", "complex"])
    c.add_argument("--out")

    c = command("spectrogram", "spectrogram raster of a signal")
    grid_args(c)
    c.add_argument("--input")
    c.add_argument("--oracle", help="hermite:<k> compares with the closed form instead")
    c.add_argument("--out")

    c = command("zeros", "spectrogram zeros in the crop window")
    grid_args(c)
    c.add_argument("--input", help="signal CSV or spectrogram raster")
    c.add_argument("--refine", action="store_true")
    c.add_argument("--out")

    c = command("gaf-zeros", "zeros of a simulated GAF in a disk")
    c.add_argument("--kind", choices=["planar", "symmetric"])
    c.add_argument("--R", type=float, help="truncation-safe radius")
    c.add_argument("--radius", type=float, help="radius of the disk searched")
    c.add_argument("--seed", type=int)
    c.add_argument("--out")

    c = command("stats", "functional statistic of a point pattern")
    c.add_argument("--input")
    c.add_argument("--stat", choices=sorted(ppstats.ESTIMATORS))
    c.add_argument("--rmax", type=float)
    c.add_argument("--steps", type=int)
    c.add_argument("--bandwidth", type=float)
    c.add_argument("--ref-spacing", type=float)
    c.add_argument("--out")

    c = command("theory", "reference curves")
    c.add_argument("--curve", choices=["g0_gaf", "g0_gin", "g0_poisson", "K0", "L0", "S"])
    c.add_argument("--rmax", type=float)
    c.add_argument("--steps", type=int)
    c.add_argument("--y", type=_floats, help="comma-separated abscissae instead of a grid")
    c.add_argument("--out")

    c = command("test", "Monte Carlo envelope test")
    test_args(c)
    c.add_argument("--r-min", type=float)

    c = command("envelope", "test statistic and envelope as functions of r_max")
    test_args(c)
    c.add_argument("--n-rmax", type=int, help="number of r_max values")

    c = command("power", "rejection rate of the envelope test on a buried signal")
    test_args(c)
    c.add_argument("--r-min", type=float)
    c.add_argument("--snrs", help="comma-separated SNR values (0 = noise only)")
    c.add_argument("--reps", type=int)
    c.add_argument("--confidence", type=float)
    c.add_argument("--rmax-values", help="comma-separated r_max values (Bonferroni over them)")
    c.add_argument("--cached-null", action="store_true",
                   help="share one null sample across replicates")
    return p


CONTROL = ("config", "print_config", "threads", "verbose", "command")


def resolve(args):
    """Defaults, then the config file, then explicit flags."""
    params = dict(DEFAULTS[args.command])
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        try:
            loaded = io.read_json(cfg_path)
        except FileNotFoundError:
            raise InvalidArgument(f"config file not found: {cfg_path}")
        except json.JSONDecodeError as e:
            raise InvalidArgument(f"{cfg_path}: invalid JSON ({e})")
        unknown = set(loaded) - set(params)
        if unknown:
            raise InvalidArgument(f"unknown config keys for {args.command}: {sorted(unknown)}")
        params.update(loaded)
    params.update({k: v for k, v in vars(args).items() if k not in CONTROL})
    return params


def _require(params, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise InvalidArgument("missing required parameter(s): "
                              + ", ".join("--" + m.replace("_", "-") for m in missing))


def _fs(params):
    if params.get("fs") is not None:
        return float(params["fs"])
    K = params.get("K") or 1024
    return params.get("a", 1.0) * math.sqrt(K)


def _grid(params, n_signal=None, fs=None):
    K = params["K"]
    N = params.get("n_samples")
    if N is None:
        N = 2 * K if n_signal is None else n_signal - 1
    a = params.get("a")
    if fs is not None and a is None:
        return stft.GridSpec(N, K, fs=fs)
    return stft.GridSpec(N, K, a=a, fs=fs)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_noise(p, workers):
    _require(p, "out")
    x = signals.white_noise(p["n"], _fs(p), p["seed"], p["kind"], (0,))
    io.write_signal(p["out"], x)
    log.info("wrote %d samples to %s", len(x), p["out"])


def cmd_chirp(p, workers):
    _require(p, "f0", "f1", "t_start", "t_end", "out")
    spec = signals.ChirpSpec(p["f0"], p["f1"], p["t_start"], p["t_end"], p["taper"])
    x = signals.linear_chirp(spec, p["n"], _fs(p))
    io.write_signal(p["out"], x)


def cmd_mix(p, workers):
    _require(p, "signal", "snr", "out")
    s = io.read_signal(p["signal"])
    if p["noise"]:
        noise = io.read_signal(p["noise"])
    else:
        noise = signals.white_noise(len(s), s.fs, p["seed"], p["kind"], (0,))
    io.write_signal(p["out"], signals.mix_snr(s, noise, p["snr"]))


def cmd_spectrogram(p, workers):
    if p["oracle"]:
        name, _, order = str(p["oracle"]).partition(":")
        if name != "hermite" or not order.isdigit():
            raise InvalidArgument(f"oracle must look like hermite:<k>, got {p['oracle']!r}")
        grid = _grid(p)
        _, _, err = stft.hermite_oracle(int(order), grid)
        report = {"oracle": "hermite", "k": int(order), "grid": grid.to_json(),
                  "max_rel_error": err}
        _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", p["out"])
        return
    _require(p, "input", "out")
    x = io.read_signal(p["input"])
    grid = _grid(p, len(x), x.fs)
    stft.write_raster(p["out"], stft.spectrogram(x, grid))


def _load_spectrogram(p):
    with open(p["input"], "rb") as fh:
        is_raster = fh.read(len(stft.MAGIC)) == stft.MAGIC
    if is_raster:
        return stft.read_raster(p["input"])
    x = io.read_signal(p["input"])
    return stft.spectrogram(x, _grid(p, len(x), x.fs))


def cmd_zeros(p, workers):
    _require(p, "input", "out")
    spec = _load_spectrogram(p)
    pattern = stft.extract_zeros(spec, refine=p["refine"])
    io.write_pattern(p["out"], pattern, {"grid": spec.grid.to_json(),
                                         "crop": list(spec.crop),
                                         "zeros_full_raster": stft.count_zeros_full(spec)})
    log.info("%d zeros in the crop (area %.4g)", pattern.n, pattern.window.area)


def cmd_gaf_zeros(p, workers):
    _require(p, "out")
    g = gaf.sample_gaf(p["kind"], p["R"], p["seed"], (0,))
    pattern = gaf.find_zeros(g, Disk(0.0, 0.0, p["radius"]))
    io.write_pattern(p["out"], pattern, {"kind": p["kind"], "R": p["R"],
                                         "order": g.order})


def cmd_stats(p, workers):
    _require(p, "input", "out")
    pattern = io.read_pattern(p["input"])
    rmax = pattern.window.inradius if p["rmax"] is None else p["rmax"]
    r = np.arange(p["steps"]) * (rmax / p["steps"])
    stat = p["stat"]
    if stat == "pcf":
        curve = ppstats.estimate_pcf(pattern, r, p["bandwidth"])
    elif stat == "F":
        curve = ppstats.estimate_F(pattern, r, p["ref_spacing"])
    else:
        curve = ppstats.ESTIMATORS[stat](pattern, r)
    io.write_curve(p["out"], curve)


def cmd_theory(p, workers):
    if p["y"] is not None:
        r = np.sort(np.asarray(p["y"], dtype=float))
    else:
        r = np.arange(p["steps"]) * (p["rmax"] / p["steps"])
    curve = theory.theory_curve(p["curve"], r)
    if p["out"]:
        io.write_curve(p["out"], curve)
    else:
        lines = ["r,value"] + [f"{a:.17g},{b:.17g}" for a, b in zip(curve.r, curve.values)]
        sys.stdout.write("\n".join(lines) + "\n")


def _test_config(p, workers, n_signal=None, fs=None):
    grid = _grid(p, n_signal, fs)
    return detect.TestConfig(
        statistic=p["statistic"], norm=p["norm"], r_min=p.get("r_min", 0.0),
        r_max=p["r_max"], m=p["m"], k=p["k"], null_curve=p["null_curve"], grid=grid,
        seed=p["seed"], n_r=p["n_r"], refine=p["refine"], workers=workers)


def _data_pattern(p, workers):
    if bool(p.get("input")) == bool(p.get("signal")):
        raise InvalidArgument("give exactly one of --input (pattern) or --signal")
    if p.get("signal"):
        x = io.read_signal(p["signal"])
        cfg = _test_config(p, workers, len(x), x.fs)
        return stft.zeros_of_signal(x, cfg.grid, refine=cfg.refine), cfg
    pattern = io.read_pattern(p["input"])
    side = io.read_json(io.sidecar_path(p["input"]))
    if "grid" in side and p.get("n_samples") is None:
        g = side["grid"]
        cfg = _test_config(dict(p, K=g["K"], n_samples=g["N"], a=g["a"]), workers)
    else:
        cfg = _test_config(p, workers)
    return pattern, cfg


def cmd_test(p, workers):
    pattern, cfg = _data_pattern(p, workers)
    res = detect.envelope_test(pattern, cfg)
    _emit(json.dumps(res.to_json(), sort_keys=True, indent=1) + "\n", p["out"])
    log.info("t_exp=%.6g rank=%d/%d reject=%s (alpha=%.4g)", res.t_exp, res.rank,
             cfg.m + 1, res.reject, res.alpha)


def cmd_envelope(p, workers):
    _require(p, "out")
    pattern, cfg = _data_pattern(p, workers)
    r_max = cfg.r_max * np.arange(1, p["n_rmax"] + 1) / p["n_rmax"]
    r_max = r_max[r_max >= 2 * cfg.r_max / cfg.n_r]
    rows = detect.envelope_curves(pattern, cfg, r_max)
    io.write_csv(p["out"], ["r_max", "t_exp", "t_k", "reject"],
                 [[row[c] for row in rows] for c in ("r_max", "t_exp", "t_k", "reject")])


def default_chirp(grid: stft.GridSpec, taper=0.1):
    """Linear chirp spanning the crop window diagonally, in physical units."""
    n0, n1, k0, k1 = grid.crop
    spec = signals.ChirpSpec(k0 * grid.dnu, k1 * grid.dnu, n0 * grid.dt, n1 * grid.dt, taper)
    return signals.linear_chirp(spec, grid.N + 1, grid.fs)


def cmd_power(p, workers):
    _require(p, "out")
    if p["signal"]:
        s = io.read_signal(p["signal"])
        cfg = _test_config(p, workers, len(s), s.fs)
    else:
        cfg = _test_config(p, workers)
        s = default_chirp(cfg.grid)
    snrs = _floats(p["snrs"])
    rmax_values = None if p["rmax_values"] is None else _floats(p["rmax_values"])
    n_tests = 1 if rmax_values is None else len(rmax_values)
    rows = []
    for snr in snrs:
        for est in detect.estimate_power(s, snr, cfg, p["reps"], p["confidence"], n_tests,
                                         rmax_values, fresh_null=not p["cached_null"]):
            rows.append((snr, est.r_max, est.beta_hat, *est.cp_interval))
            log.info("snr=%g r_max=%.4g beta=%.3f CP=(%.3f, %.3f)", *rows[-1])
    io.write_csv(p["out"], ["snr", "r_max", "beta_hat", "cp_lo", "cp_hi"],
                 list(zip(*rows)) if rows else [])


COMMANDS = {
    "noise": cmd_noise, "chirp": cmd_chirp, "mix": cmd_mix, "spectrogram": cmd_spectrogram,
    "zeros": cmd_zeros, "gaf-zeros": cmd_gaf_zeros, "stats": cmd_stats,
    "theory": cmd_theory, "test": cmd_test, "envelope": cmd_envelope, "power": cmd_power,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr, force=True)
    try:
        params = resolve(args)
        workers = args.threads if args.threads is not None else default_workers()
        if workers < 1:
            raise InvalidArgument("--threads must be >= 1")
        resolved = json.dumps({"command": args.command, **params}, sort_keys=True)
        if args.print_config:
            print(resolved)
            return EXIT_OK
        log.info("config %s", resolved)
        COMMANDS[args.command](params, workers)
    except (ValueError, Unsupported, OSError) as e:
        log.error("%s", e)
        return EXIT_INVALID
    except (ZeroscopeError, ArithmeticError, RuntimeError) as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
