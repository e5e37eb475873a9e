"""Plain-text file formats.

Every CSV has a one-line header and numbers printed with ``%.17g`` (exact
float64 round trip); metadata lives in a JSON sidecar ``<file>.json`` written
with sorted keys, so identical results always give identical bytes.

====================  ===================  ======================================
content               CSV columns          sidecar
====================  ===================  ======================================
signal                ``t,re[,im]``        ``{fs, kind}``
point pattern         ``u,v``              ``{window}``
functional curve      ``r,value``          ``{statistic, correction, n_points, ...}``
====================  ===================  ======================================
"""

import io
import json
import os

import numpy as np

from .errors import InvalidArgument
from .ppstats import FunctionalCurve, PointPattern, window_from_json
from .signals import Signal

FMT = "%.17g"


def sidecar_path(path):
    return os.fspath(path) + ".json"


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, header, columns):
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns]) if columns else None
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    if data is not None and len(data):
        np.savetxt(buf, data, fmt=FMT, delimiter=",")
    with open(path, "w", newline="\n") as fh:
        fh.write(buf.getvalue())


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        body = fh.read()
    if body.strip():
        data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    else:
        data = np.zeros((0, len(header)))
    if data.shape[1] != len(header):
        raise InvalidArgument(f"{path}: {data.shape[1]} columns but header {header}")
    return header, data


def write_signal(path, signal: Signal):
    cols = [signal.times, signal.samples.real]
    header = ["t", "re"]
    if signal.kind == "complex":
        cols.append(signal.samples.imag)
        header.append("im")
    write_csv(path, header, cols)
    write_json(sidecar_path(path), {"fs": signal.fs, "kind": signal.kind})


def read_signal(path):
    header, data = read_csv(path)
    if header[:2] != ["t", "re"]:
        raise InvalidArgument(f"{path}: not a signal file (header {header})")
    side = sidecar_path(path)
    if os.path.exists(side):
        fs = float(read_json(side)["fs"])
    elif len(data) >= 2:
        fs = 1.0 / (data[1, 0] - data[0, 0])
    else:
        raise InvalidArgument(f"{path}: cannot determine fs without {side}")
    x = data[:, 1] + 1j * data[:, 2] if header == ["t", "re", "im"] else data[:, 1]
    return Signal(x, fs)


def write_pattern(path, pattern: PointPattern, extra=None):
    write_csv(path, ["u", "v"], [pattern.points[:, 0], pattern.points[:, 1]])
    meta = {"window": pattern.window.to_json(), "n": pattern.n}
    meta.update(extra or {})
    write_json(sidecar_path(path), meta)


def read_pattern(path):
    header, data = read_csv(path)
    if header != ["u", "v"]:
        raise InvalidArgument(f"{path}: not a point-pattern file (header {header})")
    side = sidecar_path(path)
    if not os.path.exists(side):
        raise InvalidArgument(f"{path}: window metadata {side} is missing")
    return PointPattern(data, window_from_json(read_json(side)["window"]))


def write_curve(path, curve, extra=None):
    write_csv(path, ["r", "value"], [curve.r, curve.values])
    meta = {"statistic": getattr(curve, "statistic", getattr(curve, "kind", None))}
    if isinstance(curve, FunctionalCurve):
        meta.update(correction=curve.correction, n_points=curve.n_points,
                    truncated=curve.truncated,
                    window=None if curve.window is None else curve.window.to_json())
        meta.update({k: v for k, v in curve.meta.items() if np.isscalar(v) or v is None})
    meta.update(extra or {})
    write_json(sidecar_path(path), meta)


def read_curve(path):
    header, data = read_csv(path)
    if header != ["r", "value"]:
        raise InvalidArgument(f"{path}: not a curve file (header {header})")
    return data[:, 0], data[:, 1]
