"""Deterministic exporters: CSV samples, JSON logs and OBJ meshes.

Floats are written with ``repr``, the shortest decimal string that parses
back to the same double, so every export re-imports bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

BASE_CURVE_COLUMNS = ("s", "x", "z", "theta", "kappa")
TRACE_COLUMNS = ("s", "x", "z", "theta", "eps")
DEFAULT_SEGMENTS = 128


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def write_csv(fh, columns: dict, names) -> None:
    fh.write(",".join(names) + "\n")
    cols = [columns[k] for k in names]
    for row in zip(*cols):
        fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(fh) -> dict[str, np.ndarray]:
    """Columns of a CSV written by ``write_csv``, keyed by header name."""
    reader = csv.reader(fh)
    header = next(reader)
    rows = [list(map(float, r)) for r in reader if r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def base_curve_csv(curve) -> str:
    buf = io.StringIO()
    write_csv(buf, curve.columns(), BASE_CURVE_COLUMNS)
    return buf.getvalue()


def trace_columns(trace) -> dict:
    return {"s": trace.s, "x": trace.x, "z": trace.z, "theta": trace.theta,
            "eps": trace.eps.astype(int)}


def trace_csv(trace) -> str:
    buf = io.StringIO()
    write_csv(buf, trace_columns(trace), TRACE_COLUMNS)
    return buf.getvalue()


def to_json(obj) -> str:
    """Compact JSON with stable key order; non-finite floats become null."""
    return json.dumps(_clean(obj), separators=(",", ":"), allow_nan=False)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def revolve(x, z, segments: int = DEFAULT_SEGMENTS):
    """Vertices and 1-based triangles of the surface swept by rotating (x, z) about the z-axis.

    Every profile sample contributes ``segments`` vertices; each pair of
    consecutive samples contributes a strip of 2 * segments triangles. The
    winding is chosen so that triangles are counter-clockwise seen from the
    side the profile normal points away from the axis, i.e. outward for a
    profile traversed upward.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if segments < 3:
        raise ValueError("need at least 3 segments")
    m = len(x)
    phi = 2.0 * np.pi * np.arange(segments) / segments
    c, s = np.cos(phi), np.sin(phi)
    verts = np.empty((m * segments, 3))
    verts[:, 0] = np.outer(x, c).ravel()
    verts[:, 1] = np.outer(x, s).ravel()
    verts[:, 2] = np.repeat(z, segments)
    j = np.arange(m - 1)[:, None]
    k = np.arange(segments)[None, :]
    k1 = (k + 1) % segments
    a = j * segments + k
    b = j * segments + k1
    cc = (j + 1) * segments + k1
    d = (j + 1) * segments + k
    # net radial flux of the (a, b, c) orientation decides the global winding
    flux = float(np.sum(np.diff(z) * 0.5 * (x[:-1] + x[1:])))
    if flux >= 0:
        tris = np.concatenate([np.stack([a, b, cc], -1), np.stack([a, cc, d], -1)], axis=1)
    else:
        tris = np.concatenate([np.stack([a, cc, b], -1), np.stack([a, d, cc], -1)], axis=1)
    return verts, tris.reshape(-1, 3) + 1


def obj_text(verts, tris) -> str:
    lines = [f"v {fmt(v[0])} {fmt(v[1])} {fmt(v[2])}" for v in verts]
    lines += [f"f {t[0]} {t[1]} {t[2]}" for t in tris]
    return "\n".join(lines) + "\n"


def read_obj(text: str):
    verts, tris = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(v) for v in parts[1:4]])
        elif parts[0] == "f":
            tris.append([int(v) for v in parts[1:4]])
    return np.array(verts), np.array(tris, dtype=int)
