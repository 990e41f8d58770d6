"""Deterministic CSV / JSON writers and minimal SVG plots."""

import json
import math
import subprocess
from pathlib import Path

import numpy as np

from . import __version__


def version_string():
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        desc = out.stdout.strip()
        if out.returncode == 0 and desc:
            return f"{__version__}+g{desc}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _fmt(x):
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0:
        return "0"
    return repr(x)


def write_csv(path, columns, comment_lines=()):
    """Write ``{name: array}`` columns as CSV with a header row.

    ``comment_lines`` are written first, each prefixed with ``# ``.
    """
    names = list(columns)
    cols = [np.asarray(columns[n]).ravel() for n in names]
    n = {c.size for c in cols}
    if len(n) > 1:
        raise ValueError("CSV columns have different lengths")
    lines = [f"# {c}" for c in comment_lines]
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path):
    """Read a CSV written by :func:`write_csv` (comments skipped) into float columns."""
    header, rows = None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            continue
        if len(cells) != len(header):
            raise ValueError(f"ragged CSV row in {path}: {line!r}")
        rows.append([float(c) for c in cells])
    if header is None:
        raise ValueError(f"{path} has no header")
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_json(path, payload):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# SVG

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 55
_COLORS = ("#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b9770e", "#17202a")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _frame(xlo, xhi, ylo, yhi, xlabel, ylabel, title):
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(x):
        return _ML + (x - xlo) / (xhi - xlo) * pw

    def sy(y):
        return _MT + ph - (y - ylo) / (yhi - ylo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{_W / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
        f'<text x="{_ML + pw / 2:.1f}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="16" y="{_MT + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 16 {_MT + ph / 2:.1f})">{ylabel}</text>',
    ]
    for t in _ticks(xlo, xhi):
        parts.append(f'<line x1="{sx(t):.2f}" y1="{_MT + ph}" x2="{sx(t):.2f}" y2="{_MT + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(t):.2f}" y="{_MT + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ylo, yhi):
        parts.append(f'<line x1="{_ML - 5}" y1="{sy(t):.2f}" x2="{_ML}" y2="{sy(t):.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    return parts, sx, sy


def line_svg(path, x, series, xlabel="", ylabel="", title=""):
    """Line plot of ``{label: y}`` series sharing ``x``."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    allv = np.concatenate(list(ys.values()))
    ylo, yhi = float(np.min(allv)), float(np.max(allv))
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    xlo, xhi = float(x.min()), float(x.max())
    if xhi <= xlo:
        xhi = xlo + 1.0
    parts, sx, sy = _frame(xlo, xhi, ylo - pad, yhi + pad, xlabel, ylabel, title)
    for i, (label, y) in enumerate(ys.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.3" points="{pts}"/>')
        parts.append(f'<text x="{_W - _MR - 6}" y="{_MT + 14 + 14 * i}" text-anchor="end" fill="{color}">{label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _viridis_like(v):
    # three-stop ramp dark blue -> teal -> yellow
    stops = ((68, 1, 84), (33, 145, 140), (253, 231, 37))
    v = min(1.0, max(0.0, v))
    if v < 0.5:
        a, b, f = stops[0], stops[1], v / 0.5
    else:
        a, b, f = stops[1], stops[2], (v - 0.5) / 0.5
    r, g, bl = (int(round(a[i] + (b[i] - a[i]) * f)) for i in range(3))
    return f"#{r:02x}{g:02x}{bl:02x}"


def heatmap_svg(path, x, y, z, xlabel="", ylabel="", title=""):
    """Heatmap with ``z[i, j]`` at ``(x[j], y[i])``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    zlo, zhi = float(z.min()), float(z.max())
    span = zhi - zlo if zhi > zlo else 1.0
    xlo, xhi = float(x.min()), float(x.max())
    ylo, yhi = float(y.min()), float(y.max())
    if xhi <= xlo:
        xhi = xlo + 1.0
    if yhi <= ylo:
        yhi = ylo + 1.0
    parts, sx, sy = _frame(xlo, xhi, ylo, yhi, xlabel, ylabel, title)

    def edges(v, lo, hi):
        if v.size == 1:
            return np.array([lo, hi])
        mid = (v[1:] + v[:-1]) / 2
        return np.concatenate([[v[0] - (mid[0] - v[0])], mid, [v[-1] + (v[-1] - mid[-1])]])

    xe = np.clip(edges(x, xlo, xhi), xlo, xhi)
    ye = np.clip(edges(y, ylo, yhi), ylo, yhi)
    for i in range(y.size):
        for j in range(x.size):
            x0, x1 = sx(xe[j]), sx(xe[j + 1])
            y0, y1 = sy(ye[i + 1]), sy(ye[i])
            color = _viridis_like((z[i, j] - zlo) / span)
            parts.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{max(x1 - x0, 0.1):.2f}" height="{max(y1 - y0, 0.1):.2f}" fill="{color}"/>'
            )
    parts.append(f'<text x="{_W - _MR}" y="{_MT - 8}" text-anchor="end">range {zlo:.3g} .. {zhi:.3g}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
