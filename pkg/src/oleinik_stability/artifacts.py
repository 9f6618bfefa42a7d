"""Run outputs: atomic CSV/text writers, the manifest and a small SVG line plotter."""

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def config_hash(config_dict):
    """sha256 of the canonical config; the output location is not part of the experiment."""
    body = {k: v for k, v in config_dict.items() if k != "out"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


def write_atomic(path, text):
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows, manifest_hash):
    buf = io.StringIO()
    buf.write(f"# manifest sha256={manifest_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


class RunWriter:
    """Collects the files of one run and finishes with a manifest listing their hashes."""

    def __init__(self, out_dir, config_dict):
        self.out = Path(out_dir)
        self.config = config_dict
        self.hash = config_hash(config_dict)
        self.files = {}

    def _record(self, name, text):
        write_atomic(self.out / name, text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()
        return self.out / name

    def csv(self, name, header, rows):
        return self._record(name, csv_text(header, rows, self.hash))

    def text(self, name, text):
        return self._record(name, f"manifest sha256={self.hash}\n{text}")

    def svg(self, name, svg):
        return self._record(name, svg.replace("<svg ", f"<!-- manifest sha256={self.hash} -->\n<svg ", 1))

    def manifest(self, **extra):
        body = {"config": self.config, "config_sha256": self.hash, "files": self.files}
        body.update(extra)
        return write_atomic(self.out / "manifest.json", canonical_json(body))


# ---------------------------------------------------------------- SVG

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _ticks(lo, hi, log):
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        return [float(k) for k in range(a, b + 1)], [f"1e{k}" for k in range(a, b + 1)]
    span = hi - lo or 1.0
    step = 10 ** math.floor(math.log10(span / 5))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    vals = list(np.arange(start, hi + 0.5 * step, step))
    return vals, [f"{v:.4g}" for v in vals]


def line_plot(series, title, xlabel, ylabel, logx=False, logy=False, width=640, height=420):
    """SVG line chart of ``series``: a list of (label, x, y)."""
    pad_l, pad_r, pad_t, pad_b = 70, 20, 40, 50
    pts = []
    for label, x, y in series:
        x, y = np.asarray(x, float), np.asarray(y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        if logx:
            ok &= x > 0
        if logy:
            ok &= y > 0
        x, y = x[ok], y[ok]
        pts.append((label, np.log10(x) if logx else x, np.log10(y) if logy else y))
    allx = np.concatenate([p[1] for p in pts]) if pts else np.array([0.0, 1.0])
    ally = np.concatenate([p[2] for p in pts]) if pts else np.array([0.0, 1.0])
    if allx.size == 0:
        allx, ally = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def sx(v):
        return pad_l + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return pad_t + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>',
           f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v, lab in zip(*_ticks(x0, x1, logx)):
        if x0 <= v <= x1:
            out.append(f'<line x1="{sx(v):.1f}" y1="{pad_t + ph}" x2="{sx(v):.1f}" '
                       f'y2="{pad_t + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{sx(v):.1f}" y="{pad_t + ph + 18}" text-anchor="middle">{lab}</text>')
    for v, lab in zip(*_ticks(y0, y1, logy)):
        if y0 <= v <= y1:
            out.append(f'<line x1="{pad_l - 5}" y1="{sy(v):.1f}" x2="{pad_l}" y2="{sy(v):.1f}" '
                       f'stroke="black"/>')
            out.append(f'<text x="{pad_l - 8}" y="{sy(v) + 4:.1f}" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{pad_l + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">'
               f'{_esc(xlabel)}</text>')
    out.append(f'<text x="15" y="{pad_t + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {pad_t + ph / 2:.1f})">{_esc(ylabel)}</text>')
    for k, (label, x, y) in enumerate(pts):
        color = _COLORS[k % len(_COLORS)]
        if x.size:
            path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        ly = pad_t + 14 + 14 * k
        out.append(f'<line x1="{pad_l + pw - 150}" y1="{ly - 4}" x2="{pad_l + pw - 130}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{pad_l + pw - 125}" y="{ly}">{_esc(label)}</text>')
    out.append("</svg>\n")
    return "\n".join(out)


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
