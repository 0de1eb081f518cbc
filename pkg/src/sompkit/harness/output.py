"""CSV and SVG writers for experiment results.

CSV files are UTF-8 with LF line endings and reals written with 17 significant
digits, so re-reading reproduces every number exactly.

1-D curves::

    algorithm,axis,value,trials,successes,srp,wilson_lo,wilson_hi,theory_threshold,theory_method

``theory_threshold`` and ``theory_method`` hold ``;``-joined lists when several
theoretical boundaries apply (for example the l2 and Frobenius thresholds).

2-D grids (long form), plus a companion ``<name>_theory.csv``::

    algorithm,axis1,value1,axis2,value2,trials,successes,srp
    axis1,value1,axis2,theory_value2,theory_method

Norm-CDF validation (fig1) writes ``d,x,empirical_cdf,tw_cdf`` and a summary
``<name>_summary.csv`` with ``d,samples,sup_gap``.

SVGs are self-contained (no fonts, scripts or external references) and
byte-identical for identical input.
"""

import json
import math
import os
from html import escape

import numpy as np

from .experiment import SrpCurve, Overlay

HEADER_1D = "algorithm,axis,value,trials,successes,srp,wilson_lo,wilson_hi,theory_threshold,theory_method"
HEADER_2D = "algorithm,axis1,value1,axis2,value2,trials,successes,srp"
HEADER_THEORY = "axis1,value1,axis2,theory_value2,theory_method"


def fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def _write(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def csv_lines(curves):
    curves = list(curves)
    if curves[0].is_2d:
        lines = [HEADER_2D]
        for c in curves:
            for i, v1 in enumerate(c.grid):
                for j, v2 in enumerate(c.grid2):
                    k = int(c.successes[i, j])
                    lines.append(",".join([c.algorithm, c.axis, fmt(v1), c.axis2, fmt(v2), fmt(c.trials), fmt(k), fmt(k / c.trials)]))
        return lines
    lines = [HEADER_1D]
    for c in curves:
        lo, hi = c.wilson()
        thr = ";".join(fmt(o.values[0]) for o in c.overlays)
        meth = ";".join(o.method for o in c.overlays)
        for i, v in enumerate(c.grid):
            k = int(c.successes[i])
            lines.append(",".join([c.algorithm, c.axis, fmt(v), fmt(c.trials), fmt(k), fmt(k / c.trials),
                                   fmt(lo[i]), fmt(hi[i]), thr, meth]))
    return lines


def theory_lines(curve):
    lines = [HEADER_THEORY]
    for o in curve.overlays:
        for v1, t in zip(curve.grid, o.values):
            lines.append(",".join([curve.axis, fmt(v1), curve.axis2, fmt(t), o.method]))
    return lines


def emit_csv(curves, path):
    """Write one or more curves (same grid) to ``path``; 2-D curves also get ``*_theory.csv``."""
    curves = list(curves.values()) if isinstance(curves, dict) else list(curves)
    _write(path, csv_lines(curves))
    if curves[0].is_2d:
        stem, _ = os.path.splitext(path)
        _write(stem + "_theory.csv", theory_lines(curves[0]))


def _num(text):
    return float(text)


def read_csv(path):
    """Parse a 1-D or 2-D result CSV back into SrpCurve objects keyed by algorithm."""
    with open(path, encoding="utf-8") as fh:
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    header, body = ",".join(rows[0]), rows[1:]
    curves = {}
    if header == HEADER_1D:
        for alg in dict.fromkeys(r[0] for r in body):
            mine = [r for r in body if r[0] == alg]
            methods = mine[0][9].split(";") if mine[0][9] else []
            thr = [_num(t) for t in mine[0][8].split(";")] if mine[0][8] else []
            curves[alg] = SrpCurve(
                algorithm=alg, axis=mine[0][1], grid=tuple(_num(r[2]) for r in mine),
                successes=np.array([int(r[4]) for r in mine]), trials=int(mine[0][3]),
                overlays=tuple(Overlay(m, (t,)) for m, t in zip(methods, thr)),
            )
        return curves
    if header == HEADER_2D:
        stem, _ = os.path.splitext(path)
        theory = []
        if os.path.exists(stem + "_theory.csv"):
            with open(stem + "_theory.csv", encoding="utf-8") as fh:
                theory = [line.rstrip("\n").split(",") for line in fh if line.strip()][1:]
        for alg in dict.fromkeys(r[0] for r in body):
            mine = [r for r in body if r[0] == alg]
            g1 = tuple(dict.fromkeys(_num(r[2]) for r in mine))
            g2 = tuple(dict.fromkeys(_num(r[4]) for r in mine))
            succ = np.array([int(r[6]) for r in mine]).reshape(len(g1), len(g2))
            overlays = tuple(
                Overlay(m, tuple(_num(r[3]) for r in theory if r[4] == m))
                for m in dict.fromkeys(r[4] for r in theory)
            )
            curves[alg] = SrpCurve(
                algorithm=alg, axis=mine[0][1], grid=g1, successes=succ, trials=int(mine[0][5]),
                axis2=mine[0][3], grid2=g2, overlays=overlays,
            )
        return curves
    raise ValueError(f"{path}: unrecognized header {header!r}")


def emit_metadata(curves, path):
    meta = dict(next(iter(curves.values())).metadata)
    meta.pop("algorithm", None)
    meta["algorithms"] = list(curves)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# SVG

W, H = 640, 420
PAD_L, PAD_R, PAD_T, PAD_B = 64, 24, 40, 64
LINE_STYLES = {"somps": ("#000000", ""), "sompt": ("#7a7a7a", "")}
OVERLAY_DASH = {
    "bounded-l2": "6,4", "tracy-widom": "6,4", "noiseless": "6,4",
    "frobenius": "2,3", "chernoff": "2,3",
}
OVERLAY_COLOR = {"bounded-l2": "#404040", "tracy-widom": "#404040", "noiseless": "#404040",
                 "frobenius": "#000000", "chernoff": "#000000"}


def _n(v):
    # fixed 2-decimal coordinates keep the SVG byte-stable
    return f"{v:.2f}"


def _svg_open(width, height, title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def _text(x, y, s, size=12, anchor="middle", rotate=None):
    rot = f' transform="rotate({rotate} {_n(x)} {_n(y)})"' if rotate is not None else ""
    return (f'<text x="{_n(x)}" y="{_n(y)}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{rot}>{escape(s)}</text>')


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / n for k in range(n + 1)]


def _tick_label(v):
    return f"{v:.3g}"


def _axes(x0, y0, w, h, xlo, xhi, ylo, yhi, xlabel, ylabel):
    out = [f'<rect x="{_n(x0)}" y="{_n(y0)}" width="{_n(w)}" height="{_n(h)}" fill="none" stroke="#000000"/>']
    for t in _ticks(xlo, xhi):
        x = x0 + (t - xlo) / (xhi - xlo) * w if xhi > xlo else x0
        out.append(f'<line x1="{_n(x)}" y1="{_n(y0 + h)}" x2="{_n(x)}" y2="{_n(y0 + h + 4)}" stroke="#000000"/>')
        out.append(_text(x, y0 + h + 16, _tick_label(t), 10))
    for t in _ticks(ylo, yhi):
        y = y0 + h - (t - ylo) / (yhi - ylo) * h if yhi > ylo else y0
        out.append(f'<line x1="{_n(x0 - 4)}" y1="{_n(y)}" x2="{_n(x0)}" y2="{_n(y)}" stroke="#000000"/>')
        out.append(_text(x0 - 6, y + 3, _tick_label(t), 10, anchor="end"))
    out.append(_text(x0 + w / 2, y0 + h + 34, xlabel))
    out.append(_text(x0 - 44, y0 + h / 2, ylabel, rotate=-90))
    return out


def svg_1d(curves, title):
    curves = list(curves)
    c0 = curves[0]
    grid = np.asarray(c0.grid, dtype=float)
    xlo, xhi = float(grid.min()), float(grid.max())
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    x0, y0, w, h = PAD_L, PAD_T, W - PAD_L - PAD_R, H - PAD_T - PAD_B
    sx = lambda v: x0 + (v - xlo) / (xhi - xlo) * w  # noqa: E731
    sy = lambda v: y0 + h - v * h  # noqa: E731
    out = _svg_open(W, H, title)
    out.append(_text(W / 2, 22, title, 14))
    out += _axes(x0, y0, w, h, xlo, xhi, 0.0, 1.0, c0.axis, "SRP")
    legend_y = y0 + 14
    for c in curves:
        color, dash = LINE_STYLES.get(c.algorithm, ("#000000", ""))
        pts = " ".join(f"{_n(sx(v))},{_n(sy(p))}" for v, p in zip(grid, c.srp))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for v, p in zip(grid, c.srp):
            out.append(f'<circle cx="{_n(sx(v))}" cy="{_n(sy(p))}" r="2" fill="{color}"/>')
        out.append(f'<line x1="{_n(x0 + w - 150)}" y1="{_n(legend_y)}" x2="{_n(x0 + w - 125)}" '
                   f'y2="{_n(legend_y)}" stroke="{color}" stroke-width="1.5"/>')
        out.append(_text(x0 + w - 120, legend_y + 4, c.algorithm.upper(), 11, anchor="start"))
        legend_y += 16
    drawn = 0
    for o in c0.overlays:
        v = o.values[0]
        if not math.isfinite(v):
            continue
        dash = OVERLAY_DASH.get(o.method, "6,4")
        color = OVERLAY_COLOR.get(o.method, "#404040")
        if xlo <= v <= xhi:
            out.append(f'<line x1="{_n(sx(v))}" y1="{_n(y0)}" x2="{_n(sx(v))}" y2="{_n(y0 + h)}" '
                       f'stroke="{color}" stroke-dasharray="{dash}" stroke-width="1.2"/>')
        out.append(f'<line x1="{_n(x0 + w - 150)}" y1="{_n(legend_y)}" x2="{_n(x0 + w - 125)}" '
                   f'y2="{_n(legend_y)}" stroke="{color}" stroke-dasharray="{dash}"/>')
        out.append(_text(x0 + w - 120, legend_y + 4, f"theory ({o.method}) {v:.4g}", 11, anchor="start"))
        legend_y += 16
        drawn += 1
    if drawn == 0:
        out.append(_text(W / 2, H - 8, "no theoretical bound applies here (mu >= 1/(2L-1) or no closed form)", 11))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _gray(p):
    g = int(round(255 * min(max(p, 0.0), 1.0)))
    return f"#{g:02x}{g:02x}{g:02x}"


def svg_2d(curves, title):
    curves = list(curves)
    c0 = curves[0]
    n1, n2 = len(c0.grid), len(c0.grid2)
    panel_w = 300
    width = PAD_L + len(curves) * (panel_w + PAD_R + 20) + 40
    height = H
    out = _svg_open(width, height, title)
    out.append(_text(width / 2, 22, title, 14))
    h = height - PAD_T - PAD_B
    any_overlay = False
    for ci, c in enumerate(curves):
        x0 = PAD_L + ci * (panel_w + PAD_R + 20)
        y0 = PAD_T
        cw, ch = panel_w / n1, h / n2
        for i in range(n1):
            for j in range(n2):
                out.append(f'<rect x="{_n(x0 + i * cw)}" y="{_n(y0 + h - (j + 1) * ch)}" width="{_n(cw)}" '
                           f'height="{_n(ch)}" fill="{_gray(c.srp[i, j])}" stroke="none"/>')
        out.append(f'<rect x="{_n(x0)}" y="{_n(y0)}" width="{_n(panel_w)}" height="{_n(h)}" fill="none" stroke="#000000"/>')
        for i, v in enumerate(c.grid):
            out.append(_text(x0 + (i + 0.5) * cw, y0 + h + 14, _tick_label(v), 9))
        step = max(1, n2 // 8)
        for j in range(0, n2, step):
            out.append(_text(x0 - 4, y0 + h - (j + 0.5) * ch + 3, _tick_label(c.grid2[j]), 9, anchor="end"))
        out.append(_text(x0 + panel_w / 2, y0 + h + 34, f"{c.axis}  ({c.algorithm.upper()})"))
        out.append(_text(x0 - 44, y0 + h / 2, c.axis2, rotate=-90))
        g2 = np.asarray(c.grid2, dtype=float)

        def ypos(v):
            # piecewise-linear in grid index so the contour aligns with the cells
            if v <= g2[0]:
                return y0 + h - 0.5 * ch - (v - g2[0]) / ((g2[1] - g2[0]) if n2 > 1 else 1.0) * ch
            if v >= g2[-1]:
                return y0 + h - (n2 - 0.5) * ch - (v - g2[-1]) / ((g2[-1] - g2[-2]) if n2 > 1 else 1.0) * ch
            k = int(np.searchsorted(g2, v)) - 1
            frac = (v - g2[k]) / (g2[k + 1] - g2[k])
            return y0 + h - (k + 0.5 + frac) * ch

        for o in c.overlays:
            pts = []
            for i, v in enumerate(o.values):
                if math.isfinite(v):
                    y = min(max(ypos(v), y0), y0 + h)
                    pts.append(f"{_n(x0 + (i + 0.5) * cw)},{_n(y)}")
            if len(pts) >= 1:
                any_overlay = True
                dash = OVERLAY_DASH.get(o.method, "6,4")
                out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#d00000" '
                           f'stroke-dasharray="{dash}" stroke-width="1.5"/>')
    legend_y = height - 10
    labels = " / ".join(f"{o.method} {'dashed' if OVERLAY_DASH.get(o.method) == '6,4' else 'dotted'}" for o in c0.overlays)
    note = f"black = SRP 0, white = SRP 1; theory: {labels}" if any_overlay else \
        "black = SRP 0, white = SRP 1; no theoretical bound applies (mu >= 1/(2L-1))"
    out.append(_text(width / 2, legend_y, note, 10))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(curves, path, title=None):
    curves = list(curves.values()) if isinstance(curves, dict) else list(curves)
    title = title or curves[0].metadata.get("name", "srp")
    text = svg_2d(curves, title) if curves[0].is_2d else svg_1d(curves, title)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_results(curves, output_dir, name):
    """Write ``name.csv``, ``name.svg`` (and ``name_theory.csv`` for 2-D) plus ``name.json``."""
    os.makedirs(output_dir, exist_ok=True)
    base = os.path.join(output_dir, name)
    emit_csv(curves, base + ".csv")
    emit_svg(curves, base + ".svg", title=name)
    emit_metadata(curves, base + ".json")
    files = [base + ".csv", base + ".svg", base + ".json"]
    if next(iter(curves.values())).is_2d:
        files.insert(1, base + "_theory.csv")
    return files


# norm-CDF validation output

def write_norm_cdf(result, output_dir, name):
    os.makedirs(output_dir, exist_ok=True)
    base = os.path.join(output_dir, name)
    lines = ["d,x,empirical_cdf,tw_cdf"]
    curves = {}
    for d in result.d_values:
        x, emp, tw = result.curve(d)
        curves[d] = (x, emp, tw)
        lines += [",".join([str(d), fmt(a), fmt(b), fmt(c)]) for a, b, c in zip(x, emp, tw)]
    _write(base + ".csv", lines)
    summary = ["d,samples,sup_gap"] + [
        f"{d},{result.samples[d].size},{fmt(result.sup_gap[d])}" for d in result.d_values
    ]
    _write(base + "_summary.csv", summary)
    with open(base + ".svg", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_norm_cdf(curves, f"{name}: Pr(||N||_2 <= x), M={result.M}, sigma={result.sigma:g}"))
    with open(base + ".json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(dict(result.metadata, sup_gap={str(k): v for k, v in result.sup_gap.items()}), fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    return [base + ".csv", base + ".svg"]


def svg_norm_cdf(curves, title):
    xs = np.concatenate([c[0] for c in curves.values()])
    xlo, xhi = float(xs.min()), float(xs.max())
    x0, y0, w, h = PAD_L, PAD_T, W - PAD_L - PAD_R, H - PAD_T - PAD_B
    sx = lambda v: x0 + (v - xlo) / (xhi - xlo) * w  # noqa: E731
    sy = lambda v: y0 + h - v * h  # noqa: E731
    out = _svg_open(W, H, title)
    out.append(_text(W / 2, 22, title, 13))
    out += _axes(x0, y0, w, h, xlo, xhi, 0.0, 1.0, "x", "CDF")
    n = len(curves)
    for k, (d, (x, emp, tw)) in enumerate(curves.items()):
        g = int(200 * k / max(n - 1, 1))
        color = f"#{g:02x}{g:02x}{g:02x}"
        out.append('<polyline points="' + " ".join(f"{_n(sx(a))},{_n(sy(b))}" for a, b in zip(x, emp))
                   + f'" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append('<polyline points="' + " ".join(f"{_n(sx(a))},{_n(sy(b))}" for a, b in zip(x, tw))
                   + f'" fill="none" stroke="{color}" stroke-dasharray="6,4" stroke-width="1.2"/>')
        out.append(_text(x0 + 8, y0 + 14 + 14 * k, f"d = {d}", 11, anchor="start"))
    out.append(_text(W / 2, H - 8, "solid: empirical, dashed: Tracy-Widom approximation", 11))
    out.append("</svg>")
    return "\n".join(out) + "\n"
