"""CSV and SVG writers.  Every file is written to a temp name and renamed."""

from __future__ import annotations

import math
import os
import tempfile
from html import escape

import numpy as np

CSV_MAGIC = "# curvtrack v1"
# linear ramp through these stops (dark blue, teal, yellow)
RAMP = ((0.0, (37, 52, 148)), (0.5, (65, 182, 196)), (1.0, (255, 237, 111)))


def format_field(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if value == 0.0:
            return "0"  # fold -0.0
        return format(value, ".9g")
    return str(value)


def csv_text(columns, rows) -> str:
    lines = [CSV_MAGIC, "# " + ",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
        lines.append(",".join(format_field(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(text: str):
    """(columns, rows of strings) from text produced by :func:`csv_text`."""
    lines = text.split("\n")
    if lines[0] != CSV_MAGIC or not lines[1].startswith("# "):
        raise ValueError("not a curvtrack v1 csv")
    columns = lines[1][2:].split(",")
    rows = [line.split(",") for line in lines[2:] if line]
    return columns, rows


def atomic_write(path, text: str) -> None:
    """Write ``text`` so that ``path`` is either absent/old or complete."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def ramp_color(frac: float) -> str:
    frac = min(1.0, max(0.0, float(frac)))
    for (f0, c0), (f1, c1) in zip(RAMP, RAMP[1:]):
        if frac <= f1:
            w = (frac - f0) / (f1 - f0)
            rgb = [round(a + w * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*RAMP[-1][1])


def heatmap_svg(values, x_axis, y_axis, flags=None, title="", x_label="delta2/delta1", y_label="theta/pi", cell=4) -> str:
    """Cells laid out with x (rows of ``values``) across and y up the page."""
    values = np.asarray(values, dtype=float)
    if not np.isfinite(values).all():
        raise ValueError("heatmap values must be finite")
    nx, ny = values.shape
    flags = np.zeros(values.shape, bool) if flags is None else np.asarray(flags, bool)
    vmin, vmax = float(values.min()), float(values.max())
    span = vmax - vmin
    left, top = 60, 30
    width, height = nx * cell, ny * cell
    legend_x = left + width + 30
    total_w, total_h = legend_x + 150, top + height + 50

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" '
        f'viewBox="0 0 {total_w} {total_h}" font-family="sans-serif" font-size="11">',
        f'<text x="{left}" y="18">{escape(title)}</text>',
        f'<g shape-rendering="crispEdges">',
    ]
    outlines = []
    for i in range(nx):
        for j in range(ny):
            frac = 0.5 if span == 0 else (values[i, j] - vmin) / span
            x, y = left + i * cell, top + (ny - 1 - j) * cell
            out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{ramp_color(frac)}"/>')
            if flags[i, j]:
                outlines.append(
                    f'<rect class="flagged" x="{x}" y="{y}" width="{cell}" height="{cell}" '
                    'fill="none" stroke="#d00000" stroke-width="1"/>'
                )
    out.append("</g>")
    out.extend(outlines)
    out.append(
        f'<rect x="{left}" y="{top}" width="{width}" height="{height}" fill="none" stroke="black"/>'
    )
    out.append(f'<text x="{left}" y="{top + height + 14}">{format_field(x_axis[0])}</text>')
    out.append(
        f'<text x="{left + width}" y="{top + height + 14}" text-anchor="end">{format_field(x_axis[-1])}</text>'
    )
    out.append(f'<text x="{left + width / 2}" y="{top + height + 30}" text-anchor="middle">{escape(x_label)}</text>')
    out.append(f'<text x="{left - 4}" y="{top + height}" text-anchor="end">{format_field(y_axis[0])}</text>')
    out.append(f'<text x="{left - 4}" y="{top + 10}" text-anchor="end">{format_field(y_axis[-1])}</text>')
    out.append(
        f'<text x="{left - 40}" y="{top + height / 2}" text-anchor="middle" '
        f'transform="rotate(-90 {left - 40} {top + height / 2})">{escape(y_label)}</text>'
    )

    # legend: vertical ramp with exact extremes
    out.append('<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">')
    for f, rgb in RAMP:
        colour = "#{:02x}{:02x}{:02x}".format(*rgb) if span else ramp_color(0.5)
        out.append(f'<stop offset="{f}" stop-color="{colour}"/>')
    out.append("</linearGradient></defs>")
    out.append(f'<rect x="{legend_x}" y="{top}" width="16" height="{height}" fill="url(#ramp)" stroke="black"/>')
    out.append(f'<text class="legend-max" x="{legend_x + 22}" y="{top + 10}">max = {vmax!r}</text>')
    out.append(f'<text class="legend-min" x="{legend_x + 22}" y="{top + height}">min = {vmin!r}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_heatmap(result, path, title=None) -> None:
    """Render a MapResult (values indexed [delta2, theta]) to a standalone SVG."""
    grid = result.grid
    text = heatmap_svg(
        result.values,
        grid.delta2_over_delta1,
        grid.theta_over_pi,
        flags=result.flags,
        title=title if title is not None else str(getattr(result.kind, "value", result.kind)),
    )
    atomic_write(path, text)
