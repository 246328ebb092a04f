"""Deterministic CSV and SVG emission for experiment outputs."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IoError


def format_value(value):
    """Shortest round-trip text for a CSV field."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(rows, schema, path):
    """Write rows under a header; floats print shortest-round-trip.

    RFC-4180-style quoting, '\\n' line endings, no locale formatting.
    Every row must match the schema arity.
    """
    for i, row in enumerate(rows):
        if len(row) != len(schema):
            raise ValueError(
                f"row {i} has {len(row)} fields, schema has {len(schema)}"
            )
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(schema)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_csv(path):
    """Reload a write_csv file as (schema, rows of floats-or-strings)."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            schema = next(reader)
            rows = []
            for raw in reader:
                row = []
                for v in raw:
                    try:
                        row.append(float(v))
                    except ValueError:
                        row.append(v)
                rows.append(row)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return schema, rows


@dataclass(frozen=True)
class Series:
    name: str
    xs: tuple
    ys: tuple


@dataclass(frozen=True)
class AxesSpec:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    vlines: tuple = field(default_factory=tuple)
    log_y: bool = False


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
_WIDTH, _HEIGHT = 640.0, 480.0
_MARGIN = 60.0


def _coord(v):
    return f"{v:.3f}"


def _spans(series, axes):
    xs = [x for s in series for x in s.xs]
    ys = [_y_value(y, axes) for s in series for y in s.ys]
    xs += list(axes.vlines)
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    return x_lo, x_hi, y_lo, y_hi


def _y_value(y, axes):
    if axes.log_y:
        return math.log10(max(float(y), 1e-300))
    return float(y)


def render_svg(series, axes, path):
    """Standalone SVG: one polyline per series, axes, legend.

    Output bytes depend only on the inputs, so re-rendering the same
    data is byte-identical.
    """
    series = list(series)
    if not series:
        raise ValueError("render_svg needs at least one series")
    x_lo, x_hi, y_lo, y_hi = _spans(series, axes)

    def px(x):
        return _MARGIN + (float(x) - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)

    def py(y):
        return _HEIGHT - _MARGIN - (_y_value(y, axes) - y_lo) / (y_hi - y_lo) * (
            _HEIGHT - 2 * _MARGIN
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_WIDTH)}" '
        f'height="{int(_HEIGHT)}" viewBox="0 0 {int(_WIDTH)} {int(_HEIGHT)}">',
        f'<rect width="{int(_WIDTH)}" height="{int(_HEIGHT)}" fill="white"/>',
        f'<line x1="{_coord(_MARGIN)}" y1="{_coord(_HEIGHT - _MARGIN)}" '
        f'x2="{_coord(_WIDTH - _MARGIN)}" y2="{_coord(_HEIGHT - _MARGIN)}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_coord(_MARGIN)}" y1="{_coord(_MARGIN)}" '
        f'x2="{_coord(_MARGIN)}" y2="{_coord(_HEIGHT - _MARGIN)}" '
        'stroke="black" stroke-width="1"/>',
    ]
    if axes.title:
        parts.append(
            f'<text x="{_coord(_WIDTH / 2)}" y="30" text-anchor="middle" '
            f'font-size="16">{axes.title}</text>'
        )
    if axes.xlabel:
        parts.append(
            f'<text x="{_coord(_WIDTH / 2)}" y="{_coord(_HEIGHT - 15)}" '
            f'text-anchor="middle" font-size="12">{axes.xlabel}</text>'
        )
    if axes.ylabel:
        parts.append(
            f'<text x="18" y="{_coord(_HEIGHT / 2)}" text-anchor="middle" '
            f'font-size="12" transform="rotate(-90 18 {_coord(_HEIGHT / 2)})">'
            f"{axes.ylabel}</text>"
        )
    for v in axes.vlines:
        parts.append(
            f'<line x1="{_coord(px(v))}" y1="{_coord(_MARGIN)}" '
            f'x2="{_coord(px(v))}" y2="{_coord(_HEIGHT - _MARGIN)}" '
            'stroke="gray" stroke-width="1" stroke-dasharray="4 3"/>'
        )
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_coord(px(x))},{_coord(py(y))}" for x, y in zip(s.xs, s.ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>'
        )
        ly = _MARGIN + 16.0 * i
        parts.append(
            f'<line x1="{_coord(_WIDTH - _MARGIN - 120)}" y1="{_coord(ly)}" '
            f'x2="{_coord(_WIDTH - _MARGIN - 100)}" y2="{_coord(ly)}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_coord(_WIDTH - _MARGIN - 94)}" y="{_coord(ly + 4)}" '
            f'font-size="11">{s.name}</text>'
        )
    parts.append("</svg>")
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
