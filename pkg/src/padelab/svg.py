"""Minimal deterministic SVG plots of contours, poles and nodes."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH = HEIGHT = 480
MARGIN = 40


def _fmt(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _bounds(zs: Sequence[complex]):
    finite = [z for z in zs if math.isfinite(z.real) and math.isfinite(z.imag)]
    if not finite:
        return -1.0, 1.0, -1.0, 1.0
    x0, x1 = min(z.real for z in finite), max(z.real for z in finite)
    y0, y1 = min(z.imag for z in finite), max(z.imag for z in finite)
    span = max(x1 - x0, y1 - y0, 1e-9)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    half = 0.55 * span
    return cx - half, cx + half, cy - half, cy + half


def render(polylines: Sequence[Sequence[complex]] = (), points: Sequence[complex] = (),
           crosses: Sequence[complex] = (), title: str = "") -> str:
    """Return an SVG document.

    Parameters
    ----------
    polylines : list of point lists
        Drawn as ``<path>`` elements with one ``L`` command per segment.
    points : list of complex
        Drawn as filled dots (poles).
    crosses : list of complex
        Drawn as crosses (interpolation nodes).
    title : str
        Optional caption.

    Empty input yields a valid document with empty axes.
    """
    polylines = [[complex(z) for z in pl] for pl in polylines if len(pl) >= 1]
    points = [complex(z) for z in points]
    crosses = [complex(z) for z in crosses]
    allz = [z for pl in polylines for z in pl] + points + crosses
    x0, x1, y0, y1 = _bounds(allz)
    inner = WIDTH - 2 * MARGIN

    def X(z: complex) -> str:
        return _fmt(MARGIN + (z.real - x0) / (x1 - x0) * inner)

    def Y(z: complex) -> str:
        return _fmt(MARGIN + (y1 - z.imag) / (y1 - y0) * inner)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
    ]
    if x0 < 0 < x1:
        out.append(f'<line x1="{X(0)}" y1="{MARGIN}" x2="{X(0)}" y2="{MARGIN + inner}" '
                   'stroke="#ddd" stroke-width="1"/>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{MARGIN}" y1="{Y(0)}" x2="{MARGIN + inner}" y2="{Y(0)}" '
                   'stroke="#ddd" stroke-width="1"/>')
    for lab, z, anchor in ((_fmt(x0), complex(x0, y0), "start"), (_fmt(x1), complex(x1, y0), "end")):
        out.append(f'<text x="{X(z)}" y="{HEIGHT - MARGIN + 16}" font-size="11" '
                   f'text-anchor="{anchor}">{lab}</text>')
    for lab, z in ((_fmt(y0), complex(x0, y0)), (_fmt(y1), complex(x0, y1))):
        out.append(f'<text x="{MARGIN - 4}" y="{Y(z)}" font-size="11" text-anchor="end">{lab}i</text>')
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="{MARGIN - 14}" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
    for pl in polylines:
        d = f"M {X(pl[0])} {Y(pl[0])}" + "".join(f" L {X(z)} {Y(z)}" for z in pl[1:])
        out.append(f'<path d="{d}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>')
    for z in crosses:
        cx, cy = float(X(z)), float(Y(z))
        out.append(f'<path d="M {_fmt(cx - 4)} {_fmt(cy - 4)} L {_fmt(cx + 4)} {_fmt(cy + 4)} '
                   f'M {_fmt(cx - 4)} {_fmt(cy + 4)} L {_fmt(cx + 4)} {_fmt(cy - 4)}" '
                   'stroke="#2a2" stroke-width="1.5" class="node"/>')
    for z in points:
        out.append(f'<circle cx="{X(z)}" cy="{Y(z)}" r="2.5" fill="#c22" class="pole"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write(path, **kwargs) -> None:
    """Render with :func:`render` and write to ``path``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render(**kwargs))
