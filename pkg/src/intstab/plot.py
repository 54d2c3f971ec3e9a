"""CSV and SVG renderings of centred-form traces."""

from __future__ import annotations

import io
from typing import Optional, Sequence

from .centred import CentredTrace
from .interval import Box

__all__ = ["BadProjection", "trace_csv", "trace_svg"]


class BadProjection(ValueError):
    pass


def trace_csv(trace: CentredTrace) -> str:
    """One row per step: ``k``, z lows, z highs, fc lows, fc highs (centred coordinates)."""
    n = len(trace.steps[0].z)
    cols = ["k"]
    for name in ("z", "fc"):
        cols += [f"{name}{i + 1}_lo" for i in range(n)]
        cols += [f"{name}{i + 1}_hi" for i in range(n)]
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for st in trace.steps:
        row = [str(st.k)]
        for b in (st.z, st.fc):
            row += [repr(c.lo) for c in b]
            row += [repr(c.hi) for c in b]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def trace_svg(trace: CentredTrace, xbar: Box, x0: Box, proj: Sequence[int] = (0, 1),
              size: int = 500, proven_step: Optional[int] = None) -> str:
    """Nested boxes x0 and xbar + fc_k, projected on two coordinates (0-based).

    One-dimensional systems are drawn as stacked bars, one row per step.
    """
    n = len(x0)
    boxes = [(st.k, xbar + st.fc) for st in trace.steps[1:]]
    if n == 1:
        return _bars_svg([(0, x0)] + boxes, size, proven_step)
    if len(proj) != 2 or any(not 0 <= i < n for i in proj) or proj[0] == proj[1]:
        raise BadProjection(f"projection {tuple(i + 1 for i in proj)} invalid for dimension {n}")
    i, j = proj
    allb = [x0] + [b for _, b in boxes]
    x_lo = min(b[i].lo for b in allb)
    x_hi = max(b[i].hi for b in allb)
    y_lo = min(b[j].lo for b in allb)
    y_hi = max(b[j].hi for b in allb)
    pad = 0.05 * max(x_hi - x_lo, y_hi - y_lo)
    x_lo, x_hi, y_lo, y_hi = x_lo - pad, x_hi + pad, y_lo - pad, y_hi + pad
    scale = size / max(x_hi - x_lo, y_hi - y_lo)

    def rect(b: Box, style: str) -> str:
        x = (b[i].lo - x_lo) * scale
        y = (y_hi - b[j].hi) * scale
        w = (b[i].hi - b[i].lo) * scale
        h = (b[j].hi - b[j].lo) * scale
        return f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" {style}/>'

    out = [_header(size), rect(x0, 'fill="none" stroke="black" stroke-width="1.5"')]
    for k, b in boxes:
        colour = "#2e8b57" if k == proven_step else "#1f5fbf"
        out.append(rect(b, f'fill="{colour}" fill-opacity="0.15" stroke="{colour}" stroke-width="1"'))
    cx = (xbar[i].mid() - x_lo) * scale
    cy = (y_hi - xbar[j].mid()) * scale
    out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="2" fill="black"/>')
    out.append(f'<text x="4" y="{size - 4}" font-size="10">x{i + 1} / x{j + 1}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _header(size: int) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>')


def _bars_svg(rows, size: int, proven_step: Optional[int]) -> str:
    lo = min(b[0].lo for _, b in rows)
    hi = max(b[0].hi for _, b in rows)
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    scale = size / (hi - lo)
    h = size / (len(rows) + 1)
    out = [_header(size)]
    for r, (k, b) in enumerate(rows):
        colour = "black" if k == 0 else ("#2e8b57" if k == proven_step else "#1f5fbf")
        x = (b[0].lo - lo) * scale
        w = (b[0].hi - b[0].lo) * scale
        y = (r + 0.5) * h
        out.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(0.6 * h)}" '
                   f'fill="{colour}" fill-opacity="0.3" stroke="{colour}"/>')
        out.append(f'<text x="2" y="{_fmt(y + 0.4 * h)}" font-size="10">k={k}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
