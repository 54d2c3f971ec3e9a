"""Inner approximation of a stability region over a parameter grid."""

from __future__ import annotations

import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from .expr import VectorFunc
from .interval import Box, Interval
from .stability import CentreResidualTooLarge, StabilityReport, Verdict, check_stability

__all__ = [
    "InvalidDomain",
    "ParamCell",
    "PavingResult",
    "pave",
    "sqrt_rule",
    "export_paving",
    "paving_csv",
    "paving_svg",
]


class InvalidDomain(ValueError):
    pass


def sqrt_rule(w: float) -> float:
    """Initial-box half width for a parameter cell of width ``w``."""
    return math.sqrt(w)


@dataclass
class ParamCell:
    m_box: Box
    status: Verdict
    eps: float
    report: Optional[StabilityReport] = None
    cause: Optional[str] = None

    @property
    def proven(self) -> bool:
        return self.status is Verdict.PROVEN


@dataclass
class PavingResult:
    domain: Box
    cell_width: float
    shape: tuple[int, ...]
    cells: list[ParamCell]
    epsilon_rule: str

    @property
    def n_proven(self) -> int:
        return sum(c.proven for c in self.cells)

    @property
    def proven_fraction(self) -> float:
        return self.n_proven / len(self.cells)

    def grid(self):
        """Cells as nested lists indexed like the parameters."""
        out = self.cells
        for size in reversed(self.shape[1:]):
            out = [out[i:i + size] for i in range(0, len(out), size)]
        return out


def _counts(domain: Box, w: float) -> tuple[int, ...]:
    return tuple(max(1, math.ceil((c.hi - c.lo) / w - 1e-9)) for c in domain)


def _check_cell(args) -> ParamCell:
    f, m_box, eps, N, residual_tol = args
    x0 = Box.hypercube(f.n, -eps, eps)
    xbar = Box.zeros(f.n)
    try:
        rep = check_stability(f, xbar, x0, N, params=m_box, residual_tol=residual_tol)
    except CentreResidualTooLarge as exc:
        return ParamCell(m_box, Verdict.UNDETERMINED, eps, cause="CentreResidual")
    return ParamCell(m_box, rep.verdict, eps, rep, rep.cause)


def pave(f: VectorFunc, domain: Box, cell_width: float, N: int = 10,
         eps_rule: Callable[[float], float] = sqrt_rule, workers: Optional[int] = None,
         residual_tol: float = 1e-9) -> PavingResult:
    """Grid ``domain`` into cells of side ``cell_width`` and try to prove each.

    Each cell [m] is checked with centre 0 and initial box
    ``[-eps, eps]^n``, ``eps = eps_rule(cell_width)``.  Cells are listed in
    row-major order (last parameter varies fastest).
    """
    if f.p < 1:
        raise InvalidDomain("paving needs a system with parameters")
    if len(domain) != f.p:
        raise InvalidDomain(f"domain has dimension {len(domain)}, system has {f.p} parameters")
    if not (cell_width > 0 and math.isfinite(cell_width)):
        raise InvalidDomain(f"cell width must be positive, got {cell_width}")
    if not all(math.isfinite(c.lo) and math.isfinite(c.hi) for c in domain):
        raise InvalidDomain("domain must be bounded")
    eps = eps_rule(cell_width)
    shape = _counts(domain, cell_width)
    boxes = []
    for idx in itertools.product(*(range(k) for k in shape)):
        comps = []
        for c, i in zip(domain, idx):
            comps.append(Interval(c.lo + i * cell_width, c.lo + (i + 1) * cell_width))
        boxes.append(Box(comps))
    jobs = [(f, b, eps, N, residual_tol) for b in boxes]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            cells = list(ex.map(_check_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        cells = [_check_cell(j) for j in jobs]
    rule = getattr(eps_rule, "__name__", "custom")
    return PavingResult(domain, cell_width, shape, cells, f"{rule}: eps={eps!r}")


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def paving_csv(result: PavingResult) -> str:
    p = len(result.domain)
    header = [f"m{j + 1}_{side}" for j in range(p) for side in ("lo", "hi")] + ["status", "q", "alpha"]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for cell in result.cells:
        row = [repr(v) for c in cell.m_box for v in (c.lo, c.hi)]
        row.append(str(cell.status))
        rep = cell.report
        if cell.proven and rep is not None:
            row += [str(rep.q), repr(rep.alpha)]
        else:
            row += ["", ""]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


_GREEN = "#3cb371"
_RED = "#e05555"


def paving_svg(result: PavingResult, size: int = 500) -> str:
    dom = result.domain
    if len(dom) == 1:
        dom = Box([dom[0], (0.0, 1.0)])
        rects = [(Box([cell.m_box[0], (0.0, 1.0)]), cell.proven) for cell in result.cells]
    elif len(dom) == 2:
        rects = [(cell.m_box, cell.proven) for cell in result.cells]
    else:
        raise ValueError("SVG export supports 1 or 2 parameters")
    x_lo = min(b[0].lo for b, _ in rects)
    x_hi = max(b[0].hi for b, _ in rects)
    y_lo = min(b[1].lo for b, _ in rects)
    y_hi = max(b[1].hi for b, _ in rects)
    sx = size / (x_hi - x_lo)
    sy = size / (y_hi - y_lo)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    for b, ok in rects:
        x = (b[0].lo - x_lo) * sx
        y = (y_hi - b[1].hi) * sy
        w = (b[0].hi - b[0].lo) * sx
        h = (b[1].hi - b[1].lo) * sy
        colour = _GREEN if ok else _RED
        out.append(f'<rect x="{x:.4f}" y="{y:.4f}" width="{w:.4f}" height="{h:.4f}" '
                   f'fill="{colour}" stroke="black" stroke-width="0.2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_paving(result: PavingResult, fmt: str, path: Optional[str] = None) -> str:
    """Render ``result`` as ``"csv"`` or ``"svg"``; write it to ``path`` if given."""
    if fmt == "csv":
        text = paving_csv(result)
    elif fmt == "svg":
        text = paving_svg(result)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
