"""Centred-form stability proofs.

``check_stability`` runs the iterated centred form from a box around the
centre and stops at the first step whose image lies strictly inside the
starting box.  That step count ``q`` and the realised rate ``alpha`` give an
exponential certificate for f^q.  ``check_invariance`` handles a cycle of
stage maps with additive disturbances and only claims forward invariance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .centred import (
    DEFAULT_N,
    CentredProblem,
    CentredTrace,
    TraceStep,
    centre,
    error_cause,
    iterate_centred,
)
from .expr import VectorFunc, compose, state
from .interval import (
    Box,
    Interval,
    IntervalError,
    IntervalMatrix,
    div_up,
    interior_subset,
    mul_up,
    subset,
)

__all__ = [
    "Verdict",
    "Mode",
    "StabilityReport",
    "ExponentialCertificate",
    "Disturbance",
    "CentreResidualTooLarge",
    "NotContained",
    "NotProven",
    "check_stability",
    "extract_rate",
    "exponential_certificate",
    "check_invariance",
    "bisect_and_prove",
    "find_fixed_point",
]

RESIDUAL_TOL = 1e-9


class Verdict(str, enum.Enum):
    PROVEN = "ProvenStable"
    UNDETERMINED = "Undetermined"

    def __str__(self):
        return self.value


class Mode(str, enum.Enum):
    EQUILIBRIUM = "equilibrium"
    INVARIANCE = "invariance"

    def __str__(self):
        return self.value


class CentreResidualTooLarge(ValueError):
    pass


class NotContained(ValueError):
    pass


class NotProven(ValueError):
    pass


@dataclass
class StabilityReport:
    verdict: Verdict
    mode: Mode
    delta_box: Box
    centred_box: Box
    xbar: Box
    q: Optional[int] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    trace: Optional[CentredTrace] = None
    residual: Optional[Box] = None
    cause: Optional[str] = None
    detail: Optional[str] = None

    @property
    def proven(self) -> bool:
        return self.verdict is Verdict.PROVEN

    def summary(self) -> str:
        lines = [f"verdict: {self.verdict}", f"mode: {self.mode}"]
        if self.proven:
            lines.append(f"q: {self.q}")
            if self.alpha is not None:
                lines.append(f"alpha: {self.alpha!r}")
            if self.beta is not None:
                lines.append(f"beta: {self.beta!r}")
            lines.append(f"delta box: {self.delta_box}")
        else:
            lines.append(f"cause: {self.cause}")
            if self.detail:
                lines.append(f"detail: {self.detail}")
        return "\n".join(lines)


def _beta(alpha: float) -> float:
    """-ln(alpha) rounded down, so exp(-beta k) >= alpha^k."""
    if alpha <= 0.0:
        return math.inf
    b = -math.log(alpha)
    return math.nextafter(math.nextafter(b, -math.inf), -math.inf)


def extract_rate(y: Box, x: Box) -> float:
    """Smallest alpha >= 0 (rounded up) with y inside alpha * x.  Needs 0 in x."""
    if not subset(y, x):
        raise NotContained(f"{y} is not contained in {x}")
    if not x.contains_zero():
        raise ValueError("rate extraction needs 0 in the reference box")
    alpha = 0.0
    for yc, xc in zip(y, x):
        if xc.lo < 0.0:
            if yc.lo < 0.0:
                alpha = max(alpha, div_up(yc.lo, xc.lo))
        elif yc.lo < 0.0:
            raise NotContained(f"{yc} has negative part but {xc} does not")
        if xc.hi > 0.0:
            if yc.hi > 0.0:
                alpha = max(alpha, div_up(yc.hi, xc.hi))
        elif yc.hi > 0.0:
            raise NotContained(f"{yc} has positive part but {xc} does not")
    return alpha


def check_stability(f: VectorFunc, xbar: Box, x0: Box, N: int = DEFAULT_N,
                    params: Optional[Box] = None, residual_tol: float = RESIDUAL_TOL) -> StabilityReport:
    """Try to prove that ``xbar`` is an exponentially stable equilibrium on ``x0``."""
    p0 = x0 - xbar
    if not p0.contains_zero():
        raise ValueError(f"initial box {x0} does not contain the centre {xbar}")
    try:
        cp = centre(f, xbar, params)
    except IntervalError as exc:
        return StabilityReport(Verdict.UNDETERMINED, Mode.EQUILIBRIUM, x0, p0, xbar,
                               cause=error_cause(exc), detail=str(exc))
    if cp.residual.norm() > residual_tol * p0.norm():
        raise CentreResidualTooLarge(
            f"|f(xbar) - xbar| <= {cp.residual.norm():.3g} exceeds {residual_tol:g} * {p0.norm():.3g}")
    trace = iterate_centred(cp, p0, N, stop=lambda fc: interior_subset(fc, p0))
    return _report_from_trace(trace, cp, x0, p0)


def _report_from_trace(trace: CentredTrace, cp: CentredProblem, x0: Box, p0: Box) -> StabilityReport:
    last = trace.last
    if last.k >= 1 and interior_subset(last.fc, p0):
        alpha = extract_rate(last.fc, p0)
        return StabilityReport(Verdict.PROVEN, Mode.EQUILIBRIUM, x0, p0, cp.xbar, q=last.k,
                               alpha=alpha, beta=_beta(alpha), trace=trace, residual=cp.residual)
    if trace.cause is not None:
        cause, detail = trace.cause, trace.error
    else:
        cause, detail = "NoContraction", f"no inclusion within {last.k} iterations"
    return StabilityReport(Verdict.UNDETERMINED, Mode.EQUILIBRIUM, x0, p0, cp.xbar,
                           trace=trace, residual=cp.residual, cause=cause, detail=detail)


@dataclass(frozen=True)
class ExponentialCertificate:
    delta_box: Box
    centred_box: Box
    q: int
    alpha: float
    beta: float
    radius: float

    def envelope(self, k: int) -> float:
        """Bound on ||(f^q)^k(x) - xbar|| for x in the delta box."""
        return self.radius * math.exp(-self.beta * k) if math.isfinite(self.beta) else (self.radius if k == 0 else 0.0)

    def describe(self) -> str:
        return (f"for all x in {self.delta_box}: ||(f^{self.q})^k(x) - xbar|| <= "
                f"{self.radius!r} * exp(-{self.beta!r} k)")


def exponential_certificate(report: StabilityReport) -> ExponentialCertificate:
    if not report.proven or report.alpha is None or report.mode is not Mode.EQUILIBRIUM:
        raise NotProven("report does not prove exponential stability")
    return ExponentialCertificate(report.delta_box, report.centred_box, report.q,
                                  report.alpha, report.beta, report.centred_box.norm())


# ---------------------------------------------------------------------------
# invariance of a disturbed cycle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disturbance:
    """Additive per-stage uncertainty.

    Either explicit boxes (``boxes[i]`` for stage i) or the drift rule
    ``[u_i] = (||f_i(x) - x|| / speed) * [-eps, eps]^n`` evaluated on the
    current box.
    """

    eps: float = 0.0
    speed: float = 1.0
    boxes: Optional[tuple[Box, ...]] = None

    def __post_init__(self):
        if self.boxes is not None:
            for b in self.boxes:
                if not b.contains_zero():
                    raise ValueError(f"disturbance box {b} must contain 0")
        if self.eps < 0 or self.speed <= 0:
            raise ValueError("need eps >= 0 and speed > 0")

    @property
    def is_zero(self) -> bool:
        if self.boxes is not None:
            return all(c.lo == 0.0 and c.hi == 0.0 for b in self.boxes for c in b)
        return self.eps == 0.0

    def stage_box(self, i: int, displacement: Optional[VectorFunc], z: Box) -> Box:
        if self.boxes is not None:
            return self.boxes[i]
        n = len(z)
        if self.eps == 0.0:
            return Box.zeros(n)
        dist = displacement.eval(z).norm()
        rad = mul_up(div_up(dist, self.speed), self.eps)
        return Box.hypercube(n, -rad, rad)


def _displacement(f: VectorFunc) -> VectorFunc:
    return VectorFunc([o - state(i) for i, o in enumerate(f.outputs)], n=f.n, p=f.p)


def find_fixed_point(f: VectorFunc, start: Sequence[float], tol: float = 1e-12, max_iter: int = 100_000) -> tuple[float, ...]:
    """Plain fixed-point iteration until successive iterates differ by < tol."""
    x = tuple(float(v) for v in start)
    for _ in range(max_iter):
        y = f.eval_float(x)
        if max(abs(a - b) for a, b in zip(x, y)) < tol:
            return y
        x = y
    raise RuntimeError("fixed-point iteration did not converge")


def check_invariance(stages: Sequence[VectorFunc], x0: Box, u: Disturbance = Disturbance(),
                     N: int = DEFAULT_N, centre_point: Optional[Sequence[float]] = None) -> StabilityReport:
    """Prove that ``x0`` is forward invariant for the disturbed stage cycle.

    Deviations from a nominal trajectory started at the cycle's fixed point
    are carried as ``A . p0 + D``: A collects the stage Jacobians (interval
    mean-value form on the hull of the state box and the nominal point), D
    collects disturbances and the rounding residuals of the nominal points.
    """
    if not stages:
        raise ValueError("need at least one stage")
    n = stages[0].n
    for s in stages:
        if s.n != n or s.m != n or s.p:
            raise ValueError("stages must be parameter-free self-maps of equal dimension")
    if u.boxes is not None and len(u.boxes) != len(stages):
        raise ValueError("need one disturbance box per stage")
    cyc = stages[0]
    for s in stages[1:]:
        cyc = compose(s, cyc)
    if centre_point is None:
        centre_point = find_fixed_point(cyc, x0.mid())
    c0 = tuple(float(v) for v in centre_point)
    xbar = Box.point(c0)
    p0 = x0 - xbar
    if not p0.contains_zero():
        raise ValueError(f"initial box {x0} does not contain the cycle centre {c0}")
    moves = [_displacement(s) for s in stages]

    trace = CentredTrace()
    A = IntervalMatrix.identity(n)
    D = Box.zeros(n)
    Z = x0
    trace.steps.append(TraceStep(0, p0, A, p0))
    residual = cyc.eval(xbar) - xbar
    for k in range(1, N + 1):
        c = c0
        try:
            for i, s in enumerate(stages):
                cbox = Box.point(c)
                J = s.jacobian(Z.hull(cbox))
                c_img = s.eval(cbox)
                c_next = c_img.mid()
                r = c_img - Box.point(c_next)
                w = u.stage_box(i, moves[i], Z)
                A = J @ A
                D = (J @ D) + r + w
                Z = s.eval(Z) + w
                c = c_next
            D = D + (Box.point(c) - xbar)
            fc = (A @ p0) + D
        except (IntervalError, OverflowError) as exc:
            trace.error, trace.cause = str(exc), error_cause(exc)
            break
        trace.steps.append(TraceStep(k, Z - xbar, A, fc))
        if subset(fc, p0):
            core = A @ p0
            alpha = extract_rate(core, p0) if subset(core, p0) else None
            beta = _beta(alpha) if (alpha is not None and u.is_zero and alpha < 1.0) else None
            return StabilityReport(Verdict.PROVEN, Mode.INVARIANCE, x0, p0, xbar, q=k, alpha=alpha,
                                   beta=beta, trace=trace, residual=residual)
    cause = trace.cause or "NoContraction"
    detail = trace.error or f"no inclusion within {len(trace.steps) - 1} cycles"
    return StabilityReport(Verdict.UNDETERMINED, Mode.INVARIANCE, x0, p0, xbar, trace=trace,
                           residual=residual, cause=cause, detail=detail)


# ---------------------------------------------------------------------------
# bisection fallback
# ---------------------------------------------------------------------------

def bisect_and_prove(f: VectorFunc, xbar: Box, x0: Box, N: int = DEFAULT_N, max_depth: int = 4,
                     params: Optional[Box] = None,
                     residual_tol: float = RESIDUAL_TOL) -> list[tuple[Box, StabilityReport]]:
    """Split ``x0`` along its widest side until each piece containing the
    centre is proven or ``max_depth`` is reached.  Leaves come out in
    depth-first, lower-half-first order."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    leaves: list[tuple[Box, StabilityReport]] = []

    def visit(box: Box, depth: int) -> None:
        if not subset(xbar, box):
            leaves.append((box, StabilityReport(
                Verdict.UNDETERMINED, Mode.EQUILIBRIUM, box, box - xbar, xbar,
                cause="NotApplicable", detail="box does not contain the centre")))
            return
        rep = check_stability(f, xbar, box, N, params, residual_tol)
        if rep.proven or depth >= max_depth:
            leaves.append((box, rep))
            return
        left, right = box.bisect()
        visit(left, depth + 1)
        visit(right, depth + 1)

    visit(x0, 0)
    return leaves
