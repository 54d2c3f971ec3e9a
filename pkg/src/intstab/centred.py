"""Centred forms and their iterated recursion.

For a map g with g(0) = 0 the centred form is [J_g]([x]) . [x].  The k-fold
iterate is enclosed by A_k . [x] where A_k = [J_g](z_{k-1}) A_{k-1} and
z_k = [g](z_{k-1}), starting from z_0 = [x], A_0 = I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .expr import Expr, VectorFunc, const, state, substitute
from .interval import Box, DivisionByZeroInterval, DomainError, IntervalError, IntervalMatrix

__all__ = [
    "CentredProblem",
    "TraceStep",
    "CentredTrace",
    "centre",
    "centred_eval",
    "iterate_centred",
    "DEFAULT_N",
    "error_cause",
]

DEFAULT_N = 10
_THIN_ULPS = 8


@dataclass(frozen=True)
class CentredProblem:
    """g(p) = f(p + xbar) - f(xbar), plus the residual f(xbar) - xbar."""

    f: VectorFunc
    g: VectorFunc
    xbar: Box
    residual: Box
    params: Optional[Box] = None

    @property
    def n(self) -> int:
        return self.g.n


@dataclass(frozen=True)
class TraceStep:
    k: int
    z: Box
    A: IntervalMatrix
    fc: Box


@dataclass
class CentredTrace:
    steps: list[TraceStep] = field(default_factory=list)
    error: Optional[str] = None
    cause: Optional[str] = None

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, k) -> TraceStep:
        return self.steps[k]

    @property
    def last(self) -> TraceStep:
        return self.steps[-1]


def _is_thin(iv) -> bool:
    scale = max(abs(iv.lo), abs(iv.hi))
    if scale == 0.0:
        return True
    return iv.hi - iv.lo <= _THIN_ULPS * math.ulp(scale)


def centre(f: VectorFunc, xbar: Box, params: Optional[Box] = None) -> CentredProblem:
    """Move the centre ``xbar`` to the origin: g(p) = f(p + xbar) - f(xbar)."""
    if f.m != f.n:
        raise ValueError(f"{f!r} is not a self-map")
    if len(xbar) != f.n:
        raise ValueError(f"centre has dimension {len(xbar)}, system has {f.n}")
    if not all(_is_thin(c) for c in xbar):
        raise ValueError(f"centre {xbar} is not thin")
    if f.p and params is None:
        raise ValueError(f"{f!r} has {f.p} parameters; a parameter box is required")
    shifted = [state(i) if c.lo == 0.0 and c.hi == 0.0 else state(i) + const(c) for i, c in enumerate(xbar)]
    moved = substitute(f.outputs, shifted)
    if f.p:
        at_centre = substitute(f.outputs, [const(c) for c in xbar])
    else:
        fx = f.eval(xbar)
        at_centre = [const(c) for c in fx]
    g = VectorFunc([a - b for a, b in zip(moved, at_centre)], n=f.n, p=f.p, name=f"{f.name}:centred" if f.name else "")
    residual = f.eval(xbar, params) - xbar
    return CentredProblem(f=f, g=g, xbar=xbar, residual=residual, params=params)


def centred_eval(cp: CentredProblem, x: Box, with_residual: bool = False) -> Box:
    """[J_g]([x]) . [x], optionally plus the centre residual."""
    if not x.contains_zero():
        raise ValueError("centred evaluation needs 0 in the box")
    out = cp.g.jacobian(x, cp.params) @ x
    if with_residual:
        out = out + cp.residual
    return out


def error_cause(exc: BaseException) -> str:
    if isinstance(exc, DivisionByZeroInterval):
        return "SingularJacobian"
    if isinstance(exc, DomainError):
        return "DomainError"
    return type(exc).__name__


def iterate_centred(cp: CentredProblem, x: Box, N: int = DEFAULT_N,
                    stop: Optional[Callable[[Box], bool]] = None) -> CentredTrace:
    """Run the iterated centred form for up to ``N`` steps.

    Step 0 is ``(x, I, x)``.  ``stop(fc_k)`` returning true ends the run after
    step k.  An evaluation error truncates the trace and is recorded.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if not x.contains_zero():
        raise ValueError("iterated centred form needs 0 in the box")
    trace = CentredTrace()
    A = IntervalMatrix.identity(cp.n)
    z = x
    trace.steps.append(TraceStep(0, z, A, x))
    for k in range(1, N + 1):
        try:
            z_next, J = cp.g.eval_dual(z, cp.params)
            A = J @ A
            fc = A @ x
        except (IntervalError, OverflowError) as exc:
            trace.error = str(exc)
            trace.cause = error_cause(exc)
            break
        z = z_next
        trace.steps.append(TraceStep(k, z, A, fc))
        if stop is not None and stop(fc):
            break
    return trace
