"""Built-in systems: logistic map, 3-D rotation map, Newton localisation, lake cycle."""

from __future__ import annotations

from typing import Callable, Sequence, Union

from .expr import Expr, VectorFunc, compose, const, cos, exp, ln, param, sin, state
from .interval import PI, Interval

__all__ = [
    "logistic",
    "rot3d",
    "rotation_matrix",
    "newton_localisation",
    "newton_determinant",
    "shore",
    "shore_inverse",
    "cycle_stages",
    "cycle_map",
    "linear",
    "SCENARIOS",
]

Num = Union[str, float, int]

LANDMARK_A = ("0", "0.1")
LANDMARK_B = ("0", "-0.1")


def _c(v) -> Expr:
    return const(v if isinstance(v, Interval) else Interval.enclose(v))


def logistic(rho: Num = "2.4") -> VectorFunc:
    x = state(0)
    return VectorFunc([_c(rho) * x * (1 - x)], n=1, name="logistic")


def rotation_matrix(phi: Expr, theta: Expr, psi: Expr) -> list[list[Expr]]:
    """R = Rz(psi) Ry(theta) Rx(phi), entries as expressions."""
    cf, sf = cos(phi), sin(phi)
    ct, st = cos(theta), sin(theta)
    cp, sp = cos(psi), sin(psi)
    return [
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ]


def rot3d(gain: Num = "0.8") -> VectorFunc:
    """x -> gain * R(pi/6 + x1, pi/4 + x2, pi/3 + x3) . x"""
    xs = [state(i) for i in range(3)]
    phi = const(PI / 6) + xs[0]
    theta = const(PI / 4) + xs[1]
    psi = const(PI / 3) + xs[2]
    r = rotation_matrix(phi, theta, psi)
    g = _c(gain)
    outs = [g * (r[i][0] * xs[0] + r[i][1] * xs[1] + r[i][2] * xs[2]) for i in range(3)]
    return VectorFunc(outs, n=3, name="rot3d")


def newton_localisation(a: Sequence[Num] = LANDMARK_A, b: Sequence[Num] = LANDMARK_B,
                        form: str = "reduced") -> VectorFunc:
    """Error map of range-squared Newton localisation, f(x, m).

    ``x`` is the localisation error p - m, ``m`` the true position, and the
    2x2 inverse of J_h is written as adjugate over determinant.

    ``form="adjugate"`` builds x + J_h^-1(x+m) (h(m) - h(x+m)) term by term.
    ``form="reduced"`` uses that h is quadratic with Hessian 2I in every
    component, so h(m) - h(p) = -J_h(p) x + |x|^2 (1, 1) and the map collapses
    to |x|^2 adj(J_h)(1,1) / det(J_h); adj(J_h)(1,1) is constant and det(J_h)
    is affine in p.  Both forms are the same real function; the reduced one
    has a far tighter natural inclusion.
    """
    a1, a2 = (_iv(v) for v in a)
    b1, b2 = (_iv(v) for v in b)
    x1, x2 = state(0), state(1)
    p1, p2 = x1 + param(0), x2 + param(1)
    if form == "adjugate":
        j11, j12 = 2 * (p1 - const(a1)), 2 * (p2 - const(a2))
        j21, j22 = 2 * (p1 - const(b1)), 2 * (p2 - const(b2))
        det = j11 * j22 - j12 * j21
        m1, m2 = param(0), param(1)
        d1 = _sq_dist(m1, m2, a1, a2) - _sq_dist(p1, p2, a1, a2)
        d2 = _sq_dist(m1, m2, b1, b2) - _sq_dist(p1, p2, b1, b2)
        outs = [x1 + (j22 * d1 - j12 * d2) / det, x2 + (j11 * d2 - j21 * d1) / det]
        return VectorFunc(outs, n=2, p=2, name="localisation-adjugate")
    if form != "reduced":
        raise ValueError(f"unknown form {form!r}")
    c1 = a2 - b2
    c2 = b1 - a1
    c0 = a1 * b2 - a2 * b1
    lin = _affine(c1, p1, c2, p2, c0)
    r2 = x1 * x1 + x2 * x2
    outs = []
    for c in (c1, c2):
        if c.lo == 0.0 and c.hi == 0.0:
            outs.append(const(0))
        else:
            outs.append(r2 * const(c) / (2 * lin))
    return VectorFunc(outs, n=2, p=2, name="localisation")


def newton_determinant(a: Sequence[Num] = LANDMARK_A, b: Sequence[Num] = LANDMARK_B) -> VectorFunc:
    """det J_h(x + m) = 4 ((p1-a1)(p2-b2) - (p2-a2)(p1-b1)) as a scalar function of (x, m)."""
    a1, a2 = (_iv(v) for v in a)
    b1, b2 = (_iv(v) for v in b)
    p1, p2 = state(0) + param(0), state(1) + param(1)
    det = 4 * ((p1 - const(a1)) * (p2 - const(b2)) - (p2 - const(a2)) * (p1 - const(b1)))
    return VectorFunc([det], n=2, p=2, name="localisation-det")


def _iv(v) -> Interval:
    return v if isinstance(v, Interval) else Interval.enclose(v)


def _sq_dist(q1: Expr, q2: Expr, c1: Interval, c2: Interval) -> Expr:
    d1 = q1 - const(c1)
    d2 = q2 - const(c2)
    return d1 * d1 + d2 * d2


def _affine(c1: Interval, e1: Expr, c2: Interval, e2: Expr, c0: Interval) -> Expr:
    terms = [const(c) * e for c, e in ((c1, e1), (c2, e2)) if not (c.lo == 0.0 and c.hi == 0.0)]
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    if not (c0.lo == 0.0 and c0.hi == 0.0):
        out = out + const(c0)
    return out


# -- lake cycle ---------------------------------------------------------------

def shore(x: Expr) -> Expr:
    """h(x1) = 20 (1 - exp(-0.25 x1))"""
    return 20 * (1 - exp(_c("-0.25") * x))


def shore_inverse(y: Expr) -> Expr:
    """h^-1(x2) = -4 ln(1 - x2/20)"""
    return _c(-4) * ln(1 - _c("0.05") * y)


def cycle_stages(v: Num = 1, east_time: Num = 25, south_time: Num = "7.5") -> list[VectorFunc]:
    """East for a fixed time, north to the shore, south for a fixed time, west to the shore."""
    x1, x2 = state(0), state(1)
    v_ = _iv(v)
    east = const(_iv(east_time) * v_)
    south = const(_iv(south_time) * v_)
    return [
        VectorFunc([x1 + east, x2], n=2, name="f1"),
        VectorFunc([x1, shore(x1)], n=2, name="f2"),
        VectorFunc([x1, x2 - south], n=2, name="f3"),
        VectorFunc([shore_inverse(x2), x2], n=2, name="f4"),
    ]


def cycle_map(v: Num = 1) -> VectorFunc:
    f1, f2, f3, f4 = cycle_stages(v)
    f = compose(f4, compose(f3, compose(f2, f1)))
    f.name = "cycle"
    return f


def linear(matrix: Sequence[Sequence[Num]]) -> VectorFunc:
    n = len(matrix[0])
    xs = [state(j) for j in range(n)]
    outs = []
    for row in matrix:
        terms = [_c(a) * xs[j] for j, a in enumerate(row)]
        e = terms[0]
        for t in terms[1:]:
            e = e + t
        outs.append(e)
    return VectorFunc(outs, n=n, name="linear")


SCENARIOS: dict[str, Callable[[], VectorFunc]] = {
    "logistic": logistic,
    "rot3d": rot3d,
    "localisation": newton_localisation,
    "cycle": cycle_map,
}
