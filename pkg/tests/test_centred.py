import random

import mpmath
import pytest

import oracles
from intstab.centred import DEFAULT_N, centre, centred_eval, iterate_centred
from intstab.expr import parse
from intstab.interval import Box, Interval
from intstab.scenarios import cycle_map, linear, logistic, newton_localisation, rot3d

SEVEN_TWELFTHS = Box([Interval.enclose("7/12")])


def inside(iv, value, slack=1e-40):
    return iv.lo - slack <= value <= iv.hi + slack


def logistic_problem():
    return centre(logistic(), SEVEN_TWELFTHS)


def logistic_box(cp):
    return Box([(0.577, 0.585)]) - cp.xbar


def test_default_depth():
    assert DEFAULT_N == 10


def test_logistic_centring():
    cp = logistic_problem()
    assert cp.residual.width() <= 1e-15
    assert cp.residual.contains_zero()
    g0 = cp.g.eval(Box.zeros(1))
    assert g0.contains_zero() and g0.width() <= 1e-15


def test_zero_centre_is_structural():
    f = rot3d()
    cp = centre(f, Box.zeros(3))
    assert str(cp.g) == str(f) or all(s.startswith(f"({t}") for s, t in zip(str(cp.g).split("; "), str(f).split("; ")))
    rng = random.Random(0)
    for _ in range(50):
        b = Box([(v, v + 0.01) for v in (rng.uniform(-0.1, 0.1) for _ in range(3))])
        assert cp.g.eval(b) == f.eval(b)
    assert cp.residual == Box.zeros(3)


def test_cycle_residual_against_fixed_point_oracle():
    fp = oracles.cycle_fixed_point()
    assert abs(fp[0] - 3.9157) < 1e-3 and abs(fp[1] - 12.4855) < 1e-3
    xbar = Box.point([float(fp[0]), float(fp[1])])
    cp = centre(cycle_map(), xbar)
    assert cp.residual.norm() <= 1e-9


def test_thin_centre_required():
    with pytest.raises(ValueError):
        centre(logistic(), Box([(0.5, 0.6)]))


def test_centred_eval_logistic():
    cp = logistic_problem()
    p = logistic_box(cp)
    y = centred_eval(cp, p)
    hull = Interval(-0.408, -0.3696) * p[0]
    assert hull.subset(y[0])
    assert not y.interior_subset(p)


def test_centred_eval_linear_and_zero():
    a = [["0.5", "0.25"], ["-0.125", "0.75"]]
    cp = centre(linear(a), Box.zeros(2))
    x = Box([(-1, 2), (-0.5, 0.5)])
    y = centred_eval(cp, x)
    expected = cp.g.jacobian(x) @ x
    assert y == expected
    assert y[0] == Interval(-0.5 - 0.125, 1 + 0.125)
    assert centred_eval(cp, Box.zeros(2)) == Box.zeros(2)
    with pytest.raises(ValueError):
        centred_eval(cp, Box([(1, 2), (1, 2)]))


def test_n1_reproduces_centred_eval():
    cp = centre(rot3d(), Box.zeros(3))
    x = Box.hypercube(3, -0.004, 0.004)
    trace = iterate_centred(cp, x, N=1)
    assert len(trace) == 2
    assert trace[1].fc == centred_eval(cp, x)
    assert trace[0].z == x and trace[0].fc == x


def test_iterate_examples():
    cp = logistic_problem()
    p = logistic_box(cp)
    trace = iterate_centred(cp, p, N=2)
    assert not trace[1].fc.interior_subset(p)
    assert trace[2].fc.interior_subset(p)
    cp3 = centre(rot3d(), Box.zeros(3))
    x = Box.hypercube(3, -0.004, 0.004)
    t3 = iterate_centred(cp3, x, N=3)
    assert t3[3].fc.interior_subset(x)
    assert not t3[2].fc.interior_subset(x)


def test_iterate_stop_and_errors():
    cp = logistic_problem()
    p = logistic_box(cp)
    trace = iterate_centred(cp, p, N=10, stop=lambda fc: fc.interior_subset(p))
    assert trace.last.k == 2
    with pytest.raises(ValueError):
        iterate_centred(cp, p, N=0)
    # the box reaches across m1 + x1 = 0, where the Newton determinant vanishes
    cpn = centre(newton_localisation(), Box.zeros(2), params=Box([(0.05, 0.06), (0.2, 0.21)]))
    t = iterate_centred(cpn, Box.hypercube(2, -0.1, 0.1), N=5)
    assert t.cause == "SingularJacobian" and len(t) == 1


# -- enclosure of iterates ---------------------------------------------------------

def _simulate(step, x, k):
    out = [x]
    for _ in range(k):
        x = step(x)
        out.append(x)
    return out


CASES = {
    "logistic": (lambda: logistic_problem(), lambda cp: logistic_box(cp),
                 lambda p: [oracles.logistic([p[0] + oracles.FIXED])[0] - oracles.FIXED]),
    "rot3d": (lambda: centre(rot3d(), Box.zeros(3)), lambda cp: Box.hypercube(3, -0.004, 0.004), oracles.rot3d),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_enclosure_of_iterates(name):
    make, box, step = CASES[name]
    cp = make()
    x = box(cp)
    trace = iterate_centred(cp, x, N=DEFAULT_N)
    rng = random.Random(21)
    for _ in range(1000):
        p = [mpmath.mpf(rng.uniform(c.lo, c.hi)) for c in x]
        for k, pk in enumerate(_simulate(step, p, len(trace) - 1)):
            fc = trace[k].fc
            z = trace[k].z
            assert all(inside(fc[i], pk[i]) for i in range(len(pk))), (name, k)
            assert all(inside(z[i], pk[i]) for i in range(len(pk))), (name, k)


# -- pessimism ----------------------------------------------------------------------

def _g_float(p):
    x = p + 7 / 12
    return 2.4 * x * (1 - x) - 7 / 12


def _hull_width(step, lo, hi, k, samples=4001):
    vals = []
    for i in range(samples):
        v = lo + (hi - lo) * i / (samples - 1)
        for _ in range(k):
            v = step(v)
        vals.append(v)
    return max(vals) - min(vals)


def excess_ratios(k=2, halvings=4):
    cp = logistic_problem()
    base = logistic_box(cp)
    out = []
    for j in range(halvings + 1):
        s = 0.5 ** j
        p = Box([(base[0].lo * s, base[0].hi * s)])
        fc = iterate_centred(cp, p, N=k)[k].fc[0]
        w = p[0].width()
        out.append((fc.width() - _hull_width(_g_float, p[0].lo, p[0].hi, k)) / w)
    return out


def test_vanishing_pessimism():
    ratios = excess_ratios()
    assert all(r >= 0 for r in ratios)
    for prev, cur in zip(ratios, ratios[1:]):
        assert cur <= 1.2 * prev
    assert ratios[-1] < ratios[0]


def test_growing_pessimism_rot3d():
    cp = centre(rot3d(), Box.zeros(3))
    x = Box.hypercube(3, -0.004, 0.004)
    trace = iterate_centred(cp, x, N=8)
    rng = random.Random(8)
    pts = [[mpmath.mpf(rng.uniform(-0.004, 0.004)) for _ in range(3)] for _ in range(300)]
    # corners carry the extreme directions of a nearly linear map
    pts += [[mpmath.mpf(sx * 0.004), mpmath.mpf(sy * 0.004), mpmath.mpf(sz * 0.004)]
            for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    trajs = [_simulate(oracles.rot3d, p, 8) for p in pts]
    ratios = []
    for k in range(3, 9):
        hull = max(float(max(t[k][i] for t in trajs) - min(t[k][i] for t in trajs)) for i in range(3))
        ratios.append(trace[k].fc.width() / hull)
    for prev, cur in zip(ratios, ratios[1:]):
        assert cur >= prev * (1 - 1e-9)
