import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from intstab.centred import centre, centred_eval, iterate_centred
from intstab.interval import Box, Interval, scalar_mul
from intstab.scenarios import cycle_stages, linear, logistic, rot3d
from intstab.stability import (
    CentreResidualTooLarge,
    Disturbance,
    Mode,
    NotContained,
    NotProven,
    Verdict,
    bisect_and_prove,
    check_invariance,
    check_stability,
    exponential_certificate,
    extract_rate,
)

SEVEN_TWELFTHS = Box([Interval.enclose("7/12")])
LOGISTIC_X0 = Box([(0.577, 0.585)])
ROT_X0 = Box.hypercube(3, -0.004, 0.004)
CYCLE_X0 = Box([(1.5, 6.5), (9.5, 15.5)])


def prove_logistic():
    return check_stability(logistic(), SEVEN_TWELFTHS, LOGISTIC_X0)


def prove_rot3d():
    return check_stability(rot3d(), Box.zeros(3), ROT_X0)


# -- check_stability ------------------------------------------------------------------

def test_logistic_proven():
    rep = prove_logistic()
    assert rep.verdict is Verdict.PROVEN and rep.mode is Mode.EQUILIBRIUM
    assert rep.q == 2 and 0 < rep.alpha < 1
    assert rep.trace.last.fc.interior_subset(rep.centred_box)
    assert rep.beta == pytest.approx(-math.log(rep.alpha))
    assert rep.beta <= -math.log(rep.alpha)


def test_rot3d_proven():
    rep = prove_rot3d()
    assert rep.proven and rep.q == 3 and rep.alpha < 1


def test_expanding_map_undetermined():
    rep = check_stability(linear([[2]]), Box.zeros(1), Box([(-1, 1)]), N=10)
    assert rep.verdict is Verdict.UNDETERMINED
    assert rep.cause == "NoContraction"
    assert rep.q is None and rep.alpha is None
    assert len(rep.trace) == 11


def test_inexact_centre_rejected():
    with pytest.raises(CentreResidualTooLarge):
        check_stability(logistic(), Box([Interval(0.58)]), LOGISTIC_X0)
    with pytest.raises(ValueError):
        check_stability(logistic(), SEVEN_TWELFTHS, Box([(0.6, 0.7)]))


def test_evaluation_error_is_undetermined():
    from intstab.expr import parse
    f = parse("x1 / (x1 + 0.5)")
    rep = check_stability(f, Box.zeros(1), Box([(-1, 1)]))
    assert rep.verdict is Verdict.UNDETERMINED and rep.cause == "SingularJacobian"


def test_determinism():
    a, b = prove_rot3d(), prove_rot3d()
    assert a.summary() == b.summary()
    assert a.alpha == b.alpha and a.beta == b.beta
    for sa, sb in zip(a.trace.steps, b.trace.steps):
        assert sa.z == sb.z and sa.fc == sb.fc and sa.A.rows == sb.A.rows


# -- extract_rate ---------------------------------------------------------------------

def test_extract_rate_examples():
    assert extract_rate(Box([(-0.5, 0.25)]), Box([(-1, 1)])) == 0.5
    x = Box([(-1, 2), (-3, 0.5)])
    assert extract_rate(x, x) == 1.0
    assert extract_rate(Box([(0, 0)]), Box([(-1, 1)])) == 0.0
    assert extract_rate(Box([(0, 0), (-0.1, 0.2)]), Box([(0, 0), (-1, 1)])) == pytest.approx(0.2)
    with pytest.raises(NotContained):
        extract_rate(Box([(-2, 0)]), Box([(-1, 1)]))


@given(st.lists(st.tuples(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0, 1), st.floats(0, 1)),
                min_size=1, max_size=4))
@settings(max_examples=200, deadline=None)
def test_extract_rate_postcondition(comps):
    x = Box([(-a, b) for a, b, _, _ in comps])
    y = Box([(-a * s, b * t) for a, b, s, t in comps])
    alpha = extract_rate(y, x)
    assert y.subset(Box([scalar_mul(alpha, c) for c in x]))
    assert alpha <= max(max(s, t) for _, _, s, t in comps) * (1 + 1e-15) + 1e-300


# -- certificate ----------------------------------------------------------------------

def _report(alpha):
    rep = prove_logistic()
    from intstab.stability import _beta
    rep.alpha, rep.beta = alpha, _beta(alpha)
    return rep


def test_certificate_examples():
    cert = exponential_certificate(_report(0.5))
    assert cert.beta == pytest.approx(math.log(2), rel=1e-15)
    assert cert.beta < math.log(2)
    weak = exponential_certificate(_report(1 - 1e-12))
    assert 0 < weak.beta < 1e-11
    with pytest.raises(NotProven):
        exponential_certificate(check_stability(linear([[2]]), Box.zeros(1), Box([(-1, 1)])))
    assert "exp(-" in cert.describe()


@pytest.mark.parametrize("name", ["logistic", "rot3d"])
def test_soundness_against_simulation(name):
    if name == "logistic":
        rep = prove_logistic()
        step = oracles.logistic
        centre_pt = [oracles.FIXED]
    else:
        rep = prove_rot3d()
        step = oracles.rot3d
        centre_pt = [mpmath.mpf(0)] * 3
    cert = exponential_certificate(rep)
    assert cert.beta > 0
    q = rep.q
    rng = random.Random(17)
    for _ in range(1000):
        x = [mpmath.mpf(rng.uniform(c.lo, c.hi)) for c in rep.delta_box]
        for k in range(1, 10 * q + 1):
            x = step(x)
            dev = max(abs(x[i] - centre_pt[i]) for i in range(len(x)))
            if k <= q:
                fc = rep.trace[k].fc
                assert all(fc[i].lo <= x[i] - centre_pt[i] <= fc[i].hi for i in range(len(x)))
            if k % q == 0:
                assert dev <= cert.envelope(k // q) * (1 + 1e-12)


# -- contractor axioms ------------------------------------------------------------------

@st.composite
def nested_around_zero(draw, box):
    inner, outer = [], []
    for c in box:
        a = sorted(draw(st.floats(0, 1)) for _ in range(2))
        b = sorted(draw(st.floats(0, 1)) for _ in range(2))
        inner.append((c.lo * a[0], c.hi * b[0]))
        outer.append((c.lo * a[1], c.hi * b[1]))
    return Box(inner), Box(outer)


def _problem(name):
    if name == "logistic":
        cp = centre(logistic(), SEVEN_TWELFTHS)
        return cp, LOGISTIC_X0 - cp.xbar
    return centre(rot3d(), Box.zeros(3)), ROT_X0


@pytest.mark.parametrize("name", ["logistic", "rot3d"])
def test_contractor_monotonicity(name):
    cp, p0 = _problem(name)
    q = {"logistic": 2, "rot3d": 3}[name]

    @given(nested_around_zero(p0))
    @settings(max_examples=100, deadline=None)
    def check(pair):
        a, b = pair
        assert centred_eval(cp, a).subset(centred_eval(cp, b))
        assert iterate_centred(cp, a, q)[q].fc.subset(iterate_centred(cp, b, q)[q].fc)

    check()


@pytest.mark.parametrize("name", ["logistic", "rot3d"])
def test_contractor_fixes_zero(name):
    cp, p0 = _problem(name)
    zero = Box.zeros(len(p0))
    assert centred_eval(cp, zero) == zero
    assert all(s.fc == zero for s in iterate_centred(cp, zero, 5).steps)


def geometric_chain(cp, p0, q, rounds=5):
    w = p0
    out = [w]
    for _ in range(rounds):
        w = iterate_centred(cp, w, q)[q].fc
        out.append(w)
    return out


@pytest.mark.parametrize("name", ["logistic", "rot3d"])
def test_geometric_decay(name):
    rep = prove_logistic() if name == "logistic" else prove_rot3d()
    cp, p0 = _problem(name)
    chain = geometric_chain(cp, p0, rep.q)
    for k, w in enumerate(chain):
        assert w.norm() <= rep.alpha ** k * p0.norm() * (1 + 1e-9)


# -- invariance -------------------------------------------------------------------------

def test_invariance_examples():
    stages = cycle_stages()
    rep = check_invariance(stages, CYCLE_X0, Disturbance(eps=0.05, speed=1.0))
    assert rep.proven and rep.mode is Mode.INVARIANCE and rep.q == 1
    assert rep.beta is None
    calm = check_invariance(stages, CYCLE_X0, Disturbance())
    assert calm.proven and calm.q == 1
    img, img_calm = rep.trace[1].fc, calm.trace[1].fc
    assert img_calm.subset(img) and img_calm.width() < img.width()
    assert calm.alpha is not None and calm.alpha < 1 and calm.beta is not None
    stormy = check_invariance(stages, CYCLE_X0, Disturbance(eps=10, speed=1.0))
    assert stormy.verdict is Verdict.UNDETERMINED


def test_invariance_explicit_boxes():
    stages = cycle_stages()
    small = tuple(Box.hypercube(2, -0.01, 0.01) for _ in stages)
    assert check_invariance(stages, CYCLE_X0, Disturbance(boxes=small)).proven
    with pytest.raises(ValueError):
        Disturbance(boxes=(Box([(0.1, 0.2), (0, 0)]),))


def test_invariance_against_simulation():
    eps = 0.05
    rep = check_invariance(cycle_stages(), CYCLE_X0, Disturbance(eps=eps, speed=1.0))
    fc = rep.trace[1].fc
    xbar = rep.xbar
    rng = random.Random(23)
    stage_moves = [
        lambda x: (x[0] + 25, x[1]),
        lambda x: (x[0], oracles.shore(x[0])),
        lambda x: (x[0], x[1] - mpmath.mpf("7.5")),
        lambda x: (oracles.shore_inverse(x[1]), x[1]),
    ]
    for _ in range(1000):
        x = tuple(mpmath.mpf(rng.uniform(c.lo, c.hi)) for c in CYCLE_X0)
        for move in stage_moves:
            y = move(x)
            dist = max(abs(y[0] - x[0]), abs(y[1] - x[1]))
            x = tuple(v + dist * eps * rng.uniform(-1, 1) for v in y)
        assert all(fc[i].lo <= x[i] - xbar[i].lo <= fc[i].hi for i in range(2))
        assert all(CYCLE_X0[i].lo <= x[i] <= CYCLE_X0[i].hi for i in range(2))


# -- bisection --------------------------------------------------------------------------

def test_bisect_examples():
    leaves = bisect_and_prove(logistic(), SEVEN_TWELFTHS, LOGISTIC_X0, max_depth=4)
    assert len(leaves) == 1 and leaves[0][1].proven
    wide = Box([(0.3, 0.9)])
    leaves = bisect_and_prove(logistic(), SEVEN_TWELFTHS, wide, max_depth=6)
    proven = [b for b, r in leaves if r.proven]
    assert proven and all(b.contains_point([7 / 12]) for b in proven)
    assert all(r.cause == "NotApplicable" for b, r in leaves if not b.contains_point([7 / 12]))
    flat = bisect_and_prove(linear([[2]]), Box.zeros(1), Box([(-1, 1)]), max_depth=0)
    direct = check_stability(linear([[2]]), Box.zeros(1), Box([(-1, 1)]))
    assert len(flat) == 1 and flat[0][1].summary() == direct.summary()


def test_bisect_leaves_are_deterministic():
    run = lambda: [(b, r.summary()) for b, r in bisect_and_prove(logistic(), SEVEN_TWELFTHS, Box([(0.3, 0.9)]), max_depth=6)]
    assert run() == run()
