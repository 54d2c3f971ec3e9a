"""High-precision reference implementations, written independently of the package."""

import mpmath

mpmath.mp.dps = 50

RHO = mpmath.mpf(12) / 5
FIXED = mpmath.mpf(7) / 12


def logistic(x):
    return [RHO * x[0] * (1 - x[0])]


def _rot(phi, theta, psi):
    rx = mpmath.matrix([[1, 0, 0], [0, mpmath.cos(phi), -mpmath.sin(phi)], [0, mpmath.sin(phi), mpmath.cos(phi)]])
    ry = mpmath.matrix([[mpmath.cos(theta), 0, mpmath.sin(theta)], [0, 1, 0], [-mpmath.sin(theta), 0, mpmath.cos(theta)]])
    rz = mpmath.matrix([[mpmath.cos(psi), -mpmath.sin(psi), 0], [mpmath.sin(psi), mpmath.cos(psi), 0], [0, 0, 1]])
    return rz * ry * rx


def rot3d(x):
    r = _rot(mpmath.pi / 6 + x[0], mpmath.pi / 4 + x[1], mpmath.pi / 3 + x[2])
    v = r * mpmath.matrix([x[0], x[1], x[2]])
    return [mpmath.mpf("0.8") * v[i] for i in range(3)]


A = (mpmath.mpf(0), mpmath.mpf("0.1"))
B = (mpmath.mpf(0), mpmath.mpf("-0.1"))


def newton(x, m):
    """One literal Newton step on range-squared measurements, as an error map."""
    p = (x[0] + m[0], x[1] + m[1])

    def h(q):
        return [(q[0] - A[0]) ** 2 + (q[1] - A[1]) ** 2, (q[0] - B[0]) ** 2 + (q[1] - B[1]) ** 2]

    j11, j12 = 2 * (p[0] - A[0]), 2 * (p[1] - A[1])
    j21, j22 = 2 * (p[0] - B[0]), 2 * (p[1] - B[1])
    hm, hp = h(m), h(p)
    r1, r2 = hm[0] - hp[0], hm[1] - hp[1]
    det = j11 * j22 - j12 * j21
    step = ((j22 * r1 - j12 * r2) / det, (j11 * r2 - j21 * r1) / det)
    return [x[0] + step[0], x[1] + step[1]]


def shore(x1):
    return 20 * (1 - mpmath.exp(-x1 / 4))


def shore_inverse(x2):
    return -4 * mpmath.log(1 - x2 / 20)


def cycle(x, v=1, u=None):
    """East 25v, north to shore, south 7.5v, west to shore; u adds per-stage drift."""
    u = u or [(0, 0)] * 4
    x1, x2 = x
    x1, x2 = x1 + 25 * v + u[0][0], x2 + u[0][1]
    x1, x2 = x1 + u[1][0], shore(x1) + u[1][1]
    x1, x2 = x1 + u[2][0], x2 - mpmath.mpf("7.5") * v + u[2][1]
    x1, x2 = shore_inverse(x2) + u[3][0], x2 + u[3][1]
    return [x1, x2]


def cycle_fixed_point(tol=1e-12):
    x = [mpmath.mpf(4), mpmath.mpf(12)]
    for _ in range(100_000):
        y = cycle(x)
        if max(abs(y[0] - x[0]), abs(y[1] - x[1])) < tol:
            return y
        x = y
    raise RuntimeError("no convergence")


def jacobian(f, x, *args):
    n = len(x)
    cols = []
    for j in range(n):
        def fj(t, j=j):
            y = list(x)
            y[j] = t
            return f(y, *args)
        cols.append([mpmath.diff(lambda t, i=i: fj(t)[i], x[j]) for i in range(len(f(x, *args)))])
    return [[cols[j][i] for j in range(n)] for i in range(len(cols[0]))]
