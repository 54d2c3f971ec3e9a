"""Outward-rounded interval, box and interval-matrix arithmetic.

Rounding is done without touching the FPU mode: every bound is computed
in round-to-nearest and the exact rounding error is recovered with an
error-free transformation (TwoSum / Dekker TwoProduct).  When the error is
nonzero the bound is pushed one ulp outward, so results are as tight as
directed rounding would give and evaluation is safe from any thread.

Library transcendental functions are not correctly rounded, so their
results are widened by ``_LIBM_ULPS`` ulps instead.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

__all__ = [
    "IntervalError",
    "DivisionByZeroInterval",
    "DomainError",
    "DimensionMismatch",
    "EmptyIntervalError",
    "Interval",
    "Box",
    "IntervalMatrix",
    "PI",
    "scalar_mul",
    "width",
    "iv_abs",
    "norm",
    "subset",
    "interior_subset",
    "mat_mul",
    "elem_fn",
    "hull",
]

INF = math.inf
_LIBM_ULPS = 2
# Dekker splitting overflows above this magnitude; fall back to plain widening.
_SPLIT_LIMIT = 2.0**995
# Below this the error terms may underflow and lose exactness.
_TINY = 2.0**-960
_SPLITTER = 134217729.0  # 2**27 + 1


class IntervalError(ArithmeticError):
    pass


class DivisionByZeroInterval(IntervalError, ZeroDivisionError):
    pass


class DomainError(IntervalError, ValueError):
    pass


class DimensionMismatch(IntervalError, ValueError):
    pass


class EmptyIntervalError(IntervalError):
    pass


# ---------------------------------------------------------------------------
# directed rounding helpers
# ---------------------------------------------------------------------------

def _down(x: float) -> float:
    return math.nextafter(x, -INF)


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add_down(a: float, b: float) -> float:
    s = a + b
    if s == INF and a != INF and b != INF:
        return 1.7976931348623157e308
    if not math.isfinite(s):
        return s
    return _down(s) if _two_sum_err(a, b, s) < 0.0 else s


def add_up(a: float, b: float) -> float:
    s = a + b
    if s == -INF and a != -INF and b != -INF:
        return -1.7976931348623157e308
    if not math.isfinite(s):
        return s
    return _up(s) if _two_sum_err(a, b, s) > 0.0 else s


def _prod_err_sign(a: float, b: float, p: float) -> int:
    """Sign of (a*b - p), or 2 when it cannot be recovered exactly."""
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0
        # underflow: the exact product keeps the sign of its factors
        return 1 if (a > 0.0) == (b > 0.0) else -1
    ap = abs(p)
    if not math.isfinite(p) or ap > _SPLIT_LIMIT or ap < _TINY or abs(a) > _SPLIT_LIMIT or abs(b) > _SPLIT_LIMIT:
        return 2
    e = _two_prod_err(a, b, p)
    return (e > 0.0) - (e < 0.0)


def mul_down(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    s = _prod_err_sign(a, b, p)
    if s == 0 or s == 1:
        return p
    if math.isinf(p) and p < 0:
        return p
    return _down(p)


def mul_up(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    s = _prod_err_sign(a, b, p)
    if s == 0 or s == -1:
        return p
    if math.isinf(p) and p > 0:
        return p
    return _up(p)


def _div_err_sign(a: float, b: float, q: float) -> int:
    """Sign of (a/b - q), or 2 when unknown."""
    if q == 0.0:
        if a == 0.0:
            return 0
        return 1 if (a > 0.0) == (b > 0.0) else -1
    if not math.isfinite(q) or math.isinf(b):
        return 2
    p = q * b
    s = _prod_err_sign(q, b, p)
    if s == 2:
        return 2
    e = _two_prod_err(q, b, p) if s else 0.0
    # q*b = p + e exactly; a - p is exact by Sterbenz when q is the rounded quotient.
    r_hi = a - p
    if not (0.5 * abs(a) <= abs(p) <= 2.0 * abs(a)):
        return 2
    # sign(a - q*b) = sign(r_hi - e); sign(a/b - q) = that times sign(b)
    d = (r_hi > e) - (r_hi < e)
    return d if b > 0 else -d


def div_down(a: float, b: float) -> float:
    q = a / b
    s = _div_err_sign(a, b, q)
    if s == 0 or s == 1:
        return q
    if math.isinf(q) and q < 0:
        return q
    return _down(q)


def div_up(a: float, b: float) -> float:
    q = a / b
    s = _div_err_sign(a, b, q)
    if s == 0 or s == -1:
        return q
    if math.isinf(q) and q > 0:
        return q
    return _up(q)


def _widen_down(x: float, ulps: int = _LIBM_ULPS) -> float:
    for _ in range(ulps):
        x = _down(x)
    return x


def _widen_up(x: float, ulps: int = _LIBM_ULPS) -> float:
    for _ in range(ulps):
        x = _up(x)
    return x


def _enclose_fraction(v: Fraction) -> tuple[float, float]:
    f = float(v)
    exact = Fraction(f)
    if exact == v:
        return f, f
    if exact < v:
        return f, _up(f)
    return _down(f), f


# ---------------------------------------------------------------------------
# Interval
# ---------------------------------------------------------------------------

Number = Union[int, float]


class Interval:
    """Closed interval ``[lo, hi]`` of extended reals.

    The empty interval exists only as the result of :meth:`intersect`; every
    arithmetic operation refuses it.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Number, hi: Number | None = None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise DomainError("NaN interval bound")
        if lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, lo: float, hi: float) -> "Interval":
        iv = object.__new__(cls)
        iv.lo = lo
        iv.hi = hi
        return iv

    @classmethod
    def empty(cls) -> "Interval":
        return cls._raw(INF, -INF)

    @classmethod
    def enclose(cls, value: Union[str, Fraction, Number]) -> "Interval":
        """Tightest interval containing an exact decimal/rational value.

        Strings are read exactly (``"0.1"``, ``"7/12"``), so a literal that is
        not a binary float becomes a one-ulp interval around it.
        """
        if isinstance(value, float):
            return cls._raw(value, value)
        lo, hi = _enclose_fraction(Fraction(value))
        return cls._raw(lo, hi)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def _check(self) -> None:
        if self.lo > self.hi:
            raise EmptyIntervalError("operation on empty interval")

    # -- basic queries --------------------------------------------------

    def width(self) -> float:
        self._check()
        return add_up(self.hi, -self.lo)

    def abs(self) -> float:
        self._check()
        return max(abs(self.lo), abs(self.hi))

    def mid(self) -> float:
        self._check()
        if math.isinf(self.lo) or math.isinf(self.hi):
            return 0.0 if self.lo == -self.hi else (self.lo if math.isinf(self.hi) else self.hi)
        return 0.5 * self.lo + 0.5 * self.hi

    def mag(self) -> float:
        return self.abs()

    def contains(self, x: Union[float, "Interval"]) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def interior_subset(self, other: "Interval") -> bool:
        if other.lo == other.hi:
            return self.lo == other.lo and self.hi == other.hi
        return other.lo < self.lo and self.hi < other.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return Interval.empty()
        return Interval._raw(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval._raw(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Interval):
            other = _coerce(other)
        if self.lo > self.hi or other.lo > other.hi:
            raise EmptyIntervalError("operation on empty interval")
        return Interval._raw(add_down(self.lo, other.lo), add_up(self.hi, other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Interval):
            other = _coerce(other)
        if self.lo > self.hi or other.lo > other.hi:
            raise EmptyIntervalError("operation on empty interval")
        return Interval._raw(add_down(self.lo, -other.hi), add_up(self.hi, -other.lo))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        self._check()
        return Interval._raw(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Interval):
            if isinstance(other, (int, float)):
                return scalar_mul(other, self)
            return NotImplemented
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a > b or c > d:
            raise EmptyIntervalError("operation on empty interval")
        if a >= 0.0:
            if c >= 0.0:
                return Interval._raw(mul_down(a, c), mul_up(b, d))
            if d <= 0.0:
                return Interval._raw(mul_down(b, c), mul_up(a, d))
            return Interval._raw(mul_down(b, c), mul_up(b, d))
        if b <= 0.0:
            if c >= 0.0:
                return Interval._raw(mul_down(a, d), mul_up(b, c))
            if d <= 0.0:
                return Interval._raw(mul_down(b, d), mul_up(a, c))
            return Interval._raw(mul_down(a, d), mul_up(a, c))
        if c >= 0.0:
            return Interval._raw(mul_down(a, d), mul_up(b, d))
        if d <= 0.0:
            return Interval._raw(mul_down(b, c), mul_up(a, c))
        lo = min(mul_down(a, d), mul_down(b, c))
        hi = max(mul_up(a, c), mul_up(b, d))
        return Interval._raw(lo, hi)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return scalar_mul(other, self)
        return NotImplemented

    def __truediv__(self, other):
        if not isinstance(other, Interval):
            other = _coerce(other)
        self._check()
        other._check()
        c, d = other.lo, other.hi
        if c <= 0.0 <= d:
            raise DivisionByZeroInterval(f"division by interval {other!r} containing 0")
        a, b = self.lo, self.hi
        if c > 0.0:
            lo = div_down(a, d) if a >= 0.0 else div_down(a, c)
            hi = div_up(b, c) if b >= 0.0 else div_up(b, d)
        else:
            lo = div_down(b, d) if b >= 0.0 else div_down(b, c)
            hi = div_up(a, c) if a >= 0.0 else div_up(a, d)
        return Interval._raw(lo, hi)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("interval power requires an integer exponent")
        return ipow(self, n)

    # -- comparison / display ------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        if isinstance(other, (int, float)):
            return self.lo == other == self.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        if self.is_empty:
            return "Interval.empty()"
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        if self.is_empty:
            return "[empty]"
        return f"[{self.lo:.17g}, {self.hi:.17g}]"

    def __reduce__(self):
        return (Interval._raw, (self.lo, self.hi))


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction)):
        return Interval.enclose(x)
    if isinstance(x, float):
        return Interval._raw(x, x)
    raise TypeError(f"cannot convert {type(x).__name__} to Interval")


ZERO = Interval._raw(0.0, 0.0)
ONE = Interval._raw(1.0, 1.0)

# pi to 1 ulp: 3.141592653589793 is below pi, its successor is above.
PI = Interval._raw(3.141592653589793, 3.1415926535897936)
_HALF_PI = Interval._raw(1.5707963267948966, 1.5707963267948968)
_TWO_PI = Interval._raw(6.283185307179586, 6.283185307179587)


def scalar_mul(lam: float, x: Interval) -> Interval:
    """Multiply an interval by a real, ``[lam*lo, lam*hi]`` or swapped if ``lam < 0``."""
    x._check()
    lam = float(lam)
    if lam >= 0.0:
        return Interval._raw(mul_down(lam, x.lo), mul_up(lam, x.hi))
    return Interval._raw(mul_down(lam, x.hi), mul_up(lam, x.lo))


def ipow(x: Interval, n: int) -> Interval:
    x._check()
    if n == 0:
        return ONE
    if n < 0:
        return ONE / ipow(x, -n)
    if n == 1:
        return x
    if n % 2 == 0:
        lo, hi = x.lo, x.hi
        if lo >= 0.0:
            a, b = lo, hi
        elif hi <= 0.0:
            a, b = -hi, -lo
        else:
            a, b = 0.0, max(-lo, hi)
        return Interval._raw(max(0.0, _pow_down(a, n)), _pow_up(b, n))
    # odd: monotone increasing
    return Interval._raw(_signed_pow_down(x.lo, n), _signed_pow_up(x.hi, n))


def _pow_down(a: float, n: int) -> float:
    # a >= 0
    r = 1.0
    for _ in range(n):
        r = mul_down(r, a)
    return r


def _pow_up(a: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r = mul_up(r, a)
    return r


def _signed_pow_down(a: float, n: int) -> float:
    return _pow_down(a, n) if a >= 0.0 else -_pow_up(-a, n)


def _signed_pow_up(a: float, n: int) -> float:
    return _pow_up(a, n) if a >= 0.0 else -_pow_down(-a, n)


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------

def iv_sqr(x: Interval) -> Interval:
    return ipow(x, 2)


def iv_sqrt(x: Interval) -> Interval:
    x._check()
    if x.lo < 0.0:
        raise DomainError(f"sqrt of {x!r} extends below 0")
    return Interval._raw(_sqrt_down(x.lo), _sqrt_up(x.hi))


def _sqrt_err_sign(x: float, r: float) -> int:
    if r == 0.0 or math.isinf(r):
        return 0
    s = _prod_err_sign(r, r, r * r)
    if s == 2:
        return 2
    p = r * r
    e = _two_prod_err(r, r, p) if s else 0.0
    d = x - p
    return (d > e) - (d < e)


def _sqrt_down(x: float) -> float:
    r = math.sqrt(x)
    s = _sqrt_err_sign(x, r)
    if s == 0 or s == 1:
        return r
    return max(0.0, _down(r))


def _sqrt_up(x: float) -> float:
    r = math.sqrt(x)
    s = _sqrt_err_sign(x, r)
    if s == 0 or s == -1:
        return r
    return _up(r)


def iv_exp(x: Interval) -> Interval:
    x._check()
    lo = 1.0 if x.lo == 0.0 else max(0.0, _widen_down(_safe_exp(x.lo)))
    hi = 1.0 if x.hi == 0.0 else _widen_up(_safe_exp(x.hi))
    return Interval._raw(lo, hi)


def _safe_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return INF


def iv_ln(x: Interval) -> Interval:
    x._check()
    if x.lo <= 0.0:
        raise DomainError(f"ln of {x!r} reaches 0 or below")
    lo = 0.0 if x.lo == 1.0 else _widen_down(math.log(x.lo))
    hi = 0.0 if x.hi == 1.0 else (INF if math.isinf(x.hi) else _widen_up(math.log(x.hi)))
    return Interval._raw(lo, hi)


def _may_contain_point(x: Interval, offset: Interval) -> bool:
    """True unless ``x`` provably misses every ``offset + 2*k*pi``."""
    t_lo = (Interval._raw(x.lo, x.lo) - offset) / _TWO_PI
    t_hi = (Interval._raw(x.hi, x.hi) - offset) / _TWO_PI
    return math.floor(t_hi.hi) >= math.ceil(t_lo.lo)


def _trig(x: Interval, fn, max_at: Interval, min_at: Interval) -> Interval:
    x._check()
    if math.isinf(x.lo) or math.isinf(x.hi) or x.width() >= _TWO_PI.lo:
        return Interval._raw(-1.0, 1.0)
    ya = fn(x.lo)
    yb = fn(x.hi)
    lo = max(-1.0, _widen_down(min(ya, yb)))
    hi = min(1.0, _widen_up(max(ya, yb)))
    if _may_contain_point(x, max_at):
        hi = 1.0
    if _may_contain_point(x, min_at):
        lo = -1.0
    return Interval._raw(lo, hi)


_NEG_HALF_PI = -_HALF_PI


def iv_sin(x: Interval) -> Interval:
    if x.lo == 0.0 and x.hi == 0.0:
        return ZERO
    return _trig(x, math.sin, _HALF_PI, _NEG_HALF_PI)


def iv_cos(x: Interval) -> Interval:
    if x.lo == 0.0 and x.hi == 0.0:
        return ONE
    return _trig(x, math.cos, ZERO, PI)


def iv_neg(x: Interval) -> Interval:
    return -x


_ELEM = {
    "sin": iv_sin,
    "cos": iv_cos,
    "exp": iv_exp,
    "ln": iv_ln,
    "sqr": iv_sqr,
    "sqrt": iv_sqrt,
    "neg": iv_neg,
}


def elem_fn(name: str, x: Interval) -> Interval:
    try:
        fn = _ELEM[name]
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None
    return fn(x)


# ---------------------------------------------------------------------------
# Box
# ---------------------------------------------------------------------------

class Box(Sequence[Interval]):
    """Immutable interval vector."""

    __slots__ = ("_c",)

    def __init__(self, components: Iterable[Union[Interval, Number, Sequence[Number]]]):
        comps = []
        for c in components:
            if isinstance(c, Interval):
                comps.append(c)
            elif isinstance(c, (int, float)):
                comps.append(Interval._raw(float(c), float(c)))
            else:
                lo, hi = c
                comps.append(Interval(lo, hi))
        object.__setattr__(self, "_c", tuple(comps))

    @classmethod
    def _from(cls, comps: tuple) -> "Box":
        b = object.__new__(cls)
        object.__setattr__(b, "_c", comps)
        return b

    @classmethod
    def hypercube(cls, n: int, lo: float, hi: float) -> "Box":
        """``[lo, hi]`` repeated ``n`` times."""
        iv = Interval(lo, hi)
        return cls._from((iv,) * n)

    @classmethod
    def point(cls, values: Iterable[float]) -> "Box":
        return cls._from(tuple(Interval._raw(float(v), float(v)) for v in values))

    @classmethod
    def zeros(cls, n: int) -> "Box":
        return cls._from((ZERO,) * n)

    def __setattr__(self, name, value):
        raise AttributeError("Box is immutable")

    def __len__(self):
        return len(self._c)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Box._from(self._c[i])
        return self._c[i]

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._c)

    @property
    def n(self) -> int:
        return len(self._c)

    @property
    def lo(self) -> tuple[float, ...]:
        return tuple(c.lo for c in self._c)

    @property
    def hi(self) -> tuple[float, ...]:
        return tuple(c.hi for c in self._c)

    def mid(self) -> tuple[float, ...]:
        return tuple(c.mid() for c in self._c)

    def width(self) -> float:
        return max(c.width() for c in self._c)

    def norm(self) -> float:
        return max(c.abs() for c in self._c)

    def contains_point(self, x: Sequence[float]) -> bool:
        _same_dim(self, x)
        return all(c.lo <= v <= c.hi for c, v in zip(self._c, x))

    def contains_zero(self) -> bool:
        return all(c.lo <= 0.0 <= c.hi for c in self._c)

    def subset(self, other: "Box") -> bool:
        return subset(self, other)

    def interior_subset(self, other: "Box") -> bool:
        return interior_subset(self, other)

    def hull(self, other: "Box") -> "Box":
        _same_dim(self, other)
        return Box._from(tuple(a.hull(b) for a, b in zip(self._c, other._c)))

    def bisect(self) -> tuple["Box", "Box"]:
        """Halve along the widest component."""
        j = max(range(self.n), key=lambda i: (self._c[i].hi - self._c[i].lo, -i))
        c = self._c[j]
        m = c.mid()
        left = self._c[:j] + (Interval._raw(c.lo, m),) + self._c[j + 1:]
        right = self._c[:j] + (Interval._raw(m, c.hi),) + self._c[j + 1:]
        return Box._from(left), Box._from(right)

    def __add__(self, other: "Box") -> "Box":
        _same_dim(self, other)
        return Box._from(tuple(a + b for a, b in zip(self._c, other._c)))

    def __sub__(self, other: "Box") -> "Box":
        _same_dim(self, other)
        return Box._from(tuple(a - b for a, b in zip(self._c, other._c)))

    def __neg__(self) -> "Box":
        return Box._from(tuple(-a for a in self._c))

    def __rmul__(self, lam):
        if isinstance(lam, (int, float)):
            return Box._from(tuple(scalar_mul(lam, a) for a in self._c))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Box):
            return self._c == other._c
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return "Box([" + ", ".join(f"({c.lo!r}, {c.hi!r})" for c in self._c) + "])"

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self._c) + ")"

    def __reduce__(self):
        return (Box._from, (self._c,))


def _same_dim(a, b) -> None:
    if len(a) != len(b):
        raise DimensionMismatch(f"dimension {len(a)} != {len(b)}")


# ---------------------------------------------------------------------------
# IntervalMatrix
# ---------------------------------------------------------------------------

class IntervalMatrix:
    """Immutable ``rows x cols`` grid of intervals."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[Union[Interval, Number]]]):
        rr = tuple(tuple(_coerce_entry(e) for e in row) for row in rows)
        if rr and any(len(r) != len(rr[0]) for r in rr):
            raise DimensionMismatch("ragged interval matrix")
        object.__setattr__(self, "rows", rr)

    @classmethod
    def _from(cls, rows: tuple) -> "IntervalMatrix":
        m = object.__new__(cls)
        object.__setattr__(m, "rows", rows)
        return m

    @classmethod
    def identity(cls, n: int) -> "IntervalMatrix":
        return cls._from(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalMatrix is immutable")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __eq__(self, other):
        if isinstance(other, IntervalMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def contains_matrix(self, a: Sequence[Sequence[float]]) -> bool:
        return all(self.rows[i][j].lo <= a[i][j] <= self.rows[i][j].hi
                   for i in range(len(self.rows)) for j in range(len(self.rows[0])))

    def norm(self) -> float:
        """Row-sum (infinity) norm of the magnitude matrix."""
        return max(sum(e.abs() for e in row) for row in self.rows)

    def __repr__(self):
        return "IntervalMatrix(" + repr([[(e.lo, e.hi) for e in row] for row in self.rows]) + ")"

    def __reduce__(self):
        return (IntervalMatrix._from, (self.rows,))


def _coerce_entry(e) -> Interval:
    if isinstance(e, Interval):
        return e
    if isinstance(e, (int, float)):
        return Interval._raw(float(e), float(e))
    lo, hi = e
    return Interval(lo, hi)


def _dot(row: Sequence[Interval], col: Sequence[Interval]) -> Interval:
    lo = 0.0
    hi = 0.0
    for a, b in zip(row, col):
        if (a.lo == 0.0 and a.hi == 0.0) or (b.lo == 0.0 and b.hi == 0.0):
            continue
        p = a * b
        lo = add_down(lo, p.lo)
        hi = add_up(hi, p.hi)
    return Interval._raw(lo, hi)


def mat_mul(a: IntervalMatrix, b: Union[IntervalMatrix, Box]):
    """Interval matrix product ``a @ b``; ``b`` may be a box (matrix-vector)."""
    rows, cols = a.shape
    if isinstance(b, Box):
        if cols != b.n:
            raise DimensionMismatch(f"matrix {a.shape} times box of dimension {b.n}")
        vec = b._c
        return Box._from(tuple(_dot(row, vec) for row in a.rows))
    if isinstance(b, IntervalMatrix):
        br, bc = b.shape
        if cols != br:
            raise DimensionMismatch(f"matrix {a.shape} times matrix {b.shape}")
        bcols = [tuple(b.rows[i][j] for i in range(br)) for j in range(bc)]
        return IntervalMatrix._from(tuple(tuple(_dot(row, col) for col in bcols) for row in a.rows))
    raise TypeError(f"cannot multiply IntervalMatrix by {type(b).__name__}")


# ---------------------------------------------------------------------------
# free-function surface
# ---------------------------------------------------------------------------

def width(x: Union[Interval, Box]) -> float:
    return x.width()


def iv_abs(x: Interval) -> float:
    return x.abs()


def norm(x: Box) -> float:
    return x.norm()


def subset(a: Box, b: Box) -> bool:
    _same_dim(a, b)
    return all(p.subset(q) for p, q in zip(a, b))


def interior_subset(a: Box, b: Box) -> bool:
    """Strict inclusion on every bound; a degenerate component of ``b`` only
    accepts the identical degenerate component of ``a``."""
    _same_dim(a, b)
    return all(p.interior_subset(q) for p, q in zip(a, b))


def hull(boxes: Iterable[Box]) -> Box:
    it = iter(boxes)
    out = next(it)
    for b in it:
        out = out.hull(b)
    return out
