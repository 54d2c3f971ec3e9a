"""Expression DAGs for vector functions f(x, m), with a text parser.

A :class:`VectorFunc` is compiled once into a topologically ordered tape;
natural interval evaluation, forward-mode interval differentiation and
plain float evaluation all walk that tape.

Grammar (outputs separated by ``;``)::

    outputs := expr (';' expr)*
    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INTEGER)?
    atom    := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'
    VAR     := 'x' INDEX | 'm' INDEX          (1-based)
    FUNC    := sin | cos | exp | ln | sqr | sqrt
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Optional, Sequence, Union

from .interval import (
    ONE,
    PI,
    ZERO,
    Box,
    DimensionMismatch,
    Interval,
    IntervalMatrix,
    elem_fn,
    ipow,
)

__all__ = [
    "Expr",
    "VectorFunc",
    "DualInterval",
    "ExprSyntaxError",
    "UnknownIdentifier",
    "ArityError",
    "const",
    "state",
    "param",
    "sin",
    "cos",
    "exp",
    "ln",
    "sqr",
    "sqrt",
    "parse",
    "eval_natural",
    "jacobian_natural",
    "compose",
    "substitute",
]

UNARY_OPS = ("sin", "cos", "exp", "ln", "sqr", "sqrt", "neg")
BINARY_OPS = ("+", "-", "*", "/")


class ExprSyntaxError(SyntaxError):
    def __init__(self, msg: str, position: int, text: str = ""):
        super().__init__(f"{msg} at offset {position}")
        self.position = position
        self.offset = position
        self.text = text


class UnknownIdentifier(ValueError):
    pass


class ArityError(ValueError):
    pass


class Expr:
    """Node of an expression DAG.  Build with operators and the helpers below."""

    __slots__ = ("kind", "op", "args", "value", "index")

    def __init__(self, kind: str, op: str = "", args: tuple = (), value: Optional[Interval] = None, index: int = -1):
        self.kind = kind
        self.op = op
        self.args = args
        self.value = value
        self.index = index

    # -- builders ---------------------------------------------------------

    def __add__(self, other):
        return Expr("bin", "+", (self, _lift(other)))

    def __radd__(self, other):
        return Expr("bin", "+", (_lift(other), self))

    def __sub__(self, other):
        return Expr("bin", "-", (self, _lift(other)))

    def __rsub__(self, other):
        return Expr("bin", "-", (_lift(other), self))

    def __mul__(self, other):
        return Expr("bin", "*", (self, _lift(other)))

    def __rmul__(self, other):
        return Expr("bin", "*", (_lift(other), self))

    def __truediv__(self, other):
        return Expr("bin", "/", (self, _lift(other)))

    def __rtruediv__(self, other):
        return Expr("bin", "/", (_lift(other), self))

    def __neg__(self):
        return Expr("un", "neg", (self,))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return Expr("pow", "^", (self,), index=n)

    def __repr__(self):
        return f"Expr({self})"

    def __str__(self):
        k = self.kind
        if k == "const":
            v = self.value
            return repr(v.lo) if v.is_degenerate else f"[{v.lo!r},{v.hi!r}]"
        if k == "x":
            return f"x{self.index + 1}"
        if k == "m":
            return f"m{self.index + 1}"
        if k == "un":
            if self.op == "neg":
                return f"(-{self.args[0]})"
            return f"{self.op}({self.args[0]})"
        if k == "pow":
            return f"({self.args[0]})^{self.index}"
        return f"({self.args[0]} {self.op} {self.args[1]})"


def _lift(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return const(v)


def const(v: Union[Interval, int, float, str]) -> Expr:
    if not isinstance(v, Interval):
        v = Interval.enclose(v)
    return Expr("const", value=v)


def state(i: int) -> Expr:
    """State variable, 0-based (prints as ``x{i+1}``)."""
    return Expr("x", index=i)


def param(j: int) -> Expr:
    """Parameter, 0-based (prints as ``m{j+1}``)."""
    return Expr("m", index=j)


def _unary(op):
    def f(e):
        return Expr("un", op, (_lift(e),))
    f.__name__ = op
    return f


sin = _unary("sin")
cos = _unary("cos")
exp = _unary("exp")
ln = _unary("ln")
sqr = _unary("sqr")
sqrt = _unary("sqrt")


# ---------------------------------------------------------------------------
# DualInterval
# ---------------------------------------------------------------------------

class DualInterval:
    """Interval value with interval partials; ``partials is None`` means all zero."""

    __slots__ = ("value", "partials")

    def __init__(self, value: Interval, partials: Optional[tuple] = None):
        self.value = value
        self.partials = partials

    @classmethod
    def variable(cls, value: Interval, i: int, n: int) -> "DualInterval":
        return cls(value, tuple(ONE if k == i else ZERO for k in range(n)))

    def grad(self, n: int) -> tuple:
        return self.partials if self.partials is not None else (ZERO,) * n


def _d_add(da, db):
    if da is None:
        return db
    if db is None:
        return da
    return tuple(a + b for a, b in zip(da, db))


def _d_sub(da, db):
    if db is None:
        return da
    if da is None:
        return tuple(-b for b in db)
    return tuple(a - b for a, b in zip(da, db))


def _d_scale(d, s: Interval):
    if d is None:
        return None
    return tuple(a * s for a in d)


def _d_div(d, s: Interval):
    if d is None:
        return None
    return tuple(a / s for a in d)


_TWO = Interval(2.0)


# ---------------------------------------------------------------------------
# VectorFunc
# ---------------------------------------------------------------------------

class VectorFunc:
    """f: R^n x R^p -> R^m given by ``m`` output expressions."""

    def __init__(self, outputs: Sequence[Expr], n: int, p: int = 0, name: str = ""):
        self.outputs = tuple(outputs)
        self.n = n
        self.p = p
        self.m = len(self.outputs)
        self.name = name
        self._compile()

    def _compile(self) -> None:
        order: list[Expr] = []
        slot: dict[int, int] = {}
        for root in self.outputs:
            stack = [(root, False)]
            while stack:
                node, done = stack.pop()
                key = id(node)
                if key in slot:
                    continue
                if done:
                    slot[key] = len(order)
                    order.append(node)
                    continue
                stack.append((node, True))
                for a in reversed(node.args):
                    if id(a) not in slot:
                        stack.append((a, False))
        tape = []
        for node in order:
            k = node.kind
            if k == "x":
                if not 0 <= node.index < self.n:
                    raise ArityError(f"x{node.index + 1} outside state dimension {self.n}")
            elif k == "m":
                if not 0 <= node.index < self.p:
                    raise ArityError(f"m{node.index + 1} outside parameter dimension {self.p}")
            args = tuple(slot[id(a)] for a in node.args)
            tape.append((k, node.op, args, node.value, node.index))
        self._tape = tuple(tape)
        self._out = tuple(slot[id(o)] for o in self.outputs)

    def __getstate__(self):
        return {"outputs": self.outputs, "n": self.n, "p": self.p, "name": self.name}

    def __setstate__(self, st):
        self.__init__(st["outputs"], st["n"], st["p"], st["name"])

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<VectorFunc{label} n={self.n} p={self.p} m={self.m}>"

    def __str__(self):
        return "; ".join(str(o) for o in self.outputs)

    def _check_args(self, x, m):
        if len(x) != self.n:
            raise DimensionMismatch(f"state box has dimension {len(x)}, expected {self.n}")
        if m is None:
            m = ()
        if len(m) != self.p:
            raise DimensionMismatch(f"parameter box has dimension {len(m)}, expected {self.p}")
        return m

    def eval(self, x: Box, m: Optional[Box] = None) -> Box:
        """Natural interval evaluation."""
        m = self._check_args(x, m)
        vals: list = [None] * len(self._tape)
        for t, (k, op, args, value, index) in enumerate(self._tape):
            if k == "bin":
                a = vals[args[0]]
                b = vals[args[1]]
                if op == "+":
                    vals[t] = a + b
                elif op == "-":
                    vals[t] = a - b
                elif op == "*":
                    vals[t] = a * b
                else:
                    vals[t] = a / b
            elif k == "un":
                vals[t] = elem_fn(op, vals[args[0]])
            elif k == "pow":
                vals[t] = ipow(vals[args[0]], index)
            elif k == "const":
                vals[t] = value
            elif k == "x":
                vals[t] = x[index]
            else:
                vals[t] = m[index]
        return Box._from(tuple(vals[i] for i in self._out))

    def jacobian(self, x: Box, m: Optional[Box] = None) -> IntervalMatrix:
        """Forward-mode interval enclosure of df/dx over ``x`` (parameters are constants)."""
        return self.eval_dual(x, m)[1]

    def eval_dual(self, x: Box, m: Optional[Box] = None) -> tuple[Box, IntervalMatrix]:
        m = self._check_args(x, m)
        n = self.n
        vals: list = [None] * len(self._tape)
        ders: list = [None] * len(self._tape)
        for t, (k, op, args, value, index) in enumerate(self._tape):
            if k == "bin":
                i, j = args
                a, b = vals[i], vals[j]
                da, db = ders[i], ders[j]
                if op == "+":
                    vals[t] = a + b
                    ders[t] = _d_add(da, db)
                elif op == "-":
                    vals[t] = a - b
                    ders[t] = _d_sub(da, db)
                elif op == "*":
                    vals[t] = a * b
                    ders[t] = _d_add(_d_scale(da, b), _d_scale(db, a))
                else:
                    v = a / b
                    vals[t] = v
                    if da is None and db is None:
                        ders[t] = None
                    else:
                        ders[t] = _d_div(_d_sub(da, _d_scale(db, v)), b)
            elif k == "un":
                i = args[0]
                a = vals[i]
                da = ders[i]
                v = elem_fn(op, a)
                vals[t] = v
                if da is None:
                    ders[t] = None
                elif op == "neg":
                    ders[t] = tuple(-d for d in da)
                elif op == "sin":
                    ders[t] = _d_scale(da, elem_fn("cos", a))
                elif op == "cos":
                    ders[t] = _d_scale(da, -elem_fn("sin", a))
                elif op == "exp":
                    ders[t] = _d_scale(da, v)
                elif op == "ln":
                    ders[t] = _d_div(da, a)
                elif op == "sqr":
                    ders[t] = _d_scale(da, _TWO * a)
                else:  # sqrt
                    ders[t] = _d_div(da, _TWO * v)
            elif k == "pow":
                i = args[0]
                a = vals[i]
                vals[t] = ipow(a, index)
                if ders[i] is None or index == 0:
                    ders[t] = None
                else:
                    ders[t] = _d_scale(ders[i], Interval(float(index)) * ipow(a, index - 1))
            elif k == "const":
                vals[t] = value
            elif k == "x":
                vals[t] = x[index]
                ders[t] = tuple(ONE if q == index else ZERO for q in range(n))
            else:
                vals[t] = m[index]
        zero_row = (ZERO,) * n
        rows = tuple(ders[i] if ders[i] is not None else zero_row for i in self._out)
        return Box._from(tuple(vals[i] for i in self._out)), IntervalMatrix._from(rows)

    def eval_float(self, x: Sequence[float], m: Sequence[float] = ()) -> tuple[float, ...]:
        """Plain floating-point evaluation (constants taken at their midpoints)."""
        if len(x) != self.n or len(m) != self.p:
            raise DimensionMismatch("argument dimensions do not match")
        vals: list = [0.0] * len(self._tape)
        for t, (k, op, args, value, index) in enumerate(self._tape):
            if k == "bin":
                a = vals[args[0]]
                b = vals[args[1]]
                if op == "+":
                    vals[t] = a + b
                elif op == "-":
                    vals[t] = a - b
                elif op == "*":
                    vals[t] = a * b
                else:
                    vals[t] = a / b
            elif k == "un":
                vals[t] = _FLOAT_FN[op](vals[args[0]])
            elif k == "pow":
                vals[t] = vals[args[0]] ** index
            elif k == "const":
                vals[t] = value.mid()
            elif k == "x":
                vals[t] = float(x[index])
            else:
                vals[t] = float(m[index])
        return tuple(vals[i] for i in self._out)

    __call__ = eval_float


_FLOAT_FN = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "ln": math.log,
    "sqr": lambda v: v * v,
    "sqrt": math.sqrt,
    "neg": lambda v: -v,
}


def eval_natural(f: VectorFunc, x: Box, m: Optional[Box] = None) -> Box:
    return f.eval(x, m)


def jacobian_natural(f: VectorFunc, x: Box, m: Optional[Box] = None) -> IntervalMatrix:
    return f.jacobian(x, m)


# ---------------------------------------------------------------------------
# substitution / composition
# ---------------------------------------------------------------------------

def substitute(exprs: Iterable[Expr], xs: Sequence[Expr], ms: Optional[Sequence[Expr]] = None) -> list[Expr]:
    """Replace state variables by ``xs`` (and parameters by ``ms``), keeping sharing."""
    memo: dict[int, Expr] = {}

    def walk(node: Expr) -> Expr:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if node.kind == "x":
            out = xs[node.index]
        elif node.kind == "m":
            out = ms[node.index] if ms is not None else node
        elif node.kind == "const":
            out = node
        else:
            args = tuple(walk(a) for a in node.args)
            if all(a is b for a, b in zip(args, node.args)):
                out = node
            else:
                out = Expr(node.kind, node.op, args, node.value, node.index)
        memo[key] = out
        return out

    # iterative post-order so deep chains don't hit the recursion limit
    for root in exprs:
        stack = [root]
        while stack:
            node = stack[-1]
            pending = [a for a in node.args if id(a) not in memo]
            if pending and node.kind not in ("x", "m", "const"):
                stack.extend(pending)
                continue
            stack.pop()
            if id(node) not in memo:
                walk(node)
    return [memo[id(r)] for r in exprs]


def compose(f: VectorFunc, g: VectorFunc) -> VectorFunc:
    """``f o g``: feed the outputs of ``g`` into the states of ``f``."""
    if g.m != f.n:
        raise ArityError(f"cannot compose: g has {g.m} outputs, f takes {f.n} states")
    if f.p != g.p and f.p and g.p:
        raise ArityError(f"cannot compose: parameter dimensions {f.p} and {g.p} differ")
    name = f"{f.name}∘{g.name}" if f.name and g.name else ""
    return VectorFunc(substitute(f.outputs, g.outputs), n=g.n, p=max(f.p, g.p), name=name)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;]))"
)
_VAR = re.compile(r"([xm])([1-9]\d*)$")
_FUNCS = ("sin", "cos", "exp", "ln", "sqr", "sqrt")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = self._lex(text)
        self.i = 0
        self.max_x = 0
        self.max_m = 0

    @staticmethod
    def _lex(text: str):
        toks = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            mt = _TOKEN.match(text, pos)
            if not mt or mt.end() == pos:
                raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
            kind = mt.lastgroup
            start = mt.start(kind)
            toks.append((kind, mt.group(kind), start))
            pos = mt.end()
        toks.append(("eof", "", len(text)))
        return toks

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.next()
        if v != value or kind != "op":
            what = "end of input" if kind == "eof" else repr(v)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", pos, self.text)

    def outputs(self) -> list[Expr]:
        outs = [self.expr()]
        while self.peek()[1] == ";" and self.peek()[0] == "op":
            self.next()
            if self.peek()[0] == "eof":  # tolerate a trailing ';'
                break
            outs.append(self.expr())
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected {v!r}", pos, self.text)
        return outs

    def expr(self) -> Expr:
        left = self.term()
        while True:
            kind, v, _ = self.peek()
            if kind == "op" and v in "+-":
                self.next()
                right = self.term()
                left = left + right if v == "+" else left - right
            else:
                return left

    def term(self) -> Expr:
        left = self.unary()
        while True:
            kind, v, _ = self.peek()
            if kind == "op" and v in "*/":
                self.next()
                right = self.unary()
                left = left * right if v == "*" else left / right
            else:
                return left

    def unary(self) -> Expr:
        kind, v, _ = self.peek()
        if kind == "op" and v == "-":
            self.next()
            return -self.unary()
        if kind == "op" and v == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, v, _ = self.peek()
        if kind == "op" and v == "^":
            self.next()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.next()
                sign = -1
            k, num, pos = self.next()
            if k != "num" or not num.isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", pos, self.text)
            return base ** (sign * int(num))
        return base

    def atom(self) -> Expr:
        kind, v, pos = self.next()
        if kind == "num":
            return const(v)
        if kind == "op" and v == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "id":
            if v in _FUNCS:
                self.expect("(")
                arg = self.expr()
                if self.peek()[:2] == ("op", ","):
                    raise ArityError(f"{v} takes exactly one argument (offset {pos})")
                self.expect(")")
                return _unary(v)(arg)
            if v == "pi":
                return const(PI)
            mv = _VAR.match(v)
            if mv:
                idx = int(mv.group(2))
                if mv.group(1) == "x":
                    self.max_x = max(self.max_x, idx)
                    return state(idx - 1)
                self.max_m = max(self.max_m, idx)
                return param(idx - 1)
            raise UnknownIdentifier(f"unknown identifier {v!r} at offset {pos}")
        what = "end of input" if kind == "eof" else repr(v)
        raise ExprSyntaxError(f"unexpected {what}", pos, self.text)


def parse(text: str, n: Optional[int] = None, p: Optional[int] = None, name: str = "") -> VectorFunc:
    """Parse ``text`` into a :class:`VectorFunc`.

    ``n`` and ``p`` default to the largest ``x``/``m`` index used.
    """
    ps = _Parser(text)
    outs = ps.outputs()
    nn = ps.max_x if n is None else n
    pp = ps.max_m if p is None else p
    if ps.max_x > nn:
        raise ArityError(f"x{ps.max_x} used but state dimension is {nn}")
    if ps.max_m > pp:
        raise ArityError(f"m{ps.max_m} used but parameter dimension is {pp}")
    return VectorFunc(outs, n=nn, p=pp, name=name)
