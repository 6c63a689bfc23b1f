"""Expression trees for the definition language.

Nodes are immutable dataclasses.  Source positions ride along for error
messages but never take part in equality, so ``parse(to_text(e)) == e``
holds structurally.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParseError, UnknownIdentifier
from .jet import Jet

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi}


class Expr:
    __slots__ = ()

    # operator sugar so fixtures can be assembled in Python
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        return power(self, k)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int
    name: str
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: int
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr
    pos: tuple = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# smart constructors: light constant folding, no algebraic simplification


def const(v):
    v = float(v)
    if v < 0 or (v == 0 and math.copysign(1, v) < 0):
        return Neg(Num(-v)) if v != 0 else Num(0.0)
    return Num(v)


def as_expr(x):
    if isinstance(x, Expr):
        return x
    return const(x)


def _num(e):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Neg) and isinstance(e.arg, Num):
        return -e.arg.value
    return None


def add(a, b):
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return const(va + vb)
    if va == 0:
        return b
    if vb == 0:
        return a
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a, b):
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return const(va - vb)
    if vb == 0:
        return a
    if va == 0:
        return neg(b)
    if isinstance(b, Neg):
        return BinOp("+", a, b.arg)
    return BinOp("-", a, b)


def mul(a, b):
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return const(va * vb)
    if va == 0 or vb == 0:
        return Num(0.0)
    if va == 1:
        return b
    if vb == 1:
        return a
    if va == -1:
        return neg(b)
    if vb == -1:
        return neg(a)
    return BinOp("*", a, b)


def div(a, b):
    va, vb = _num(a), _num(b)
    if vb == 1:
        return a
    if va == 0 and vb != 0:
        return Num(0.0)
    if va is not None and vb is not None and vb != 0:
        return const(va / vb)
    return BinOp("/", a, b)


def neg(a):
    v = _num(a)
    if v is not None:
        return const(-v)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, k):
    k = int(k)
    v = _num(a)
    if v is not None and (v != 0 or k >= 0):
        return const(v**k)
    if k == 0:
        return Num(1.0)
    if k == 1:
        return a
    return Pow(a, k)


def call(name, a):
    v = _num(a)
    if v is not None:
        try:
            return const(_real_func(name, v))
        except DomainError:
            pass
    return Call(name, a)


def _real_func(name, v):
    if name in ("log", "sqrt") and v <= 0:
        raise DomainError(f"{name} of non-positive constant")
    return getattr(math, name)(v)


def var(index, name=None):
    return Var(index, name or f"x{index + 1}")


# ---------------------------------------------------------------------------
# traversal


def variables(e):
    """Set of variable indices occurring in ``e``."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.index)
        elif isinstance(node, BinOp):
            stack += [node.left, node.right]
        elif isinstance(node, (Neg, Call)):
            stack.append(node.arg)
        elif isinstance(node, Pow):
            stack.append(node.base)
    return out


def substitute(e, replacements, _memo=None):
    """Replace ``Var(i)`` with ``replacements[i]`` throughout ``e``."""
    memo = {} if _memo is None else _memo
    key = id(e)
    if key in memo:
        return memo[key][1]
    if isinstance(e, Var):
        out = replacements[e.index]
    elif isinstance(e, Num):
        out = e
    elif isinstance(e, BinOp):
        left = substitute(e.left, replacements, memo)
        right = substitute(e.right, replacements, memo)
        out = {"+": add, "-": sub, "*": mul, "/": div}[e.op](left, right)
    elif isinstance(e, Neg):
        out = neg(substitute(e.arg, replacements, memo))
    elif isinstance(e, Pow):
        out = power(substitute(e.base, replacements, memo), e.exponent)
    elif isinstance(e, Call):
        out = call(e.func, substitute(e.arg, replacements, memo))
    else:
        raise TypeError(type(e))
    memo[key] = (e, out)
    return out


def diff(e, i, _memo=None):
    """Symbolic partial derivative with respect to variable ``i``."""
    memo = {} if _memo is None else _memo
    key = id(e)
    if key in memo:
        return memo[key][1]
    if isinstance(e, Num):
        out = Num(0.0)
    elif isinstance(e, Var):
        out = Num(1.0 if e.index == i else 0.0)
    elif isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = diff(a, i, memo), diff(b, i, memo)
        if e.op == "+":
            out = add(da, db)
        elif e.op == "-":
            out = sub(da, db)
        elif e.op == "*":
            out = add(mul(da, b), mul(a, db))
        else:
            out = div(sub(mul(da, b), mul(a, db)), power(b, 2))
    elif isinstance(e, Neg):
        out = neg(diff(e.arg, i, memo))
    elif isinstance(e, Pow):
        out = mul(mul(const(e.exponent), power(e.base, e.exponent - 1)), diff(e.base, i, memo))
    elif isinstance(e, Call):
        a = e.arg
        da = diff(a, i, memo)
        outer = {
            "sin": lambda: call("cos", a),
            "cos": lambda: neg(call("sin", a)),
            "exp": lambda: e,
            "log": lambda: div(Num(1.0), a),
            "sqrt": lambda: div(Num(0.5), e),
        }[e.func]()
        out = mul(outer, da)
    else:
        raise TypeError(type(e))
    memo[key] = (e, out)
    return out


# ---------------------------------------------------------------------------
# evaluation


def evaluate(e, env, _memo=None):
    """Evaluate ``e`` with ``env[i]`` bound to variable ``i``.

    ``env`` entries may be scalars, numpy arrays, or :class:`Jet` objects.
    Domain violations raise :class:`DomainError` with the node position.
    """
    memo = {} if _memo is None else _memo
    key = id(e)
    if key in memo:
        return memo[key][1]
    if isinstance(e, Num):
        out = e.value
    elif isinstance(e, Var):
        out = env[e.index]
    elif isinstance(e, BinOp):
        a = evaluate(e.left, env, memo)
        b = evaluate(e.right, env, memo)
        if e.op == "+":
            out = a + b
        elif e.op == "-":
            out = a - b
        elif e.op == "*":
            out = a * b
        else:
            if isinstance(b, Jet):
                out = a * b.reciprocal(e.pos)
            else:
                if np.any(np.asarray(b) == 0):
                    raise DomainError("division by zero", e.pos)
                out = a / b
    elif isinstance(e, Neg):
        out = -evaluate(e.arg, env, memo)
    elif isinstance(e, Pow):
        b = evaluate(e.base, env, memo)
        if isinstance(b, Jet):
            if e.exponent < 0 and np.any(b.value == 0):
                raise DomainError("division by zero", e.pos)
            out = b**e.exponent
        else:
            b = np.asarray(b)
            if e.exponent < 0 and np.any(b == 0):
                raise DomainError("division by zero", e.pos)
            out = _int_power(b, e.exponent)
    elif isinstance(e, Call):
        a = evaluate(e.arg, env, memo)
        if isinstance(a, Jet):
            out = a.apply(e.func, e.pos)
        else:
            a = np.asarray(a)
            if e.func in ("log", "sqrt"):
                if np.any(a == 0) and e.func == "log":
                    raise DomainError("log of zero", e.pos)
                if not np.iscomplexobj(a) and np.any(a < 0):
                    raise DomainError(f"{e.func} of a negative real number", e.pos)
            out = getattr(np, e.func)(a)
    else:
        raise TypeError(type(e))
    memo[key] = (e, out)
    return out


def _int_power(b, k):
    if k < 0:
        return 1.0 / _int_power(b, -k)
    result = np.ones_like(b, dtype=np.result_type(b, float))
    base = b
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def eval_jet(e, p, d, field="real"):
    """Jet of expression ``e`` at point ``p`` truncated at order ``d``."""
    if d < 0:
        raise ValueError("jet order must be >= 0")
    dtype = complex if field == "complex" else float
    p = np.asarray(p, dtype=dtype)
    env = [Jet.variable(i, p, d, dtype=dtype) for i in range(p.shape[-1])]
    out = evaluate(e, env)
    if not isinstance(out, Jet):
        out = Jet.constant(np.asarray(out, dtype=dtype), p, d)
    return out


def eval_jets(exprs, p, d, field="real"):
    """Jets of several expressions sharing one evaluation memo."""
    dtype = complex if field == "complex" else float
    p = np.asarray(p, dtype=dtype)
    env = [Jet.variable(i, p, d, dtype=dtype) for i in range(p.shape[-1])]
    memo = {}
    out = []
    for e in exprs:
        v = evaluate(e, env, memo)
        if not isinstance(v, Jet):
            v = Jet.constant(np.asarray(v, dtype=dtype), p, d)
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def _fmt_num(v):
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def to_text(e):
    """Render ``e`` in the definition language; reparses to the same tree."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = to_text(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = to_text(e.right)
        if _prec(e.right) <= p:
            right = f"({right})"
        sep = f" {e.op} " if p == 1 else e.op
        return f"{left}{sep}{right}"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        if _prec(e.arg) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if _prec(e.base) <= 4:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# tokenizer and expression parser

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<sym>[()+\-*/^,])"
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                tokens.append(Token(kind, s, line, col))
            col += len(s)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, text):
        if self.peek().text == text and self.peek().kind in ("sym", "ident"):
            return self.next()
        return None

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            shown = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {shown!r}", tok.line, tok.col)
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)


class ExprParser:
    """Recursive-descent parser; ``names`` maps identifiers to indices."""

    def __init__(self, stream, names):
        self.s = stream
        self.names = names

    def parse(self):
        return self.sum()

    def sum(self):
        left = self.product()
        while self.s.peek().text in ("+", "-") and self.s.peek().kind == "sym":
            tok = self.s.next()
            right = self.product()
            left = BinOp(tok.text, left, right, (tok.line, tok.col))
        return left

    def product(self):
        left = self.unary()
        while self.s.peek().text in ("*", "/") and self.s.peek().kind == "sym":
            tok = self.s.next()
            right = self.unary()
            left = BinOp(tok.text, left, right, (tok.line, tok.col))
        return left

    def unary(self):
        tok = self.s.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.s.next()
            return Neg(self.unary(), (tok.line, tok.col))
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.s.peek()
        if tok.kind == "sym" and tok.text == "^":
            self.s.next()
            sign = 1
            if self.s.accept("-"):
                sign = -1
            num = self.s.next()
            if num.kind != "num" or not num.text.isdigit():
                raise self.s.error("exponent must be an integer literal", num)
            return Pow(base, sign * int(num.text), (tok.line, tok.col))
        return base

    def atom(self):
        tok = self.s.next()
        pos = (tok.line, tok.col)
        if tok.kind == "num":
            return Num(float(tok.text), pos)
        if tok.kind == "ident":
            if tok.text in FUNCTIONS:
                self.s.expect("(")
                arg = self.sum()
                self.s.expect(")")
                return Call(tok.text, arg, pos)
            if tok.text in self.names:
                return Var(self.names[tok.text], tok.text, pos)
            if tok.text in CONSTANTS:
                return Num(CONSTANTS[tok.text], pos)
            raise UnknownIdentifier(f"unknown identifier {tok.text!r}", tok.line, tok.col)
        if tok.kind == "sym" and tok.text == "(":
            inner = self.sum()
            self.s.expect(")")
            return inner
        shown = tok.text or "end of input"
        raise ParseError(f"unexpected {shown!r} in expression", tok.line, tok.col)


def parse_expr(text, names):
    """Parse a single expression.

    ``names`` is a list of variable names or a mapping name -> index.
    """
    if not isinstance(names, dict):
        names = {n: i for i, n in enumerate(names)}
    stream = TokenStream(tokenize(text))
    e = ExprParser(stream, names).parse()
    tok = stream.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return e
