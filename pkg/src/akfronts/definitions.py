"""Front, Morin-map and loop definitions and their text format.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    file    := header section*
    header  := ("front" | "morin" | "loop") IDENT
    section := "dim" INT | "vars" IDENT ("," IDENT)*
             | "map" "(" expr ("," expr)* ")" | "normal" "(" expr ("," expr)* ")"
             | "field" ("real" | "complex")
             | "param" IDENT | "samples" INT | "sign" ["-"] INT
             | "metric" "(" expr ("," expr)* ")"
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ParseError
from .expr import ExprParser, TokenStream, diff, evaluate, to_text, tokenize

__all__ = [
    "FrontInstance",
    "MorinMapInstance",
    "LoopSpec",
    "parse_definition",
    "parse_front",
    "parse_morin",
    "parse_loop",
    "format_definition",
    "check_front_condition",
]


@dataclass(frozen=True)
class FrontInstance:
    """A front ``f: K^n -> K^(n+1)`` given by expressions.

    ``normal`` may be ``None`` for plane curves (``n == 1``); the normal is
    then derived locally from the velocity.
    """

    name: str
    variables: tuple
    map: tuple
    normal: tuple = None
    field: str = "real"

    def __post_init__(self):
        if len(self.map) != self.n + 1:
            raise DimensionMismatch(
                f"front {self.name!r}: map has {len(self.map)} components, "
                f"expected {self.n + 1}"
            )
        if self.normal is not None and len(self.normal) != self.n + 1:
            raise DimensionMismatch(
                f"front {self.name!r}: normal has {len(self.normal)} components, "
                f"expected {self.n + 1}"
            )

    @property
    def n(self):
        return len(self.variables)

    @property
    def dtype(self):
        return complex if self.field == "complex" else float


@dataclass(frozen=True)
class MorinMapInstance:
    """An equidimensional map ``f: K^n -> K^n``."""

    name: str
    variables: tuple
    map: tuple
    field: str = "real"

    def __post_init__(self):
        if len(self.map) != self.n:
            raise DimensionMismatch(
                f"map {self.name!r}: {len(self.map)} components, expected {self.n}"
            )

    @property
    def n(self):
        return len(self.variables)

    @property
    def dtype(self):
        return complex if self.field == "complex" else float


@dataclass(frozen=True)
class LoopSpec:
    """Closed curve ``s -> gamma(s)``, ``s in [0, 1]``, in a front's domain."""

    name: str
    param: str
    map: tuple
    samples: int = 2048
    sign: int = 1
    metric: tuple = None
    variables: tuple = field(default=None, compare=False)

    def gram(self, dim):
        if self.metric is None:
            return np.eye(dim)
        g = np.asarray(self.metric, dtype=float).reshape(dim, dim)
        if not np.allclose(g, g.T) or np.linalg.eigvalsh(g).min() <= 0:
            raise ValueError("metric must be symmetric positive definite")
        return g


_SECTIONS = ("dim", "vars", "map", "normal", "field", "param", "samples", "sign", "metric")


def _expr_list(stream, names):
    stream.expect("(")
    out = []
    parser = ExprParser(stream, names)
    if stream.peek().text == ")":
        stream.next()
        return out
    while True:
        out.append(parser.parse())
        tok = stream.next()
        if tok.text == ")":
            return out
        if tok.text != ",":
            raise ParseError(f"expected ',' or ')', found {tok.text!r}", tok.line, tok.col)


def _int(stream):
    tok = stream.next()
    if tok.kind != "num" or not tok.text.isdigit():
        raise ParseError("expected an integer", tok.line, tok.col)
    return int(tok.text)


def _ident(stream):
    tok = stream.next()
    if tok.kind != "ident":
        raise ParseError("expected an identifier", tok.line, tok.col)
    return tok.text


def parse_definition(text):
    """Parse a front, morin or loop definition."""
    stream = TokenStream(tokenize(text))
    head = stream.next()
    if head.text not in ("front", "morin", "loop"):
        raise ParseError("definition must start with 'front', 'morin' or 'loop'",
                         head.line, head.col)
    kind = head.text
    name = _ident(stream)
    sec = {}
    raw = {}  # token positions of expression lists, parsed after vars are known
    while stream.peek().kind != "eof":
        tok = stream.next()
        if tok.text not in _SECTIONS:
            raise ParseError(f"unknown section {tok.text!r}", tok.line, tok.col)
        if tok.text in sec or tok.text in raw:
            raise ParseError(f"duplicate section {tok.text!r}", tok.line, tok.col)
        if tok.text in ("dim", "samples"):
            sec[tok.text] = _int(stream)
        elif tok.text == "vars":
            names = [_ident(stream)]
            while stream.accept(","):
                names.append(_ident(stream))
            sec["vars"] = names
        elif tok.text == "param":
            sec["param"] = _ident(stream)
        elif tok.text == "field":
            f = _ident(stream)
            if f not in ("real", "complex"):
                raise ParseError("field must be 'real' or 'complex'", tok.line, tok.col)
            sec["field"] = f
        elif tok.text == "sign":
            neg = stream.accept("-") is not None
            v = _int(stream)
            if v != 1:
                raise ParseError("sign must be 1 or -1", tok.line, tok.col)
            sec["sign"] = -1 if neg else 1
        else:
            # skip balanced parentheses, remember where the list starts
            start = stream.i
            depth = 0
            while True:
                t = stream.next()
                if t.kind == "eof":
                    raise ParseError("unbalanced parentheses", tok.line, tok.col)
                if t.text == "(":
                    depth += 1
                elif t.text == ")":
                    depth -= 1
                    if depth == 0:
                        break
            raw[tok.text] = (start, tok)

    if kind == "loop":
        names = [sec.get("param", "s")]
    else:
        if "vars" not in sec:
            raise ParseError(f"{kind} definition needs a 'vars' section", head.line, head.col)
        names = sec["vars"]
        if len(set(names)) != len(names):
            raise ParseError("duplicate variable name", head.line, head.col)

    def exprs(key, vnames):
        if key not in raw:
            return None
        start, _ = raw[key]
        sub = TokenStream(stream.tokens)
        sub.i = start
        return tuple(_expr_list(sub, {n: i for i, n in enumerate(vnames)}))

    if "dim" in sec and kind != "loop" and sec["dim"] != len(names):
        raise DimensionMismatch(f"dim {sec['dim']} does not match {len(names)} variables")
    if "map" not in raw:
        raise DimensionMismatch(f"{kind} {name!r} has no map")
    field_tag = sec.get("field", "real")
    if kind == "front":
        return FrontInstance(name, tuple(names), exprs("map", names),
                             exprs("normal", names), field_tag)
    if kind == "morin":
        return MorinMapInstance(name, tuple(names), exprs("map", names), field_tag)
    metric = exprs("metric", [])
    if metric is not None:
        metric = tuple(float(evaluate(e, [])) for e in metric)
    m = exprs("map", names)
    if not m:
        raise DimensionMismatch(f"loop {name!r} has an empty map")
    return LoopSpec(name, names[0], m, sec.get("samples", 2048), sec.get("sign", 1), metric)


def _expect_kind(obj, cls, text):
    if not isinstance(obj, cls):
        raise ParseError(f"expected a {text} definition")
    return obj


def parse_front(text):
    return _expect_kind(parse_definition(text), FrontInstance, "front")


def parse_morin(text):
    return _expect_kind(parse_definition(text), MorinMapInstance, "morin")


def parse_loop(text):
    return _expect_kind(parse_definition(text), LoopSpec, "loop")


def _fmt_list(exprs):
    return "(" + ", ".join(to_text(e) for e in exprs) + ")"


def format_definition(obj):
    """Render a definition in the text format (inverse of parsing)."""
    if isinstance(obj, FrontInstance):
        lines = [f"front {obj.name}", f"dim {obj.n}", "vars " + ", ".join(obj.variables),
                 "map " + _fmt_list(obj.map)]
        if obj.normal is not None:
            lines.append("normal " + _fmt_list(obj.normal))
        lines.append(f"field {obj.field}")
    elif isinstance(obj, MorinMapInstance):
        lines = [f"morin {obj.name}", f"dim {obj.n}", "vars " + ", ".join(obj.variables),
                 "map " + _fmt_list(obj.map), f"field {obj.field}"]
    elif isinstance(obj, LoopSpec):
        lines = [f"loop {obj.name}", f"param {obj.param}", "map " + _fmt_list(obj.map),
                 f"samples {obj.samples}", f"sign {obj.sign}"]
        if obj.metric is not None:
            lines.append("metric (" + ", ".join(repr(float(v)) for v in obj.metric) + ")")
    else:
        raise TypeError(type(obj))
    return "\n".join(lines) + "\n"


def check_front_condition(front, n_points=50, tol=1e-9, rng=None, radius=1.0):
    """Verify <df, nu> == 0 at random points; returns the worst residual."""
    if front.normal is None:
        return 0.0
    rng = np.random.default_rng(0) if rng is None else rng
    pts = rng.uniform(-radius, radius, size=(n_points, front.n))
    worst = 0.0
    for i in range(front.n):
        cols = [diff(c, i) for c in front.map]
        dot = sum(evaluate(c, pts.T) * evaluate(v, pts.T) for c, v in zip(cols, front.normal))
        worst = max(worst, float(np.max(np.abs(dot))))
    if worst > tol:
        raise ValueError(f"front condition violated: max |<df, nu>| = {worst:.3g}")
    return worst
