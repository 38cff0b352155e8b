"""Expression language for coordinate functions of the parameter ``s``.

Grammar (whitespace insensitive, no implicit multiplication)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-')? power
    power  := atom ('^' factor)?
    atom   := number | 's' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import (
    ArityError,
    ExpressionDomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}

# |f| closer to zero than this is treated as a sign change for abs().
ABS_EPS = 1e-12


class Node:
    """Base class of expression tree nodes."""

    def children(self):
        return ()


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class NamedConst(Node):
    name: str

    @property
    def value(self):
        return NAMED_CONSTANTS[self.name]


@dataclass(frozen=True)
class Var(Node):
    name: str = "s"


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class BinOp(Node):
    left: Node
    right: Node
    symbol: ClassVar[str] = "?"

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Add(BinOp):
    symbol: ClassVar[str] = "+"


@dataclass(frozen=True)
class Sub(BinOp):
    symbol: ClassVar[str] = "-"


@dataclass(frozen=True)
class Mul(BinOp):
    symbol: ClassVar[str] = "*"


@dataclass(frozen=True)
class Div(BinOp):
    symbol: ClassVar[str] = "/"


@dataclass(frozen=True)
class Pow(BinOp):
    symbol: ClassVar[str] = "^"


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def children(self):
        return (self.arg,)


_BINOPS = {"+": Add, "-": Sub, "*": Mul, "/": Div, "^": Pow}


@dataclass(frozen=True)
class Expression:
    """A parsed expression; ``source`` keeps the original text when known."""

    ast: Node
    source: str | None = None

    def __str__(self):
        return unparse(self.ast)

    def depends_on_s(self):
        return depends_on_s(self.ast)

    def __call__(self, s):
        return evaluate(self, s)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            # Either trailing whitespace or an illegal character.
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            bad = n - len(stripped)
            raise ExpressionSyntaxError(
                f"unexpected character {text[bad]!r}", _byte_offset(text, bad)
            )
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text.rstrip()) if text.strip() else len(text)))
    return tokens


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def offset(self, tok=None):
        tok = tok or self.tok
        return _byte_offset(self.text, tok[2])

    def error(self, message, tok=None, cls=ExpressionSyntaxError):
        raise cls(message, self.offset(tok))

    def accept(self, value):
        kind, text, _ = self.tok
        if kind == "op" and text == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            kind, text, _ = self.tok
            found = "end of input" if kind == "end" else repr(text)
            self.error(f"expected {value!r}, found {found}")

    def parse(self):
        if self.tok[0] == "end":
            self.error("empty expression")
        node = self.expr()
        if self.tok[0] != "end":
            self.error(f"unexpected {self.tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, text, _ = self.tok
            if kind == "op" and text in "+-":
                self.i += 1
                node = _BINOPS[text](node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, text, _ = self.tok
            if kind == "op" and text in "*/":
                self.i += 1
                node = _BINOPS[text](node, self.factor())
            else:
                return node

    def factor(self):
        if self.accept("-"):
            return Neg(self.power())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.factor())
        return base

    def atom(self):
        tok = self.tok
        kind, text, _ = tok
        if kind == "num":
            self.i += 1
            return Const(float(text))
        if kind == "ident":
            self.i += 1
            if text == "s":
                return Var()
            if text in NAMED_CONSTANTS:
                return NamedConst(text)
            if text not in FUNCTIONS:
                self.error(f"unknown identifier {text!r}", tok, UnknownIdentifierError)
            self.expect("(")
            if self.tok[0] == "op" and self.tok[1] == ")":
                self.error(f"{text}() takes exactly one argument, got 0", tok, ArityError)
            arg = self.expr()
            if self.tok[0] == "op" and self.tok[1] == ",":
                nargs = 1
                while self.accept(","):
                    self.expr()
                    nargs += 1
                self.error(
                    f"{text}() takes exactly one argument, got {nargs}", tok, ArityError
                )
            self.expect(")")
            return Call(text, arg)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {text!r}")


def parse_expression(text):
    """Parse ``text`` into an :class:`Expression`.

    Raises :class:`ExpressionSyntaxError` (with a byte ``offset``) on malformed
    input, and its subclasses for unknown identifiers and wrong arity.
    """
    if not isinstance(text, str):
        raise TypeError(f"expected str, got {type(text).__name__}")
    return Expression(_Parser(text).parse(), text)


def as_expression(obj):
    if isinstance(obj, Expression):
        return obj
    if isinstance(obj, Node):
        return Expression(obj)
    if isinstance(obj, (int, float)):
        return Expression(Const(float(obj)))
    return parse_expression(obj)


def unparse(node):
    """Render ``node`` back to grammar text; parsing the result gives ``node``."""
    if isinstance(node, Expression):
        node = node.ast
    if isinstance(node, Const):
        text = repr(float(node.value))
        return f"({text})" if node.value < 0 else text
    if isinstance(node, NamedConst):
        return node.name
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{unparse(node.operand)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)} {node.symbol} {unparse(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def depends_on_s(node):
    if isinstance(node, Var):
        return True
    return any(depends_on_s(c) for c in node.children())


def evaluate(expr, s):
    """Plain value of ``expr`` at ``s`` (scalar or array), vectorized with numpy."""
    expr = as_expression(expr)
    s_arr = np.asarray(s, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval_values(expr.ast, s_arr)
    out = np.broadcast_to(out, s_arr.shape).astype(float)
    return float(out) if out.ndim == 0 else np.array(out)


def _values_fail(node, s, mask, reason):
    idx = int(np.flatnonzero(np.broadcast_to(mask, s.shape).ravel())[0])
    raise ExpressionDomainError(reason, unparse(node), float(s.ravel()[idx]))


def _eval_values(node, s):
    if isinstance(node, (Const, NamedConst)):
        return np.float64(node.value)
    if isinstance(node, Var):
        return s
    if isinstance(node, Neg):
        return -_eval_values(node.operand, s)
    if isinstance(node, BinOp):
        a = _eval_values(node.left, s)
        b = _eval_values(node.right, s)
        if isinstance(node, Add):
            out = a + b
        elif isinstance(node, Sub):
            out = a - b
        elif isinstance(node, Mul):
            out = a * b
        elif isinstance(node, Div):
            bad = np.asarray(b) == 0
            if np.any(bad):
                _values_fail(node, s, bad, "division by zero")
            out = a / b
        else:
            out = _pow_values(node, a, b, s)
    else:
        a = _eval_values(node.arg, s)
        out = _call_values(node, a, s)
    bad = ~np.isfinite(out)
    if np.any(bad):
        _values_fail(node, s, bad, "non-finite result")
    return out


def _pow_values(node, a, b, s):
    if not depends_on_s(node.right):
        p = float(b)
        if p == round(p):
            bad = (np.asarray(a) == 0) & (p < 0)
            if np.any(bad):
                _values_fail(node, s, bad, "zero to a negative power")
            return np.power(a, p)
    bad = np.asarray(a) <= 0
    if np.any(bad):
        _values_fail(node, s, bad, "non-positive base for non-integer power")
    return np.exp(b * np.log(a))


def _call_values(node, a, s):
    f = node.func
    if f == "log":
        bad = np.asarray(a) <= 0
        if np.any(bad):
            _values_fail(node, s, bad, "log of non-positive value")
        return np.log(a)
    if f == "sqrt":
        bad = np.asarray(a) < 0
        if np.any(bad):
            _values_fail(node, s, bad, "sqrt of negative value")
        return np.sqrt(a)
    if f == "tan":
        bad = np.abs(np.cos(a)) < ABS_EPS
        if np.any(bad):
            _values_fail(node, s, bad, "tan pole")
        return np.tan(a)
    return getattr(np, f)(a)
