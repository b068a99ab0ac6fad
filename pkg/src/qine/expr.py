"""Expression trees for constraint functions f(x, y).

Provides the abstract syntax, an infix parser and renderer, evaluation
as a natural interval extension, plain floating-point evaluation for
test oracles, and forward-mode interval differentiation used to prove
monotonicity in a parameter over a box.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence, Union

from .interval import EMPTY, Box, Interval

__all__ = [
    "VarKind",
    "VarRef",
    "Const",
    "Unary",
    "Binary",
    "Pow",
    "Expression",
    "ParseError",
    "parse_expression",
    "render",
    "eval_interval",
    "eval_point",
    "derivative_interval",
    "FUNCTIONS",
]

FUNCTIONS = ("sqrt", "exp", "log", "sin", "cos")


class VarKind(Enum):
    VARIABLE = "var"
    PARAMETER = "param"


@dataclass(frozen=True, slots=True)
class VarRef:
    """Reference to the index-th variable or parameter."""

    kind: VarKind
    index: int


@dataclass(frozen=True, slots=True)
class Const:
    value: float


@dataclass(frozen=True, slots=True)
class Unary:
    op: str  # neg | sqrt | exp | log | sin | cos
    child: "Expression"


@dataclass(frozen=True, slots=True)
class Binary:
    op: str  # add | sub | mul | div
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True, slots=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Const, VarRef, Unary, Binary, Pow]


class ParseError(ValueError):
    """Syntax error with the character offset where it was detected."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


# ---------------------------------------------------------------------------
# Tokenizer and recursive-descent parser for the grammar
#
#   expr   := term (("+" | "-") term)*
#   term   := factor (("*" | "/") factor)*
#   factor := "-" factor | atom ("^" integer)?
#   atom   := number | identifier | function "(" expr ")" | "(" expr ")"
#
# "^" binds tighter than unary minus and takes a non-negative integer
# literal exponent.

_NUMBER_RE = r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
_TOKEN_RE = re.compile(
    rf"(?P<num>{_NUMBER_RE})|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])|(?P<ws>\s+)|(?P<bad>.)"
)

_INT_RE = re.compile(r"\d+\Z")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", m.start())
        tokens.append((kind, m.group(), m.start()))
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: Mapping[str, VarRef]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.symbols = symbols

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, at = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", at)
        self.advance()

    def parse(self) -> Expression:
        e = self.expr()
        kind, text, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", at)
        return e

    def expr(self) -> Expression:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                node = Binary("add" if text == "+" else "sub", node, rhs)
            else:
                return node

    def term(self) -> Expression:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.factor()
                node = Binary("mul" if text == "*" else "div", node, rhs)
            else:
                return node

    def factor(self) -> Expression:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Unary("neg", self.factor())
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            nkind, ntext, nat = self.peek()
            if nkind != "num" or not _INT_RE.match(ntext):
                raise ParseError("exponent must be a non-negative integer", nat)
            self.advance()
            return Pow(node, int(ntext))
        return node

    def atom(self) -> Expression:
        kind, text, at = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Unary(text, arg)
            ref = self.symbols.get(text)
            if ref is None:
                raise ParseError(f"unknown identifier {text!r}", at)
            return ref
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {text!r}" if text else "unexpected end of input", at)


def parse_expression(text: str, symbols: Mapping[str, VarRef]) -> Expression:
    """Parse an infix expression; identifiers resolve through ``symbols``."""
    return _Parser(text, symbols).parse()


# ---------------------------------------------------------------------------
# Rendering.  Produces text that re-parses to a structurally identical
# tree, provided every Const is non-negative (the parser never creates
# negative literals; sign lives in neg nodes).

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(e: Expression) -> int:
    if isinstance(e, Binary):
        return _PREC_ADD if e.op in ("add", "sub") else _PREC_MUL
    if isinstance(e, Unary):
        return _PREC_NEG if e.op == "neg" else _PREC_ATOM
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _default_name(ref: VarRef) -> str:
    prefix = "x" if ref.kind is VarKind.VARIABLE else "y"
    return f"{prefix}{ref.index + 1}"


def render(
    e: Expression,
    var_names: Sequence[str] | None = None,
    param_names: Sequence[str] | None = None,
) -> str:
    """Render to infix text using the given names (default x1.., y1..)."""

    def name_of(ref: VarRef) -> str:
        names = var_names if ref.kind is VarKind.VARIABLE else param_names
        if names is not None:
            return names[ref.index]
        return _default_name(ref)

    def emit(node: Expression, min_prec: int) -> str:
        if isinstance(node, Const):
            text = repr(node.value)
            return f"({text})" if node.value < 0 else text
        if isinstance(node, VarRef):
            return name_of(node)
        if isinstance(node, Binary):
            prec = _prec(node)
            sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[node.op]
            left = emit(node.left, prec)
            right = emit(node.right, prec + 1)
            text = f"{left} {sym} {right}"
            return f"({text})" if prec < min_prec else text
        if isinstance(node, Unary):
            if node.op == "neg":
                inner = emit(node.child, _PREC_NEG)
                text = f"-{inner}"
                return f"({text})" if _PREC_NEG < min_prec else text
            return f"{node.op}({emit(node.child, 0)})"
        if isinstance(node, Pow):
            base = emit(node.base, _PREC_ATOM)
            text = f"{base}^{node.exponent}"
            return f"({text})" if _PREC_POW < min_prec else text
        raise TypeError(f"not an expression node: {node!r}")

    return emit(e, 0)


# ---------------------------------------------------------------------------
# Evaluation.


def eval_interval(e: Expression, x: Box, y: Box) -> Interval:
    """Natural interval extension over the joint box (x, y).

    Empty results propagate; sqrt and log intersect their operand with
    the natural domain first, so a partially defined operand only keeps
    its defined part.
    """
    if isinstance(e, Const):
        return Interval.point(e.value)
    if isinstance(e, VarRef):
        box = x if e.kind is VarKind.VARIABLE else y
        return box.dims[e.index]
    if isinstance(e, Binary):
        l = eval_interval(e.left, x, y)
        r = eval_interval(e.right, x, y)
        if e.op == "add":
            return l + r
        if e.op == "sub":
            return l - r
        if e.op == "mul":
            return l * r
        return l / r
    if isinstance(e, Unary):
        v = eval_interval(e.child, x, y)
        if e.op == "neg":
            return -v
        return getattr(v, e.op)()
    if isinstance(e, Pow):
        return eval_interval(e.base, x, y).pow_int(e.exponent)
    raise TypeError(f"not an expression node: {e!r}")


def eval_point(e: Expression, x: Sequence[float], y: Sequence[float]) -> float:
    """Floating-point evaluation; domain errors yield NaN."""
    try:
        return _eval_point(e, x, y)
    except (ValueError, OverflowError, ZeroDivisionError):
        return math.nan


def _eval_point(e: Expression, x: Sequence[float], y: Sequence[float]) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, VarRef):
        seq = x if e.kind is VarKind.VARIABLE else y
        return seq[e.index]
    if isinstance(e, Binary):
        l = _eval_point(e.left, x, y)
        r = _eval_point(e.right, x, y)
        if e.op == "add":
            return l + r
        if e.op == "sub":
            return l - r
        if e.op == "mul":
            return l * r
        return l / r
    if isinstance(e, Unary):
        v = _eval_point(e.child, x, y)
        if e.op == "neg":
            return -v
        return getattr(math, e.op)(v)
    if isinstance(e, Pow):
        return _eval_point(e.base, x, y) ** e.exponent
    raise TypeError(f"not an expression node: {e!r}")


def derivative_interval(e: Expression, wrt: VarRef, x: Box, y: Box) -> Interval:
    """Enclosure of the partial derivative d e / d wrt over the joint box.

    Forward-mode tangent propagation with interval coefficients.  Where
    the derivative is unbounded (sqrt or log touching the domain edge,
    division near zero) the enclosure is unbounded; callers must treat
    anything not strictly sign-definite as monotonicity unproven.
    """
    _, der = _eval_tangent(e, wrt, x, y)
    return der


_ZERO = Interval(0.0, 0.0)
_ONE = Interval(1.0, 1.0)


def _eval_tangent(
    e: Expression, wrt: VarRef, x: Box, y: Box
) -> tuple[Interval, Interval]:
    if isinstance(e, Const):
        return Interval.point(e.value), _ZERO
    if isinstance(e, VarRef):
        box = x if e.kind is VarKind.VARIABLE else y
        return box.dims[e.index], (_ONE if e == wrt else _ZERO)
    if isinstance(e, Binary):
        u, du = _eval_tangent(e.left, wrt, x, y)
        v, dv = _eval_tangent(e.right, wrt, x, y)
        if e.op == "add":
            return u + v, du + dv
        if e.op == "sub":
            return u - v, du - dv
        if e.op == "mul":
            return u * v, du * v + u * dv
        return u / v, (du * v - u * dv) / v.sqr()
    if isinstance(e, Unary):
        u, du = _eval_tangent(e.child, wrt, x, y)
        if e.op == "neg":
            return -u, -du
        if e.op == "sqrt":
            s = u.sqrt()
            return s, du / (s * 2)
        if e.op == "exp":
            ev = u.exp()
            return ev, ev * du
        if e.op == "log":
            pos = u.intersect(Interval(0.0, math.inf))
            return u.log(), du / pos
        if e.op == "sin":
            return u.sin(), u.cos() * du
        return u.cos(), -u.sin() * du
    if isinstance(e, Pow):
        u, du = _eval_tangent(e.base, wrt, x, y)
        val = u.pow_int(e.exponent)
        if e.exponent == 0:
            return val, _ZERO
        der = u.pow_int(e.exponent - 1) * e.exponent * du
        return val, der
    raise TypeError(f"not an expression node: {e!r}")
