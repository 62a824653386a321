"""Arithmetic expression trees: parsing, evaluation and printing.

Target functions, basis functions and anything else the fitting pipeline
evaluates pointwise are plain text expressions over named variables, so a
model is pure data.  The grammar is deliberately small:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' exponent)?      exponent is a signed integer literal
    atom   := NUMBER | IDENT | '(' expr ')'

Precedence is ^ above unary minus above * and / above + and -, with ^
right-associative.  Implicit multiplication is not supported and exponents
must be integer literals, which keeps evaluation total on negative bases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

__all__ = [
    "Expression",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "ExprError",
    "ExprSyntaxError",
    "UnknownVariableError",
    "EvaluationError",
    "parse",
    "evaluate",
    "to_source",
    "variables_of",
]


class ExprError(ValueError):
    """Base class for expression parsing and evaluation errors."""


class ExprSyntaxError(ExprError):
    """Malformed source text; carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownVariableError(ExprSyntaxError):
    """Identifier not in the declared variable list."""


class EvaluationError(ExprError):
    """Division by zero, unassigned variable, or overflow during evaluation."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of "+-*/"
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Const, Var, Neg, BinOp, Pow]

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            # skip leading whitespace before reporting
            stripped = pos
            while stripped < len(source) and source[stripped].isspace():
                stripped += 1
            if stripped == len(source):
                break
            raise ExprSyntaxError(f"unexpected character {source[stripped]!r}", stripped)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: list[str]):
        self.source = source
        self.variables = set(variables)
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        self.advance()

    def parse(self) -> Expression:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self) -> Expression:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Expression:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.factor())
            else:
                return node

    def factor(self) -> Expression:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        # Signed integer literal; chains like 2^3 fold right-associatively.
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return -self.exponent()
        if kind != "number":
            raise ExprSyntaxError("expected integer exponent", pos)
        if not text.isdigit():
            raise ExprSyntaxError("exponent must be an integer literal", pos)
        self.advance()
        value = int(text)
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            rest = self.exponent()
            if rest < 0:
                raise ExprSyntaxError("exponent must be an integer literal", pos)
            value = value**rest
        return value

    def atom(self) -> Expression:
        kind, text, pos = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "ident":
            if text not in self.variables:
                raise UnknownVariableError(f"unknown identifier {text!r}", pos)
            return Var(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected {text!r}" if text else "unexpected end of input", pos)


def parse(source: str, variables: list[str]) -> Expression:
    """Parse `source` into an expression tree over the given variable names."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(source, list(variables)).parse()


def evaluate(expr: Expression, point: Mapping[str, float]) -> float:
    """Evaluate an expression at an assignment of reals to variable names."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return float(point[expr.name])
        except KeyError:
            raise EvaluationError(f"variable {expr.name!r} is not assigned") from None
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, point)
    if isinstance(expr, BinOp):
        a = evaluate(expr.left, point)
        b = evaluate(expr.right, point)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if b == 0.0:
            raise EvaluationError("division by zero")
        return a / b
    if isinstance(expr, Pow):
        base = evaluate(expr.base, point)
        if expr.exponent < 0 and base == 0.0:
            raise EvaluationError("division by zero")
        try:
            return float(base**expr.exponent)
        except OverflowError:
            raise EvaluationError("overflow in power") from None
    raise TypeError(f"not an expression node: {expr!r}")


_PREC_SUM = 0
_PREC_PROD = 1
_PREC_NEG = 2
_PREC_POW = 3
_PREC_ATOM = 4


def _prec(expr: Expression) -> int:
    if isinstance(expr, BinOp):
        return _PREC_SUM if expr.op in "+-" else _PREC_PROD
    if isinstance(expr, Neg):
        return _PREC_NEG
    if isinstance(expr, Pow):
        return _PREC_POW
    return _PREC_ATOM


def to_source(expr: Expression) -> str:
    """Render to text that parses back to the identical tree."""
    if isinstance(expr, Const):
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        inner = to_source(expr.arg)
        if _prec(expr.arg) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, BinOp):
        me = _prec(expr)
        left = to_source(expr.left)
        if _prec(expr.left) < me:
            left = f"({left})"
        right = to_source(expr.right)
        # parenthesize equal precedence on the right to keep left-associativity
        if _prec(expr.right) <= me:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Pow):
        base = to_source(expr.base)
        if _prec(expr.base) < _PREC_ATOM:
            base = f"({base})"
        return f"{base}^{expr.exponent}"
    raise TypeError(f"not an expression node: {expr!r}")


def variables_of(expr: Expression) -> set[str]:
    """Names of all variables that occur in the tree."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Neg):
        return variables_of(expr.arg)
    if isinstance(expr, BinOp):
        return variables_of(expr.left) | variables_of(expr.right)
    if isinstance(expr, Pow):
        return variables_of(expr.base)
    return set()
