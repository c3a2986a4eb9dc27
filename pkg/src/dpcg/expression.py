"""Small arithmetic expression language for coefficients and bound functions.

Grammar (whitespace insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right-associative
    primary := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-2^2`` is ``-4`` while ``2^-1``
is ``0.5``.  Variables are ``z1, z2`` (coordinates), ``r1, r2`` (state
values) and ``n1, n2`` (gradient magnitudes); ``pi`` is a literal.

Evaluation is vectorized: bindings may be floats or numpy arrays of a
common shape.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

__all__ = [
    "VARIABLES",
    "FUNCTIONS",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "UnboundVariableError",
    "EvaluationError",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Expression",
    "parse",
    "evaluate",
    "to_string",
    "free_variables",
]

VARIABLES = ("z1", "z2", "r1", "r2", "n1", "n2")
CONSTANTS = {"pi": math.pi}
FUNCTIONS = {
    "abs": 1,
    "min": 2,
    "max": 2,
    "exp": 1,
    "log": 1,
    "sin": 1,
    "cos": 1,
    "sqrt": 1,
}


class ExpressionError(ValueError):
    """Base class for parse and evaluation failures."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class UnboundVariableError(ExpressionError):
    pass


class EvaluationError(ExpressionError):
    """Division by zero or a function applied outside its domain."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expression = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Expression:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected token {text!r}", pos)
        return e

    def expr(self):
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, text, pos = self.take()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError("numeric literal overflows a double", pos)
            return Num(value)
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {text!r}", pos)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[text]:
                    raise ExpressionSyntaxError(
                        f"{text} expects {FUNCTIONS[text]} argument(s), got {len(args)}", pos
                    )
                return Call(text, tuple(args))
            if text in CONSTANTS:
                return Num(CONSTANTS[text])
            if text in VARIABLES:
                return Var(text)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {found}", pos)


def parse(text: str) -> Expression:
    """Parse ``text`` into an expression tree.

    Raises
    ------
    ExpressionSyntaxError
        With the byte offset of the offending token.
    UnknownIdentifierError
        For names that are neither variables, constants nor functions.
    """
    return _Parser(text).parse()


def to_string(e: Expression) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_string(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


def free_variables(e: Expression) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return free_variables(e.operand)
    if isinstance(e, BinOp):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, Call):
        out = set()
        for a in e.args:
            out |= free_variables(a)
        return out
    return set()


def _domain_check(ok, what):
    if not np.all(ok):
        raise EvaluationError(what)


def _eval(e, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariableError(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, BinOp):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            _domain_check(np.asarray(b) != 0, "division by zero")
            return a / b
        # '^': negative base with a non-integer exponent has no real value
        aa, bb = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        _domain_check((aa >= 0) | (bb == np.round(bb)), "negative base raised to a fractional power")
        _domain_check((aa != 0) | (bb >= 0), "zero raised to a negative power")
        return np.power(aa, bb) if (aa.ndim or bb.ndim) else float(aa**bb)
    if isinstance(e, Call):
        args = [_eval(a, env) for a in e.args]
        x = args[0]
        name = e.name
        if name == "abs":
            return np.abs(x)
        if name == "min":
            return np.minimum(x, args[1])
        if name == "max":
            return np.maximum(x, args[1])
        if name == "exp":
            return np.exp(x)
        if name == "log":
            _domain_check(np.asarray(x) > 0, "log of a nonpositive value")
            return np.log(x)
        if name == "sqrt":
            _domain_check(np.asarray(x) >= 0, "sqrt of a negative value")
            return np.sqrt(x)
        if name == "sin":
            return np.sin(x)
        if name == "cos":
            return np.cos(x)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expression | str, bindings: Mapping[str, object]):
    """Evaluate ``e`` under ``bindings`` in IEEE double precision.

    Array bindings give an array result broadcast to their common shape;
    scalar bindings give a float.
    """
    if isinstance(e, str):
        e = parse(e)
    env = {k: (np.asarray(v, dtype=float) if np.ndim(v) else float(v)) for k, v in bindings.items()}
    with np.errstate(all="ignore"):
        out = _eval(e, env)
    shape = np.broadcast_shapes(*(np.shape(v) for v in env.values())) if env else ()
    if shape:
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()
    return float(out)
