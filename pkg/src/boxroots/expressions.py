"""Parsing and evaluation of scalar math expressions in named variables.

Systems of equations enter the solver as plain text, one expression per
equation, e.g. ``"x1*cos(0.5*x2)"``.  The grammar is infix with ``+ - * / ^``
(``^`` is right-associative exponentiation), unary minus, parentheses, the
functions sin cos tan asin acos atan exp log sqrt abs, and the constants
``pi`` and ``e``.  There is no implicit multiplication: ``2x1`` is a syntax
error.

MATLAB-flavoured input is tolerated: an optional anonymous-function header
``@(x1,x2)`` is stripped, and the elementwise digraphs ``.*``, ``./``, ``.^``
are normalized to ``*``, ``/``, ``^`` before tokenizing.

Evaluation follows IEEE semantics and never raises: division by zero gives
a signed infinity, invalid operations (``log`` of a negative, ``0/0``) give
NaN.  Non-finite values are ordinary results, not errors; the detection
stage relies on this to survive singular regions of a system's domain.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArityError",
    "Expression",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "VariableSet",
    "parse",
]

_NAN = float("nan")
_INF = float("inf")


class ExpressionError(ValueError):
    """Base class for expression parsing errors."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"syntax error at position {position}: {message}")
        self.position = position


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r} at position {position}")
        self.name = name
        self.position = position


class ArityError(ExpressionError):
    def __init__(self, name: str, expected: int, got: int, position: int):
        super().__init__(
            f"function {name!r} takes {expected} argument(s), got {got} "
            f"(position {position})"
        )
        self.name = name


@dataclass(frozen=True)
class VariableSet:
    """Ordered, distinct variable names; order defines coordinate order."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("variable set must not be empty")
        for name in self.names:
            if not _IDENT_RE.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")
            if name in _FUNCTIONS or name in _CONSTANTS:
                raise ValueError(f"variable name {name!r} shadows a builtin")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


# ---------------------------------------------------------------------------
# Scalar operations. Python float arithmetic already propagates inf/nan for
# + - *; division, powers and the math-module functions raise, so each gets
# a wrapper that maps the exception back to the IEEE result.
# ---------------------------------------------------------------------------


def _s_div(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0.0 or math.isnan(a):
            return _NAN
        return _INF if (a > 0.0) == (math.copysign(1.0, b) > 0.0) else -_INF


def _s_pow(a: float, b: float) -> float:
    try:
        r = a**b
    except OverflowError:
        if a < 0.0 and b == int(b) and int(b) % 2 != 0:
            return -_INF
        return _INF
    except ZeroDivisionError:  # 0 ** negative
        return _INF
    if isinstance(r, complex):  # negative base, non-integer exponent
        return _NAN
    return r


def _s_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        return _INF


def _s_log(a: float) -> float:
    try:
        return math.log(a)
    except ValueError:
        return -_INF if a == 0.0 else _NAN
    except OverflowError:
        return _NAN


def _total(fn):
    def wrapped(a: float) -> float:
        try:
            return fn(a)
        except (ValueError, OverflowError):
            return _NAN

    return wrapped


# (scalar implementation, array implementation) per operator / function.
_BINARY_OPS = {
    "+": (lambda a, b: a + b, np.add),
    "-": (lambda a, b: a - b, np.subtract),
    "*": (lambda a, b: a * b, np.multiply),
    "/": (_s_div, np.true_divide),
    "^": (_s_pow, np.power),
}

_FUNCTIONS = {
    "sin": (_total(math.sin), np.sin),
    "cos": (_total(math.cos), np.cos),
    "tan": (_total(math.tan), np.tan),
    "asin": (_total(math.asin), np.arcsin),
    "acos": (_total(math.acos), np.arccos),
    "atan": (_total(math.atan), np.arctan),
    "exp": (_s_exp, np.exp),
    "log": (_s_log, np.log),
    "sqrt": (_total(math.sqrt), np.sqrt),
    "abs": (abs, np.abs),
}

_CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# AST nodes. `eval_scalar` takes a tuple of floats in variable order;
# `eval_array` takes a tuple of broadcastable numpy arrays.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float

    def eval_scalar(self, point):
        return self.value

    def eval_array(self, arrays):
        return self.value

    def serialize(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Variable:
    name: str
    index: int

    def eval_scalar(self, point):
        return point[self.index]

    def eval_array(self, arrays):
        return arrays[self.index]

    def serialize(self) -> str:
        return self.name


@dataclass(frozen=True)
class Negate:
    operand: Constant | Variable | Negate | BinaryOp | FunctionCall

    def eval_scalar(self, point):
        return -self.operand.eval_scalar(point)

    def eval_array(self, arrays):
        return np.negative(self.operand.eval_array(arrays))

    def serialize(self) -> str:
        return f"(-{self.operand.serialize()})"


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: Constant | Variable | Negate | BinaryOp | FunctionCall
    right: Constant | Variable | Negate | BinaryOp | FunctionCall

    def eval_scalar(self, point):
        fn = _BINARY_OPS[self.op][0]
        return fn(self.left.eval_scalar(point), self.right.eval_scalar(point))

    def eval_array(self, arrays):
        fn = _BINARY_OPS[self.op][1]
        return fn(self.left.eval_array(arrays), self.right.eval_array(arrays))

    def serialize(self) -> str:
        return f"({self.left.serialize()}{self.op}{self.right.serialize()})"


@dataclass(frozen=True)
class FunctionCall:
    name: str
    arg: Constant | Variable | Negate | BinaryOp | FunctionCall

    def eval_scalar(self, point):
        fn = _FUNCTIONS[self.name][0]
        return fn(self.arg.eval_scalar(point))

    def eval_array(self, arrays):
        fn = _FUNCTIONS[self.name][1]
        return fn(self.arg.eval_array(arrays))

    def serialize(self) -> str:
        return f"{self.name}({self.arg.serialize()})"


Node = Constant | Variable | Negate | BinaryOp | FunctionCall


@dataclass(frozen=True)
class Expression:
    """A parsed expression bound to an ordered variable set."""

    root: Node
    source: str
    vars: VariableSet

    def evaluate(self, point) -> float:
        """Evaluate at a point (sequence of floats, one per variable).

        Returns an extended real: finite, +-inf, or nan. Never raises for
        finite inputs.
        """
        if len(point) != len(self.vars):
            raise ValueError(
                f"point has {len(point)} components, expected {len(self.vars)}"
            )
        return float(self.root.eval_scalar(tuple(float(v) for v in point)))

    def evaluate_array(self, arrays) -> np.ndarray:
        """Evaluate over broadcastable numpy arrays, one per variable.

        Non-finite results are stored as-is; numpy floating-point warnings
        are suppressed for the duration of the call.
        """
        if len(arrays) != len(self.vars):
            raise ValueError(
                f"got {len(arrays)} arrays, expected {len(self.vars)}"
            )
        arrays = tuple(np.asarray(a, dtype=np.float64) for a in arrays)
        with np.errstate(all="ignore"):
            out = self.root.eval_array(arrays)
        return np.asarray(out, dtype=np.float64)

    def serialize(self) -> str:
        """Canonical fully parenthesized infix form; reparsing it yields a
        structurally identical tree."""
        return self.root.serialize()


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_HEADER_RE = re.compile(r"^\s*@\s*\([^)]*\)")

_TOK_NUMBER = "number"
_TOK_IDENT = "ident"
_TOK_OP = "op"
_TOK_END = "end"


def _tokenize(source: str):
    tokens = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        m = _NUMBER_RE.match(source, i)
        if m:
            tokens.append((_TOK_NUMBER, m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            tokens.append((_TOK_IDENT, m.group(), i))
            i = m.end()
            continue
        if ch in "+-*/^(),":
            tokens.append((_TOK_OP, ch, i))
            i += 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append((_TOK_END, "", n))
    return tokens


class _Parser:
    """Recursive descent over the grammar:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

    Unary minus binds looser than '^', so -x^2 parses as -(x^2); the
    exponent re-enters `factor`, so 2^-3 and 2^3^2 (right-assoc) work.
    """

    def __init__(self, tokens, vars: VariableSet):
        self.tokens = tokens
        self.pos = 0
        self.vars = vars

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val, at = self.peek()
        if kind != _TOK_OP or val != op:
            raise ExpressionSyntaxError(
                f"expected {op!r}, found {val!r}" if kind != _TOK_END else f"expected {op!r}, found end of input",
                at,
            )
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        kind, val, at = self.peek()
        if kind != _TOK_END:
            raise ExpressionSyntaxError(f"unexpected trailing {val!r}", at)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val in "+-":
                self.advance()
                node = BinaryOp(val, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val in "*/":
                self.advance()
                node = BinaryOp(val, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, val, _ = self.peek()
        if kind == _TOK_OP and val == "-":
            self.advance()
            return Negate(self.factor())
        if kind == _TOK_OP and val == "+":
            self.advance()
            return self.factor()
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        kind, val, _ = self.peek()
        if kind == _TOK_OP and val == "^":
            self.advance()
            node = BinaryOp("^", node, self.factor())
        return node

    def atom(self) -> Node:
        kind, val, at = self.advance()
        if kind == _TOK_NUMBER:
            return Constant(float(val))
        if kind == _TOK_IDENT:
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == _TOK_OP and nxt_val == "(":
                return self.call(val, at)
            if val in _CONSTANTS:
                return Constant(_CONSTANTS[val])
            if val in self.vars.names:
                return Variable(val, self.vars.index(val))
            raise UnknownIdentifierError(val, at)
        if kind == _TOK_OP and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == _TOK_END:
            raise ExpressionSyntaxError("unexpected end of input", at)
        raise ExpressionSyntaxError(f"unexpected {val!r}", at)

    def call(self, name: str, at: int) -> Node:
        if name not in _FUNCTIONS:
            raise UnknownIdentifierError(name, at)
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val == ",":
                self.advance()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")
        if len(args) != 1:
            raise ArityError(name, 1, len(args), at)
        return FunctionCall(name, args[0])


def _normalize(source: str) -> str:
    """Strip an optional MATLAB anonymous-function header and rewrite the
    elementwise digraphs .* ./ .^ to their scalar forms."""
    source = _HEADER_RE.sub("", source)
    return source.replace(".*", "*").replace("./", "/").replace(".^", "^")


def parse(source: str, vars: VariableSet) -> Expression:
    """Parse `source` into an Expression over `vars`.

    Raises ExpressionSyntaxError, UnknownIdentifierError or ArityError on
    malformed input; all carry the character position.
    """
    if not source or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    normalized = _normalize(source)
    root = _Parser(_tokenize(normalized), vars).parse()
    return Expression(root=root, source=source, vars=vars)
