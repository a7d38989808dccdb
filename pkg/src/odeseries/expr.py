"""Scalar math expressions in the single variable x.

Recursive-descent parser and evaluator for the coefficient/forcing entries
that appear as strings in config files.  Grammar (loosest to tightest):

    expr   :=  term  (('+' | '-') term)*
    term   :=  unary (('*' | '/') unary)*
    unary  :=  '-' unary | power
    power  :=  atom ('^' unary)?          # right-associative
    atom   :=  NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'

Functions: exp, sin, cos, log, sqrt.  Any other identifier is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

_FUNCTIONS = {
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "log": math.log,
    "sqrt": math.sqrt,
}


class ExprError(Exception):
    pass


class ExprSyntaxError(ExprError):
    """Parse failure; carries the byte offset and the tokens expected there."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"at offset {offset}: {message}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier '{name}'", offset,
                         expected=("x",) + tuple(sorted(_FUNCTIONS)))
        self.name = name


class EvalDomainError(ExprError):
    """Evaluation left the real domain (log of negative, 0-division, ...)."""

    def __init__(self, message: str, x: float, subexpr: str):
        super().__init__(f"{message} at x = {x!r} in '{subexpr}'")
        self.x = x
        self.subexpr = subexpr


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "ScalarExpr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ScalarExpr"
    right: "ScalarExpr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "ScalarExpr"


ScalarExpr = Union[Num, Var, Neg, BinOp, Call]


# ---------------------------------------------------------------------------
# tokenizer / parser

_OPS = set("+-*/^()")


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, offset) triples; kind in {num, name, op, end}."""
    tokens = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and (source[j].isdigit() or source[j] == "."):
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            try:
                float(text)
            except ValueError:
                raise ExprSyntaxError(f"malformed number '{text}'", i) from None
            tokens.append(("num", text, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(("name", source[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"got {text or 'end of input'!r}", offset,
                                  expected=(op,))
        self.advance()

    def parse(self) -> ScalarExpr:
        node = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"trailing input {text!r}", offset,
                                  expected=("end of input",))
        return node

    def expr(self) -> ScalarExpr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> ScalarExpr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.unary())
            else:
                return node

    def unary(self) -> ScalarExpr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> ScalarExpr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> ScalarExpr:
        kind, text, offset = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "x":
                return Var()
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise UnknownIdentifierError(text, offset)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"got {text or 'end of input'!r}", offset,
            expected=("number", "x", "function", "("),
        )


def parse(source: str) -> ScalarExpr:
    """Parse one scalar expression in x."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# evaluation / printing

def evaluate(e: ScalarExpr, x: float) -> float:
    """Evaluate `e` at the point x.  Raises EvalDomainError on any exit
    from the real domain; never returns NaN/Inf."""
    v = _eval(e, x)
    if not math.isfinite(v):
        raise EvalDomainError("non-finite result", x, to_source(e))
    return v


def _eval(e: ScalarExpr, x: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, Call):
        arg = _eval(e.arg, x)
        if e.name == "log" and arg <= 0.0:
            raise EvalDomainError(f"log of non-positive value {arg!r}", x, to_source(e))
        if e.name == "sqrt" and arg < 0.0:
            raise EvalDomainError(f"sqrt of negative value {arg!r}", x, to_source(e))
        try:
            return _FUNCTIONS[e.name](arg)
        except OverflowError:
            raise EvalDomainError("overflow", x, to_source(e)) from None
    if isinstance(e, BinOp):
        left = _eval(e.left, x)
        right = _eval(e.right, x)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            if right == 0.0:
                raise EvalDomainError("division by zero", x, to_source(e))
            return left / right
        if e.op == "^":
            try:
                v = left**right
            except (OverflowError, ZeroDivisionError):
                raise EvalDomainError("power out of range", x, to_source(e)) from None
            if isinstance(v, complex) or not math.isfinite(v):
                raise EvalDomainError("power left the real domain", x, to_source(e))
            return v
    raise TypeError(f"not a ScalarExpr node: {e!r}")


def to_source(e: ScalarExpr) -> str:
    """Fully parenthesized text.  For any parser-produced AST,
    parse(to_source(e)) is structurally identical to e."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, Call):
        return f"{e.name}({to_source(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)}{e.op}{to_source(e.right)})"
    raise TypeError(f"not a ScalarExpr node: {e!r}")


# ---------------------------------------------------------------------------
# matrix / vector expressions

@dataclass(frozen=True)
class MatrixExpr:
    n: int
    entries: tuple[tuple[ScalarExpr, ...], ...]  # row-major, n x n

    def __post_init__(self):
        if self.n < 1 or len(self.entries) != self.n or any(
            len(row) != self.n for row in self.entries
        ):
            raise ValueError(f"matrix expression must be exactly {self.n}x{self.n}")


@dataclass(frozen=True)
class VectorExpr:
    n: int
    entries: tuple[ScalarExpr, ...]

    def __post_init__(self):
        if self.n < 1 or len(self.entries) != self.n:
            raise ValueError(f"vector expression must have exactly {self.n} entries")


def parse_matrix(rows: list[list[str]]) -> MatrixExpr:
    n = len(rows)
    return MatrixExpr(n, tuple(tuple(parse(s) for s in row) for row in rows))


def parse_vector(items: list[str]) -> VectorExpr:
    return VectorExpr(len(items), tuple(parse(s) for s in items))


def eval_matrix(m: MatrixExpr, x: float):
    import numpy as np

    out = np.empty((m.n, m.n))
    for i, row in enumerate(m.entries):
        for j, e in enumerate(row):
            try:
                out[i, j] = evaluate(e, x)
            except EvalDomainError as err:
                raise EvalDomainError(
                    f"matrix entry ({i},{j}): {err}", x, to_source(e)
                ) from err
    return out


def eval_vector(v: VectorExpr, x: float):
    import numpy as np

    out = np.empty(v.n)
    for i, e in enumerate(v.entries):
        try:
            out[i] = evaluate(e, x)
        except EvalDomainError as err:
            raise EvalDomainError(f"vector entry ({i}): {err}", x, to_source(e)) from err
    return out


def const(value: float) -> ScalarExpr:
    return Num(float(value))


def const_matrix(a) -> MatrixExpr:
    """Wrap a numeric matrix as a MatrixExpr of constants."""
    n = len(a)
    return MatrixExpr(n, tuple(tuple(Num(float(v)) for v in row) for row in a))


def subtract(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    return BinOp("-", a, b)
