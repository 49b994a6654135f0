"""Small expression language for coefficient functions of the spatial variable x.

Grammar (infix, right-associative ``^`` binding tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'x' | 'i' | 'pi' | IDENT | IDENT '(' expr ')' | '(' expr ')'

so ``-x^2`` parses as ``-(x^2)`` and ``a^b^c`` as ``a^(b^c)``.  Numbers are
decimal or scientific literals.  Function calls are restricted to a fixed
whitelist; identifiers other than ``x``, ``i``, ``pi`` are free parameters
bound at evaluation time (unknown identifiers are *not* a parse error).

All arithmetic is complex.  ``sqrt`` of a negative real returns the principal
complex root (e.g. ``sqrt(-4) == 2i``); likewise ``^`` uses the principal
branch for non-integer exponents.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


FUNCTIONS = {
    "exp": cmath.exp,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": cmath.tan,
    "tanh": cmath.tanh,
    "sqrt": cmath.sqrt,
    "abs": abs,
}

RESERVED = {"x", "i", "pi"} | set(FUNCTIONS)


class ExprSyntaxError(ValueError):
    """Parse failure; carries the byte offset and the expected-token set."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected: " + ", ".join(expected) + ")"
        super().__init__(detail)


class ExprEvalError(ValueError):
    """Evaluation failure: unbound identifier or division by zero."""


# ---------------------------------------------------------------------------
# AST nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The spatial variable ``x``."""


@dataclass(frozen=True)
class ImagUnit:
    """The literal ``i``."""


@dataclass(frozen=True)
class PiConst:
    """The constant ``pi``."""


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Num | Var | ImagUnit | PiConst | Param | Neg | BinOp | Call


# ---------------------------------------------------------------------------
# Tokenizer

_OPERATORS = "+-*/^()"


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, offset) triples; kind in {num, ident, op, end}."""
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _OPERATORS:
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        if ch.isdigit() or (ch == "." and pos + 1 < n and source[pos + 1].isdigit()):
            start = pos
            while pos < n and source[pos].isdigit():
                pos += 1
            if pos < n and source[pos] == ".":
                pos += 1
                while pos < n and source[pos].isdigit():
                    pos += 1
            if pos < n and source[pos] in "eE":
                mark = pos
                pos += 1
                if pos < n and source[pos] in "+-":
                    pos += 1
                if pos < n and source[pos].isdigit():
                    while pos < n and source[pos].isdigit():
                        pos += 1
                else:
                    pos = mark  # bare 'e' belongs to the next identifier
            tokens.append(("num", source[start:pos], start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (source[pos].isalnum() or source[pos] == "_"):
                pos += 1
            tokens.append(("ident", source[start:pos], start))
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos,
                              ("number", "identifier", "operator"))
    tokens.append(("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser

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
        if kind == "op" and text == op:
            self.advance()
            return
        raise ExprSyntaxError(f"unexpected token {text or 'end of input'!r}",
                              offset, (repr(op),))

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"trailing input {text!r}", offset,
                                  ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return e

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            nxt_kind, nxt_text, _ = self.peek()
            if nxt_kind == "op" and nxt_text == "(":
                if text not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {text!r}", offset,
                                          tuple(sorted(FUNCTIONS)))
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text == "x":
                return Var()
            if text == "i":
                return ImagUnit()
            if text == "pi":
                return PiConst()
            return Param(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected token {text or 'end of input'!r}",
                              offset, ("number", "identifier", "'('", "'-'"))


def parse_expr(source: str) -> Expr:
    """Parse ``source`` into an AST.

    Raises ExprSyntaxError (with byte offset and expected-token set) on
    malformed input or unknown function names.  Unknown plain identifiers
    are accepted and resolved at evaluation time.
    """
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, ("number", "identifier", "'('"))
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Evaluation

def eval_expr(e: Expr, x: float, params: dict[str, complex] | None = None) -> complex:
    """Evaluate ``e`` at the point ``x`` with parameter bindings ``params``."""
    params = params or {}
    return _eval(e, x, params)


def _eval(e: Expr, x: float, params: dict[str, complex]) -> complex:
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, Var):
        return complex(x)
    if isinstance(e, ImagUnit):
        return 1j
    if isinstance(e, PiConst):
        return complex(math.pi)
    if isinstance(e, Param):
        try:
            return complex(params[e.name])
        except KeyError:
            raise ExprEvalError(f"unbound identifier {e.name!r}") from None
    if isinstance(e, Neg):
        return -_eval(e.operand, x, params)
    if isinstance(e, BinOp):
        left = _eval(e.left, x, params)
        right = _eval(e.right, x, params)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            try:
                return left / right
            except ZeroDivisionError:
                raise ExprEvalError("division by zero") from None
        if e.op == "^":
            try:
                return _principal(left) ** right
            except ZeroDivisionError:
                raise ExprEvalError("zero raised to a negative power") from None
        raise AssertionError(f"bad operator {e.op!r}")
    if isinstance(e, Call):
        arg = _eval(e.arg, x, params)
        if e.func == "sqrt":
            arg = _principal(arg)
        return complex(FUNCTIONS[e.func](arg))
    raise AssertionError(f"bad node {e!r}")


def _principal(z: complex) -> complex:
    """Clear a signed-zero imaginary part so branch cuts resolve upward.

    Negation of a real value yields imag = -0.0, which would put sqrt and
    non-integer powers on the lower side of the cut; sqrt(-4) must be +2i.
    """
    return complex(z.real, 0.0) if z.imag == 0.0 else z


def free_params(e: Expr) -> set[str]:
    """Names of free parameters (identifiers other than x, i, pi)."""
    out: set[str] = set()
    _collect_params(e, out)
    return out


def _collect_params(e: Expr, out: set[str]) -> None:
    if isinstance(e, Param):
        out.add(e.name)
    elif isinstance(e, Neg):
        _collect_params(e.operand, out)
    elif isinstance(e, BinOp):
        _collect_params(e.left, out)
        _collect_params(e.right, out)
    elif isinstance(e, Call):
        _collect_params(e.arg, out)


def references_x(e: Expr) -> bool:
    """True if the expression mentions the spatial variable ``x``."""
    if isinstance(e, Var):
        return True
    if isinstance(e, Neg):
        return references_x(e.operand)
    if isinstance(e, BinOp):
        return references_x(e.left) or references_x(e.right)
    if isinstance(e, Call):
        return references_x(e.arg)
    return False


# ---------------------------------------------------------------------------
# Printing

def print_expr(e: Expr) -> str:
    """Render ``e`` as parseable source (fully parenthesized; round-trips)."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, ImagUnit):
        return "i"
    if isinstance(e, PiConst):
        return "pi"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{print_expr(e.operand)})"
    if isinstance(e, BinOp):
        return f"({print_expr(e.left)} {e.op} {print_expr(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({print_expr(e.arg)})"
    raise AssertionError(f"bad node {e!r}")
