"""Noncommutative rational expressions: syntax tree, parser, printer, evaluator.

Grammar (binary `*` is mandatory, there is no juxtaposition)::

    expr     := term (('+' | '-') term)*
    term     := '-' unsigned | unsigned       # unary minus binds looser than '*'
    unsigned := factor ('*' factor)*
    factor   := atom ('^-1')*                 # matrix inverse, binds tightest
    atom     := RAT | VAR | '(' expr ')' | 'inv' '(' expr ')'
    RAT      := digits | digits '/' digits    # nonnegative rational literal
    VAR      := 'x' digits                    # 1-based variable index

A unary minus applied directly to a bare rational literal folds into the
constant, so negative constants print and reparse losslessly; ``-(3)``
denotes the negation node applied to the constant 3.  ``inv(e)`` is an input
alias for ``(e)^-1`` and is never printed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .linalg import MatTuple, QMatrix, SingularMatrixError, rat, rat_to_str, scalar_tuple


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Inv:
    operand: "Expr"


Expr = Union[Const, Var, Add, Mul, Neg, Inv]


class ParseError(ValueError):
    """Syntax error; `position` is the 0-based offset into the input."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class VariableOutOfRange(ParseError):
    """A variable index outside 1..g was used."""


class EvalUndefined(ArithmeticError):
    """Evaluation hit a non-invertible subexpression; carries the culprit."""

    def __init__(self, subexpr: Expr):
        super().__init__(f"subexpression not invertible at the given point: {format_expr(subexpr)}")
        self.subexpr = subexpr


#
# Tokenizer / parser
#

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<lit>\d+(?:/\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<inv>inv\b)"
    r"|(?P<pow>\^-1)"
    r"|(?P<op>[()+*-])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], g: int | None):
        self.tokens = tokens
        self.i = 0
        self.g = g

    def peek(self, ahead: int = 0) -> tuple[str, str, int]:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind or (text is not None and tok[1] != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.next()[1]
            rhs = self.term()
            e = Add(e, rhs if op == "+" else _negate(rhs))
        return e

    def term(self) -> Expr:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.next()
            # fold "- literal" into a negative constant unless the literal
            # starts a larger factor/product (keeps parse o format = identity)
            if self.peek()[0] == "lit" and not (
                self.peek(1)[0] == "pow" or (self.peek(1)[0] == "op" and self.peek(1)[1] == "*")
            ):
                tok = self.next()
                return Const(-rat(tok[1]))
            return Neg(self.unsigned())
        return self.unsigned()

    def unsigned(self) -> Expr:
        e = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.next()
            e = Mul(e, self.factor())
        return e

    def factor(self) -> Expr:
        e = self.atom()
        while self.peek()[0] == "pow":
            self.next()
            e = Inv(e)
        return e

    def atom(self) -> Expr:
        kind, text, pos = self.next()
        if kind == "lit":
            return Const(rat(text))
        if kind == "var":
            index = int(text[1:])
            if index < 1:
                raise VariableOutOfRange("variable indices are 1-based", pos)
            if self.g is not None and index > self.g:
                raise VariableOutOfRange(f"variable x{index} exceeds declared count g={self.g}", pos)
            return Var(index)
        if kind == "inv":
            self.expect("op", "(")
            e = self.expr()
            self.expect("op", ")")
            return Inv(e)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect("op", ")")
            return e
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def _negate(e: Expr) -> Expr:
    return Neg(e)


def parse(text: str, g: int | None = None) -> Expr:
    """Parse an expression; when g is given, variable indices are checked."""
    return _Parser(_tokenize(text), g).parse()


#
# Printing.  Levels: 0 sum, 1 unary minus, 2 product, 3 inverse, 4 atom.
# A node is parenthesized whenever its level is below the context requirement.
#


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        if e.value < 0:
            return "-" + rat_to_str(-e.value), 1
        return rat_to_str(e.value), 4
    if isinstance(e, Var):
        return f"x{e.index}", 4
    if isinstance(e, Inv):
        return _fmt(e.operand, 3) + "^-1", 3
    if isinstance(e, Mul):
        return _fmt(e.left, 2) + "*" + _fmt(e.right, 3), 2
    if isinstance(e, Neg):
        inner = e.operand
        if isinstance(inner, Const) and inner.value >= 0:
            # "-(3)" keeps the node distinct from the literal -3
            return "-(" + rat_to_str(inner.value) + ")", 1
        return "-" + _fmt(inner, 2), 1
    if isinstance(e, Add):
        left = _fmt(e.left, 0)
        if isinstance(e.right, Neg):
            return left + " - " + _fmt(e.right.operand, 2), 0
        return left + " + " + _fmt(e.right, 1), 0
    raise TypeError(f"not an expression node: {e!r}")


def _fmt(e: Expr, need: int) -> str:
    s, level = _render(e)
    return "(" + s + ")" if level < need else s


def format_expr(e: Expr) -> str:
    """Canonical text form; `parse(format_expr(e))` is structurally `e`."""
    return _fmt(e, 0)


#
# Structure helpers
#


def max_var(e: Expr) -> int:
    """Largest variable index appearing in e (0 for constant expressions).

    Id-memoized so that expressions with heavy subterm sharing cost time
    linear in the number of distinct nodes.
    """
    best = 0
    seen: set[int] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            best = max(best, node.index)
        elif isinstance(node, (Neg, Inv)):
            stack.append(node.operand)
        elif isinstance(node, (Add, Mul)):
            stack.append(node.left)
            stack.append(node.right)
    return best


def shift_vars(e: Expr, alpha: tuple) -> Expr:
    """Substitute x_j + alpha_j for x_j (zero offsets leave nodes untouched).

    Shared subterms are rewritten once and stay shared in the result.
    """
    offsets = [rat(a) for a in alpha]
    if max_var(e) > len(offsets):
        raise ValueError(f"expression uses more than {len(offsets)} variables")
    memo: dict[int, Expr] = {}

    def walk(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            off = offsets[node.index - 1]
            out: Expr = Add(node, Const(off)) if off != 0 else node
        elif isinstance(node, Const):
            out = node
        elif isinstance(node, Neg):
            out = Neg(walk(node.operand))
        elif isinstance(node, Inv):
            out = Inv(walk(node.operand))
        elif isinstance(node, Add):
            out = Add(walk(node.left), walk(node.right))
        else:
            out = Mul(walk(node.left), walk(node.right))
        memo[key] = out
        return out

    return walk(e)


#
# Evaluation at a matrix point.  Iterative post-order with an id-keyed memo:
# expression DAGs with heavy sharing (pencil-inverse witnesses) evaluate in
# time linear in the number of distinct nodes.
#


def eval_expr(e: Expr, x: MatTuple, memo: dict | None = None) -> QMatrix:
    """Evaluate e at the matrix tuple x; constants become scalar matrices.

    Raises EvalUndefined when an Inv subexpression is singular at x.  An
    externally supplied `memo` dict may be shared across calls evaluating
    overlapping DAGs at the same point.
    """
    if max_var(e) > x.g:
        raise ValueError(f"expression uses more than {x.g} variables")
    n = x.n
    if memo is None:
        memo = {}
    eye = QMatrix.identity(n)
    stack = [e]
    while stack:
        node = stack[-1]
        key = id(node)
        if key in memo:
            stack.pop()
            continue
        if isinstance(node, Const):
            memo[key] = (node, eye.scale(node.value))
            stack.pop()
        elif isinstance(node, Var):
            memo[key] = (node, x[node.index])
            stack.pop()
        elif isinstance(node, (Neg, Inv)):
            ck = id(node.operand)
            if ck not in memo:
                stack.append(node.operand)
                continue
            child = memo[ck][1]
            if isinstance(node, Neg):
                memo[key] = (node, -child)
            else:
                try:
                    memo[key] = (node, child.inv())
                except SingularMatrixError:
                    raise EvalUndefined(node.operand) from None
            stack.pop()
        else:
            lk, rk = id(node.left), id(node.right)
            missing = [c for c, k in ((node.right, rk), (node.left, lk)) if k not in memo]
            if missing:
                stack.extend(missing)
                continue
            left, right = memo[lk][1], memo[rk][1]
            memo[key] = (node, left + right if isinstance(node, Add) else left * right)
            stack.pop()
    return memo[id(e)][1]


def eval_scalar(e: Expr, alpha: tuple) -> Fraction:
    """Evaluate at a scalar point (a tuple of rationals)."""
    return eval_expr(e, scalar_tuple(alpha))[0, 0]


def is_defined_at(e: Expr, x: MatTuple) -> bool:
    try:
        eval_expr(e, x)
        return True
    except EvalUndefined:
        return False
