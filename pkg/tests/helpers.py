"""Shared test utilities: random generators and independent oracles.

The coefficient oracle here (`word_coeff_by_nilpotent_eval`) extracts series
coefficients by evaluating an expression on a tuple of jointly nilpotent
shift matrices.  It uses only matrix evaluation, so it is independent of both
the formal-series expansion and the realization machinery and can arbitrate
between them.
"""

from __future__ import annotations

import random
from fractions import Fraction

from ncdomain.expr import Add, Const, Expr, Inv, Mul, Neg, Var, eval_expr, max_var
from ncdomain.linalg import MatTuple, QMatrix, mat_tuple

F = Fraction


def random_fraction(rng: random.Random, lo: int = -2, hi: int = 2, halves: bool = False) -> Fraction:
    num = rng.randint(lo, hi)
    den = rng.choice([1, 1, 1, 2]) if halves else 1
    return F(num, den)


def random_qmatrix(rng: random.Random, rows: int, cols: int, lo: int = -2, hi: int = 2,
                   halves: bool = False) -> QMatrix:
    return QMatrix(rows, cols, [random_fraction(rng, lo, hi, halves) for _ in range(rows * cols)])


def random_point(rng: random.Random, g: int, n: int, lo: int = -2, hi: int = 2,
                 halves: bool = False) -> MatTuple:
    return mat_tuple([random_qmatrix(rng, n, n, lo, hi, halves) for _ in range(g)])


def random_invertible(rng: random.Random, n: int, tries: int = 50) -> QMatrix:
    for _ in range(tries):
        m = random_qmatrix(rng, n, n)
        if m.det() != 0:
            return m
    raise RuntimeError("no invertible sample found")


def random_expr(rng: random.Random, g: int, depth: int, inv_budget: int = 2) -> Expr:
    """A random expression of AST depth <= depth over x1..xg.

    Leaf-heavy by design so that minimal realizations stay small; at most
    `inv_budget` Inv nodes appear in the whole tree.
    """
    budget = [inv_budget]

    def gen(d: int) -> Expr:
        if d == 0 or rng.random() < 0.35:
            if rng.random() < 0.75:
                return Var(rng.randint(1, g))
            return Const(random_fraction(rng, -2, 2, halves=True))
        ops = ["add", "mul", "neg"]
        if budget[0] > 0:
            ops.append("inv")
        op = rng.choice(ops)
        if op == "add":
            return Add(gen(d - 1), gen(d - 1))
        if op == "mul":
            return Mul(gen(d - 1), gen(d - 1))
        if op == "neg":
            return Neg(gen(d - 1))
        budget[0] -= 1
        return Inv(gen(d - 1))

    return gen(depth)


def nilpotent_word_point(word: tuple[int, ...], g: int) -> MatTuple:
    """The shift-matrix tuple whose (0, k) evaluation entry isolates `word`."""
    k = len(word)
    mats = []
    for j in range(1, g + 1):
        m = [[F(0)] * (k + 1) for _ in range(k + 1)]
        for i, letter in enumerate(word):
            if letter == j:
                m[i][i + 1] = F(1)
        mats.append(QMatrix.from_rows(m))
    return mat_tuple(mats)


def word_coeff_by_nilpotent_eval(e: Expr, word: tuple[int, ...], g: int | None = None) -> Fraction:
    """Series coefficient of `word` in the expansion of e about 0.

    Requires e to be regular at 0 (raises EvalUndefined otherwise, exactly
    when the series expansion is undefined).
    """
    if g is None:
        g = max(max_var(e), max(word, default=1), 1)
    point = nilpotent_word_point(word, g)
    value = eval_expr(e, point)
    return value[0, len(word)]


def all_words(g: int, max_len: int) -> list[tuple[int, ...]]:
    """All words over {1..g} of length <= max_len, by length then lexicographic."""
    out: list[tuple[int, ...]] = [()]
    layer: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        layer = [w + (j,) for w in layer for j in range(1, g + 1)]
        out.extend(layer)
    return out
