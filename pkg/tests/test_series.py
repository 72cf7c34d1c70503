"""Series expansion: frozen small cases and cross-checks against the
nilpotent-evaluation coefficient oracle."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from helpers import all_words, random_expr, word_coeff_by_nilpotent_eval
from ncdomain.expr import Add, Const, EvalUndefined, Inv, Mul, Neg, Var, parse
from ncdomain.series import FreeSeries, NotRegularAtZero, expand_series

F = Fraction


def poly_coeffs(e, max_deg: int, g: int) -> dict:
    """Direct convolution expansion for inverse-free expressions.

    A third, independent route to polynomial coefficients (besides the
    series module and the nilpotent-point oracle).
    """
    if isinstance(e, Const):
        return {(): e.value} if e.value else {}
    if isinstance(e, Var):
        return {(e.index,): F(1)}
    if isinstance(e, Neg):
        return {w: -c for w, c in poly_coeffs(e.operand, max_deg, g).items()}
    if isinstance(e, Add):
        out = dict(poly_coeffs(e.left, max_deg, g))
        for w, c in poly_coeffs(e.right, max_deg, g).items():
            out[w] = out.get(w, F(0)) + c
        return {w: c for w, c in out.items() if c}
    if isinstance(e, Mul):
        out = {}
        for w1, c1 in poly_coeffs(e.left, max_deg, g).items():
            for w2, c2 in poly_coeffs(e.right, max_deg, g).items():
                if len(w1) + len(w2) <= max_deg:
                    out[w1 + w2] = out.get(w1 + w2, F(0)) + c1 * c2
        return {w: c for w, c in out.items() if c}
    raise AssertionError("inverse-free expressions only")


class TestFreeSeriesRing:
    def test_const(self):
        s = expand_series(Const(F(5)), 3, g=1)
        assert s.coeffs == {(): F(5)}

    def test_geometric(self):
        s = expand_series(parse("(1 - x1)^-1"), 3)
        assert s.coeffs == {(): F(1), (1,): F(1), (1, 1): F(1), (1, 1, 1): F(1)}

    def test_conjugation_degree_2(self):
        # frozen from the nilpotent-evaluation oracle (see test below)
        s = expand_series(parse(CONJ), 2)
        assert s.coeffs == {(2,): F(1), (2, 1): F(1), (1, 2): F(-1)}

    def test_inverse_requires_unit(self):
        with pytest.raises(ZeroDivisionError):
            FreeSeries.var(1, 1, 3).inverse()

    def test_not_regular_at_zero(self):
        with pytest.raises(NotRegularAtZero) as err:
            expand_series(parse("x1^-1"), 2)
        assert err.value.subexpr == Var(1)

    def test_nested_regularity_failure(self):
        with pytest.raises(NotRegularAtZero):
            expand_series(parse("(1 + (x1 + x2)^-1)^-1"), 2)

    def test_series_inverse_is_two_sided(self):
        rng = random.Random(5)
        for _ in range(10):
            coeffs = {(): F(rng.choice([1, 2, -1]))}
            for w in all_words(2, 3):
                if w and rng.random() < 0.4:
                    coeffs[w] = F(rng.randint(-2, 2))
            s = FreeSeries(2, 3, coeffs)
            one = FreeSeries.const(1, 2, 3)
            assert s * s.inverse() == one
            assert s.inverse() * s == one


CONJ = "(1 - x1)*x2*(1 - x1)^-1"


class TestAgainstOracles:
    def test_conjugation_against_nilpotent_oracle(self):
        e = parse(CONJ)
        s = expand_series(e, 3)
        for w in all_words(2, 3):
            assert s.coeff(w) == word_coeff_by_nilpotent_eval(e, w, 2)

    def test_polynomials_three_routes(self):
        rng = random.Random(31)
        for _ in range(30):
            e = random_expr(rng, 2, 3, inv_budget=0)
            s = expand_series(e, 3)
            direct = poly_coeffs(e, 3, 2)
            assert s.coeffs == direct
            for w in all_words(2, 3):
                assert s.coeff(w) == word_coeff_by_nilpotent_eval(e, w, 2)

    def test_random_rational_expressions(self):
        rng = random.Random(77)
        checked = 0
        while checked < 25:
            e = random_expr(rng, 2, 3)
            try:
                s = expand_series(e, 3)
            except NotRegularAtZero:
                # the nilpotent oracle must agree that 0 is not regular
                with pytest.raises(EvalUndefined):
                    word_coeff_by_nilpotent_eval(e, (), 2)
                continue
            checked += 1
            for w in all_words(2, 3):
                assert s.coeff(w) == word_coeff_by_nilpotent_eval(e, w, 2)

    def test_product_rule_spot(self):
        a = expand_series(Var(1), 2, g=2)
        b = expand_series(Var(2), 2, g=2)
        assert (a * b).coeffs == {(1, 2): F(1)}
