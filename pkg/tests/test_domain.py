"""Tests for pencil domains, witness synthesis, shift-domain inclusions, and
annihilating points inside the block-determinant domain."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from ncdomain.expr import EvalUndefined, eval_expr, eval_scalar, parse
from ncdomain.linalg import QMatrix, block, mat_tuple, scalar_tuple
from ncdomain.realization import build, equal, eval_realization
from ncdomain.symbolic import MPoly
from ncdomain.domain import (
    BLOCK_BASE_POINT,
    BLOCK_INVERSE,
    CounterexampleError,
    NotInDomain,
    build_annihilating_point,
    contains,
    find_scalar_point,
    pencil_domain,
    scalar_pencil_det,
    shift_domain_inclusion_check,
    verify_annihilating_point,
    witness,
)

from helpers import random_expr, random_point

F = Fraction

CONJ = "(1 - x1)*x2*(1 - x1)^-1"
SCHUR = BLOCK_INVERSE  # (x4 - x3*x1^-1*x2)^-1 about (1, 0, 0, 1)


@pytest.fixture(scope="module")
def conj_real():
    return build(parse(CONJ), (0, 0))


@pytest.fixture(scope="module")
def schur_real():
    return build(parse(SCHUR), BLOCK_BASE_POINT)


def tvars(g):
    return [MPoly.variable(g, i) for i in range(g)]


class TestPencilDomain:
    def test_conjugation_membership_depends_only_on_x1(self, conj_real):
        pd = pencil_domain(conj_real)
        assert contains(pd, scalar_tuple([0, 0]))
        assert contains(pd, scalar_tuple([2, -7]))
        assert not contains(pd, scalar_tuple([1, 0]))
        assert not contains(pd, scalar_tuple([1, 99]))

    def test_conjugation_matrix_membership(self, conj_real):
        pd = pencil_domain(conj_real)
        rot = QMatrix.from_rows([[0, 1], [-1, 0]])  # det(I - rot) = 2
        ev1 = QMatrix.from_rows([[1, 1], [0, 0]])  # eigenvalue 1
        anything = QMatrix.from_rows([[3, 1], [1, 2]])
        assert contains(pd, mat_tuple([rot, anything]))
        assert not contains(pd, mat_tuple([ev1, anything]))

    def test_zero_realization_domain_is_everything(self):
        r = build(parse("x1 - x1"), (0,))
        assert r.d == 0
        pd = pencil_domain(r)
        assert contains(pd, scalar_tuple([123]))
        assert contains(pd, mat_tuple([QMatrix.zeros(3, 3)]))

    def test_wrong_arity_rejected(self, conj_real):
        with pytest.raises(ValueError):
            contains(pencil_domain(conj_real), scalar_tuple([1, 2, 3]))

    def test_conjugation_scalar_det(self, conj_real):
        t1, _ = tvars(2)
        det = scalar_pencil_det(pencil_domain(conj_real))
        assert det == MPoly.const(2, 1) - t1

    def test_schur_scalar_det_is_block_determinant(self, schur_real):
        t1, t2, t3, t4 = tvars(4)
        det = scalar_pencil_det(pencil_domain(schur_real))
        assert det == t1 * t4 - t2 * t3

    def test_scalar_det_invariant_under_syntactic_variant(self, conj_real):
        variant = build(parse(f"({CONJ})*1 + 0"), (0, 0))
        assert scalar_pencil_det(pencil_domain(variant)) == scalar_pencil_det(
            pencil_domain(conj_real)
        )

    def test_scalar_det_agrees_with_membership(self):
        rng = random.Random(11)
        for _ in range(15):
            e = random_expr(rng, 2, 3)
            pt = find_scalar_point(e, g=2)
            if pt is None:
                continue
            r = build(e, pt)
            pd = pencil_domain(r)
            det = scalar_pencil_det(pd)
            for _ in range(8):
                cand = tuple(F(rng.randint(-3, 3)) for _ in range(2))
                assert (det.eval(cand) != 0) == contains(pd, scalar_tuple(cand))


class TestFindScalarPoint:
    def test_regular_at_origin_returns_origin(self):
        assert find_scalar_point(parse(CONJ)) == (F(0), F(0))

    def test_skips_singular_candidates(self):
        assert find_scalar_point(parse("x1^-1")) == (F(-1),)

    def test_nowhere_invertible_returns_none(self):
        assert find_scalar_point(parse("(x1*x2 - x2*x1)^-1")) is None

    def test_found_point_always_evaluates(self):
        rng = random.Random(23)
        for _ in range(20):
            e = random_expr(rng, 3, 3)
            pt = find_scalar_point(e, g=3)
            if pt is not None:
                eval_scalar(e, pt)  # must not raise


class TestWitness:
    def test_schur_point_outside_expression_domain(self, schur_real):
        x = scalar_tuple([0, 1, 1, 0])
        with pytest.raises(EvalUndefined):
            eval_expr(parse(SCHUR), x)
        w = witness(schur_real, x)
        assert eval_expr(w, x) == eval_realization(schur_real, x)
        assert eval_expr(w, x)[0, 0] == 0

    def test_schur_witness_represents_same_function(self, schur_real):
        w = witness(schur_real, scalar_tuple([0, 1, 1, 0]))
        verdict = equal(w, parse(SCHUR))
        assert verdict.status == "equal"

    def test_witness_at_base_point_takes_linear_shortcut(self, conj_real):
        # at the base point the pencil evaluates to I, so the minimal
        # polynomial is linear and no Horner stage is needed
        x = scalar_tuple([0, 0])
        w = witness(conj_real, x)
        assert eval_expr(w, x) == eval_realization(conj_real, x)

    def test_witness_at_generic_scalar_point(self, conj_real):
        x = scalar_tuple([2, 3])
        w = witness(conj_real, x)
        assert eval_expr(w, x) == eval_realization(conj_real, x)
        assert eval_scalar(parse(CONJ), (F(2), F(3))) == eval_expr(w, x)[0, 0]

    def test_witness_at_matrix_point(self, schur_real):
        x = mat_tuple(
            [
                QMatrix.from_rows([[0, 1], [0, 0]]),
                QMatrix.from_rows([[1, 0], [1, 1]]),
                QMatrix.from_rows([[0, 0], [1, 0]]),
                QMatrix.from_rows([[0, 1], [1, 0]]),
            ]
        )
        assert contains(pencil_domain(schur_real), x)
        w = witness(schur_real, x)
        assert eval_expr(w, x) == eval_realization(schur_real, x)

    def test_witness_outside_domain_raises(self, schur_real):
        with pytest.raises(NotInDomain):
            witness(schur_real, scalar_tuple([1, 0, 0, 0]))

    def test_witness_of_zero_function(self):
        r = build(parse("x1 - x1"), (0,))
        w = witness(r, scalar_tuple([5]))
        assert eval_scalar(w, (F(5),)) == 0

    def test_witness_of_constant(self):
        r = build(parse("7/2"), (0, 0))
        w = witness(r, scalar_tuple([1, 1]))
        assert eval_scalar(w, (F(1), F(1))) == F(7, 2)

    def test_random_witnesses_match_realization(self):
        rng = random.Random(37)
        done = 0
        while done < 12:
            e = random_expr(rng, 2, 3)
            base = find_scalar_point(e, g=2)
            if base is None:
                continue
            r = build(e, base)
            if r.d > 5:
                continue
            pd = pencil_domain(r)
            for _ in range(4):
                x = random_point(rng, 2, rng.choice([1, 2]))
                if not contains(pd, x):
                    continue
                w = witness(r, x)
                assert eval_expr(w, x) == eval_realization(r, x)
                # a witness is a representative: never a different function
                assert equal(w, e).status != "unequal"
            done += 1


class TestShiftDomains:
    def test_conjugation_shift_domains_cover(self, conj_real):
        pts = [
            scalar_tuple([0, 0]),
            scalar_tuple([2, 3]),
            scalar_tuple([1, 5]),  # outside dom, skipped
            mat_tuple(
                [
                    QMatrix.from_rows([[0, 1], [-1, 0]]),
                    QMatrix.from_rows([[1, 2], [3, 4]]),
                ]
            ),
        ]
        assert shift_domain_inclusion_check(conj_real, pts) == 3

    def test_schur_shift_domains_cover(self, schur_real):
        pts = [scalar_tuple([0, 1, 1, 0]), scalar_tuple([1, 0, 0, 1])]
        assert shift_domain_inclusion_check(schur_real, pts) == 2

    def test_random_shift_domains_cover(self):
        rng = random.Random(41)
        done = 0
        while done < 10:
            e = random_expr(rng, 2, 3)
            base = find_scalar_point(e, g=2)
            if base is None:
                continue
            r = build(e, base)
            pts = [random_point(rng, 2, rng.choice([1, 2])) for _ in range(5)]
            shift_domain_inclusion_check(r, pts)  # must not raise
            done += 1


class TestAnnihilatingPoint:
    def test_single_variable(self):
        cx = build_annihilating_point(parse("x1"))
        assert cx.n == 4 and cx.degree == 1
        assert cx.permutation == (1, 2, 3, 4)
        assert cx.basis[0] == cx.u0 == ()
        assert verify_annihilating_point(cx)

    def test_vanishing_is_on_the_hypersurface(self):
        # f(X) kills a nonzero vector, so X really lies on det f = 0 while
        # the block stays invertible
        f = parse("x1*x2 + x3")
        cx = build_annihilating_point(f)
        assert eval_expr(f, cx.x).det() == 0
        big = block([[cx.x[1], cx.x[2]], [cx.x[3], cx.x[4]]])
        assert big.det() != 0

    def test_permutation_used_when_no_leading_x1(self):
        cx = build_annihilating_point(parse("x2*x4"))
        assert cx.permutation == (2, 1, 4, 3)
        assert verify_annihilating_point(cx)

    def test_constant_term_is_carried_into_the_action(self):
        cx = build_annihilating_point(parse("x1*x2 + x3 - 1/2"))
        assert verify_annihilating_point(cx)

    def test_lower_degree_words_do_not_change_size(self):
        a = build_annihilating_point(parse("x1*x2"))
        b = build_annihilating_point(parse("x1*x2 + x4 - 3"))
        assert a.n == b.n == 20

    def test_degree_three(self):
        cx = build_annihilating_point(parse("x3*x3*x2 + x1"))
        assert cx.degree == 3 and cx.n == 84
        assert verify_annihilating_point(cx)

    def test_normalization_scale_recorded(self):
        cx = build_annihilating_point(parse("3*(x1*x2)"))
        assert cx.scale == 3
        assert verify_annihilating_point(cx)

    def test_point_feeds_the_realization(self, schur_real):
        cx = build_annihilating_point(parse("x1 - x2"))
        # the pencil is invertible there, so evaluation goes through
        eval_realization(schur_real, cx.x)

    def test_word_count_identity(self):
        for s, d in [("x4", 1), ("x2*x3", 2)]:
            cx = build_annihilating_point(parse(s))
            shorter = (4**d - 1) // 3
            longest = 4**d - 1
            assert len(cx.basis) == shorter + longest == cx.n

    def test_rejects_constants_and_zero(self):
        with pytest.raises(ValueError):
            build_annihilating_point(parse("5"))
        with pytest.raises(ValueError):
            build_annihilating_point(parse("x1 - x1"))

    def test_rejects_inverses_and_extra_variables(self):
        with pytest.raises(ValueError):
            build_annihilating_point(parse("x1^-1"))
        with pytest.raises(ValueError):
            build_annihilating_point(parse("x5"))

    def test_random_polynomials(self):
        rng = random.Random(53)
        done = 0
        while done < 8:
            e = random_expr(rng, 4, 3, inv_budget=0)
            try:
                cx = build_annihilating_point(e)
            except ValueError:
                continue
            if cx.degree > 2:
                continue
            assert verify_annihilating_point(cx)
            done += 1

    def test_verifier_rejects_tampering(self):
        from dataclasses import replace

        cx = build_annihilating_point(parse("x1"))
        bad = replace(cx, x=mat_tuple([QMatrix.identity(4)] * 4))
        with pytest.raises(CounterexampleError):
            verify_annihilating_point(bad)
