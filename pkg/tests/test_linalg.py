"""Exact linear algebra: frozen examples and algebraic properties."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdomain.linalg import (
    InconsistentSystemError,
    MatTuple,
    QMatrix,
    ShapeError,
    SingularMatrixError,
    ampliate,
    direct_sum,
    block,
    kron,
    mat_tuple,
    mat_tuple_from_json,
    mat_tuple_to_json,
    min_poly,
    poly_eval_matrix,
    qmatrix_from_json,
    qmatrix_to_json,
    rat,
    rat_to_str,
    scalar_tuple,
    tuple_direct_sum,
)

F = Fraction


def M(rows):
    return QMatrix.from_rows(rows)


class TestRat:
    def test_parse_forms(self):
        assert rat("3/4") == F(3, 4)
        assert rat("-2") == F(-2)
        assert rat(5) == F(5)

    def test_round_trip(self):
        for q in [F(0), F(-3), F(22, 7), F(1, 2)]:
            assert rat(rat_to_str(q)) == q

    def test_canonical_strings(self):
        assert rat_to_str(F(4, 2)) == "2"
        assert rat_to_str(F(-1, 2)) == "-1/2"


class TestArithmetic:
    def test_add(self):
        assert QMatrix.identity(2) + QMatrix.identity(2) == M([[2, 0], [0, 2]])

    def test_nilpotent_square(self):
        n = M([[0, 1], [0, 0]])
        assert (n * n).is_zero()

    def test_product_with_halves(self):
        a = M([[1, F(1, 2)], [0, 1]])
        b = M([[1, F(-1, 2)], [0, 1]])
        assert a * b == QMatrix.identity(2)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            QMatrix.identity(2) + QMatrix.identity(3)
        with pytest.raises(ShapeError):
            QMatrix.zeros(2, 3) * QMatrix.zeros(2, 3)

    def test_zero_dimensional(self):
        e = QMatrix.zeros(0, 0)
        assert e.det() == 1
        assert e.inv() == e
        # (n x 0) times (0 x n) is the n x n zero matrix
        assert QMatrix.zeros(2, 0) * QMatrix.zeros(0, 2) == QMatrix.zeros(2, 2)

    def test_transpose(self):
        a = M([[1, 2, 3], [4, 5, 6]])
        assert a.T == M([[1, 4], [2, 5], [3, 6]])
        assert a.T.T == a


class TestInverseAndDet:
    def test_identity(self):
        assert QMatrix.identity(3).inv() == QMatrix.identity(3)

    def test_unipotent(self):
        assert M([[1, -1], [0, 1]]).inv() == M([[1, 1], [0, 1]])

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            M([[1, 1], [1, 1]]).inv()

    def test_det_identity(self):
        for d in range(4):
            assert QMatrix.identity(d).det() == 1

    def test_det_diag_with_zero(self):
        assert M([[0, 0], [0, 1]]).det() == 0

    def test_det_block_triangular_pencil(self):
        # the 3x3 pencil shape [[1,0,*],[x1,1,*],[0,0,1-x1]] at x1=2
        a = M([[1, 0, -7], [2, 1, -7], [0, 0, -1]])
        assert a.det() == -1

    def test_random_inverse(self):
        rng = random.Random(7)
        for _ in range(25):
            n = rng.randint(1, 4)
            m = QMatrix(n, n, [F(rng.randint(-3, 3), rng.choice([1, 1, 2])) for _ in range(n * n)])
            if m.det() == 0:
                continue
            assert m * m.inv() == QMatrix.identity(n)
            assert m.inv() * m == QMatrix.identity(n)

    @given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
    @settings(max_examples=60, deadline=None)
    def test_det_2x2_formula(self, a, b, c, d):
        assert M([[a, b], [c, d]]).det() == a * d - b * c


class TestRankKernelSolve:
    def test_rank(self):
        assert M([[1, 2], [2, 4]]).rank() == 1
        assert QMatrix.zeros(3, 3).rank() == 0
        assert QMatrix.identity(3).rank() == 3

    def test_kernel_of_row(self):
        k = M([[1, 1]]).kernel_basis()
        assert k.cols == 1
        # spans {(1, -1)}
        assert k[0, 0] == -k[1, 0] != 0

    def test_kernel_orthogonality(self):
        rng = random.Random(3)
        for _ in range(20):
            a = QMatrix(3, 4, [F(rng.randint(-2, 2)) for _ in range(12)])
            k = a.kernel_basis()
            assert a.rank() + k.cols == 4
            if k.cols:
                assert (a * k).is_zero()

    def test_solve(self):
        a = M([[1, 1], [0, 1]])
        x = a.solve(QMatrix.column([3, 1]))
        assert a * x == QMatrix.column([3, 1])

    def test_solve_inconsistent(self):
        with pytest.raises(InconsistentSystemError):
            M([[1, 1], [1, 1]]).solve(QMatrix.column([0, 1]))

    def test_solve_underdetermined(self):
        a = M([[1, 1]])
        x = a.solve(QMatrix.column([5]))
        assert a * x == QMatrix.column([5])


class TestKronAndSums:
    def test_kron_identity(self):
        assert kron(QMatrix.identity(2), QMatrix.identity(3)) == QMatrix.identity(6)

    def test_kron_block_placement(self):
        e12 = M([[0, 1], [0, 0]])
        k = kron(e12, QMatrix.identity(2))
        assert k == M([[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]])

    def test_kron_of_scalar_block(self):
        # I_2 - [1] (x) I_2 = 0, so the determinant vanishes
        a = QMatrix(1, 1, [1])
        assert (QMatrix.identity(2) - kron(a, QMatrix.identity(2))).det() == 0

    def test_kron_mixed_product(self):
        rng = random.Random(11)
        for _ in range(10):
            a = QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)])
            b = QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)])
            c = QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)])
            d = QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)])
            assert kron(a * c, b * d) == kron(a, b) * kron(c, d)

    def test_direct_sum(self):
        assert direct_sum(QMatrix(1, 1, [1]), QMatrix(1, 1, [0])) == M([[1, 0], [0, 0]])

    def test_det_multiplicative_on_direct_sums(self):
        rng = random.Random(5)
        for _ in range(15):
            a = QMatrix(2, 2, [F(rng.randint(-3, 3)) for _ in range(4)])
            b = QMatrix(3, 3, [F(rng.randint(-3, 3)) for _ in range(9)])
            assert direct_sum(a, b).det() == a.det() * b.det()

    def test_pencil_det_splits_over_direct_sum_points(self):
        # det(I - A (x) (X (+) Y)) = det(I - A (x) X) * det(I - A (x) Y)
        rng = random.Random(9)
        for _ in range(10):
            a = QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)])
            x = QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)])
            y = QMatrix(3, 3, [F(rng.randint(-2, 2)) for _ in range(9)])
            lhs = (QMatrix.identity(10) - kron(a, direct_sum(x, y))).det()
            rhs = (QMatrix.identity(4) - kron(a, x)).det() * (QMatrix.identity(6) - kron(a, y)).det()
            assert lhs == rhs

    def test_block(self):
        a = QMatrix.identity(2)
        z = QMatrix.zeros(2, 2)
        assert block([[a, z], [z, a]]) == QMatrix.identity(4)


class TestMinPoly:
    def test_identity(self):
        assert min_poly(QMatrix.identity(2)) == [F(-1), F(1)]

    def test_nilpotent(self):
        assert min_poly(M([[0, 1], [0, 0]])) == [F(0), F(0), F(1)]

    def test_diag(self):
        assert min_poly(M([[1, 0], [0, 2]])) == [F(2), F(-3), F(1)]

    def test_annihilates_and_detects_invertibility(self):
        rng = random.Random(17)
        for _ in range(25):
            n = rng.randint(1, 5)
            a = QMatrix(n, n, [F(rng.randint(-2, 2)) for _ in range(n * n)])
            p = min_poly(a)
            assert p[-1] == 1
            assert poly_eval_matrix(p, a).is_zero()
            assert (p[0] != 0) == (a.det() != 0)

    def test_min_poly_divides_nothing_smaller(self):
        # companion-type matrix has minimal polynomial of full degree
        a = M([[0, 0, -1], [1, 0, 0], [0, 1, 2]])
        assert len(min_poly(a)) == 4


class TestMatTuple:
    def test_scalar_tuple(self):
        x = scalar_tuple([1, F(1, 2)])
        assert x.n == 1 and x.g == 2
        assert x[2] == QMatrix(1, 1, [F(1, 2)])

    def test_ampliate_identity(self):
        x = scalar_tuple([1, 1])
        y = ampliate(x, 2)
        assert y.n == 2
        assert y[1] == QMatrix.identity(2)
        assert ampliate(x, 1) == x

    def test_ampliate_is_iterated_direct_sum(self):
        rng = random.Random(23)
        x = mat_tuple([QMatrix(2, 2, [F(rng.randint(-2, 2)) for _ in range(4)]) for _ in range(2)])
        assert ampliate(x, 2) == tuple_direct_sum(x, x)

    def test_mismatched_blocks(self):
        with pytest.raises(ShapeError):
            MatTuple(2, 2, (QMatrix.identity(2), QMatrix.identity(3)))


class TestJson:
    def test_qmatrix_round_trip(self):
        m = M([[1, F(-1, 2)], [0, 3]])
        obj = qmatrix_to_json(m)
        assert obj == {"rows": 2, "cols": 2, "entries": [["1", "-1/2"], ["0", "3"]]}
        assert qmatrix_from_json(obj) == m

    def test_mat_tuple_round_trip(self):
        x = mat_tuple([QMatrix.identity(2), QMatrix.zeros(2, 2)])
        assert mat_tuple_from_json(mat_tuple_to_json(x)) == x

    def test_bad_grid(self):
        with pytest.raises(ShapeError):
            qmatrix_from_json({"rows": 2, "cols": 2, "entries": [["1", "0"]]})
