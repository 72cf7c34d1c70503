"""Linear-pencil realizations of noncommutative rational expressions.

A realization (c, A, b) of size d about a base point alpha represents

    r(x) = c^T (I_d - sum_j A_j (x_j - alpha_j))^-1 b,

equivalently the formal power series sum_w (c^T A_w b) w in the shifted
variables, where A_w multiplies the coefficients in word order.  Expressions
that are defined at alpha compose into realizations by the sum, product and
inverse constructions below; minimization cuts the size down to the rank of
the underlying Hankel data, after which the realization is unique up to a
change of basis (see `similar`).

All arithmetic is exact.  Evaluation at an n x n matrix tuple X substitutes
X_j for x_j via Kronecker products and inverts the resulting dn x dn pencil.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Sequence

from .expr import (
    Add,
    Const,
    EvalUndefined,
    Expr,
    Inv,
    Mul,
    Neg,
    Var,
    eval_scalar,
    format_expr,
    max_var,
    shift_vars,
)
from .linalg import (
    MatTuple,
    QMatrix,
    SingularMatrixError,
    direct_sum,
    kron,
    rat,
)

Word = tuple[int, ...]


class BasePointMismatch(ValueError):
    """Arithmetic combined realizations expanded about different points."""


class ZeroConstantTerm(ArithmeticError):
    """Inversion of a realization whose value at the base point is zero."""


class NotRegularAtPoint(ArithmeticError):
    """An expression is undefined at the requested base point."""

    def __init__(self, point: tuple, subexpr: Expr):
        super().__init__(
            f"expression undefined at {tuple(map(str, point))}: "
            f"{format_expr(subexpr)} is not invertible there"
        )
        self.point = point
        self.subexpr = subexpr


class SingularPencil(ArithmeticError):
    """The evaluation point lies outside the pencil's invertibility set."""


@dataclass(frozen=True)
class Realization:
    """A monic linear-pencil realization about a scalar base point."""

    g: int
    d: int
    c: QMatrix  # d x 1
    A: tuple[QMatrix, ...]  # g matrices, each d x d
    b: QMatrix  # d x 1
    base_point: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.A) != self.g or len(self.base_point) != self.g:
            raise ValueError("realization needs g coefficients and g base coordinates")
        if self.c.rows != self.d or self.c.cols != 1:
            raise ValueError("c must be a d x 1 column")
        if self.b.rows != self.d or self.b.cols != 1:
            raise ValueError("b must be a d x 1 column")
        for a in self.A:
            if a.rows != self.d or a.cols != self.d:
                raise ValueError("pencil coefficients must be d x d")


def _zeros_point(g: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(0) for _ in range(g))


def real_const(value, g: int) -> Realization:
    """Constant function; the zero constant gets the size-0 realization."""
    v = rat(value)
    if v == 0:
        return _zero_realization(g, _zeros_point(g))
    return Realization(
        g, 1,
        QMatrix(1, 1, [1]),
        tuple(QMatrix.zeros(1, 1) for _ in range(g)),
        QMatrix(1, 1, [v]),
        _zeros_point(g),
    )


def real_var(index: int, g: int) -> Realization:
    """The coordinate function x_index about 0."""
    if not 1 <= index <= g:
        raise ValueError(f"variable index {index} outside 1..{g}")
    coeffs = []
    for j in range(1, g + 1):
        coeffs.append(QMatrix.from_rows([[0, 1], [0, 0]]) if j == index else QMatrix.zeros(2, 2))
    return Realization(
        g, 2, QMatrix.column([1, 0]), tuple(coeffs), QMatrix.column([0, 1]), _zeros_point(g)
    )


def _zero_realization(g: int, base_point) -> Realization:
    return Realization(
        g, 0, QMatrix.zeros(0, 1),
        tuple(QMatrix.zeros(0, 0) for _ in range(g)),
        QMatrix.zeros(0, 1), tuple(base_point),
    )


def _require_compatible(r1: Realization, r2: Realization) -> None:
    if r1.g != r2.g:
        raise ValueError("realizations over different variable counts")
    if r1.base_point != r2.base_point:
        raise BasePointMismatch(
            f"base points differ: {r1.base_point} vs {r2.base_point}"
        )


def real_add(r1: Realization, r2: Realization) -> Realization:
    _require_compatible(r1, r2)
    return Realization(
        r1.g, r1.d + r2.d,
        QMatrix(r1.d + r2.d, 1, r1.c._e + r2.c._e),
        tuple(direct_sum(a1, a2) for a1, a2 in zip(r1.A, r2.A)),
        QMatrix(r1.d + r2.d, 1, r1.b._e + r2.b._e),
        r1.base_point,
    )


def real_neg(r: Realization) -> Realization:
    return replace(r, c=-r.c)


def real_scale(factor, r: Realization) -> Realization:
    return replace(r, c=r.c.scale(rat(factor)))


def real_mul(r1: Realization, r2: Realization) -> Realization:
    """Product realization: series convolution on the direct-sum space.

    With gamma2 = c2^T b2 the blocks are

        c = (c1; 0),  A_j = [[A1_j, b1 c2^T A2_j], [0, A2_j]],  b = (gamma2 b1; b2),

    which reproduces sum_{w = uv} r1_u r2_v coefficient by coefficient.
    """
    _require_compatible(r1, r2)
    gamma2 = (r2.c.T * r2.b)[0, 0] if r2.d else Fraction(0)
    d = r1.d + r2.d
    coeffs = []
    cross_left = r1.b * r2.c.T  # d1 x d2
    for a1, a2 in zip(r1.A, r2.A):
        top = _hcat(a1, cross_left * a2)
        bottom = _hcat(QMatrix.zeros(r2.d, r1.d), a2)
        coeffs.append(_vcat(top, bottom))
    c = QMatrix(d, 1, r1.c._e + tuple(Fraction(0) for _ in range(r2.d)))
    b = QMatrix(d, 1, r1.b.scale(gamma2)._e + r2.b._e)
    return Realization(r1.g, d, c, tuple(coeffs), b, r1.base_point)


def _hcat(a: QMatrix, b: QMatrix) -> QMatrix:
    return QMatrix(a.rows, a.cols + b.cols,
                   [x for i in range(a.rows) for x in (a.row(i) + b.row(i))])


def _vcat(a: QMatrix, b: QMatrix) -> QMatrix:
    return QMatrix(a.rows + b.rows, a.cols, a._e + b._e)


def real_inv(r: Realization) -> Realization:
    """Inverse realization via the star construction, then minimization.

    Writing gamma = c^T b (the value at the base point, required nonzero),
    s = 1 - r/gamma is a proper series recognized by (lam, mu, rho) with
    lam^T rho = 0; the strict-part star s+ = s + s^2 + ... is recognized by
    the same boundary vectors with mu_j (I + rho lam^T), and

        r^-1 = (1 + s+) / gamma.
    """
    if r.d == 0:
        raise ZeroConstantTerm("the zero function has no inverse")
    gamma = (r.c.T * r.b)[0, 0]
    if gamma == 0:
        raise ZeroConstantTerm("realization value at the base point is zero")
    d = r.d + 1
    lam = QMatrix(d, 1, (Fraction(1),) + r.c.scale(-1 / gamma)._e)
    rho = QMatrix(d, 1, (Fraction(1),) + r.b._e)
    correction = QMatrix.identity(d) + rho * lam.T
    mu_hat = tuple(direct_sum(QMatrix.zeros(1, 1), a) * correction for a in r.A)
    s_plus = Realization(r.g, d, lam, mu_hat, rho, r.base_point)
    one = replace(real_const(1, r.g), base_point=r.base_point)
    return minimize(real_scale(1 / gamma, real_add(one, s_plus)))


_RAW_SIZE_CAP = 24


def build_raw(e: Expr, alpha: Sequence) -> Realization:
    """Compositional realization of e about alpha, without final minimization.

    Inverse nodes still minimize internally (part of the star construction);
    sums and products are plain block compositions.  Shared subterms are
    realized once, and any intermediate block growing past _RAW_SIZE_CAP is
    minimized on the spot so that expressions with heavy sharing (synthesized
    domain witnesses) stay tractable.
    """
    point = tuple(rat(a) for a in alpha)
    g = len(point)
    if max_var(e) > g:
        raise ValueError(f"expression uses more than {g} variables")
    try:
        eval_scalar(e, point)
    except EvalUndefined as err:
        raise NotRegularAtPoint(point, err.subexpr) from None
    shifted = shift_vars(e, point)
    memo: dict[int, Realization] = {}

    def walk(node: Expr) -> Realization:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = real_const(node.value, g)
        elif isinstance(node, Var):
            out = real_var(node.index, g)
        elif isinstance(node, Neg):
            out = real_neg(walk(node.operand))
        elif isinstance(node, Add):
            out = real_add(walk(node.left), walk(node.right))
        elif isinstance(node, Mul):
            out = real_mul(walk(node.left), walk(node.right))
        else:
            assert isinstance(node, Inv)
            out = real_inv(walk(node.operand))
        if out.d > _RAW_SIZE_CAP:
            out = minimize(out)
        memo[key] = out
        return out

    return replace(walk(shifted), base_point=point)


def build(e: Expr, alpha: Sequence) -> Realization:
    """Minimal realization of e about alpha (NotRegularAtPoint if undefined)."""
    return minimize(build_raw(e, alpha))


#
# Minimization and similarity
#


def _closure_basis(start: QMatrix, coeffs: Sequence[QMatrix]) -> tuple[list[Word], QMatrix]:
    """Breadth-first basis of the smallest coeff-invariant space containing start.

    Returns the defining words (in discovery order: epsilon, then extensions
    by x_1..x_g level by level) and the matrix whose columns are the
    corresponding vectors.
    """
    d = start.rows
    words: list[Word] = []
    vectors: list[QMatrix] = []
    echelon: list[list[Fraction]] = []
    pivots: list[int] = []

    def try_insert(v: QMatrix) -> bool:
        w = [v[i, 0] for i in range(d)]
        for row, p in zip(echelon, pivots):
            if w[p]:
                f = w[p]
                for c in range(d):
                    w[c] -= f * row[c]
        p = next((c for c in range(d) if w[c] != 0), None)
        if p is None:
            return False
        f = w[p]
        echelon.append([x / f for x in w])
        pivots.append(p)
        return True

    queue: list[tuple[Word, QMatrix]] = [((), start)]
    while queue:
        word, vec = queue.pop(0)
        if not try_insert(vec):
            continue
        words.append(word)
        vectors.append(vec)
        for j, a in enumerate(coeffs, start=1):
            queue.append((word + (j,), a * vec))
    basis = QMatrix(d, len(vectors), [
        vectors[k][i, 0] for i in range(d) for k in range(len(vectors))
    ])
    return words, basis


def _restrict(r: Realization) -> Realization:
    """Cut r down to the reachable subspace generated by b."""
    _, u = _closure_basis(r.b, r.A)
    m = u.cols
    if m == 0:
        return _zero_realization(r.g, r.base_point)
    new_a = tuple(u.solve(a * u) for a in r.A)
    new_b = u.solve(r.b)
    new_c = u.T * r.c
    return Realization(r.g, m, new_c, new_a, new_b, r.base_point)


def _transpose_real(r: Realization) -> Realization:
    return Realization(r.g, r.d, r.b, tuple(a.T for a in r.A), r.c, r.base_point)


def minimize(r: Realization) -> Realization:
    """Minimal realization of the same function (reachability then observability)."""
    return _transpose_real(_restrict(_transpose_real(_restrict(r))))


def similar(r1: Realization, r2: Realization) -> QMatrix | None:
    """The change of basis between two minimal realizations of one function.

    Returns P with b2 = P b1, c2 = P^-T c1 and A2_j = P A1_j P^-1, or None
    when no such P exists (in particular when the functions differ).
    """
    if r1.g != r2.g or r1.d != r2.d or r1.base_point != r2.base_point:
        return None
    d = r1.d
    if d == 0:
        return QMatrix.zeros(0, 0)
    words, u1 = _closure_basis(r1.b, r1.A)
    if u1.cols != d:
        return None  # r1 not reachable, hence not minimal
    # matching vectors on the r2 side, driven by the same words
    vecs2: dict[Word, QMatrix] = {(): r2.b}
    cols2 = []
    for w in words:
        if w not in vecs2:
            vecs2[w] = r2.A[w[-1] - 1] * vecs2[w[:-1]]
        cols2.append(vecs2[w])
    u2 = QMatrix(d, d, [v[i, 0] for i in range(d) for v in cols2])
    try:
        p = u2 * u1.inv()
    except SingularMatrixError:
        return None
    if p.det() == 0:
        return None
    if p * r1.b != r2.b or p.T * r2.c != r1.c:
        return None
    for a1, a2 in zip(r1.A, r2.A):
        if p * a1 != a2 * p:
            return None
    return p


#
# Series access, shifts, evaluation
#


def series_coeff(r: Realization, word: Sequence[int]) -> Fraction:
    """Coefficient of `word` in the expansion about the base point."""
    if r.d == 0:
        return Fraction(0)
    v = r.b
    for j in reversed(tuple(word)):
        v = r.A[j - 1] * v
    return (r.c.T * v)[0, 0]


def left_shift(r: Realization, j: int) -> Realization:
    """The function with series sum_w coeff(x_j w) w, minimized."""
    if not 1 <= j <= r.g:
        raise ValueError(f"variable index {j} outside 1..{r.g}")
    if r.d == 0:
        return r
    return minimize(replace(r, c=r.A[j - 1].T * r.c))


def right_shift(r: Realization, j: int) -> Realization:
    """The function with series sum_w coeff(w x_j) w, minimized."""
    if not 1 <= j <= r.g:
        raise ValueError(f"variable index {j} outside 1..{r.g}")
    if r.d == 0:
        return r
    return minimize(replace(r, b=r.A[j - 1] * r.b))


def pencil_at(r: Realization, x: MatTuple) -> QMatrix:
    """The evaluated pencil L(X - alpha) = I - sum_j A_j (x) (X_j - alpha_j I)."""
    if x.g != r.g:
        raise ValueError("point has wrong number of coordinates")
    n = x.n
    total = QMatrix.identity(r.d * n)
    eye_n = QMatrix.identity(n)
    for a, xj, off in zip(r.A, x.matrices, r.base_point):
        if a.is_zero():
            continue
        total = total - kron(a, xj - eye_n.scale(off))
    return total


def eval_realization(r: Realization, x: MatTuple) -> QMatrix:
    """Evaluate via the pencil; raises SingularPencil outside its domain."""
    n = x.n
    if r.d == 0:
        return QMatrix.zeros(n, n)
    pencil = pencil_at(r, x)
    try:
        inverse = pencil.inv()
    except SingularMatrixError:
        raise SingularPencil(f"pencil of size {r.d}*{n} is singular at the given point") from None
    return kron(r.c.T, QMatrix.identity(n)) * inverse * kron(r.b, QMatrix.identity(n))


#
# Equality of expressions via realizations
#


@dataclass(frozen=True)
class EqualityVerdict:
    """Outcome of an equality test between two expressions.

    status is "equal", "unequal" or "unknown"; for "unequal" a distinguishing
    word (about base_point) and the two series coefficients are attached;
    "unknown" means no common regular scalar point was found in the sampling
    budget, and no claim is made either way.
    """

    status: str
    base_point: tuple[Fraction, ...] | None = None
    word: Word | None = None
    lhs_coeff: Fraction | None = None
    rhs_coeff: Fraction | None = None


def scalar_point_candidates(g: int, seed: int = 0, stages: Sequence[int] = (1, 2, 4, 8),
                            trials_per_stage: int = 64) -> Iterator[tuple[Fraction, ...]]:
    """Deterministic scalar points: the origin, the small integer grid in
    lexicographic order, then seeded random stages of growing magnitude."""
    yield _zeros_point(g)
    if g <= 4:
        for point in itertools.product((Fraction(-1), Fraction(0), Fraction(1)), repeat=g):
            if any(point):
                yield point
    rng = random.Random(seed)
    for stage in stages:
        for _ in range(trials_per_stage):
            yield tuple(Fraction(rng.randint(-stage, stage)) for _ in range(g))


def _distinguishing_word(r: Realization) -> tuple[Word, Fraction]:
    """A word with nonzero coefficient for a minimal nonzero realization."""
    words_r, u = _closure_basis(r.b, r.A)
    rt = _transpose_real(r)
    words_o, w = _closure_basis(rt.b, rt.A)
    # column i of w is (A_{j1} ... A_{jm})^T c for words_o[i] = (j1, ..., jm),
    # so gram[i, k] is the series coefficient of words_o[i] + words_r[k]
    gram = w.T * u
    best: tuple[int, Word] | None = None
    best_val = Fraction(0)
    for i, wo in enumerate(words_o):
        for k, wr in enumerate(words_r):
            if gram[i, k]:
                cand = wo + wr
                key = (len(cand), cand)
                if best is None or key < best:
                    best = key
                    best_val = gram[i, k]
    assert best is not None, "minimal nonzero realization must have a nonzero coefficient"
    return best[1], best_val


def equal(e1: Expr, e2: Expr, seed: int = 0, trials_per_stage: int = 64) -> EqualityVerdict:
    """Decide whether two expressions represent the same rational function.

    Both are expanded about a common regular scalar point; the difference is
    minimized, and equality holds exactly when the minimal size is zero.
    Without a common point the verdict is "unknown" (never a wrong answer).
    """
    g = max(max_var(e1), max_var(e2), 1)
    point = None
    for candidate in scalar_point_candidates(g, seed=seed, trials_per_stage=trials_per_stage):
        try:
            eval_scalar(e1, candidate)
            eval_scalar(e2, candidate)
        except EvalUndefined:
            continue
        point = candidate
        break
    if point is None:
        return EqualityVerdict("unknown")
    r1 = build(e1, point)
    r2 = build(e2, point)
    diff = minimize(real_add(r1, real_neg(r2)))
    if diff.d == 0:
        return EqualityVerdict("equal", base_point=point)
    word, _ = _distinguishing_word(diff)
    return EqualityVerdict(
        "unequal",
        base_point=point,
        word=word,
        lhs_coeff=series_coeff(r1, word),
        rhs_coeff=series_coeff(r2, word),
    )


#
# JSON codec
#


def realization_to_json(r: Realization) -> dict:
    from .linalg import qmatrix_to_json, rat_to_str

    return {
        "g": r.g,
        "d": r.d,
        "alpha": [rat_to_str(a) for a in r.base_point],
        "c": [rat_to_str(r.c[i, 0]) for i in range(r.d)],
        "b": [rat_to_str(r.b[i, 0]) for i in range(r.d)],
        "A": [qmatrix_to_json(a) for a in r.A],
    }


def realization_from_json(obj: dict) -> Realization:
    from .linalg import qmatrix_from_json

    g, d = obj["g"], obj["d"]
    return Realization(
        g, d,
        QMatrix(d, 1, [rat(x) for x in obj["c"]]),
        tuple(qmatrix_from_json(a) for a in obj["A"]),
        QMatrix(d, 1, [rat(x) for x in obj["b"]]),
        tuple(rat(a) for a in obj["alpha"]),
    )
