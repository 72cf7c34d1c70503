"""Domains of noncommutative rational functions through their pencils.

For a minimal realization (c, A, b) about alpha, the matrix points where the
function itself is defined are exactly those where the evaluated pencil
L(X - alpha) = I - sum_j A_j (x) (X_j - alpha_j I) is invertible.  This module
exposes that invertibility set (`PencilDomain`, `contains`), and makes the
inclusion "pencil invertible => some representative is defined" effective:
`witness` synthesizes an expression whose parse tree evaluates at the given
point and which represents the same function everywhere.

It also builds, for any nonzero polynomial f in four variables, a matrix
point that lies in the domain of the inverse of the generic 2x2 block
determinant while annihilating f on a distinguished vector -- so that domain
is not contained in the complement of any single hypersurface.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

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
    max_var,
    parse,
)
from .linalg import MatTuple, QMatrix, block, mat_tuple, min_poly
from .realization import (
    Realization,
    build,
    left_shift,
    pencil_at,
    right_shift,
    scalar_point_candidates,
)
from .series import expand_series
from .symbolic import MPoly, mpoly_det

Word = tuple[int, ...]


class NotInDomain(ArithmeticError):
    """A witness was requested at a point where the pencil is singular."""


class CounterexampleError(AssertionError):
    """A constructed annihilating point failed one of its defining checks."""


#
# The pencil invertibility set
#


@dataclass(frozen=True)
class PencilDomain:
    """The set of matrix tuples where I - sum_j A_j (x) (X_j - alpha_j I)
    is invertible (at every size n)."""

    g: int
    d: int
    A: tuple[QMatrix, ...]
    base_point: tuple[Fraction, ...]


def pencil_domain(r: Realization) -> PencilDomain:
    """The invertibility set of r's pencil.

    For a *minimal* r this is exactly where the underlying function is
    defined; a nonminimal pencil may be singular at extra points.
    """
    return PencilDomain(r.g, r.d, r.A, r.base_point)


def contains(pd: PencilDomain, x: MatTuple) -> bool:
    if x.g != pd.g:
        raise ValueError("point has wrong number of coordinates")
    if pd.d == 0:
        return True
    return pencil_at(pd, x).det() != 0


def scalar_pencil_det(pd: PencilDomain) -> MPoly:
    """det L(x - alpha) for scalar arguments, as a polynomial in g variables."""
    nvars = pd.g
    grid = []
    for i in range(pd.d):
        row = []
        for j in range(pd.d):
            entry = MPoly.const(nvars, 1 if i == j else 0)
            for k, (a, off) in enumerate(zip(pd.A, pd.base_point)):
                if a[i, j]:
                    shifted = MPoly.variable(nvars, k) - MPoly.const(nvars, off)
                    entry = entry - shifted.scale(a[i, j])
            row.append(entry)
        grid.append(row)
    if pd.d == 0:
        return MPoly.const(nvars, 1)
    return mpoly_det(grid)


def find_scalar_point(e: Expr, g: int | None = None, seed: int = 0) -> tuple[Fraction, ...] | None:
    """A deterministic scalar point where every inverse in e is invertible,
    or None when the candidate stream is exhausted."""
    gg = max_var(e) if g is None else g
    gg = max(gg, 1)
    for candidate in scalar_point_candidates(gg, seed=seed):
        try:
            eval_scalar(e, candidate)
        except EvalUndefined:
            continue
        return candidate
    return None


#
# Witness synthesis
#

_Grid = list[list[Expr | None]]  # None marks a zero entry


def _e_add(a: Expr | None, b: Expr | None) -> Expr | None:
    if a is None:
        return b
    if b is None:
        return a
    return Add(a, b)


def _e_mul(a: Expr | None, b: Expr | None) -> Expr | None:
    if a is None or b is None:
        return None
    if isinstance(a, Const) and a.value == 1:
        return b
    if isinstance(b, Const) and b.value == 1:
        return a
    return Mul(a, b)


def _e_scale(factor: Fraction, e: Expr | None) -> Expr | None:
    if e is None or factor == 0:
        return None
    if factor == 1:
        return e
    if factor == -1:
        return Neg(e)
    if isinstance(e, Const):
        return Const(factor * e.value)
    return Mul(Const(factor), e)


def _grid_eye(m: int) -> _Grid:
    return [[Const(Fraction(1)) if i == j else None for j in range(m)] for i in range(m)]


def _grid_add(a: _Grid, b: _Grid) -> _Grid:
    return [[_e_add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _grid_mul(a: _Grid, b: _Grid) -> _Grid:
    m = len(a)
    out: _Grid = []
    for i in range(m):
        row: list[Expr | None] = []
        for j in range(m):
            acc: Expr | None = None
            for k in range(m):
                acc = _e_add(acc, _e_mul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


def _grid_scale(factor: Fraction, a: _Grid) -> _Grid:
    return [[_e_scale(factor, x) for x in row] for row in a]


def _pencil_grid(r: Realization) -> _Grid:
    """The pencil L(x - alpha) as a d x d grid of linear expressions."""
    grid: _Grid = []
    for i in range(r.d):
        row: list[Expr | None] = []
        for j in range(r.d):
            entry: Expr | None = Const(Fraction(1)) if i == j else None
            for k, (a, off) in enumerate(zip(r.A, r.base_point), start=1):
                if a[i, j]:
                    var: Expr = Var(k) if off == 0 else Add(Var(k), Const(-off))
                    entry = _e_add(entry, _e_scale(-a[i, j], var))
            row.append(entry)
        grid.append(row)
    return grid


def _invert_unital(n: _Grid) -> _Grid:
    """Symbolic inverse of a grid that evaluates to the identity at the
    target point; every Inv introduced is of such an entry."""
    m = len(n)
    u = n[0][0]
    assert u is not None
    u_inv: Expr = Inv(u)
    if m == 1:
        return [[u_inv]]
    b_row = n[0][1:]
    c_col = [n[i][0] for i in range(1, m)]
    schur: _Grid = [
        [
            _e_add(n[i + 1][j + 1], _e_scale(Fraction(-1), _e_mul(_e_mul(c_col[i], u_inv), b_row[j])))
            for j in range(m - 1)
        ]
        for i in range(m - 1)
    ]
    inner = _invert_unital(schur)
    top_left: Expr | None = u_inv
    for i in range(m - 1):
        for j in range(m - 1):
            piece = _e_mul(_e_mul(_e_mul(_e_mul(u_inv, b_row[i]), inner[i][j]), c_col[j]), u_inv)
            top_left = _e_add(top_left, piece)
    top_right = [
        _e_scale(
            Fraction(-1),
            _e_add_many(_e_mul(_e_mul(u_inv, b_row[i]), inner[i][j]) for i in range(m - 1)),
        )
        for j in range(m - 1)
    ]
    bottom_left = [
        _e_scale(
            Fraction(-1),
            _e_add_many(_e_mul(_e_mul(inner[i][j], c_col[j]), u_inv) for j in range(m - 1)),
        )
        for i in range(m - 1)
    ]
    out: _Grid = [[top_left] + top_right]
    for i in range(m - 1):
        out.append([bottom_left[i]] + list(inner[i]))
    return out


def _e_add_many(items: Iterable[Expr | None]) -> Expr | None:
    acc: Expr | None = None
    for item in items:
        acc = _e_add(acc, item)
    return acc


def witness(r: Realization, x: MatTuple) -> Expr:
    """A representative expression of r's function whose parse tree is
    defined at x.

    Requires the pencil to be invertible at x (NotInDomain otherwise).  The
    pencil matrix M = L(x - alpha) is inverted symbolically: a polynomial
    f with f(M(x)) M(x) = I (from the minimal polynomial of the evaluated
    pencil) turns M into a matrix that evaluates to the identity, which a
    Schur-complement recursion inverts using only inverses of entries that
    evaluate to the identity matrix at x.  The result is c^T M^{-1} b
    assembled as a single expression.
    """
    if x.g != r.g:
        raise ValueError("point has wrong number of coordinates")
    if r.d == 0:
        return Const(Fraction(0))
    t = pencil_at(r, x)
    if t.det() == 0:
        raise NotInDomain(f"pencil of size {r.d}*{x.n} is singular at the point")
    p = min_poly(t)  # low-first, monic; p[0] != 0 since t is invertible
    a0 = p[0]
    assert a0 != 0
    m_grid = _pencil_grid(r)
    k = len(p) - 1
    if k == 1:
        # f is the constant -1/a0
        unital = _grid_scale(-1 / a0, m_grid)
        f_of_m: _Grid | None = None
    else:
        # f(t) = -(t^{k-1} + p[k-1] t^{k-2} + ... + p[1]) / a0, so f(M) M = I
        s = _grid_eye(r.d)
        for i in range(k - 2, -1, -1):
            s = _grid_mul(s, m_grid)
            if p[i + 1]:
                s = _grid_add(s, _grid_scale(p[i + 1], _grid_eye(r.d)))
        f_of_m = _grid_scale(-1 / a0, s)
        unital = _grid_mul(f_of_m, m_grid)
    inverse = _invert_unital(unital)
    if f_of_m is not None:
        inverse = _grid_mul(inverse, f_of_m)
    else:
        inverse = _grid_scale(-1 / a0, inverse)
    total: Expr | None = None
    for i in range(r.d):
        if r.c[i, 0] == 0:
            continue
        for j in range(r.d):
            if r.b[j, 0] == 0:
                continue
            total = _e_add(total, _e_scale(r.c[i, 0] * r.b[j, 0], inverse[i][j]))
    return total if total is not None else Const(Fraction(0))


#
# Shift domains
#


def shift_domain_inclusion_check(r: Realization, points: Sequence[MatTuple]) -> int:
    """Verify, on the given sample points, that the domain of every one-letter
    left and right shift of r contains the domain of r itself.

    Returns the number of in-domain points checked; raises AssertionError on
    a violation (none exist when r is minimal).
    """
    pd = pencil_domain(r)
    shifts = [left_shift(r, j) for j in range(1, r.g + 1)]
    shifts += [right_shift(r, j) for j in range(1, r.g + 1)]
    checked = 0
    for x in points:
        if not contains(pd, x):
            continue
        checked += 1
        for s in shifts:
            if not contains(pencil_domain(s), x):
                raise AssertionError(
                    f"shift domain misses a point of the original domain at size {x.n}"
                )
    return checked


#
# Annihilating points inside the block-determinant domain
#


BLOCK_INVERSE = "(x4 - x3*x1^-1*x2)^-1"
BLOCK_BASE_POINT = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))

_PERMUTATIONS = (
    (1, 2, 3, 4),
    (2, 1, 4, 3),
    (3, 4, 1, 2),
    (4, 3, 2, 1),
)


@dataclass(frozen=True)
class AnnihilatingPoint:
    """A matrix point X with f(X) e = 0 for a designated basis vector e,
    while the block [[X1, X2], [X3, X4]] stays invertible."""

    f: Expr
    x: MatTuple
    degree: int
    permutation: tuple[int, int, int, int]
    scale: Fraction
    basis: tuple[Word, ...]
    u0: Word

    @property
    def n(self) -> int:
        return self.x.n

    def annihilated_index(self) -> int:
        return self.basis.index(())


def _syntactic_degree(e: Expr) -> int:
    if isinstance(e, Const):
        return 0
    if isinstance(e, Var):
        return 1
    if isinstance(e, Neg):
        return _syntactic_degree(e.operand)
    if isinstance(e, Add):
        return max(_syntactic_degree(e.left), _syntactic_degree(e.right))
    if isinstance(e, Mul):
        return _syntactic_degree(e.left) + _syntactic_degree(e.right)
    raise ValueError("polynomial (inverse-free) expression required")


def _poly_coeffs(e: Expr) -> dict[Word, Fraction]:
    bound = _syntactic_degree(e)
    return dict(expand_series(e, bound, g=4).coeffs)


def _all_words(max_len: int) -> list[Word]:
    out: list[Word] = [()]
    level: list[Word] = [()]
    for _ in range(max_len):
        level = [w + (k,) for w in level for k in (1, 2, 3, 4)]
        out.extend(level)
    return out


def build_annihilating_point(f: Expr) -> AnnihilatingPoint:
    """A point of the block-determinant domain on whose distinguished vector
    f vanishes.

    f must be a nonconstant polynomial expression in x1..x4.  After an
    optional variable swap that makes some top-degree word start with x1, the
    point acts on the span of all words of length <= deg f with the single
    word x1*u0 deleted and its action rerouted through the remaining
    coefficients of f; the off-alphabet letters act as a matching of the
    length-d words onto the complementary basis words, which keeps the
    2n x 2n block invertible.
    """
    if max_var(f) > 4:
        raise ValueError("polynomial must be in x1..x4")
    coeffs = _poly_coeffs(f)
    if not coeffs:
        raise ValueError("the zero polynomial vanishes everywhere already")
    d = max(len(w) for w in coeffs)
    if d == 0:
        raise ValueError("a nonzero constant never vanishes")

    for sigma in _PERMUTATIONS:
        permuted = {tuple(sigma[k - 1] for k in w): c for w, c in coeffs.items()}
        tops = sorted(w for w in permuted if len(w) == d and w[0] == 1)
        if tops:
            break
    else:  # pragma: no cover - some top word always starts with a letter
        raise ValueError("no top-degree word found")
    lead = tops[0]
    gamma = permuted[lead]
    normalized = {w: c / gamma for w, c in permuted.items()}
    u0 = lead[1:]

    shorts = [w for w in _all_words(d - 1) if w != u0]
    shorts.sort(key=lambda w: (len(w), w))
    longs = sorted(w for w in _all_words(d) if len(w) == d and w != lead)
    basis: list[Word] = [u0] + shorts + longs
    index = {w: i for i, w in enumerate(basis)}
    n = len(basis)

    # h = x1*u0 - f has no x1*u0 component and is supported on basis words
    h = [Fraction(0)] * n
    for w, c in normalized.items():
        if w != lead:
            h[index[w]] -= c

    columns: dict[int, list[list[Fraction]]] = {
        k: [[Fraction(0)] * n for _ in range(n)] for k in (1, 2, 3, 4)
    }
    for u in [u0] + shorts:
        for k in (1, 2, 3, 4):
            target = (k,) + u
            if k == 1 and u == u0:
                columns[1][index[u]] = list(h)
            else:
                col = [Fraction(0)] * n
                col[index[target]] = Fraction(1)
                columns[k][index[u]] = col
    for k in (2, 3):
        complementary = [w for w in basis if not (w and w[0] == k)]
        assert len(complementary) == len(longs)
        for w, v in zip(longs, complementary):
            col = [Fraction(0)] * n
            col[index[v]] = Fraction(1)
            columns[k][index[w]] = col

    matrices = []
    for k in (1, 2, 3, 4):
        cols = columns[k]
        matrices.append(QMatrix(n, n, [cols[j][i] for i in range(n) for j in range(n)]))
    x_permuted = mat_tuple(matrices)
    # undo the variable swap: sigma is an involution, so X_j = X'_{sigma(j)}
    x = mat_tuple([x_permuted[sigma[j - 1]] for j in range(1, 5)])
    return AnnihilatingPoint(
        f=f,
        x=x,
        degree=d,
        permutation=sigma,
        scale=gamma,
        basis=tuple(basis),
        u0=u0,
    )


def verify_annihilating_point(cx: AnnihilatingPoint) -> bool:
    """Re-check every defining property of the constructed point.

    Raises CounterexampleError naming the first failed check; returns True
    when all hold.  The checks are independent of the construction: f is
    evaluated as a matrix expression, the block determinant directly, and
    the pencil membership through the realization machinery.
    """
    from .expr import eval_expr

    d, n = cx.degree, cx.n
    u_count = (4**d - 1) // 3
    w_count = 4**d - 1
    if len(cx.basis) != n or n != u_count + w_count:
        raise CounterexampleError(
            f"basis has {len(cx.basis)} words, expected {u_count} + {w_count}"
        )
    value = eval_expr(cx.f, cx.x)
    e0 = QMatrix(n, 1, [Fraction(i == cx.annihilated_index()) for i in range(n)])
    if not (value * e0).is_zero():
        raise CounterexampleError("f(X) does not annihilate the distinguished vector")
    big = block(
        [
            [cx.x[1], cx.x[2]],
            [cx.x[3], cx.x[4]],
        ]
    )
    if big.det() == 0:
        raise CounterexampleError("the 2n x 2n block is singular")
    r = build(parse(BLOCK_INVERSE), BLOCK_BASE_POINT)
    if not contains(pencil_domain(r), cx.x):
        raise CounterexampleError("point escaped the pencil domain")
    return True
