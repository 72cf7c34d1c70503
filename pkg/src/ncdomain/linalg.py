"""Exact linear algebra over the rationals.

Matrices are dense, immutable and carry ``fractions.Fraction`` entries, so
every operation (elimination, determinants, kernels, minimal polynomials)
is exact.  Zero-dimensional shapes are legal throughout: the 0x0 matrix has
determinant 1 and is its own inverse, which keeps degenerate cases (empty
pencils, the zero realization) on the common code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction


class ShapeError(ValueError):
    """Operands have incompatible shapes."""


class SingularMatrixError(ArithmeticError):
    """A square matrix required to be invertible is singular."""


class InconsistentSystemError(ValueError):
    """A linear system has no solution."""


def rat(value) -> Fraction:
    """Coerce an int, string ("p" or "p/q") or Fraction to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def rat_to_str(value: Fraction) -> str:
    """Canonical string form: "p" for integers, "p/q" otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


#
# Matrices
#


class QMatrix:
    """An immutable rows x cols matrix over the rationals."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries: Iterable) -> None:
        if rows < 0 or cols < 0:
            raise ShapeError("matrix dimensions must be nonnegative")
        flat = tuple(rat(x) for x in entries)
        if len(flat) != rows * cols:
            raise ShapeError(f"expected {rows * cols} entries, got {len(flat)}")
        self.rows = rows
        self.cols = cols
        self._e = flat

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "QMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ShapeError("ragged rows")
        return cls(r, c, [x for row in rows for x in row])

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [Fraction(i == j) for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    @classmethod
    def column(cls, values: Sequence) -> "QMatrix":
        values = list(values)
        return cls(len(values), 1, values)

    def __getitem__(self, key) -> Fraction:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        return self._e[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self._e[i * self.cols : (i + 1) * self.cols]

    def to_lists(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for x in self._e)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._e == other._e
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._e))

    def __repr__(self) -> str:
        body = "; ".join(
            " ".join(rat_to_str(x) for x in self.row(i)) for i in range(self.rows)
        )
        return f"QMatrix({self.rows}x{self.cols}: {body})"

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._require_same_shape(other)
        return QMatrix(self.rows, self.cols, [a + b for a, b in zip(self._e, other._e)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._require_same_shape(other)
        return QMatrix(self.rows, self.cols, [a - b for a, b in zip(self._e, other._e)])

    def __neg__(self) -> "QMatrix":
        return QMatrix(self.rows, self.cols, [-a for a in self._e])

    def __mul__(self, other: "QMatrix") -> "QMatrix":
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        n, m, k = self.rows, self.cols, other.cols
        a, b = self._e, other._e
        out = [Fraction(0)] * (n * k)
        for i in range(n):
            arow = a[i * m : (i + 1) * m]
            orow = i * k
            for t in range(m):
                av = arow[t]
                if av:
                    brow = b[t * k : (t + 1) * k]
                    for j in range(k):
                        if brow[j]:
                            out[orow + j] += av * brow[j]
        return QMatrix(n, k, out)

    def scale(self, factor) -> "QMatrix":
        f = rat(factor)
        return QMatrix(self.rows, self.cols, [f * a for a in self._e])

    def transpose(self) -> "QMatrix":
        return QMatrix(
            self.cols, self.rows,
            [self._e[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    @property
    def T(self) -> "QMatrix":
        return self.transpose()

    def _require_same_shape(self, other: "QMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeError(f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def _require_square(self) -> None:
        if not self.is_square:
            raise ShapeError(f"square matrix required, got {self.rows}x{self.cols}")

    def det(self) -> Fraction:
        """Determinant via Gaussian elimination; det of the 0x0 matrix is 1."""
        self._require_square()
        n = self.rows
        work = self.to_lists()
        sign = 1
        result = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                work[col], work[pivot] = work[pivot], work[col]
                sign = -sign
            pv = work[col][col]
            result *= pv
            prow = work[col]
            for r in range(col + 1, n):
                f = work[r][col]
                if f:
                    f = f / pv
                    row = work[r]
                    for c in range(col, n):
                        row[c] -= f * prow[c]
        return result * sign

    def inv(self) -> "QMatrix":
        """Inverse via Gauss-Jordan elimination; raises SingularMatrixError."""
        self._require_square()
        n = self.rows
        work = [list(self.row(i)) + [Fraction(i == j) for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
            if pivot is None:
                raise SingularMatrixError("matrix is singular")
            if pivot != col:
                work[col], work[pivot] = work[pivot], work[col]
            pv = work[col][col]
            prow = work[col]
            if pv != 1:
                for c in range(col, 2 * n):
                    prow[c] /= pv
            for r in range(n):
                if r != col and work[r][col]:
                    f = work[r][col]
                    row = work[r]
                    for c in range(col, 2 * n):
                        row[c] -= f * prow[c]
        return QMatrix(n, n, [work[i][n + j] for i in range(n) for j in range(n)])

    def _rref(self) -> tuple[list[list[Fraction]], list[int]]:
        """Reduced row echelon form and the pivot column list."""
        work = self.to_lists()
        pivots: list[int] = []
        lead = 0
        for col in range(self.cols):
            pivot = next((r for r in range(lead, self.rows) if work[r][col] != 0), None)
            if pivot is None:
                continue
            work[lead], work[pivot] = work[pivot], work[lead]
            pv = work[lead][col]
            if pv != 1:
                work[lead] = [x / pv for x in work[lead]]
            prow = work[lead]
            for r in range(self.rows):
                if r != lead and work[r][col]:
                    f = work[r][col]
                    work[r] = [a - f * b for a, b in zip(work[r], prow)]
            pivots.append(col)
            lead += 1
            if lead == self.rows:
                break
        return work, pivots

    def rank(self) -> int:
        return len(self._rref()[1])

    def kernel_basis(self) -> "QMatrix":
        """Columns form a basis of the right kernel (cols x nullity)."""
        work, pivots = self._rref()
        free = [c for c in range(self.cols) if c not in pivots]
        cols = []
        for fc in free:
            v = [Fraction(0)] * self.cols
            v[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -work[r][fc]
            cols.append(v)
        return QMatrix(self.cols, len(cols), [cols[j][i] for i in range(self.cols) for j in range(len(cols))])

    def solve(self, rhs: "QMatrix") -> "QMatrix":
        """One solution of self * X = rhs (multiple right-hand sides allowed).

        Raises InconsistentSystemError when the system has no solution.  For
        underdetermined systems the free variables are set to zero.
        """
        if rhs.rows != self.rows:
            raise ShapeError("right-hand side has wrong number of rows")
        aug = QMatrix(
            self.rows, self.cols + rhs.cols,
            [x for i in range(self.rows) for x in (self.row(i) + rhs.row(i))],
        )
        work, pivots = aug._rref()
        if any(p >= self.cols for p in pivots):
            raise InconsistentSystemError("no solution")
        sol = [[Fraction(0)] * rhs.cols for _ in range(self.cols)]
        for r, pc in enumerate(pivots):
            for j in range(rhs.cols):
                sol[pc][j] = work[r][self.cols + j]
        return QMatrix.from_rows(sol)


def kron(a: QMatrix, b: QMatrix) -> QMatrix:
    """Kronecker product; block (i, j) equals a[i, j] * b."""
    out = []
    for i in range(a.rows):
        for bi in range(b.rows):
            for j in range(a.cols):
                aij = a[i, j]
                out.extend(aij * x for x in b.row(bi))
    return QMatrix(a.rows * b.rows, a.cols * b.cols, out)


def direct_sum(a: QMatrix, b: QMatrix) -> QMatrix:
    """Block diagonal sum diag(a, b)."""
    rows, cols = a.rows + b.rows, a.cols + b.cols
    out = [Fraction(0)] * (rows * cols)
    for i in range(a.rows):
        out[i * cols : i * cols + a.cols] = a.row(i)
    for i in range(b.rows):
        start = (a.rows + i) * cols + a.cols
        out[start : start + b.cols] = b.row(i)
    return QMatrix(rows, cols, out)


def block(grid: Sequence[Sequence[QMatrix]]) -> QMatrix:
    """Assemble a block matrix from a grid of conformal blocks."""
    row_heights = [row[0].rows for row in grid]
    col_widths = [blk.cols for blk in grid[0]]
    for row in grid:
        if len(row) != len(col_widths):
            raise ShapeError("ragged block grid")
        for blk, w, h in zip(row, col_widths, [row[0].rows] * len(row)):
            if blk.cols != w or blk.rows != h:
                raise ShapeError("non-conformal blocks")
    out = []
    for row in grid:
        for i in range(row[0].rows):
            for blk in row:
                out.extend(blk.row(i))
    return QMatrix(sum(row_heights), sum(col_widths), out)


#
# Univariate polynomial helpers (coefficient lists, low degree first)
#


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_trim(a: list[Fraction]) -> list[Fraction]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_monic(a: Sequence[Fraction]) -> list[Fraction]:
    a = _poly_trim(list(a))
    lc = a[-1]
    return [x / lc for x in a]


def _poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if b == [Fraction(0)]:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and _poly_trim(r) != [Fraction(0)] and len(_poly_trim(r)) >= len(b):
        r = _poly_trim(r)
        if len(r) < len(b):
            break
        f = r[-1] / b[-1]
        shift = len(r) - len(b)
        q[shift] += f
        for i, x in enumerate(b):
            r[shift + i] -= f * x
        r = _poly_trim(r)
    return _poly_trim(q), _poly_trim(r)


def _poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    while b != [Fraction(0)]:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return _poly_monic(a) if a != [Fraction(0)] else [Fraction(0)]


def _poly_lcm(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    g = _poly_gcd(a, b)
    q, r = _poly_divmod(poly_mul(a, b), g)
    assert r == [Fraction(0)]
    return _poly_monic(q)


def poly_eval_matrix(coeffs: Sequence[Fraction], a: QMatrix) -> QMatrix:
    """Evaluate a univariate polynomial at a square matrix (Horner)."""
    a._require_square()
    n = a.rows
    acc = QMatrix.identity(n).scale(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * a + QMatrix.identity(n).scale(c)
    return acc


def min_poly(a: QMatrix) -> list[Fraction]:
    """Minimal polynomial of a square matrix, monic, low degree first.

    Computed as the lcm of the annihilators of Krylov chains started at the
    standard basis vectors; vectors already inside the span of earlier chains
    are skipped because their annihilators divide the running lcm.
    """
    a._require_square()
    n = a.rows
    if n == 0:
        return [Fraction(1)]
    result = [Fraction(1)]

    # rows of a reduced echelon basis of the union of all chains seen so far
    union: list[list[Fraction]] = []
    union_pivots: list[int] = []

    def reduce_against(v: list[Fraction], rows: list[list[Fraction]], pivots: list[int]):
        w = list(v)
        for row, p in zip(rows, pivots):
            if w[p]:
                f = w[p]
                for c in range(n):
                    w[c] -= f * row[c]
        return w

    def insert(v: list[Fraction], rows: list[list[Fraction]], pivots: list[int]) -> bool:
        w = reduce_against(v, rows, pivots)
        p = next((c for c in range(n) if w[c] != 0), None)
        if p is None:
            return False
        f = w[p]
        rows.append([x / f for x in w])
        pivots.append(p)
        return True

    for start in range(n):
        e = [Fraction(i == start) for i in range(n)]
        if not insert(list(e), union, union_pivots):
            continue
        # Krylov chain from e: find the first linear dependence
        chain = [e]
        chain_rows: list[list[Fraction]] = []
        chain_pivots: list[int] = []
        insert(list(e), chain_rows, chain_pivots)
        v = e
        while True:
            v = [sum((a.row(i)[j] * v[j] for j in range(n) if v[j]), Fraction(0)) for i in range(n)]
            if not insert(list(v), chain_rows, chain_pivots):
                break
            chain.append(v)
            insert(list(v), union, union_pivots)
        k = len(chain)
        basis = QMatrix(n, k, [chain[j][i] for i in range(n) for j in range(k)])
        coeffs = basis.solve(QMatrix.column(v))
        p = [-coeffs[i, 0] for i in range(k)] + [Fraction(1)]
        result = _poly_lcm(result, p)
        if len(result) == n + 1:
            break
    return result


#
# Tuples of square matrices (evaluation points for g noncommuting variables)
#


@dataclass(frozen=True)
class MatTuple:
    """A point X = (X_1, ..., X_g) of g square matrices of common size n."""

    g: int
    n: int
    matrices: tuple[QMatrix, ...]

    def __post_init__(self):
        if len(self.matrices) != self.g:
            raise ShapeError(f"expected {self.g} matrices, got {len(self.matrices)}")
        for m in self.matrices:
            if m.rows != self.n or m.cols != self.n:
                raise ShapeError(f"expected {self.n}x{self.n} blocks")

    def __getitem__(self, j: int) -> QMatrix:
        """1-based access: X[j] is the j-th matrix."""
        if not 1 <= j <= self.g:
            raise IndexError(j)
        return self.matrices[j - 1]


def mat_tuple(matrices: Sequence[QMatrix]) -> MatTuple:
    mats = tuple(matrices)
    n = mats[0].rows if mats else 0
    return MatTuple(len(mats), n, mats)


def scalar_tuple(values: Sequence) -> MatTuple:
    """Embed a scalar point as a tuple of 1x1 matrices."""
    return mat_tuple([QMatrix(1, 1, [rat(v)]) for v in values])


def ampliate(x: MatTuple, times: int) -> MatTuple:
    """Replace each X_j by I_times (x) X_j (a direct sum of `times` copies)."""
    if times < 1:
        raise ValueError("ampliation factor must be >= 1")
    eye = QMatrix.identity(times)
    return MatTuple(x.g, x.n * times, tuple(kron(eye, m) for m in x.matrices))


def tuple_direct_sum(x: MatTuple, y: MatTuple) -> MatTuple:
    if x.g != y.g:
        raise ShapeError("tuples have different lengths")
    return MatTuple(x.g, x.n + y.n, tuple(direct_sum(a, b) for a, b in zip(x.matrices, y.matrices)))


#
# JSON codecs
#


def qmatrix_to_json(m: QMatrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[rat_to_str(x) for x in m.row(i)] for i in range(m.rows)],
    }


def qmatrix_from_json(obj: dict) -> QMatrix:
    rows, cols = obj["rows"], obj["cols"]
    entries = obj["entries"]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ShapeError("entry grid does not match declared shape")
    return QMatrix(rows, cols, [rat(x) for row in entries for x in row])


def mat_tuple_to_json(x: MatTuple) -> dict:
    return {"n": x.n, "g": x.g, "X": [qmatrix_to_json(m) for m in x.matrices]}


def mat_tuple_from_json(obj: dict) -> MatTuple:
    mats = tuple(qmatrix_from_json(m) for m in obj["X"])
    return MatTuple(obj["g"], obj["n"], mats)
