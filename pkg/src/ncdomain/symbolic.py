"""Commutative polynomial and rational-function arithmetic over the rationals.

This layer backs the extended-domain computations: substituting an n x n
matrix of independent commuting indeterminates for each free variable turns
a noncommutative expression into an n x n matrix of commutative rational
functions.  Membership of a concrete matrix point in the extended domain at
size n is then a nonvanishing test on the least common denominator of those
entries (in lowest terms, so spurious factors of any particular
representative cancel first).

Polynomials are sparse (exponent tuple -> coefficient) and ordered by
graded lexicographic order with earlier variables larger.  The gcd is the
subresultant polynomial-remainder sequence with content/primitive-part
recursion on the lowest variable present, which keeps intermediate
coefficient growth polynomial.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .expr import Add, Const, Expr, Inv, Mul, Neg, Var, format_expr, max_var
from .linalg import MatTuple, ampliate, rat, rat_to_str


class ExactDivisionError(ArithmeticError):
    """Polynomial division that was required to be exact left a remainder."""


class SymbolicSizeLimit(RuntimeError):
    """A symbolic computation exceeded the configured variable or degree cap."""


class DegenerateAtSizeN(ArithmeticError):
    """A subexpression inverse is singular at generic matrices of size n.

    Generic matrices are Zariski-dense, so the representative is undefined at
    every size-n point and its generic evaluation at this size does not exist.
    """

    def __init__(self, n: int, subexpr: Expr):
        super().__init__(
            f"{format_expr(subexpr)} is singular at generic {n}x{n} matrices"
        )
        self.n = n
        self.subexpr = subexpr


class NotFactored(ValueError):
    """The polynomial did not split over the requested block structure."""


#
# Sparse multivariate polynomials
#


def _grlex_key(mono: tuple[int, ...]) -> tuple:
    return (sum(mono), mono)


class MPoly:
    """A polynomial in ``nvars`` variables with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Fraction]):
        self.nvars = nvars
        self.terms = {m: c for m, c in terms.items() if c}

    @classmethod
    def const(cls, nvars: int, value) -> "MPoly":
        v = rat(value)
        return cls(nvars, {(0,) * nvars: v} if v else {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MPoly":
        if not 0 <= i < nvars:
            raise IndexError(i)
        mono = tuple(1 if k == i else 0 for k in range(nvars))
        return cls(nvars, {mono: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def vars_present(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            out.update(i for i, e in enumerate(m) if e)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    __hash__ = None  # mutable dict inside; compare by value only

    def __add__(self, other: "MPoly") -> "MPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return MPoly(self.nvars, out)

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other: "MPoly") -> "MPoly":
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return MPoly(self.nvars, out)

    def scale(self, factor) -> "MPoly":
        f = rat(factor)
        return MPoly(self.nvars, {m: f * c for m, c in self.terms.items()})

    def __pow__(self, k: int) -> "MPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def leading_monomial(self) -> tuple[int, ...]:
        if self.is_zero():
            raise ValueError("the zero polynomial has no leading term")
        return max(self.terms, key=_grlex_key)

    def leading_coeff(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def monic(self) -> "MPoly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading_coeff())

    def degree_in(self, v: int) -> int:
        return max((m[v] for m in self.terms), default=0)

    def coeff_in(self, v: int, k: int) -> "MPoly":
        """The coefficient of x_v^k, as a polynomial with x_v absent."""
        out = {}
        for m, c in self.terms.items():
            if m[v] == k:
                out[m[:v] + (0,) + m[v + 1 :]] = c
        return MPoly(self.nvars, out)

    def times_var_pow(self, v: int, k: int) -> "MPoly":
        return MPoly(
            self.nvars,
            {m[:v] + (m[v] + k,) + m[v + 1 :]: c for m, c in self.terms.items()},
        )

    def eval(self, point: Sequence[Fraction]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates")
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term *= x**e
            total += term
        return total

    def substitute(self, assignments: Mapping[int, Fraction]) -> "MPoly":
        """Plug values in for a subset of the variables."""
        out: dict[tuple[int, ...], Fraction] = {}
        for m, c in self.terms.items():
            coeff = c
            mono = list(m)
            for v, val in assignments.items():
                if mono[v]:
                    coeff *= rat(val) ** mono[v]
                    mono[v] = 0
            key = tuple(mono)
            out[key] = out.get(key, Fraction(0)) + coeff
        return MPoly(self.nvars, out)

    def to_str(self, names: Sequence[str]) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[m]
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(m)
                if e
            ]
            if not factors:
                body = rat_to_str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([rat_to_str(abs(c))] + factors)
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"MPoly({self.to_str([f'v{i}' for i in range(self.nvars)])})"


def mpoly_divexact(p: MPoly, q: MPoly) -> MPoly:
    """The quotient p / q when q divides p exactly (ExactDivisionError if not)."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    quotient = MPoly.const(p.nvars, 0)
    rest = p
    lm, lc = q.leading_monomial(), q.leading_coeff()
    while not rest.is_zero():
        m = rest.leading_monomial()
        diff = tuple(a - b for a, b in zip(m, lm))
        if any(e < 0 for e in diff):
            raise ExactDivisionError("division is not exact")
        t = MPoly(p.nvars, {diff: rest.terms[m] / lc})
        quotient = quotient + t
        rest = rest - t * q
    return quotient


def _content_in(p: MPoly, v: int) -> MPoly:
    cont = MPoly.const(p.nvars, 0)
    for k in range(p.degree_in(v) + 1):
        c = p.coeff_in(v, k)
        if not c.is_zero():
            cont = mpoly_gcd(cont, c)
    return cont


def _prem(a: MPoly, b: MPoly, v: int) -> MPoly:
    """Pseudo-remainder: lc_v(b)^(deg a - deg b + 1) * a modulo b, in x_v."""
    da, db = a.degree_in(v), b.degree_in(v)
    lb = b.coeff_in(v, db)
    r = a
    steps = 0
    while not r.is_zero() and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lr = r.coeff_in(v, dr)
        r = r * lb - (b * lr).times_var_pow(v, dr - db)
        steps += 1
    for _ in range(da - db + 1 - steps):
        r = r * lb
    return r


def mpoly_gcd(p: MPoly, q: MPoly) -> MPoly:
    """Greatest common divisor, normalized to leading coefficient 1."""
    if p.nvars != q.nvars:
        raise ValueError("polynomials live in different rings")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    if p.is_constant() or q.is_constant():
        return MPoly.const(p.nvars, 1)
    v = min(p.vars_present() | q.vars_present())
    if p.degree_in(v) == 0:
        return mpoly_gcd(p, _content_in(q, v)).monic()
    if q.degree_in(v) == 0:
        return mpoly_gcd(_content_in(p, v), q).monic()
    cp, cq = _content_in(p, v), _content_in(q, v)
    a, b = mpoly_divexact(p, cp), mpoly_divexact(q, cq)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    # subresultant remainder sequence on the primitive parts
    one = MPoly.const(p.nvars, 1)
    g, h = one, one
    pp_gcd = one
    while True:
        delta = a.degree_in(v) - b.degree_in(v)
        r = _prem(a, b, v)
        if r.is_zero():
            pp_gcd = mpoly_divexact(b, _content_in(b, v))
            break
        if r.degree_in(v) == 0:
            break  # primitive parts are coprime in x_v
        a, b = b, mpoly_divexact(r, g * h**delta)
        g = a.coeff_in(v, a.degree_in(v))
        h = g if delta == 1 else (h if delta == 0 else mpoly_divexact(g**delta, h ** (delta - 1)))
    return (mpoly_gcd(cp, cq) * pp_gcd).monic()


def mpoly_lcm(p: MPoly, q: MPoly) -> MPoly:
    if p.is_zero() or q.is_zero():
        return MPoly.const(p.nvars, 0)
    return mpoly_divexact(p * q, mpoly_gcd(p, q)).monic()


def mpoly_det(grid: Sequence[Sequence[MPoly]]) -> MPoly:
    """Determinant of a square polynomial matrix (fraction-free elimination)."""
    n = len(grid)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = grid[0][0].nvars
    if any(len(row) != n for row in grid):
        raise ValueError("matrix must be square")
    m = [list(row) for row in grid]
    sign = 1
    prev = MPoly.const(nvars, 1)
    for k in range(n - 1):
        pivot_row = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
        if pivot_row is None:
            return MPoly.const(nvars, 0)
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = mpoly_divexact(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev)
            m[i][k] = MPoly.const(nvars, 0)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


#
# Rational functions
#


class MRatFn:
    """A quotient of MPolys, kept coprime with a leading-coefficient-1 denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = num, MPoly.const(num.nvars, 1)
        else:
            common = mpoly_gcd(num, den)
            if not (common.is_constant() and common.constant_value() == 1):
                num = mpoly_divexact(num, common)
                den = mpoly_divexact(den, common)
            lc = den.leading_coeff()
            if lc != 1:
                num = num.scale(1 / lc)
                den = den.scale(1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, nvars: int, value) -> "MRatFn":
        return cls(MPoly.const(nvars, value), MPoly.const(nvars, 1))

    @classmethod
    def from_poly(cls, p: MPoly) -> "MRatFn":
        return cls(p, MPoly.const(p.nvars, 1))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MRatFn)
            and self.num == other.num
            and self.den == other.den
        )

    __hash__ = None

    def __add__(self, other: "MRatFn") -> "MRatFn":
        return MRatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "MRatFn":
        return MRatFn(-self.num, self.den)

    def __sub__(self, other: "MRatFn") -> "MRatFn":
        return self + (-other)

    def __mul__(self, other: "MRatFn") -> "MRatFn":
        return MRatFn(self.num * other.num, self.den * other.den)

    def inverse(self) -> "MRatFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return MRatFn(self.den, self.num)

    def eval(self, point: Sequence[Fraction]) -> Fraction:
        d = self.den.eval(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.eval(point) / d

    def max_degree(self) -> int:
        return max(self.num.total_degree(), self.den.total_degree())

    def to_str(self, names: Sequence[str]) -> str:
        n = self.num.to_str(names)
        if self.den.is_constant():
            return n
        return f"({n}) / ({self.den.to_str(names)})"

    def __repr__(self) -> str:
        return f"MRatFn({self.to_str([f'v{i}' for i in range(self.num.nvars)])})"


#
# Generic-matrix evaluation
#


@dataclass(frozen=True)
class SymbolicLimits:
    """Caps on symbolic work; exceeding one raises SymbolicSizeLimit."""

    max_vars: int = 16
    max_degree: int = 24


def var_index(j: int, k: int, l: int, n: int) -> int:
    """Flat index of the (k, l) entry of the j-th generic matrix (all 1-based)."""
    return ((j - 1) * n + (k - 1)) * n + (l - 1)


def var_name(j: int, k: int, l: int) -> str:
    return f"xi_{j}_{k}_{l}"


def generic_var_names(g: int, n: int) -> list[str]:
    return [
        var_name(j, k, l)
        for j in range(1, g + 1)
        for k in range(1, n + 1)
        for l in range(1, n + 1)
    ]


@dataclass(frozen=True)
class GenericEvaluation:
    """An expression evaluated at generic n x n matrices.

    entries[k][l] is the (k, l) entry as a reduced rational function in the
    g * n^2 variables xi_j_k_l; denom_lcm is the least common denominator,
    whose nonvanishing at a concrete point certifies extended-domain
    membership at this size.
    """

    g: int
    n: int
    entries: tuple[tuple[MRatFn, ...], ...]
    denom_lcm: MPoly

    @property
    def nvars(self) -> int:
        return self.g * self.n * self.n

    def names(self) -> list[str]:
        return generic_var_names(self.g, self.n)


def _point_coords(x: MatTuple) -> list[Fraction]:
    return [
        x.matrices[j][k, l]
        for j in range(x.g)
        for k in range(x.n)
        for l in range(x.n)
    ]


Matrix = list[list[MRatFn]]


def _m_identity(nvars: int, n: int, value=1) -> Matrix:
    return [
        [MRatFn.const(nvars, value if i == j else 0) for j in range(n)]
        for i in range(n)
    ]


def _m_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _m_neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def _m_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = a[i][0] * b[0][j]
            for k in range(1, n):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def _m_inv(a: Matrix, nvars: int) -> Matrix | None:
    """Gauss-Jordan over the rational-function field; None when singular."""
    n = len(a)
    work = [list(row) + _m_identity(nvars, n)[i] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not work[r][col].is_zero()), None)
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        inv_p = work[col][col].inverse()
        work[col] = [entry * inv_p for entry in work[col]]
        for r in range(n):
            if r != col and not work[r][col].is_zero():
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def generic_eval(e: Expr, g: int, n: int, limits: SymbolicLimits = SymbolicLimits()) -> GenericEvaluation:
    """Evaluate e at generic n x n matrices over g variables."""
    if g < max_var(e):
        raise ValueError(f"expression uses more than {g} variables")
    nvars = g * n * n
    if nvars > limits.max_vars:
        raise SymbolicSizeLimit(
            f"{nvars} matrix-entry variables exceed the cap of {limits.max_vars}"
        )

    def check(m: Matrix) -> Matrix:
        worst = max(entry.max_degree() for row in m for entry in row)
        if worst > limits.max_degree:
            raise SymbolicSizeLimit(
                f"intermediate degree {worst} exceeds the cap of {limits.max_degree}"
            )
        return m

    memo: dict[int, tuple[Expr, Matrix]] = {}

    def walk(node: Expr) -> Matrix:
        hit = memo.get(id(node))
        if hit is not None and hit[0] is node:
            return hit[1]
        if isinstance(node, Const):
            result = _m_identity(nvars, n, node.value)
        elif isinstance(node, Var):
            result = [
                [
                    MRatFn.from_poly(
                        MPoly.variable(nvars, var_index(node.index, k, l, n))
                    )
                    for l in range(1, n + 1)
                ]
                for k in range(1, n + 1)
            ]
        elif isinstance(node, Neg):
            result = _m_neg(walk(node.operand))
        elif isinstance(node, Add):
            result = check(_m_add(walk(node.left), walk(node.right)))
        elif isinstance(node, Mul):
            result = check(_m_mul(walk(node.left), walk(node.right)))
        else:
            assert isinstance(node, Inv)
            inverse = _m_inv(walk(node.operand), nvars)
            if inverse is None:
                raise DegenerateAtSizeN(n, node.operand)
            result = check(inverse)
        memo[id(node)] = (node, result)
        return result

    entries = walk(e)
    lcm = MPoly.const(nvars, 1)
    for row in entries:
        for entry in row:
            lcm = mpoly_lcm(lcm, entry.den)
    return GenericEvaluation(g, n, tuple(tuple(row) for row in entries), lcm)


def edom_member(e: Expr, x: MatTuple, limits: SymbolicLimits = SymbolicLimits()) -> bool:
    """Whether x lies in the extended domain of e at size n = x.n.

    True iff the least common denominator of the generic evaluation at this
    size does not vanish at x.  Raises DegenerateAtSizeN when the expression
    cannot be evaluated at generic matrices of this size at all.
    """
    g = max(max_var(e), x.g)
    if x.g < g:
        raise ValueError("point has fewer coordinates than the expression uses")
    ev = generic_eval(e, g, x.n, limits)
    return ev.denom_lcm.eval(_point_coords(x)) != 0


def ampliation_probe(
    e: Expr, x: MatTuple, levels: int, limits: SymbolicLimits = SymbolicLimits()
) -> list[bool]:
    """Extended-domain membership of I_l (x) x for l = 1..levels.

    A point can belong to the extended domain while some ampliation of it
    does not; the all-True outcome over every l is what membership in the
    stable extended domain would require.  DegenerateAtSizeN at a level is
    reported as False for that level.
    """
    out = []
    for level in range(1, levels + 1):
        point = ampliate(x, level)
        try:
            out.append(edom_member(e, point, limits))
        except DegenerateAtSizeN:
            out.append(False)
    return out


#
# Direct-sum structure of denominators
#


def _block_split_indices(g: int, n1: int, n2: int) -> tuple[list[int], list[int], list[int]]:
    """Variable indices at size n = n1 + n2: off-diagonal-block, first block,
    second block (in the flat xi ordering)."""
    n = n1 + n2
    off, first, second = [], [], []
    for j in range(1, g + 1):
        for k in range(1, n + 1):
            for l in range(1, n + 1):
                idx = var_index(j, k, l, n)
                if (k <= n1) != (l <= n1):
                    off.append(idx)
                elif k <= n1:
                    first.append(idx)
                else:
                    second.append(idx)
    return off, first, second


def direct_sum_factorization(
    q: MPoly, g: int, n1: int, n2: int, seed: int = 0
) -> tuple[MPoly, MPoly]:
    """Split q(Y' (+) Y'') into factors p1(Y') * p2(Y'') after zeroing the
    off-diagonal blocks.

    p1 is returned with leading coefficient 1 and p2 carries the remaining
    scalar, so q restricted to block-diagonal points equals p1 * p2 exactly.
    Raises NotFactored when no such splitting exists.
    """
    n = n1 + n2
    if q.nvars != g * n * n:
        raise ValueError(f"expected a polynomial in {g * n * n} variables")
    off, first, second = _block_split_indices(g, n1, n2)
    q0 = q.substitute({i: Fraction(0) for i in off})
    if q0.is_zero():
        raise NotFactored("polynomial vanishes on all block-diagonal points")

    def candidates():
        yield {i: Fraction(0) for i in second}
        # second block = identity matrices
        eye = {}
        for j in range(1, g + 1):
            for k in range(n1 + 1, n + 1):
                for l in range(n1 + 1, n + 1):
                    eye[var_index(j, k, l, n)] = Fraction(1 if k == l else 0)
        yield eye
        rng = random.Random(seed)
        for _ in range(32):
            yield {i: Fraction(rng.randint(-3, 3)) for i in second}

    for assignment in candidates():
        p1 = q0.substitute(assignment)
        if p1.is_zero():
            continue
        p1 = p1.monic()
        try:
            p2 = mpoly_divexact(q0, p1)
        except ExactDivisionError:
            raise NotFactored("restriction to block-diagonal points does not split")
        if p2.vars_present() & set(first):
            raise NotFactored("cofactor still involves first-block variables")
        return p1, p2
    raise NotFactored("no evaluation point separated the second block")
