"""Truncated power series in noncommuting variables.

A series is stored as a map from words (tuples of 1-based letters) to
rational coefficients, discarding everything beyond a fixed total degree.
Inversion uses the geometric series of the proper part, so it is defined
exactly for series with nonzero constant term.  `expand_series` turns any
expression that is regular at the origin into its truncated expansion and
serves as the reference model for the realization arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import Add, Const, Expr, Inv, Mul, Neg, Var, format_expr, max_var

Word = tuple[int, ...]


class NotRegularAtZero(ArithmeticError):
    """An inverted subexpression has zero constant term; carries the culprit."""

    def __init__(self, subexpr: Expr):
        super().__init__(f"subexpression is not invertible at the origin: {format_expr(subexpr)}")
        self.subexpr = subexpr


class FreeSeries:
    """A polynomial truncation of a power series in g noncommuting variables."""

    __slots__ = ("g", "max_deg", "coeffs")

    def __init__(self, g: int, max_deg: int, coeffs: dict[Word, Fraction] | None = None):
        if g < 1 or max_deg < 0:
            raise ValueError("need g >= 1 and max_deg >= 0")
        self.g = g
        self.max_deg = max_deg
        self.coeffs: dict[Word, Fraction] = {}
        if coeffs:
            for word, c in coeffs.items():
                if c and len(word) <= max_deg:
                    self.coeffs[word] = Fraction(c)

    @classmethod
    def const(cls, value, g: int, max_deg: int) -> "FreeSeries":
        return cls(g, max_deg, {(): Fraction(value)})

    @classmethod
    def var(cls, index: int, g: int, max_deg: int) -> "FreeSeries":
        if not 1 <= index <= g:
            raise ValueError(f"variable index {index} outside 1..{g}")
        return cls(g, max_deg, {(index,): Fraction(1)})

    def coeff(self, word: Word) -> Fraction:
        return self.coeffs.get(tuple(word), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeSeries)
            and self.g == other.g
            and self.max_deg == other.max_deg
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"FreeSeries(0; deg<={self.max_deg})"
        parts = []
        for word in sorted(self.coeffs, key=lambda w: (len(w), w)):
            mon = "*".join(f"x{j}" for j in word) or "1"
            parts.append(f"{self.coeffs[word]}*{mon}")
        return f"FreeSeries({' + '.join(parts)}; deg<={self.max_deg})"

    def _common(self, other: "FreeSeries") -> int:
        if self.g != other.g:
            raise ValueError("series over different variable counts")
        return min(self.max_deg, other.max_deg)

    def __add__(self, other: "FreeSeries") -> "FreeSeries":
        deg = self._common(other)
        out = dict(self.coeffs)
        for word, c in other.coeffs.items():
            out[word] = out.get(word, Fraction(0)) + c
        return FreeSeries(self.g, deg, out)

    def __neg__(self) -> "FreeSeries":
        return FreeSeries(self.g, self.max_deg, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other: "FreeSeries") -> "FreeSeries":
        return self + (-other)

    def scale(self, factor) -> "FreeSeries":
        f = Fraction(factor)
        return FreeSeries(self.g, self.max_deg, {w: f * c for w, c in self.coeffs.items()})

    def __mul__(self, other: "FreeSeries") -> "FreeSeries":
        deg = self._common(other)
        out: dict[Word, Fraction] = {}
        for w1, c1 in self.coeffs.items():
            if len(w1) > deg:
                continue
            for w2, c2 in other.coeffs.items():
                if len(w1) + len(w2) <= deg:
                    w = w1 + w2
                    out[w] = out.get(w, Fraction(0)) + c1 * c2
        return FreeSeries(self.g, deg, out)

    def inverse(self) -> "FreeSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        gamma = self.coeff(())
        if gamma == 0:
            raise ZeroDivisionError("series has zero constant term")
        # self = gamma * (1 - u) with u proper; invert by geometric series
        u = FreeSeries(self.g, self.max_deg,
                       {w: -c / gamma for w, c in self.coeffs.items() if w})
        acc = FreeSeries.const(1, self.g, self.max_deg)
        power = u
        for _ in range(self.max_deg):
            if power.is_zero():
                break
            acc = acc + power
            power = power * u
        return acc.scale(1 / gamma)

    def truncate(self, max_deg: int) -> "FreeSeries":
        return FreeSeries(self.g, min(self.max_deg, max_deg), self.coeffs)


def expand_series(e: Expr, max_deg: int, g: int | None = None) -> FreeSeries:
    """Expand an expression about the origin up to total degree max_deg.

    Every inverted subexpression must have a nonzero constant term, i.e. the
    expression must be regular at 0; otherwise NotRegularAtZero is raised.
    """
    if g is None:
        g = max(max_var(e), 1)

    def walk(node: Expr) -> FreeSeries:
        if isinstance(node, Const):
            return FreeSeries.const(node.value, g, max_deg)
        if isinstance(node, Var):
            return FreeSeries.var(node.index, g, max_deg)
        if isinstance(node, Neg):
            return -walk(node.operand)
        if isinstance(node, Add):
            return walk(node.left) + walk(node.right)
        if isinstance(node, Mul):
            return walk(node.left) * walk(node.right)
        inner = walk(node.operand)
        if inner.coeff(()) == 0:
            raise NotRegularAtZero(node.operand)
        return inner.inverse()

    return walk(e)
