"""Exact rational arithmetic: polynomials in ``u`` and Gauss-Jordan solving.

Rationals are :class:`fractions.Fraction`, which already keeps numerator and
denominator reduced with a positive denominator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class DimensionError(ValueError):
    """Raised when a linear system has inconsistent shapes."""


def as_rational(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings; refuse floats."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not _RATIONAL_RE.match(s):
            raise ValueError(f"not an exact rational literal: {x!r}")
        value = Fraction(s)
        return value
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Poly:
    """Univariate polynomial in ``u`` with rational coefficients.

    ``coeffs[i]`` is the coefficient of ``u**i``. Trailing zeros are stripped
    on construction, so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, coeff, power: int) -> "Poly":
        if power < 0:
            raise ValueError("negative power")
        return cls([0] * power + [coeff])

    @property
    def degree(self) -> int:
        """Degree in ``u``; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly([other])
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return poly_mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, u):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            s = format_rational(c)
            terms.append(s if i == 0 else f"{s}*u^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def poly_mul(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return Poly(out)


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of :func:`solve_exact`.

    ``kind`` is ``"unique"``, ``"affine"`` or ``"none"``. ``particular`` is
    ``None`` exactly when ``kind == "none"``.
    """

    kind: str
    particular: tuple[Fraction, ...] | None
    kernel_basis: tuple[tuple[Fraction, ...], ...] = field(default=())

    @property
    def nullity(self) -> int:
        return len(self.kernel_basis)


def _rref(rows: list[list[Fraction]], ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row echelon form.

    Only the first ``ncols`` columns are used for pivots. Returns the pivot
    columns in order.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [x / piv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def solve_exact(matrix: Sequence[Sequence], rhs: Sequence, ncols: int | None = None) -> LinearSolution:
    """Solve ``matrix @ x = rhs`` exactly by Gauss-Jordan elimination.

    The pivot in each column is the first nonzero entry at or below the
    current row. ``ncols`` is needed only when ``matrix`` has no rows.
    """
    rows = [[as_rational(x) for x in row] for row in matrix]
    b = [as_rational(x) for x in rhs]
    if len(b) != len(rows):
        raise DimensionError(f"rhs has length {len(b)} but matrix has {len(rows)} rows")
    if rows:
        n = len(rows[0])
        if any(len(row) != n for row in rows):
            raise DimensionError("matrix rows have different lengths")
        if ncols is not None and ncols != n:
            raise DimensionError(f"ncols={ncols} but rows have length {n}")
    elif ncols is None:
        raise DimensionError("ncols is required for an empty matrix")
    else:
        n = ncols

    aug = [row + [bi] for row, bi in zip(rows, b)]
    pivots = _rref(aug, n)

    free = [c for c in range(n) if c not in set(pivots)]
    kernel = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -aug[i][f]
        kernel.append(tuple(v))

    # the null space is reported even when the system is inconsistent
    if any(row[n] != 0 for row in aug[len(pivots):]):
        return LinearSolution("none", None, tuple(kernel))

    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]

    kind = "unique" if not kernel else "affine"
    return LinearSolution(kind, tuple(x), tuple(kernel))


def kernel(matrix: Sequence[Sequence], ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space of ``matrix``."""
    sol = solve_exact(matrix, [0] * len(matrix), ncols=ncols)
    return list(sol.kernel_basis)


def rank(matrix: Sequence[Sequence], ncols: int | None = None) -> int:
    if not matrix and ncols is None:
        return 0
    n = ncols if ncols is not None else len(matrix[0])
    return n - len(kernel(matrix, ncols=n))


def transpose(matrix: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*matrix)]


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact elimination."""
    a = [[as_rational(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionError("determinant of a non-square matrix")
    sign = 1
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        d *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * d


def mat_vec(matrix: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [sum((as_rational(a) * as_rational(x) for a, x in zip(row, v)), Fraction(0)) for row in matrix]
