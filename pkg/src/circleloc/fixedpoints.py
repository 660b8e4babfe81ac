"""Fixed-point data of a circle action with isolated fixed points."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Iterable

from .exact import as_rational, format_rational


class FixedPointError(ValueError):
    """Structurally malformed fixed-point data."""


@dataclass(frozen=True)
class FixedPointDatum:
    id: str
    moment_value: Fraction
    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "moment_value", as_rational(self.moment_value))
        ws = tuple(self.weights)
        for w in ws:
            if isinstance(w, bool) or not isinstance(w, int):
                raise FixedPointError(f"point {self.id!r}: weight {w!r} is not an integer")
        object.__setattr__(self, "weights", ws)

    @property
    def H(self) -> Fraction:
        return self.moment_value


@dataclass(frozen=True)
class FixedPointSet:
    """All fixed points of the action on a closed manifold of real dimension ``dim``."""

    dim: int
    points: tuple[FixedPointDatum, ...]

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim <= 0 or self.dim % 2:
            raise FixedPointError(f"dim must be an even positive integer, got {self.dim!r}")
        pts = tuple(self.points)
        if not pts:
            raise FixedPointError("a fixed point set needs at least one point")
        seen = set()
        for p in pts:
            if len(p.weights) != self.dim // 2:
                raise FixedPointError(
                    f"point {p.id!r} has {len(p.weights)} weights, expected {self.dim // 2}"
                )
            if p.id in seen:
                raise FixedPointError(f"duplicate point id {p.id!r}")
            seen.add(p.id)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        """Complex dimension, i.e. the number of weights per point."""
        return self.dim // 2

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.points)

    def __getitem__(self, pid: str) -> FixedPointDatum:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def by_moment(self) -> list[FixedPointDatum]:
        return sorted(self.points, key=lambda p: p.moment_value)

    def with_index(self, k: int) -> list[FixedPointDatum]:
        return [p for p in self.points if index_of(p) == k]

    def maximum(self) -> FixedPointDatum:
        """The unique point whose weights are all negative."""
        tops = [p for p in self.points if all(w < 0 for w in p.weights)]
        if len(tops) != 1:
            raise FixedPointError(f"expected exactly one maximum, found {len(tops)}")
        return tops[0]

    def minimum(self) -> FixedPointDatum:
        bottoms = [p for p in self.points if all(w > 0 for w in p.weights)]
        if len(bottoms) != 1:
            raise FixedPointError(f"expected exactly one minimum, found {len(bottoms)}")
        return bottoms[0]

    def is_normalized(self) -> bool:
        try:
            top = self.maximum()
        except FixedPointError:
            return False
        return top.moment_value == 0 and all(p.moment_value <= 0 for p in self.points)

    def replace_points(self, points: Iterable[FixedPointDatum]) -> "FixedPointSet":
        return FixedPointSet(self.dim, tuple(points))


def index_of(p: FixedPointDatum) -> int:
    """Morse index: twice the number of negative weights."""
    return 2 * sum(1 for w in p.weights if w < 0)


def euler_product(p: FixedPointDatum) -> Fraction:
    """Product of all weights; the scalar in ``e_F = (prod w) u^n``."""
    return Fraction(prod(p.weights))


def negative_euler(p: FixedPointDatum) -> Fraction:
    return Fraction(prod(w for w in p.weights if w < 0))


def normalize_moment(s: FixedPointSet) -> FixedPointSet:
    """Shift every moment value so the maximum sits at ``H = 0``."""
    shift = s.maximum().moment_value
    if shift == 0:
        return s
    return s.replace_points(
        FixedPointDatum(p.id, p.moment_value - shift, p.weights) for p in s.points
    )


def localization_sum(s: FixedPointSet, k: int) -> Fraction:
    """``sum_F H(F)**k / prod w(F)``."""
    return sum((p.moment_value ** k / euler_product(p) for p in s.points), Fraction(0))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    residual: Fraction | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "pass": self.passed}
        if self.detail:
            d["detail"] = self.detail
        if self.residual is not None:
            d["residual"] = format_rational(self.residual)
        return d


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks]}


def validate(s: FixedPointSet) -> ValidationReport:
    """Run every necessary condition and collect all failures.

    The vanishing identities ``sum_F H(F)^k / prod w(F) = 0`` for
    ``0 <= k < dim/2`` are the low-degree integrals of powers of the
    equivariant symplectic class.
    """
    rep = ValidationReport()

    zero = [f"{p.id}[{i}]" for p in s.points for i, w in enumerate(p.weights) if w == 0]
    rep.checks.append(Check("nonzero_weights", not zero, ", ".join(zero)))

    by_value: dict[Fraction, list[str]] = {}
    for p in s.points:
        by_value.setdefault(p.moment_value, []).append(p.id)
    clashes = [ids for ids in by_value.values() if len(ids) > 1]
    rep.checks.append(Check(
        "distinct_moment_values",
        not clashes,
        "; ".join("=".join(ids) for ids in clashes),
    ))

    mins = [p.id for p in s.points if p.weights and all(w > 0 for w in p.weights)]
    maxs = [p.id for p in s.points if p.weights and all(w < 0 for w in p.weights)]
    rep.checks.append(Check("unique_minimum", len(mins) == 1, ",".join(mins) or "none"))
    rep.checks.append(Check("unique_maximum", len(maxs) == 1, ",".join(maxs) or "none"))

    if zero:
        rep.checks.append(Check("vanishing_identities", False, "skipped: zero weight present"))
        return rep
    for k in range(s.n):
        r = localization_sum(s, k)
        rep.checks.append(Check(f"vanishing_k{k}", r == 0, residual=None if r == 0 else r))
    return rep


@dataclass(frozen=True)
class BettiVector:
    """Even Betti numbers ``b_0, b_2, ..., b_dim``."""

    b: tuple[int, ...]

    @property
    def dim(self) -> int:
        return 2 * (len(self.b) - 1)

    def __getitem__(self, degree: int) -> int:
        # indexed by cohomological degree
        if degree % 2:
            return 0
        return self.b[degree // 2]

    def is_poincare_dual(self) -> bool:
        return self.b == self.b[::-1]

    def is_connected(self) -> bool:
        return bool(self.b) and self.b[0] == 1 and self.b[-1] == 1

    def reversed(self) -> "BettiVector":
        return BettiVector(self.b[::-1])

    def to_list(self) -> list[int]:
        return list(self.b)


def betti_from_morse(s: FixedPointSet) -> BettiVector:
    counts = [0] * (s.n + 1)
    for p in s.points:
        counts[index_of(p) // 2] += 1
    return BettiVector(tuple(counts))
