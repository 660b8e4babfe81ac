"""Equivariant classes as restriction tuples, localization and canonical classes.

A homogeneous class of degree ``2d`` is stored as one rational per fixed
point: its restriction to ``F`` is ``coeffs[F] * u**d``. For Hamiltonian
actions the restriction map is injective, so the tuple determines the class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .delzant import DelzantPolytope, GKMGraph, _pairing, downward_facets, enumerate_vertices, vertex_id
from .exact import Poly, as_rational, format_rational, solve_exact
from .fixedpoints import FixedPointSet, euler_product, index_of, negative_euler


class ClassError(ValueError):
    pass


class NotNormalizedError(ClassError):
    def __init__(self):
        super().__init__("moment map is not normalized (max H must be 0); call normalize_moment first")


class CanonicalSolveError(ClassError):
    """The canonical-class system was singular or inconsistent."""


@dataclass(frozen=True)
class EquivariantClass:
    upow: int
    coeffs: Mapping[str, Fraction]

    def __post_init__(self):
        if self.upow < 0:
            raise ClassError("u-power must be non-negative")
        object.__setattr__(self, "coeffs", {k: as_rational(v) for k, v in self.coeffs.items()})

    def __hash__(self):
        return hash((self.upow, tuple(sorted(self.coeffs.items()))))

    def __getitem__(self, pid: str) -> Fraction:
        return self.coeffs[pid]

    def restriction(self, pid: str) -> Poly:
        return Poly.monomial(self.coeffs[pid], self.upow)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs.values())

    def _check_same(self, other: "EquivariantClass"):
        if set(self.coeffs) != set(other.coeffs):
            raise ClassError("classes live on different fixed point sets")

    def __add__(self, other: "EquivariantClass") -> "EquivariantClass":
        self._check_same(other)
        if self.upow != other.upow and not (self.is_zero() or other.is_zero()):
            raise ClassError("cannot add classes of different degree")
        upow = other.upow if self.is_zero() else self.upow
        return EquivariantClass(upow, {k: v + other.coeffs[k] for k, v in self.coeffs.items()})

    def scale(self, c) -> "EquivariantClass":
        c = as_rational(c)
        return EquivariantClass(self.upow, {k: c * v for k, v in self.coeffs.items()})

    def shift(self, j: int) -> "EquivariantClass":
        """Multiply by ``u**j``."""
        return EquivariantClass(self.upow + j, self.coeffs)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, EquivariantClass):
            return multiply(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __pow__(self, k: int) -> "EquivariantClass":
        out = EquivariantClass(0, {pid: 1 for pid in self.coeffs})
        for _ in range(k):
            out = multiply(out, self)
        return out

    def to_dict(self) -> dict:
        return {"upow": self.upow, "coeffs": {k: format_rational(v) for k, v in sorted(self.coeffs.items())}}


@dataclass(frozen=True)
class LocalizationValue:
    """``value * u**upow`` in the field of rational functions in ``u``."""

    value: Fraction
    upow: int

    def to_dict(self) -> dict:
        return {"value": format_rational(self.value), "upow": self.upow}


@dataclass(frozen=True)
class CanonicalClass:
    base: str
    cls: EquivariantClass
    certificate: tuple[tuple[str, bool], ...] = field(default=())

    @property
    def certified(self) -> bool:
        return all(ok for _, ok in self.certificate) and len(self.certificate) == 3

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "class": self.cls.to_dict(),
            "certificate": {name: ok for name, ok in self.certificate},
        }


def identity_class(s: FixedPointSet) -> EquivariantClass:
    return EquivariantClass(0, {pid: 1 for pid in s.ids})


def zero_class(s: FixedPointSet, upow: int = 0) -> EquivariantClass:
    return EquivariantClass(upow, {pid: 0 for pid in s.ids})


def multiply(a: EquivariantClass, b: EquivariantClass) -> EquivariantClass:
    a._check_same(b)
    return EquivariantClass(a.upow + b.upow, {k: v * b.coeffs[k] for k, v in a.coeffs.items()})


def symplectic_class(s: FixedPointSet, require_normalized: bool = True) -> EquivariantClass:
    """Equivariant symplectic class: restricts to ``H(F) u`` at each point."""
    if require_normalized and not s.is_normalized():
        raise NotNormalizedError()
    return EquivariantClass(1, {p.id: p.moment_value for p in s.points})


def _check_on(c: EquivariantClass, s: FixedPointSet):
    if set(c.coeffs) != set(s.ids):
        raise ClassError("class and fixed point set have different points")


def integrate(c: EquivariantClass, s: FixedPointSet) -> LocalizationValue:
    """Fixed-point sum of restrictions over equivariant Euler classes."""
    _check_on(c, s)
    total = sum((c.coeffs[p.id] / euler_product(p) for p in s.points), Fraction(0))
    return LocalizationValue(total, c.upow - s.n)


def divisor_class(p: DelzantPolytope, xi: Sequence[int], facet: int,
                  graph: GKMGraph | None = None) -> EquivariantClass:
    """Equivariant Thom class of the toric divisor over facet ``facet``.

    At a vertex on the facet it restricts to the weight of the one edge that
    leaves the facet; elsewhere it vanishes.
    """
    graph = graph or enumerate_vertices(p)
    if not 0 <= facet < len(p.halfspaces):
        raise ClassError(f"facet index {facet} out of range")
    coeffs = {}
    for i, v in enumerate(graph.vertices):
        c = Fraction(0)
        if facet in v.active_facets:
            (e,) = [e for e, f in zip(v.edge_directions, v.edge_facets) if f == facet]
            c = Fraction(_pairing(e, xi))
        coeffs[vertex_id(i)] = c
    return EquivariantClass(1, coeffs)


def flow_up_basis(p: DelzantPolytope, xi: Sequence[int], s: FixedPointSet,
                  graph: GKMGraph | None = None) -> dict[str, EquivariantClass]:
    """One flow-up class per vertex, keyed by fixed point id.

    The class at ``v`` is the product of the divisor classes of the facets
    its downward edges leave. It is supported on the face spanned by the
    upward edges at ``v``, on which ``v`` is the lowest vertex.
    """
    graph = graph or enumerate_vertices(p)
    taus: dict[int, EquivariantClass] = {}
    out = {}
    for i, v in enumerate(graph.vertices):
        cls = identity_class(s)
        for f in downward_facets(v, xi):
            if f not in taus:
                taus[f] = divisor_class(p, xi, f, graph)
            cls = multiply(cls, taus[f])
        out[vertex_id(i)] = cls
    return out


def certify(base: str, cls: EquivariantClass, s: FixedPointSet) -> tuple[tuple[str, bool], ...]:
    """Check the three canonical-class properties for ``cls`` based at ``base``."""
    F = s[base]
    k = index_of(F)
    p1 = all(cls[q.id] == 0 for q in s.points if q.moment_value < F.moment_value)
    p2 = cls.upow == k // 2 and cls[base] == negative_euler(F)
    p3 = all(cls[q.id] == 0 for q in s.points if q.id != base and index_of(q) <= k)
    return (("P1", p1), ("P2", p2), ("P3", p3))


def canonical_classes(basis: Mapping[str, EquivariantClass], s: FixedPointSet) -> dict[str, CanonicalClass]:
    """Correct each flow-up class into the canonical class at its base point.

    For base ``F`` the unknowns are scalars ``q_w`` for points ``w`` above
    ``F`` with ``index(w) <= index(F)``; the equations ask that
    ``flow_F - sum_w q_w u^(...) flow_w`` vanish at those same points.
    """
    out = {}
    for F in s.by_moment():
        k = index_of(F)
        flow = basis[F.id]
        if flow.upow != k // 2:
            raise CanonicalSolveError(f"flow-up class at {F.id} has u-power {flow.upow}, expected {k // 2}")
        ws = [w for w in s.by_moment() if w.moment_value > F.moment_value and index_of(w) <= k]
        cls = flow
        if ws:
            rows = [[basis[w.id][r.id] for w in ws] for r in ws]
            rhs = [flow[r.id] for r in ws]
            sol = solve_exact(rows, rhs)
            if sol.kind != "unique":
                raise CanonicalSolveError(f"canonical system at {F.id} is {sol.kind}")
            for w, q in zip(ws, sol.particular):
                if q:
                    cls = cls - basis[w.id].shift((k - index_of(w)) // 2).scale(q)
        cert = certify(F.id, cls, s)
        if not all(ok for _, ok in cert):
            raise CanonicalSolveError(f"canonical class at {F.id} failed certification: {cert}")
        out[F.id] = CanonicalClass(F.id, cls, cert)
    return {pid: out[pid] for pid in s.ids}


@dataclass
class MembershipReport:
    residuals: list[tuple[int, Fraction]]

    @property
    def passed(self) -> bool:
        return all(r == 0 for _, r in self.residuals)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "residuals": [{"j": j, "residual": format_rational(r)} for j, r in self.residuals],
        }


def membership_necessary(c: EquivariantClass, s: FixedPointSet) -> MembershipReport:
    """Low-degree integrals of ``c * omega^j`` must vanish.

    Necessary for ``c`` to be the restriction of a genuine class, not
    sufficient.
    """
    omega = symplectic_class(s)
    residuals = []
    term = c
    j = 0
    while c.upow + j < s.n:
        residuals.append((j, integrate(term, s).value))
        term = multiply(term, omega)
        j += 1
    return MembershipReport(residuals)
