"""Smooth moment polytopes and the circle actions they carry.

Half-spaces use the inward convention ``<normal, x> + offset >= 0``. Edge
directions at a vertex are primitive integer vectors pointing into the
polytope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import factorial, gcd, lcm
from typing import Sequence

from .exact import as_rational, det, kernel, rank, solve_exact
from .fixedpoints import FixedPointDatum, FixedPointSet, normalize_moment


class PolytopeError(ValueError):
    """The half-space data does not describe a bounded, nonempty polytope."""


class NotGenericError(ValueError):
    def __init__(self, edge, vertex):
        self.edge = tuple(edge)
        self.vertex = tuple(vertex)
        super().__init__(
            f"circle is not generic: edge direction {list(self.edge)} at vertex "
            f"{[str(x) for x in self.vertex]} pairs to zero"
        )


@dataclass(frozen=True)
class HalfSpace:
    normal: tuple[int, ...]
    offset: Fraction

    def __post_init__(self):
        normal = tuple(self.normal)
        for a in normal:
            if isinstance(a, bool) or not isinstance(a, int):
                raise PolytopeError(f"normal entries must be integers, got {a!r}")
        if not any(normal):
            raise PolytopeError("zero normal vector")
        if reduce(gcd, (abs(a) for a in normal)) != 1:
            raise PolytopeError(f"normal {list(normal)} is not primitive")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", as_rational(self.offset))

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * xi for a, xi in zip(self.normal, x)), Fraction(0)) + self.offset


@dataclass(frozen=True)
class DelzantPolytope:
    dim: int
    halfspaces: tuple[HalfSpace, ...]

    def __post_init__(self):
        if not 1 <= self.dim <= 4:
            raise PolytopeError(f"polytope dimension must be between 1 and 4, got {self.dim}")
        hs = tuple(self.halfspaces)
        if not hs:
            raise PolytopeError("no half-spaces given")
        for h in hs:
            if len(h.normal) != self.dim:
                raise PolytopeError(f"normal {list(h.normal)} has wrong length for dim {self.dim}")
        object.__setattr__(self, "halfspaces", hs)

    def translate(self, t: Sequence) -> "DelzantPolytope":
        """The polytope ``P + t``."""
        t = [as_rational(x) for x in t]
        return DelzantPolytope(self.dim, tuple(
            HalfSpace(h.normal, h.offset - sum(a * ti for a, ti in zip(h.normal, t)))
            for h in self.halfspaces
        ))


@dataclass(frozen=True)
class Vertex:
    coords: tuple[Fraction, ...]
    active_facets: frozenset[int]
    edge_directions: tuple[tuple[int, ...], ...]
    # facet left by each edge (only meaningful at simple vertices)
    edge_facets: tuple[int | None, ...]

    @property
    def is_simple(self) -> bool:
        return len(self.active_facets) == len(self.coords)


@dataclass(frozen=True)
class GKMGraph:
    polytope: DelzantPolytope
    vertices: tuple[Vertex, ...]

    def vertex_index(self, coords) -> int:
        coords = tuple(as_rational(x) for x in coords)
        for i, v in enumerate(self.vertices):
            if v.coords == coords:
                return i
        raise KeyError(coords)

    def edge_directions(self) -> set[tuple[int, ...]]:
        return {e for v in self.vertices for e in v.edge_directions}


def primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    v = [as_rational(x) for x in v]
    m = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * m) for x in v]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def _dot(a, b) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


def enumerate_vertices(p: DelzantPolytope) -> GKMGraph:
    n = p.dim
    normals = [h.normal for h in p.halfspaces]
    if rank(normals, ncols=n) < n:
        ray = kernel(normals, ncols=n)[0]
        raise PolytopeError(f"polytope is unbounded: contains the line through direction {list(primitive(ray))}")

    found: dict[tuple[Fraction, ...], None] = {}
    for subset in combinations(range(len(p.halfspaces)), n):
        rows = [normals[i] for i in subset]
        sol = solve_exact(rows, [-p.halfspaces[i].offset for i in subset])
        if sol.kind != "unique":
            continue
        x = sol.particular
        if all(h.value(x) >= 0 for h in p.halfspaces):
            found.setdefault(x, None)
    if not found:
        raise PolytopeError("polytope is empty: no feasible vertex")

    vertices = []
    for x in sorted(found, key=lambda c: tuple(reversed(c))):
        active = frozenset(i for i, h in enumerate(p.halfspaces) if h.value(x) == 0)
        edges, left = _edges_at(p, x, active)
        vertices.append(Vertex(x, active, edges, left))
    return GKMGraph(p, tuple(vertices))


def _edges_at(p: DelzantPolytope, x, active):
    n = p.dim
    normals = [p.halfspaces[i].normal for i in sorted(active)]
    edges: dict[tuple[int, ...], int | None] = {}
    for sub in combinations(sorted(active), n - 1):
        rows = [p.halfspaces[i].normal for i in sub]
        ker = kernel(rows, ncols=n)
        if len(ker) != 1:
            continue
        d = primitive(ker[0])
        for cand in (d, tuple(-c for c in d)):
            if all(_dot(a, cand) >= 0 for a in normals):
                break
        else:
            continue
        # walking along the edge must hit another constraint, else it is a ray
        steps = [
            h.value(x) / -_dot(h.normal, cand)
            for h in p.halfspaces
            if _dot(h.normal, cand) < 0
        ]
        if not steps:
            raise PolytopeError(f"polytope is unbounded along direction {list(cand)}")
        leaving = [i for i in sorted(active) if i not in sub]
        edges.setdefault(cand, leaving[0] if len(leaving) == 1 else None)
    return tuple(edges), tuple(edges.values())


def check_delzant(p: DelzantPolytope, graph: GKMGraph | None = None) -> dict:
    """Per-vertex simplicity and unimodularity report."""
    graph = graph or enumerate_vertices(p)
    rows = []
    ok = True
    for i, v in enumerate(graph.vertices):
        simple = v.is_simple and len(v.edge_directions) == p.dim
        smooth = False
        d = None
        if simple:
            d = det(v.edge_directions)
            smooth = abs(d) == 1
        ok = ok and simple and smooth
        rows.append({
            "vertex": i,
            "coords": [str(c) for c in v.coords],
            "facets": len(v.active_facets),
            "simple": simple,
            "smooth": smooth,
            "det": None if d is None else str(d),
        })
    bad = [r["vertex"] for r in rows if not (r["simple"] and r["smooth"])]
    return {"pass": ok, "vertices": rows, "offending": bad}


def _pairing(e, xi) -> int:
    return sum(a * b for a, b in zip(e, xi))


def is_generic(p: DelzantPolytope, xi: Sequence[int], graph: GKMGraph | None = None) -> bool:
    graph = graph or enumerate_vertices(p)
    return all(_pairing(e, xi) != 0 for e in graph.edge_directions())


def _require_generic(graph: GKMGraph, xi):
    if len(xi) != graph.polytope.dim:
        raise ValueError(f"xi has length {len(xi)}, polytope has dim {graph.polytope.dim}")
    for v in graph.vertices:
        for e in v.edge_directions:
            if _pairing(e, xi) == 0:
                raise NotGenericError(e, v.coords)


def vertex_id(i: int) -> str:
    return f"v{i}"


def restrict_to_circle(p: DelzantPolytope, xi: Sequence[int], normalize: bool = True,
                       graph: GKMGraph | None = None) -> FixedPointSet:
    """Fixed-point data of the circle generated by ``xi``.

    The weights at a vertex are the pairings of its edge directions with
    ``xi``, listed in edge order; the moment value is ``<v, xi>``.
    """
    graph = graph or enumerate_vertices(p)
    report = check_delzant(p, graph)
    if not report["pass"]:
        raise PolytopeError(f"polytope is not Delzant at vertices {report['offending']}")
    xi = tuple(int(a) for a in xi)
    _require_generic(graph, xi)
    pts = [
        FixedPointDatum(
            vertex_id(i),
            _dot(xi, v.coords),
            tuple(sorted(_pairing(e, xi) for e in v.edge_directions)),
        )
        for i, v in enumerate(graph.vertices)
    ]
    s = FixedPointSet(2 * p.dim, tuple(pts))
    return normalize_moment(s) if normalize else s


def _affine_dim(points) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank([[a - b for a, b in zip(q, base)] for q in points[1:]])


def _triangulate(face: frozenset[int], coords, incidence, dim: int) -> list[list[int]]:
    """Cone triangulation of a face given by its vertex indices.

    Picks the lowest-indexed vertex of the face as apex and recurses over the
    facets of the face that avoid it.
    """
    if dim == 0:
        return [[min(face)]]
    apex = min(face)
    subfaces = set()
    for facet_vertices in incidence:
        g = face & facet_vertices
        if apex in g or not g or g == face:
            continue
        subfaces.add(frozenset(g))
    simplices = []
    for g in subfaces:
        if _affine_dim([coords[i] for i in sorted(g)]) != dim - 1:
            continue
        for s in _triangulate(g, coords, incidence, dim - 1):
            simplices.append([apex] + s)
    return simplices


def polytope_volume(p: DelzantPolytope, graph: GKMGraph | None = None) -> Fraction:
    """Euclidean volume from a recursive cone triangulation."""
    graph = graph or enumerate_vertices(p)
    coords = [v.coords for v in graph.vertices]
    n = p.dim
    incidence = [
        frozenset(i for i, v in enumerate(graph.vertices) if f in v.active_facets)
        for f in range(len(p.halfspaces))
    ]
    everything = frozenset(range(len(coords)))
    total = Fraction(0)
    for simplex in _triangulate(everything, coords, incidence, n):
        base = coords[simplex[0]]
        m = [[a - b for a, b in zip(coords[i], base)] for i in simplex[1:]]
        total += abs(det(m))
    return total / factorial(n)


def downward_facets(v: Vertex, xi) -> list[int]:
    """Facets left by the edges at ``v`` along which the moment map decreases."""
    return [f for e, f in zip(v.edge_directions, v.edge_facets) if _pairing(e, xi) < 0]
