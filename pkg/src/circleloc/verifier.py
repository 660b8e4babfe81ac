"""Unimodality checks in dimension 8 and the localization contradiction detector."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .cohomology import (
    CanonicalClass,
    EquivariantClass,
    canonical_classes,
    flow_up_basis,
    integrate,
    membership_necessary,
    multiply,
    symplectic_class,
)
from .delzant import (
    DelzantPolytope,
    check_delzant,
    enumerate_vertices,
    polytope_volume,
    restrict_to_circle,
)
from .exact import format_rational, solve_exact, transpose
from .fixedpoints import (
    BettiVector,
    FixedPointSet,
    betti_from_morse,
    euler_product,
    index_of,
    localization_sum,
    validate,
)


class PreconditionError(ValueError):
    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = list(points)


def check_unimodality(b: BettiVector) -> bool:
    if len(b.b) != 5:
        raise ValueError(f"unimodality check is for dimension 8, got a dimension {b.dim} Betti vector")
    return b.b[0] <= b.b[1] <= b.b[2]


@dataclass
class TheoremWitness:
    betti: BettiVector
    rank_2_to_4: int
    unimodal: bool
    index2: list[str]
    index4: list[str]
    # details[i][j] = restriction of the i-th index-2 canonical class to the j-th index-4 point
    details: list[list[Fraction]]

    @property
    def full_rank(self) -> bool:
        return self.rank_2_to_4 == self.betti.b[1]

    def to_dict(self) -> dict:
        return {
            "betti": self.betti.to_list(),
            "rank_2_to_4": self.rank_2_to_4,
            "unimodal": self.unimodal,
            "index2": self.index2,
            "index4": self.index4,
            "matrix": [[format_rational(x) for x in row] for row in self.details],
        }


def restriction_rank_2_to_4(canon: Mapping[str, CanonicalClass], s: FixedPointSet) -> TheoremWitness:
    """Rank of the restriction of index-2 canonical classes to index-4 points.

    A nonzero left-kernel vector would be a class supported away from the
    index-4 points, which localization rules out; so the rank equals ``b_2``.
    """
    if s.dim != 8:
        raise ValueError("the index 2 -> 4 witness is defined for dimension 8")
    idx2 = [p.id for p in s.points if index_of(p) == 2]
    idx4 = [p.id for p in s.points if index_of(p) == 4]
    matrix = [[canon[a].cls[f] for f in idx4] for a in idx2]
    if idx2:
        left_kernel = solve_exact(transpose(matrix), [0] * len(idx4), ncols=len(idx2)) if idx4 else None
        nullity = left_kernel.nullity if left_kernel else len(idx2)
        r = len(idx2) - nullity
    else:
        r = 0
    betti = betti_from_morse(s)
    return TheoremWitness(betti, r, check_unimodality(betti), idx2, idx4, matrix)


@dataclass
class ContradictionCertificate:
    alpha_coeffs: list[Fraction]
    alpha_restrictions: dict[str, Fraction]
    beta_restrictions: dict[str, Fraction]
    localization_terms: dict[str, Fraction]
    total: Fraction
    index: dict[str, int]

    def terms_nonnegative(self) -> bool:
        return all(t >= 0 for pid, t in self.localization_terms.items() if self.index[pid] in (2, 6))

    def readd(self) -> Fraction:
        return sum(self.localization_terms.values(), Fraction(0))

    def to_dict(self) -> dict:
        fmt = lambda d: {k: format_rational(v) for k, v in sorted(d.items())}
        return {
            "status": "contradiction",
            "alpha_coeffs": [format_rational(c) for c in self.alpha_coeffs],
            "alpha_restrictions": fmt(self.alpha_restrictions),
            "beta_upow": 3,
            "beta_restrictions": fmt(self.beta_restrictions),
            "localization_terms": fmt(self.localization_terms),
            "total": format_rational(self.total),
        }


NO_CONTRADICTION = "no contradiction"


def kernel_combination(s: FixedPointSet, claimed: Sequence[EquivariantClass]) -> list[tuple[Fraction, ...]]:
    """Coefficient vectors ``c`` with ``sum c_i claimed_i`` vanishing at every index-4 point."""
    idx4 = [p.id for p in s.points if index_of(p) == 4]
    rows = [[cl[f] for cl in claimed] for f in idx4]
    return list(solve_exact(rows, [0] * len(rows), ncols=len(claimed)).kernel_basis)


def contradiction_certificate(s: FixedPointSet, claimed: Sequence[EquivariantClass], c: Sequence):
    """Localize ``beta = alpha^2 * omega`` for ``alpha = sum c_i claimed_i``.

    ``beta`` has u-power 3, below half the dimension, so its integral must
    vanish. With the maximum normalized to ``H = 0`` every term at an index
    2 or 6 point is non-negative, so a positive total means the claimed
    restriction tuples are not restrictions of genuine classes.

    Returns a :class:`ContradictionCertificate` or :data:`NO_CONTRADICTION`.
    """
    if s.dim != 8:
        raise ValueError("the contradiction detector is defined for dimension 8")
    if len(c) != len(claimed):
        raise ValueError(f"{len(c)} coefficients for {len(claimed)} claimed classes")
    omega = symplectic_class(s)
    for cl in claimed:
        if cl.upow != 1:
            raise PreconditionError(f"claimed classes must have u-power 1, got {cl.upow}")
        if set(cl.coeffs) != set(s.ids):
            raise PreconditionError("claimed class is not defined on the fixed point set")

    c = [Fraction(x) for x in c]
    alpha = EquivariantClass(1, {p.id: sum((ci * cl[p.id] for ci, cl in zip(c, claimed)), Fraction(0))
                                 for p in s.points})
    bad = [p.id for p in s.points if index_of(p) == 4 and alpha[p.id] != 0]
    if bad:
        raise PreconditionError(
            "alpha does not vanish at index-4 points: "
            + ", ".join(f"{pid}={format_rational(alpha[pid])}" for pid in bad),
            bad,
        )
    bad = [p.id for p in s.points if index_of(p) == 0 and alpha[p.id] != 0]
    if bad:
        raise PreconditionError(f"alpha does not vanish at the minimum {bad[0]}", bad)

    beta = multiply(multiply(alpha, alpha), omega)
    assert beta.upow == 3 and beta.upow < s.n
    terms = {p.id: beta[p.id] / euler_product(p) for p in s.points}
    total = integrate(beta, s).value
    if total == 0:
        return NO_CONTRADICTION
    return ContradictionCertificate(
        alpha_coeffs=c,
        alpha_restrictions=dict(alpha.coeffs),
        beta_restrictions=dict(beta.coeffs),
        localization_terms=terms,
        total=total,
        index={p.id: index_of(p) for p in s.points},
    )


def sign_lemma_check(s: FixedPointSet) -> dict:
    """The Euler product is negative at every point of index 2 or 6."""
    if s.dim != 8:
        raise ValueError("sign lemma is stated for dimension 8")
    rows = []
    for p in s.points:
        k = index_of(p)
        if k not in (2, 6):
            continue
        e = euler_product(p)
        rows.append({"point": p.id, "index": k, "euler": format_rational(e), "pass": e < 0})
    return {"pass": all(r["pass"] for r in rows), "points": rows}


def duality_check(p: DelzantPolytope, xi: Sequence[int], graph=None) -> dict:
    graph = graph or enumerate_vertices(p)
    up = betti_from_morse(restrict_to_circle(p, xi, graph=graph))
    down = betti_from_morse(restrict_to_circle(p, [-a for a in xi], graph=graph))
    ok = up == down.reversed() and up.is_poincare_dual()
    return {"pass": ok, "betti_xi": up.to_list(), "betti_minus_xi": down.to_list()}


@dataclass
class Stage:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, **self.details}


def full_report(p: DelzantPolytope, xi: Sequence[int]) -> dict:
    """Run every stage on one polytope and circle and collect the results.

    A stage that raises is recorded as failed with its error message and
    the later stages that depend on it are not run.
    """
    stages: list[Stage] = []

    def run(name, fn):
        try:
            passed, details = fn()
        except Exception as exc:  # reported, not propagated
            stages.append(Stage(name, False, {"error": f"{type(exc).__name__}: {exc}"}))
            return False
        stages.append(Stage(name, passed, details))
        return passed

    ctx: dict = {}

    def ingest():
        g = enumerate_vertices(p)
        ctx["graph"] = g
        rep = check_delzant(p, g)
        return rep["pass"], {"vertices": len(g.vertices), "offending": rep["offending"]}

    def restrict():
        ctx["raw"] = restrict_to_circle(p, xi, normalize=False, graph=ctx["graph"])
        ctx["s"] = restrict_to_circle(p, xi, graph=ctx["graph"])
        return True, {"points": len(ctx["s"])}

    def check():
        rep = validate(ctx["s"])
        return rep.passed, rep.to_dict()

    def volume():
        n = p.dim
        lhs = localization_sum(ctx["raw"], n)
        vol = polytope_volume(p, ctx["graph"])
        rhs = factorial(n) * vol
        return lhs == rhs, {"localization": format_rational(lhs), "volume": format_rational(vol),
                            "n_factorial_volume": format_rational(rhs)}

    def canonical():
        s = ctx["s"]
        basis = flow_up_basis(p, xi, s, ctx["graph"])
        canon = canonical_classes(basis, s)
        ctx["canon"] = canon
        failures = [pid for pid, cc in canon.items()
                    if not cc.certified or not membership_necessary(cc.cls, s).passed]
        return not failures, {"classes": len(canon), "failures": failures}

    def integrals():
        s = ctx["s"]
        omega = symplectic_class(s)
        vals = {}
        ok = True
        for j in range(s.n + 1):
            v = integrate(omega ** j, s)
            vals[f"omega^{j}"] = v.to_dict()
            if j < s.n:
                ok = ok and v.value == 0
        return ok, {"integrals": vals}

    def witness():
        w = restriction_rank_2_to_4(ctx["canon"], ctx["s"])
        return w.full_rank and w.unimodal, w.to_dict()

    def signs():
        rep = sign_lemma_check(ctx["s"])
        return rep["pass"], rep

    def duality():
        rep = duality_check(p, xi, ctx["graph"])
        return rep["pass"], rep

    # each stage runs only if the context it reads was produced upstream
    pipeline = [
        ("ingest", ingest, ()),
        ("restrict", restrict, ("graph",)),
        ("validate", check, ("s",)),
        ("volume_identity", volume, ("raw",)),
        ("canonical", canonical, ("s",)),
        ("integrals", integrals, ("s",)),
    ]
    if p.dim == 4:
        pipeline += [("witness", witness, ("canon",)), ("sign_lemma", signs, ("s",))]
    pipeline.append(("duality", duality, ("graph", "s")))

    for name, fn, needs in pipeline:
        missing = [k for k in needs if k not in ctx]
        if missing:
            stages.append(Stage(name, False, {"error": "skipped: an upstream stage failed"}))
            continue
        run(name, fn)

    return {
        "xi": list(xi),
        "dim": 2 * p.dim,
        "stages": [st.to_dict() for st in stages],
        "pass": all(st.passed for st in stages),
    }
