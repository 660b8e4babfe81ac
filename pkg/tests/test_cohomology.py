from fractions import Fraction as Q
from itertools import combinations_with_replacement

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from circleloc.cohomology import (
    ClassError,
    EquivariantClass,
    NotNormalizedError,
    canonical_classes,
    divisor_class,
    flow_up_basis,
    identity_class,
    integrate,
    membership_necessary,
    multiply,
    symplectic_class,
    zero_class,
)
from circleloc.delzant import restrict_to_circle
from circleloc.fixedpoints import index_of, negative_euler

from conftest import POLYTOPES, XI, XI_ALT, load

SUM_FACET = 4  # {1 - sum x_i >= 0} in simplex4.json
IDS = ("v0", "v1", "v2", "v3", "v4")


def tup(c):
    return [c[i] for i in sorted(c.coeffs)]


def test_multiply_unit(cp4):
    a = symplectic_class(cp4)
    assert multiply(a, identity_class(cp4)) == a


def test_omega_squared(cp4):
    sq = multiply(symplectic_class(cp4), symplectic_class(cp4))
    assert sq.upow == 2
    assert tup(sq) == [h * h for h in (-8, -7, -6, -4, 0)]


def test_divisor_class_simplex(simplex, cp4):
    tau = divisor_class(simplex, XI, SUM_FACET)
    assert tau.upow == 1
    assert tup(tau) == [0, -1, -2, -4, -8]
    assert tup(multiply(tau, tau)) == [0, 1, 4, 16, 64]
    # degree 2 < 4: the integral is zero
    v = integrate(multiply(tau, tau), cp4)
    assert v.value == 0 and v.upow == -2


def test_divisor_class_coordinate_facet(simplex):
    tau = divisor_class(simplex, XI, 0)  # {x1 >= 0}
    assert tau["v1"] == 0
    assert all(tau[pid] != 0 for pid in ("v0", "v2", "v3", "v4"))


def test_mismatched_sets(cp4, cp1):
    with pytest.raises(ClassError):
        multiply(identity_class(cp4), identity_class(cp1))
    with pytest.raises(ClassError):
        integrate(identity_class(cp1), cp4)


def test_symplectic_class(cp4, cp4_raw):
    assert tup(symplectic_class(cp4)) == [-8, -7, -6, -4, 0]
    with pytest.raises(NotNormalizedError):
        symplectic_class(cp4_raw)


def test_symplectic_class_cp1(cp1):
    from circleloc.fixedpoints import normalize_moment
    s = normalize_moment(cp1)
    w = symplectic_class(s)
    assert (w["S"], w["N"]) == (-1, 0)


def test_integrate_identity(cp4):
    v = integrate(identity_class(cp4), cp4)
    assert v.value == Q(1, 64) - Q(1, 21) + Q(1, 24) - Q(1, 96) + Q(1, 1344) == 0
    assert v.upow == -4


def test_integrate_top_power(cp4_raw):
    w = symplectic_class(cp4_raw, require_normalized=False)
    v = integrate(w ** 4, cp4_raw)
    hand = Q(0) - Q(1, 21) + Q(16, 24) - Q(256, 96) + Q(4096, 1344)
    assert v.value == hand == 1
    assert v.upow == 0


def test_integrate_zero(cp4):
    assert integrate(zero_class(cp4, 3), cp4).value == 0


cp4_coeffs = st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=5, max_size=5)


@given(cp4_coeffs, cp4_coeffs, st.fractions(min_value=-9, max_value=9, max_denominator=5), st.integers(0, 5))
def test_integrate_linear(a, b, lam, d):
    from conftest import load as _load
    s = restrict_to_circle(_load("simplex4"), XI)
    A = EquivariantClass(d, dict(zip(IDS, a)))
    B = EquivariantClass(d, dict(zip(IDS, b)))
    lhs = integrate(A + B.scale(lam), s)
    assert lhs.value == integrate(A, s).value + lam * integrate(B, s).value
    assert lhs.upow == d - 4


def test_flow_up_simplex(simplex, cp4):
    basis = flow_up_basis(simplex, XI, cp4)
    assert basis["v0"] == identity_class(cp4)
    assert tup(basis["v1"]) == [0, -1, -2, -4, -8]
    top = basis["v4"]
    assert top.upow == 4
    assert tup(top) == [0, 0, 0, 0, 1344] == [0, 0, 0, 0, (-8) * (-7) * (-6) * (-4)]


@pytest.mark.parametrize("name", POLYTOPES)
@pytest.mark.parametrize("xi", [XI, XI_ALT])
def test_flow_up_triangular(name, xi):
    p = load(name)
    s = restrict_to_circle(p, xi)
    basis = flow_up_basis(p, xi, s)
    order = s.by_moment()
    for j, F in enumerate(order):
        cls = basis[F.id]
        assert cls.upow == index_of(F) // 2
        assert cls[F.id] == negative_euler(F) != 0
        for G in order[:j]:
            assert cls[G.id] == 0
        assert membership_necessary(cls, s).passed


def test_canonical_cp4(simplex, cp4):
    canon = canonical_classes(flow_up_basis(simplex, XI, cp4), cp4)
    assert tup(canon["v1"].cls) == [0, -1, -2, -4, -8]
    assert canon["v0"].cls == identity_class(cp4)
    for cc in canon.values():
        assert cc.certified


def test_canonical_cube_index2_disjoint(cube):
    s = restrict_to_circle(cube, XI)
    canon = canonical_classes(flow_up_basis(cube, XI, s), s)
    idx2 = [p.id for p in s.with_index(2)]
    assert len(idx2) == 4
    for a in idx2:
        for b in idx2:
            if a != b:
                assert canon[a].cls[b] == 0


def image_span(p, xi, s, d):
    """All u^(d-|m|) * prod(tau^m) restriction tuples: a spanning set of the degree-d image."""
    taus = [divisor_class(p, xi, f) for f in range(len(p.halfspaces))]
    out = []
    for m in range(d + 1):
        for combo in combinations_with_replacement(range(len(taus)), m):
            c = identity_class(s)
            for f in combo:
                c = multiply(c, taus[f])
            out.append([c[pid] for pid in s.ids])
    return out


@pytest.mark.parametrize("name", POLYTOPES)
def test_canonical_against_span_oracle(name):
    p = load(name)
    s = restrict_to_circle(p, XI)
    canon = canonical_classes(flow_up_basis(p, XI, s), s)
    ids = list(s.ids)
    for F in s:
        k = index_of(F)
        span = image_span(p, XI, s, k // 2)
        coeffs = sympy.symbols(f"c0:{len(span)}")
        value = {pid: sum(c * row[j] for c, row in zip(coeffs, span)) for j, pid in enumerate(ids)}
        eqs = [value[F.id] - negative_euler(F)]
        for G in s:
            if G.H < F.H or (G.id != F.id and index_of(G) <= k):
                eqs.append(value[G.id])
        sol = sympy.linsolve(eqs, coeffs)
        assert sol != sympy.EmptySet
        (generic,) = sol
        tuple_values = [sympy.simplify(value[pid].subs(dict(zip(coeffs, generic)))) for pid in ids]
        # unique restriction tuple: no free parameter survives
        assert all(v.free_symbols == set() for v in tuple_values)
        assert [Q(int(v.p), int(v.q)) for v in tuple_values] == [canon[F.id].cls[pid] for pid in ids]


@pytest.mark.parametrize("name", POLYTOPES)
def test_canonical_membership(name):
    p = load(name)
    s = restrict_to_circle(p, XI_ALT)
    for cc in canonical_classes(flow_up_basis(p, XI_ALT, s), s).values():
        rep = membership_necessary(cc.cls, s)
        assert cc.certified and rep.passed
        if cc.cls.upow < s.n:
            assert integrate(cc.cls, s).value == 0


def test_membership_examples(simplex, cp4):
    canon = canonical_classes(flow_up_basis(simplex, XI, cp4), cp4)
    rep = membership_necessary(canon["v1"].cls, cp4)
    assert [j for j, _ in rep.residuals] == [0, 1, 2]
    assert rep.passed
    assert Q(0, 64) + Q(1, 21) - Q(2, 24) + Q(4, 96) - Q(8, 1344) == 0

    fake = EquivariantClass(1, dict(zip(IDS, (1, 0, 0, 0, 0))))
    rep = membership_necessary(fake, cp4)
    assert not rep.passed
    assert rep.residuals[0] == (0, Q(1, 64))

    assert membership_necessary(zero_class(cp4, 1), cp4).passed


def test_restriction_poly(simplex, cp4):
    tau = divisor_class(simplex, XI, SUM_FACET)
    r = tau.restriction("v3")
    assert r.degree == 1 and r.coeff(1) == -4
