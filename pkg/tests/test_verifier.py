import json
from fractions import Fraction as Q

import pytest
import sympy

from circleloc.cli import bundled
from circleloc.cohomology import EquivariantClass, canonical_classes, flow_up_basis
from circleloc.delzant import restrict_to_circle
from circleloc.fixedpoints import BettiVector, FixedPointDatum, betti_from_morse, euler_product, index_of, validate
from circleloc.formats import class_from_obj, fixed_points_from_obj, loads
from circleloc.verifier import (
    NO_CONTRADICTION,
    ContradictionCertificate,
    PreconditionError,
    check_unimodality,
    contradiction_certificate,
    duality_check,
    full_report,
    kernel_combination,
    restriction_rank_2_to_4,
    sign_lemma_check,
)

from conftest import POLYTOPES, XI, XI_ALT, load

FAKES = ("fake_b2_gt_b4.json", "fake_p2xp2_splice.json")


def load_fixture(name):
    raw = loads(bundled(name).read_text())
    s = fixed_points_from_obj(raw)
    claimed = [class_from_obj(c) for c in raw["claimed"]]
    c = [Q(x) for x in raw["c"]] if "c" in raw else None
    return s, claimed, c


@pytest.mark.parametrize("b, ok", [
    ((1, 1, 1, 1, 1), True),
    ((1, 4, 6, 4, 1), True),
    ((1, 3, 2, 3, 1), False),
])
def test_check_unimodality(b, ok):
    assert check_unimodality(BettiVector(b)) is ok


def test_check_unimodality_wrong_dim():
    with pytest.raises(ValueError):
        check_unimodality(BettiVector((1, 1, 1)))


def canon_for(name, xi=XI):
    p = load(name)
    s = restrict_to_circle(p, xi)
    return s, canonical_classes(flow_up_basis(p, xi, s), s)


@pytest.mark.parametrize("name, rank, shape", [
    ("simplex4", 1, (1, 1)),
    ("cube4", 4, (4, 6)),
    ("p2xp2", 2, (2, 3)),
])
@pytest.mark.parametrize("xi", [XI, XI_ALT])
def test_witness_rank(name, rank, shape, xi):
    s, canon = canon_for(name, xi)
    w = restriction_rank_2_to_4(canon, s)
    assert (len(w.details), len(w.details[0])) == shape
    # oracle: sympy rank of the same matrix
    assert w.rank_2_to_4 == sympy.Matrix(w.details).rank() == rank == w.betti.b[1]
    assert w.unimodal and w.full_rank


def test_witness_cp4_matrix():
    s, canon = canon_for("simplex4")
    assert restriction_rank_2_to_4(canon, s).details == [[-2]]


@pytest.mark.parametrize("name", FAKES)
def test_fixture_is_inconsistent(name):
    s, claimed, _ = load_fixture(name)
    b = betti_from_morse(s)
    assert b.b[1] > b.b[2]
    assert not validate(s).passed
    assert s.is_normalized()


@pytest.mark.parametrize("name", FAKES)
def test_contradiction_fixture(name):
    s, claimed, c = load_fixture(name)
    if c is None:
        (c,) = kernel_combination(s, claimed)
    cert = contradiction_certificate(s, claimed, c)
    assert isinstance(cert, ContradictionCertificate)
    assert cert.terms_nonnegative()
    assert cert.total > 0
    assert cert.readd() == cert.total
    for p in s:
        a = cert.alpha_restrictions[p.id]
        # oracle: the term formula written out directly
        assert cert.localization_terms[p.id] == a * a * p.H / euler_product(p)
        if index_of(p) in (0, 4, 8):
            assert cert.localization_terms[p.id] == 0


def test_fixture_totals():
    s, claimed, c = load_fixture("fake_b2_gt_b4.json")
    assert contradiction_certificate(s, claimed, c).total == Q(88, 3)
    s, claimed, _ = load_fixture("fake_p2xp2_splice.json")
    (c,) = kernel_combination(s, claimed)
    assert c == (Q(1, 2), Q(1, 8), 1)
    assert contradiction_certificate(s, claimed, c).total == Q(125, 32)


def test_splice_k0_residual():
    s, _, _ = load_fixture("fake_p2xp2_splice.json")
    genuine = restrict_to_circle(load("p2xp2"), XI)
    v6 = genuine["v6"]
    assert validate(s)["vanishing_k0"].residual == -1 / euler_product(v6) - Q(1, 10)


def test_genuine_zero_vector(cp4):
    s, canon = canon_for("simplex4")
    assert contradiction_certificate(s, [canon["v1"].cls], [0]) == NO_CONTRADICTION


def test_genuine_canonical_violates_precondition():
    s, canon = canon_for("simplex4")
    with pytest.raises(PreconditionError) as exc:
        contradiction_certificate(s, [canon["v1"].cls], [1])
    assert exc.value.points == ["v2"]
    assert "v2=-2" in str(exc.value)


def test_genuine_kernel_is_trivial():
    for name in POLYTOPES:
        s, canon = canon_for(name)
        claimed = [canon[p.id].cls for p in s.with_index(2)]
        assert kernel_combination(s, claimed) == []


def test_alpha_nonzero_at_minimum_rejected():
    s, claimed, c = load_fixture("fake_b2_gt_b4.json")
    bumped = EquivariantClass(1, {**claimed[0].coeffs, "v0": Q(1)})
    with pytest.raises(PreconditionError, match="minimum"):
        contradiction_certificate(s, [bumped, claimed[1]], c)


def test_non_normalized_rejected(cp4_raw):
    from circleloc.cohomology import NotNormalizedError
    with pytest.raises(NotNormalizedError):
        contradiction_certificate(cp4_raw, [EquivariantClass(1, {p.id: 0 for p in cp4_raw})], [1])


def test_sign_lemma(cp4):
    rep = sign_lemma_check(cp4)
    assert rep["pass"]
    by_point = {r["point"]: r for r in rep["points"]}
    assert by_point["v1"]["euler"] == "-21"
    assert by_point["v3"]["euler"] == "-96"
    assert "v2" not in by_point


def test_sign_lemma_detects_corruption(cp4):
    # the sign follows from the weights, so only a zero weight can break it
    bad = cp4.replace_points(
        FixedPointDatum(q.id, q.H, (-1, 0, 3, 7)) if q.id == "v1" else q for q in cp4
    )
    assert not validate(bad).passed
    rep = sign_lemma_check(bad)
    assert not rep["pass"]
    assert [r["point"] for r in rep["points"] if not r["pass"]] == ["v1"]


@pytest.mark.parametrize("name, betti", [
    ("simplex4", [1, 1, 1, 1, 1]),
    ("cube4", [1, 4, 6, 4, 1]),
    ("p2xp2", [1, 2, 3, 2, 1]),
])
def test_duality(name, betti):
    rep = duality_check(load(name), XI)
    assert rep["pass"]
    assert rep["betti_xi"] == betti == rep["betti_minus_xi"][::-1]


@pytest.mark.parametrize("name, rank, betti", [
    ("simplex4", 1, [1, 1, 1, 1, 1]),
    ("p2xp2", 2, [1, 2, 3, 2, 1]),
])
def test_full_report(name, rank, betti):
    rep = full_report(load(name), XI)
    assert rep["pass"], json.dumps(rep)
    stages = {st["name"]: st for st in rep["stages"]}
    assert stages["witness"]["rank_2_to_4"] == rank
    assert stages["witness"]["betti"] == betti
    if name == "simplex4":
        assert stages["volume_identity"]["localization"] == "1"
        assert stages["volume_identity"]["n_factorial_volume"] == "1"


def test_full_report_non_generic():
    rep = full_report(load("cube4"), (1, 0, 0, 0))
    assert not rep["pass"]
    stages = {st["name"]: st for st in rep["stages"]}
    assert stages["ingest"]["pass"]
    assert "NotGenericError" in stages["restrict"]["error"]
