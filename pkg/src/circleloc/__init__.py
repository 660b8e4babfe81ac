"""Exact localization computations for circle actions with isolated fixed points."""

from .cohomology import (
    CanonicalClass,
    EquivariantClass,
    LocalizationValue,
    canonical_classes,
    divisor_class,
    flow_up_basis,
    integrate,
    membership_necessary,
    multiply,
    symplectic_class,
)
from .delzant import (
    DelzantPolytope,
    GKMGraph,
    HalfSpace,
    check_delzant,
    enumerate_vertices,
    is_generic,
    polytope_volume,
    restrict_to_circle,
)
from .exact import LinearSolution, Poly, poly_mul, solve_exact
from .fixedpoints import (
    BettiVector,
    FixedPointDatum,
    FixedPointSet,
    betti_from_morse,
    euler_product,
    index_of,
    negative_euler,
    normalize_moment,
    validate,
)
from .verifier import (
    NO_CONTRADICTION,
    ContradictionCertificate,
    TheoremWitness,
    check_unimodality,
    contradiction_certificate,
    duality_check,
    full_report,
    restriction_rank_2_to_4,
    sign_lemma_check,
)

__version__ = "0.1.0"
