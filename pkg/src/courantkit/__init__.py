"""Exact symbolic calculus for bracket presentations with module-valued pairings.

Algebroid presentations over polynomial-exponential coefficient rings, the
extended bracket and pairing built from a closed twist, subbundle analysis
(isotropy, involutivity), orthogonal structures and the bivectors they induce,
and a graded multivector bracket with its derived compatibility checks.  All
arithmetic is exact; every checker returns witnesses, not booleans alone.
"""

from .algebroid import Algebroid, AlgebroidError
from .courant import CourantError, CourantPresentation, CSection
from .dirac import (
    DiracError,
    anchor_intersection,
    graph_two_form,
    intersect_with_A,
    is_dirac,
    is_isotropic,
    is_lagrangian,
    perp,
    projection_closure,
)
from .exterior import AForm, ExteriorError, FForm, FScalar, Multivector, contract, iota, pair_eval, wedge
from .gcr import (
    Distribution,
    GCRError,
    GCRStructure,
    HBundle,
    build_H_bundle,
    compose_jacobi,
    cr_to_gcr,
    decompose_jacobi,
    extract_bivector,
    full_distribution,
    l_generators,
    parallel_trivializations,
    symplectic_gcr,
    tangent_restriction,
    validate_gcr,
)
from .ring import ExpGen, GaussRat, ParseError, RingElem, RingError, RingSignature
from .schouten import (
    SchoutenError,
    check_jacobi_pair,
    hamiltonian_section,
    induced_bracket,
    is_poisson,
    is_twisted_poisson,
    jacobi_gauge,
    schouten,
    tilde,
    twisted_defect,
    v_bracket,
)

__version__ = "0.1.0"

__all__ = [
    "AForm",
    "Algebroid",
    "AlgebroidError",
    "CSection",
    "CourantError",
    "CourantPresentation",
    "DiracError",
    "Distribution",
    "ExpGen",
    "ExteriorError",
    "FForm",
    "FScalar",
    "GCRError",
    "GCRStructure",
    "GaussRat",
    "HBundle",
    "Multivector",
    "ParseError",
    "RingElem",
    "RingError",
    "RingSignature",
    "SchoutenError",
    "anchor_intersection",
    "build_H_bundle",
    "check_jacobi_pair",
    "compose_jacobi",
    "contract",
    "cr_to_gcr",
    "decompose_jacobi",
    "extract_bivector",
    "full_distribution",
    "graph_two_form",
    "hamiltonian_section",
    "induced_bracket",
    "intersect_with_A",
    "iota",
    "is_dirac",
    "is_isotropic",
    "is_lagrangian",
    "is_poisson",
    "is_twisted_poisson",
    "jacobi_gauge",
    "l_generators",
    "pair_eval",
    "parallel_trivializations",
    "perp",
    "projection_closure",
    "schouten",
    "symplectic_gcr",
    "tangent_restriction",
    "tilde",
    "twisted_defect",
    "v_bracket",
    "validate_gcr",
    "wedge",
]
