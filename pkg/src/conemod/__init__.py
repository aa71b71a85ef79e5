"""Cone modular spaces over a Banach algebra."""

from .algebra import (
    DUAL_PAIR,
    SCALAR,
    Algebra,
    Element,
    get_algebra,
    mul,
    neumann_inverse,
    norm,
    power,
    register_algebra,
    spectral_radius_estimate,
)
from .cone import Cone, get_cone, le, ll, normality_estimate, quadrant_cone, verify_cone_axioms
from .fixpoint import (
    ContractionSpec,
    FixedPointResult,
    alpha0,
    apriori_bound,
    certify_contraction,
    example_map,
    picard_solve,
    uniqueness_probe,
)
from .modular import (
    ModularFunctional,
    SequenceTrace,
    abs_pair,
    check_axioms,
    check_delta2,
    f_norm,
    in_modular_subspace,
    is_rho_cauchy,
    is_rho_convergent,
)
from .scalarize import ScalarizationParams, non_contraction_witness, norm_modular, scalar_modular, xi_c

__version__ = "0.1.0"
