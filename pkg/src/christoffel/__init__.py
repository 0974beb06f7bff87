"""Christoffel functions, Nikol'skii exponents and certificates on compact domains."""

from .asymptotics import (
    Certificate,
    ConsistencyReport,
    SigmaEstimate,
    consistency_report,
    fit_power_law,
    fit_sigma,
    inscribed_upper_certificate,
    lp_cone_upper_certificate,
    max_over_degrees,
    parallel_section_lower,
    sigma_reference,
    tensor_lower_certificate,
)
from .basis import BasisSpec, MultiIndexSet, enumerate_indices, eval_basis
from .errors import (
    CapacityError,
    ConvergenceError,
    DimensionMismatch,
    DomainFormatError,
    InsufficientDegreesError,
    SingularMapError,
)
from .evaluator import (
    BootstrapReport,
    ChristoffelEvaluator,
    MaxReport,
    bootstrap_check,
    christoffel_max,
    nikolskii_ratio,
)
from .geometry import (
    AffineImage,
    AffineMap,
    BallP,
    ConeDisk,
    Cube,
    Domain,
    HalfBall,
    Product,
    Simplex,
    SimplexUnion,
    apply_affine,
    boundary_candidates,
    cone_inscription_map,
    domain_from_dict,
    domain_from_json,
    extension_point,
    half_ball_map,
    interval,
    load_domain,
    lp_cone_constants,
    membership,
    parallel_section,
    volume,
)
from .moments import (
    GramFamily,
    GramSystem,
    MomentEngine,
    NormResult,
    assemble_gram,
    l_norm,
)
from .orthopoly import (
    JacobiParams,
    KernelPolynomial,
    gauss_legendre,
    jacobi_at,
    jacobi_at_minus_one,
    jacobi_norm,
    kernel_polynomial,
    lacunary_l4,
    legendre_normalized,
    rho,
)

__version__ = "0.1.0"
