"""Numerical convex geometry on the unit sphere.

Computes p-Minkowski combinations of convex bodies, Wulff shapes from
gauge functions, intrinsic volumes from support functions, and runs
stability and counterexample checks for a Brunn-Minkowski-type
inequality for intrinsic volumes.
"""

from .bodies import (
    Ball,
    Body,
    Box,
    EmbeddedCube,
    LogPerturbedBall,
    PMeanSpec,
    WulffSampled,
    body_from_json,
    minkowski_support,
    pmean,
    pmean_values,
    support,
    wulff_membership,
    wulff_support_upper,
)
from .calculus import (
    spherical_gradient,
    spherical_laplacian,
    tangent_hessian,
)
from .counterexamples import (
    UpperBound,
    Verdict,
    branch,
    containment_check,
    cube_pair,
    enclosing_box,
    exact_v1,
    threshold_pbar,
    threshold_table,
    upper_bound_vk_kp,
    v1_reverse_check,
    verify_counterexample,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EvaluationError,
    NumericalError,
    PathValidityError,
    QuermassError,
    UnsupportedBodyError,
    UnsupportedScaleError,
    WulffUnboundedError,
)
from .intrinsic import (
    IntrinsicVolumeResult,
    area_measure_density,
    cofactor,
    elem_sym,
    q_matrix,
    q_matrix_nodes,
    second_cofactor,
    unit_ball_volume,
    vk_ball,
    vk_box,
    vk_quadrature,
)
from .sphere import (
    SphericalGrid,
    TangentFrame,
    TestFunction,
    build_grid,
    integrate,
    surface_area,
    tangent_frame,
)
from .variation import (
    ConcavityReport,
    IbpResult,
    PoincareResult,
    VariationPath,
    ball_fk,
    ball_fk_prime,
    ball_fk_second,
    center_test_function,
    christoffel_residual,
    christoffel_residual_grid,
    concavity_scan,
    f_k,
    f_k_prime,
    f_k_second,
    f_k_third,
    ibp_check,
    poincare_check,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "Body",
    "Box",
    "ConcavityReport",
    "ConfigurationError",
    "DomainError",
    "EmbeddedCube",
    "EvaluationError",
    "IbpResult",
    "IntrinsicVolumeResult",
    "LogPerturbedBall",
    "NumericalError",
    "PMeanSpec",
    "PathValidityError",
    "PoincareResult",
    "QuermassError",
    "SphericalGrid",
    "TangentFrame",
    "TestFunction",
    "UnsupportedBodyError",
    "UnsupportedScaleError",
    "UpperBound",
    "VariationPath",
    "Verdict",
    "WulffSampled",
    "WulffUnboundedError",
    "__version__",
    "area_measure_density",
    "ball_fk",
    "ball_fk_prime",
    "ball_fk_second",
    "body_from_json",
    "branch",
    "build_grid",
    "center_test_function",
    "christoffel_residual",
    "christoffel_residual_grid",
    "cofactor",
    "concavity_scan",
    "containment_check",
    "cube_pair",
    "elem_sym",
    "enclosing_box",
    "exact_v1",
    "f_k",
    "f_k_prime",
    "f_k_second",
    "f_k_third",
    "ibp_check",
    "integrate",
    "minkowski_support",
    "pmean",
    "pmean_values",
    "poincare_check",
    "q_matrix",
    "q_matrix_nodes",
    "second_cofactor",
    "support",
    "surface_area",
    "tangent_frame",
    "tangent_hessian",
    "threshold_pbar",
    "threshold_table",
    "unit_ball_volume",
    "upper_bound_vk_kp",
    "v1_reverse_check",
    "verify_counterexample",
    "vk_ball",
    "vk_box",
    "vk_quadrature",
    "wulff_membership",
    "wulff_support_upper",
]
