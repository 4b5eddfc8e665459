"""warplab: a numerical laboratory for harmonic and subharmonic functions on
the plane endowed with warped metrics dr^2 + f(r, theta)^2 dtheta^2.

Subpackages:
    geometry     pointwise operators (curvature, gradient, Laplacian, Hessian,
                 Bochner residuals) and the metric/field catalogs
    radialcomp   comparison harmonics, Sturm/Riccati comparison, barriers
    pde          annulus grids, Dirichlet solves, discrete diagnostics
    experiments  theorem-driver experiments producing structured reports
    cli          config-driven command-line front end
"""

from .errors import (
    CertificateError,
    ConfigError,
    DomainError,
    HarmonicityError,
    PreconditionError,
    QuadratureError,
    SolverError,
    WarpLabError,
)
from .geometry import (
    ChristoffelSymbols,
    FieldSampler,
    HessianComponents,
    Point,
    TangentVector,
    WarpMetric,
    bochner2_residual,
    bochner_residual,
    christoffel,
    covariant_hessian,
    gaussian_curvature,
    gradient,
    gradient_norm_sq,
    hessian_norm_sq,
    inner_product,
    laplace_beltrami,
    log_grad_energy_laplacian,
    make_field,
    make_metric,
    mean_curvature_ratio,
)
from .pde import (
    AnnulusGrid,
    BoundaryData,
    DiscreteLaplacian,
    ScalarField,
    assemble,
    circle_max_abs,
    circle_max_signed,
    growth_exponent,
    harmonic_measure,
    harmonic_measure_cross_check,
    max_principle_check,
    solve_dirichlet,
)
from .radialcomp import (
    ComparisonReport,
    RadialProfile,
    RiccatiSolution,
    comparison_harmonic,
    generalized_barrier,
    make_profile,
    riccati_integrate,
    sturm_verify,
    sturm_verify_curvature,
    subharmonic_h_certificate,
    three_circles_barrier,
)

__version__ = "0.1.0"
