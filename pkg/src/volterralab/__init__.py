"""Numerical laboratory for Volterra-type integration operators on truncated
Dirichlet series: exact coefficient formulas, finite-section spectral
estimation, named symbol families, extremal test vectors, and reproducible
experiment scenarios with a CLI."""

from .dirichlet import (
    DirichletPolynomial,
    VerticalLineSample,
    antiderivative,
    boundary_samples,
    derivative,
    evaluate,
    h2_norm,
    horizontal_shift,
    inner_product,
    multiply,
    partial_sum,
    polynomial_from_csv,
    polynomial_to_csv,
)
from .kernels import (
    RayleighQuotients,
    SmoothKernelSpec,
    choose_smooth_truncation,
    gal_test_function,
    multcomp_double_sum,
    rayleigh_quotient,
    s_phi_direct,
    smooth_kernel,
    squarefree_product_test,
    subset_product_quotient,
    zeta_smooth,
)
from .labops import (
    CarlesonEstimate,
    GrowthFit,
    IntervalSpec,
    carleson_integral_mc,
    growth_fit,
    mean_oscillation,
    oscillation_profile,
    quarter_identity,
)
from .numtheory import (
    ArithmeticStatistics,
    Factorization,
    MultiplicativeFunction,
    PrimeTable,
    arithmetic_statistics,
    build_prime_table,
    divisor_count_sieve,
    divisors,
    evaluate_multiplicative,
    factorize,
    iterated_log,
    mertens_sum,
    shared_prime_table,
    smooth_count,
    smooth_integers,
)
from .symbols import (
    SymbolSpec,
    coprime_symbol,
    helson_statistic,
    lambda_symbol,
    linear_symbol,
    m_homogeneous_symbol,
    weight_general,
    weight_w2,
    weight_wm,
    weighted_l2_statistic,
    zeta_primitive_symbol,
)
from .volterra import (
    FiniteSectionMatrix,
    SandwichBounds,
    SpectralEstimate,
    apply_volterra,
    apply_volterra_tilde,
    build_finite_section,
    column_norm,
    column_norms,
    dyadic_sandwich_check,
    hankel_form,
    operator_norm,
    schatten_partial_sum,
    truncated_multiplier,
)

__version__ = "0.1.0"
