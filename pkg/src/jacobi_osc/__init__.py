"""Oscillation criteria, node counts and eigenvalue counts for half-line
Jacobi operators

    (tau f)(n) = a(n) f(n+1) + a(n-1) f(n-1) + b(n) f(n).
"""

from .asymptotics import (
    REGRESSION_BOUNDS,
    BoundednessReport,
    ComplexExponentProbe,
    PhaseProbe,
    b1_exact,
    b1_minus_b0,
    compute_U,
    kernel_value,
    lnk_derivatives,
    mu_of,
    oscillation_scale_probe,
    verify_b1_expansion,
    verify_btilde_order,
    verify_kernel_bound,
    verify_loglog_derivatives,
    verify_lower_bound,
    verify_Qk_vs_lnk,
    verify_ratio_limit,
)
from .criterion import (
    Classification,
    CriterionSeries,
    DegenerateMeanError,
    Verdict,
    classify,
    criterion_series,
    custom_criterion,
    harmonic_A,
    reference_solution,
)
from .models import (
    Coefficient,
    CoefficientDomainError,
    CoefficientModel,
    ModelError,
    b_from_u,
    btilde_minus_bk,
    check_model,
    e_threshold,
    iterated_log,
    kneser_family,
    loglog_bk,
    loglog_family,
    loglog_uk,
    model_from_config,
    reference_model,
    table_model,
    variable_a_family,
)
from .recurrence import (
    Minimality,
    ScaledArray,
    ScaledReal,
    SolutionTrace,
    accumulate_Q,
    count_nodes,
    minimality_heuristic,
    second_solution,
    solve_recurrence,
    write_trace_csv,
)
from .spectral import (
    SpectralCount,
    TruncatedOperator,
    count_below,
    growth_profile,
    nodes_equal_counts,
    pivot_count,
    truncate,
)

__version__ = "0.1.0"
