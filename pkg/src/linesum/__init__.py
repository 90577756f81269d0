"""linesum: exact and asymptotic counting of 0-1 matrices with given line sums."""

from .core import (
    ApplicabilityReport,
    MarginPair,
    MarginStats,
    check_applicability,
    compute_stats,
    strip_forced,
)
from .exact import (
    ExactCount,
    exact_count,
    exact_count_bruteforce,
    gale_ryser_feasible,
)
from .asymptotic import LogEstimate, estimate_log_count, stirling_binom
from .saddle import (
    SaddleSolution,
    log_prefactor,
    log_prefactor_approx,
    solve_saddle,
    third_iterate_approx,
)
from .integral import (
    IntegralEstimate,
    fbnd_check,
    ibnd_check,
    integrand_F,
    integrate_I,
    verify_identity,
)
from .moments import (
    MomentCoefficients,
    bigZ,
    integrate_f_direct,
    mw3_estimate,
    sigma_stage_coefficients,
    tau_stage_coefficients,
    theta1,
    theta2,
)
from . import errors
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
