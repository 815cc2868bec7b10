"""Primal-dual hybrid gradient solvers with a Lyapunov diagnostics laboratory.

The package splits into a solver side (problems, proximal, schedules, engine)
and a diagnostics side (lyapunov, dynamics, rates) joined by a problem
catalog (zoo) and a config-driven CLI.
"""

from .config import (
    CHECKS,
    ConfigError,
    ExperimentConfig,
    materialize,
    parse_config,
    serialize_config,
)
from .dynamics import OdeState, continuous_lyapunov, hires_ode_step, integrate
from .engine import (
    StepRecord,
    Trajectory,
    optimality_residual,
    pdhg_step,
    run,
    step_residuals,
)
from .lyapunov import (
    LyapunovRecord,
    NoMatchingLemma,
    alpha_rate,
    check_lemma,
    lyapunov_accelerated,
    lyapunov_fixed,
    lyapunov_varying,
    numerical_error,
    rho_rate,
    slack_tolerance,
    theorem_bound,
)
from .problems import (
    Admissibility,
    PowerIterationError,
    PrimalDualPair,
    SaddleProblem,
    check_admissibility,
    operator_norm,
)
from .proximal import (
    QuadraticProxCache,
    l1_subdiff_dist,
    linf_normal_cone_dist,
    project_linf_ball,
    prox_least_squares,
    prox_shifted_quadratic,
    soft_threshold,
)
from .rates import RateFit, contraction_factors, default_window, fit_rate
from .schedules import (
    ACCELERATED,
    FIXED,
    OPTIMAL_SS,
    REGIMES,
    VARYING_SC,
    Schedule,
    k0_threshold,
    make_schedule,
    schedule_at,
)
from .zoo import (
    BuiltInstance,
    InstanceSpec,
    QuadPair,
    SaddleCertificate,
    build_instance,
    certify_saddle,
    difference_matrix,
    kkt_oracle,
    make_generalized_lasso,
    make_lasso,
    make_quad_pair,
    primal_objective,
    reference_saddle,
)

__version__ = "0.1.0"
