"""Occupation time functionals of discretely observed stochastic processes.

Simulation of the underlying models, discrete-sample estimators of
Gamma_t(f) = int_0^t f(X_r) dr, theoretical rate predictions, and the
Monte Carlo harness that confronts one with the other.
"""

__version__ = "0.1.0"

from .errors import (
    AlignmentError,
    CapabilityError,
    ConfigError,
    CoverageError,
    DegenerateVarianceError,
    FitError,
    ModelError,
    NormDivergenceError,
    NumericError,
    NumericGateError,
    OccutimeError,
    OracleResolutionError,
    ParameterError,
    ResolutionError,
    SimulationError,
)
from .estimators import (
    EstimateRecord,
    EstimatorKind,
    avar_hat,
    bridge_conditional_detail,
    bridge_conditional_expectation,
    local_time_estimator,
    occupation_oracle,
    riemann_sum,
    standardized_error,
    trapezoid,
)
from .functions import (
    NormEstimate,
    TestFunction,
    eval_f,
    exp_abs,
    fourier_transform,
    from_id,
    gaussian_bump,
    grad_f,
    identity_window,
    indicator,
    make_f_alpha,
    make_local_time_kernel,
    mollified_indicator,
    mollify,
    sobolev_norm,
    triangular_hat,
)
from .harness import (
    CltDiagnostics,
    DEFAULT_N_LADDER,
    DEFAULT_ORACLE_FACTOR,
    DEFAULT_REPLICATIONS,
    EfficiencyReport,
    ErrorSample,
    ErrorTable,
    ExperimentConfig,
    ExperimentKind,
    LocalTimeReport,
    RateFit,
    RateStudyReport,
    TScalingReport,
    clt_experiment,
    efficiency_experiment,
    fit_rate,
    local_time_experiment,
    ou_process,
    rate_study,
    run_error_experiment,
    t_scaling_experiment,
)
from .paths import (
    BmParams,
    DiffusionParams,
    FbmParams,
    InitialLaw,
    JumpLaw,
    PathGrid,
    PoissonParams,
    ProcessKind,
    ProcessSpec,
    SeedPolicy,
    StableParams,
    brownian_spec,
    randomize_initial,
    simulate,
    subsample,
)
from .rates import (
    RateContext,
    RatePrediction,
    fourier_bound_evaluator,
    indicator_sharp_rate,
    local_time_bandwidth_exponent,
    smoothness_cap,
    theoretical_rate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
