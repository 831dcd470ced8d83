"""Monte Carlo experiment driver.

Every experiment follows one pattern: per replicate, simulate a single
fine-resolution path, compute the occupation-time oracle on it, subsample
the same path to each skeleton size in the ladder, and record
estimator-minus-oracle errors.  Replicates draw from dedicated
counter-based streams keyed by (master seed, purpose, replicate), so
results are reproducible bit for bit and replicates could run in any
order; aggregation stores per-replicate values in replicate order and
reduces with numpy's pairwise summation.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .errors import (
    AlignmentError,
    DegenerateVarianceError,
    FitError,
    ModelError,
    OracleResolutionError,
    ParameterError,
)
from .estimators import (
    EstimatorKind,
    avar_hat,
    bridge_conditional_expectation,
    local_time_estimator,
    occupation_oracle,
    riemann_sum,
    standardized_error,
    trapezoid,
)
from .functions import TestFunction, from_id, identity_window, make_local_time_kernel
from .paths import (
    DiffusionParams,
    InitialLaw,
    PathGrid,
    ProcessKind,
    ProcessSpec,
    simulate,
    subsample,
)
from .rates import (
    RateContext,
    RatePrediction,
    local_time_bandwidth_exponent,
    smoothness_cap,
    theoretical_rate,
)

DEFAULT_N_LADDER = (64, 128, 256, 512, 1024, 2048, 4096)
DEFAULT_REPLICATIONS = 2000
DEFAULT_ORACLE_FACTOR = 64


class ExperimentKind(str, Enum):
    RATE_STUDY = "rate_study"
    CLT_STUDY = "clt_study"
    LOCAL_TIME_STUDY = "local_time_study"
    EFFICIENCY_STUDY = "efficiency_study"
    T_SCALING_STUDY = "t_scaling_study"


def _ou_drift(x):
    return -x


def _unit_sigma(x):
    return 1.0


def ou_process(horizon: float = 1.0, initial_law: InitialLaw | None = None) -> ProcessSpec:
    """Ornstein-Uhlenbeck spec: drift -x, unit noise."""
    return ProcessSpec(
        kind=ProcessKind.ITO_DIFFUSION,
        dim=1,
        horizon=horizon,
        params=DiffusionParams(drift=_ou_drift, diffusion=_unit_sigma, label="ou"),
        initial_law=initial_law if initial_law is not None else InitialLaw.point(0.0),
    )


DIFFUSION_PRESETS = {"ou": ou_process}


@dataclass(frozen=True)
class ExperimentConfig:
    process: ProcessSpec
    function_id: str
    n_ladder: tuple = DEFAULT_N_LADDER
    replications: int = DEFAULT_REPLICATIONS
    oracle_factor: int = DEFAULT_ORACLE_FACTOR
    seed: int = 0
    experiment_kind: ExperimentKind = ExperimentKind.RATE_STUDY

    def __post_init__(self):
        ladder = tuple(int(n) for n in self.n_ladder)
        object.__setattr__(self, "n_ladder", ladder)
        try:
            kind = ExperimentKind(self.experiment_kind)
        except ValueError:
            valid = ", ".join(k.value for k in ExperimentKind)
            raise ParameterError(
                f"unknown experiment kind {self.experiment_kind!r}; one of: {valid}"
            ) from None
        object.__setattr__(self, "experiment_kind", kind)
        if len(ladder) == 0:
            raise ParameterError("n_ladder must be nonempty")
        if any(n < 2 for n in ladder):
            raise ParameterError("every ladder size must be >= 2")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ParameterError("n_ladder must be strictly increasing")
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if self.oracle_factor < 2:
            raise ParameterError("oracle_factor must be >= 2")
        n_fine = self.oracle_factor * ladder[-1]
        for n in ladder:
            if n_fine % n != 0:
                raise AlignmentError(
                    f"ladder size {n} does not divide n_fine={n_fine} "
                    f"(oracle_factor {self.oracle_factor} x max ladder {ladder[-1]})"
                )

    @property
    def n_fine(self) -> int:
        return self.oracle_factor * self.n_ladder[-1]

    def function(self) -> TestFunction:
        return from_id(self.function_id)


@dataclass(frozen=True)
class ErrorSample:
    n: int
    delta: float
    horizon: float
    replicate: int
    error: float
    estimator_kind: EstimatorKind

    def __post_init__(self):
        if not math.isfinite(self.error):
            raise ParameterError(f"non-finite error sample at replicate {self.replicate}")


@dataclass(frozen=True)
class ErrorTable:
    """Per-replicate signed errors for one estimator across the ladder."""

    ns: tuple
    deltas: np.ndarray
    horizon: float
    estimator_kind: EstimatorKind
    errors: np.ndarray  # shape (replications, len(ns)), replicate order fixed

    @property
    def replications(self) -> int:
        return self.errors.shape[0]

    @property
    def rms(self) -> np.ndarray:
        """Empirical L2 error per ladder size."""
        return np.sqrt(np.mean(self.errors**2, axis=0))

    @property
    def rms_stderr(self) -> np.ndarray:
        """Delta-method standard error of the L2 estimate per ladder size."""
        sq = self.errors**2
        r = sq.shape[0]
        if r < 2:
            return np.full(sq.shape[1], np.nan)
        se_mean = np.std(sq, axis=0, ddof=1) / math.sqrt(r)
        rms = self.rms
        out = np.full_like(rms, np.nan)
        good = rms > 0
        out[good] = se_mean[good] / (2.0 * rms[good])
        return out

    def samples(self):
        for r in range(self.errors.shape[0]):
            for j, n in enumerate(self.ns):
                yield ErrorSample(
                    n=int(n),
                    delta=float(self.deltas[j]),
                    horizon=self.horizon,
                    replicate=r,
                    error=float(self.errors[r, j]),
                    estimator_kind=self.estimator_kind,
                )


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float
    points_used: int

    def __post_init__(self):
        if self.points_used < 3:
            raise FitError(f"rate fit needs >= 3 points, got {self.points_used}")


def fit_rate(table, errors=None, drop_smallest_n: bool = True) -> RateFit:
    """Least-squares slope of log error against log Delta.

    Accepts an ErrorTable, or a pair (deltas, errors) of 1-d arrays.  The
    smallest-n (largest Delta) point is dropped by default; pre-asymptotic
    contamination concentrates there.
    """
    if isinstance(table, ErrorTable):
        deltas = np.asarray(table.deltas, float)
        errs = table.rms
    else:
        deltas = np.asarray(table, float)
        errs = np.asarray(errors, float)
    if deltas.shape != errs.shape or deltas.ndim != 1:
        raise ParameterError("rate fit needs matching 1-d delta and error arrays")
    if np.any(errs <= 0.0) or not np.all(np.isfinite(errs)):
        raise FitError("rate fit needs strictly positive finite errors")
    order = np.argsort(deltas)[::-1]  # largest Delta (smallest n) first
    if drop_smallest_n and len(order) > 3:
        order = order[1:]
    if len(order) < 3:
        raise FitError(f"rate fit needs >= 3 points, got {len(order)}")
    x = np.log(deltas[order])
    y = np.log(errs[order])
    k = len(x)
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx <= 0.0:
        raise FitError("degenerate delta ladder in rate fit")
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    ssr = float(np.sum(resid**2))
    sst = float(np.sum((y - y.mean()) ** 2))
    stderr = math.sqrt(ssr / (k - 2) / sxx) if k > 2 else math.nan
    r_squared = 1.0 - ssr / sst if sst > 0 else 1.0
    return RateFit(
        slope=slope,
        intercept=intercept,
        slope_stderr=stderr,
        r_squared=r_squared,
        points_used=k,
    )


_SKELETON_ESTIMATORS = {
    EstimatorKind.RIEMANN: riemann_sum,
    EstimatorKind.TRAPEZOID: trapezoid,
}


def _check_coupled(fine: PathGrid, skel: PathGrid, stride: int):
    """Skeleton values must be the stride-subsample of the fine path."""
    probe = min(1, skel.n_steps)
    if not np.array_equal(skel.values[probe], fine.values[probe * stride]):
        raise AlignmentError("skeleton is not a subsample of the fine path")


def run_error_experiment(
    config: ExperimentConfig,
    estimator_kind: EstimatorKind = EstimatorKind.RIEMANN,
    function: TestFunction | None = None,
) -> ErrorTable:
    """Empirical estimator-minus-oracle errors across the ladder.

    Within each replicate the oracle and every skeleton estimate consume
    the same fine path, so the ladder is coupled.
    """
    estimator_kind = EstimatorKind(estimator_kind)
    if estimator_kind not in _SKELETON_ESTIMATORS:
        raise ParameterError(
            f"run_error_experiment drives riemann/trapezoid, not {estimator_kind.value}"
        )
    estimate = _SKELETON_ESTIMATORS[estimator_kind]
    f = function if function is not None else config.function()
    spec = config.process
    horizon = spec.horizon
    ns = config.n_ladder
    n_fine = config.n_fine
    errors = np.empty((config.replications, len(ns)))
    for r in range(config.replications):
        fine = simulate(spec, n_fine, config.seed, replicate=r)
        oracle = occupation_oracle(fine, f, horizon, min_steps=n_fine)
        for j, n in enumerate(ns):
            skel = subsample(fine, n)
            if r == 0:
                _check_coupled(fine, skel, n_fine // n)
            errors[r, j] = estimate(skel, f, horizon) - oracle
    deltas = np.asarray([horizon / n for n in ns])
    return ErrorTable(
        ns=tuple(ns),
        deltas=deltas,
        horizon=horizon,
        estimator_kind=estimator_kind,
        errors=errors,
    )


@dataclass(frozen=True)
class RateStudyReport:
    config: ExperimentConfig
    table: ErrorTable
    fit: RateFit
    prediction: RatePrediction
    effective_smoothness: float

    @property
    def abs_deviation(self) -> float:
        return abs(self.fit.slope - self.prediction.delta_exponent)


def rate_study(
    config: ExperimentConfig,
    estimator_kind: EstimatorKind = EstimatorKind.RIEMANN,
    function: TestFunction | None = None,
    drop_smallest_n: bool = True,
) -> RateStudyReport:
    """run_error_experiment + fit_rate + the matching theory prediction."""
    f = function if function is not None else config.function()
    table = run_error_experiment(config, estimator_kind, function=f)
    fit = fit_rate(table, drop_smallest_n=drop_smallest_n)
    eff_s = min(f.smoothness_s, smoothness_cap(config.process))
    prediction = theoretical_rate(config.process, eff_s, RateContext.L2_ERROR)
    return RateStudyReport(
        config=config,
        table=table,
        fit=fit,
        prediction=prediction,
        effective_smoothness=eff_s,
    )


@dataclass(frozen=True)
class CltDiagnostics:
    estimator_kind: EstimatorKind
    n: int
    stats: np.ndarray
    ks_distance: float
    mean: float
    variance: float
    mean_square: float
    excluded_count: int
    replications: int
    invalid: bool
    delta_f_sq_mean: float
    grad_energy_mean: float

    @property
    def predicted_second_moment(self) -> float:
        """Limit second moment of the Riemann-standardized statistic:
        1 + 3 E[(f(X_T)-f(X_0))^2] / E[int_0^T |grad f(X_r)|^2 dr]."""
        return 1.0 + 3.0 * self.delta_f_sq_mean / self.grad_energy_mean


def clt_experiment(
    config: ExperimentConfig,
    estimator_kind: EstimatorKind = EstimatorKind.TRAPEZOID,
    function: TestFunction | None = None,
) -> CltDiagnostics:
    """Distribution of the standardized error at n = max(n_ladder).

    The trapezoid variant targets the standard normal limit; the riemann
    variant standardized the same way retains the endpoint term and its
    limit second moment exceeds 1 by the predicted ratio.
    """
    estimator_kind = EstimatorKind(estimator_kind)
    if estimator_kind not in _SKELETON_ESTIMATORS:
        raise ParameterError("clt_experiment drives riemann or trapezoid")
    spec = config.process
    if spec.kind not in (ProcessKind.BROWNIAN_MOTION, ProcessKind.ITO_DIFFUSION):
        raise ModelError(
            "the feasible CLT covers continuous Ito semimartingale models "
            f"(bm, diffusion), not {spec.kind.value}"
        )
    f = function if function is not None else config.function()
    if not f.supports_gradient:
        raise ModelError(f"{f.function_id}: the CLT statistic needs a gradient")
    estimate = _SKELETON_ESTIMATORS[estimator_kind]
    n = config.n_ladder[-1]
    n_fine = config.n_fine
    horizon = spec.horizon
    delta = horizon / n
    stats_buf = np.full(config.replications, np.nan)
    delta_f_sq = np.empty(config.replications)
    grad_energy = np.empty(config.replications)
    excluded = 0
    dt_fine = horizon / n_fine
    for r in range(config.replications):
        fine = simulate(spec, n_fine, config.seed, replicate=r)
        oracle = occupation_oracle(fine, f, horizon, min_steps=n_fine)
        skel = subsample(fine, n)
        vals = f.eval_fn(fine.values)
        delta_f_sq[r] = (vals[-1] - vals[0]) ** 2
        grads = np.reshape(f.grad_fn(fine.values), (fine.values.shape[0], -1))
        grad_energy[r] = np.trapezoid(np.sum(grads * grads, axis=1), dx=dt_fine)
        theta = estimate(skel, f, horizon)
        avar = avar_hat(skel, f)
        try:
            stats_buf[r] = standardized_error(oracle, theta, avar, delta)
        except DegenerateVarianceError:
            excluded += 1
    kept = stats_buf[~np.isnan(stats_buf)]
    if kept.size < 2:
        raise ModelError("all replicates excluded by the variance floor")
    ks = float(sps.kstest(kept, "norm").statistic)
    return CltDiagnostics(
        estimator_kind=estimator_kind,
        n=n,
        stats=kept,
        ks_distance=ks,
        mean=float(np.mean(kept)),
        variance=float(np.var(kept, ddof=1)),
        mean_square=float(np.mean(kept**2)),
        excluded_count=excluded,
        replications=config.replications,
        invalid=excluded > 0.05 * config.replications,
        delta_f_sq_mean=float(np.mean(delta_f_sq)),
        grad_energy_mean=float(np.mean(grad_energy)),
    )


@dataclass(frozen=True)
class EfficiencyReport:
    config: ExperimentConfig
    riemann: ErrorTable
    trapezoid: ErrorTable
    bridge: ErrorTable
    predicted_floor: np.ndarray  # Delta_n * sqrt(mean (1/12) int |grad f|^2)
    floor_stderr: np.ndarray
    mean_avar: float

    @property
    def ns(self) -> tuple:
        return self.riemann.ns


def efficiency_experiment(
    config: ExperimentConfig,
    function: TestFunction | None = None,
    inner_samples: int = 8,
    max_points_per_interval: int = 64,
) -> EfficiencyReport:
    """Riemann vs trapezoid vs bridge-conditional errors, with the
    asymptotic lower bound Delta_n * E[(1/12) int |grad f|^2 dr]^{1/2}."""
    spec = config.process
    if spec.kind != ProcessKind.BROWNIAN_MOTION:
        raise ModelError("efficiency study runs on the Brownian model")
    f = function if function is not None else config.function()
    if not f.supports_gradient:
        raise ModelError(f"{f.function_id}: efficiency floor needs a gradient")
    ns = config.n_ladder
    n_fine = config.n_fine
    horizon = spec.horizon
    dt_fine = horizon / n_fine
    shape = (config.replications, len(ns))
    err_r = np.empty(shape)
    err_t = np.empty(shape)
    err_b = np.empty(shape)
    avar_true = np.empty(config.replications)
    for r in range(config.replications):
        fine = simulate(spec, n_fine, config.seed, replicate=r)
        oracle = occupation_oracle(fine, f, horizon, min_steps=n_fine)
        grads = np.reshape(f.grad_fn(fine.values), (fine.values.shape[0], -1))
        avar_true[r] = np.trapezoid(np.sum(grads * grads, axis=1), dx=dt_fine) / 12.0
        for j, n in enumerate(ns):
            skel = subsample(fine, n)
            stride = n_fine // n
            err_r[r, j] = riemann_sum(skel, f, horizon) - oracle
            err_t[r, j] = trapezoid(skel, f, horizon) - oracle
            bridge_val = bridge_conditional_expectation(
                skel,
                f,
                inner_samples,
                config.seed,
                replicate=r,
                points_per_interval=min(stride, max_points_per_interval),
                process_kind=spec.kind,
            )
            err_b[r, j] = bridge_val - oracle
    deltas = np.asarray([horizon / n for n in ns])
    mean_avar = float(np.mean(avar_true))
    se_avar = float(np.std(avar_true, ddof=1) / math.sqrt(config.replications))
    floor = deltas * math.sqrt(mean_avar)
    floor_se = deltas * se_avar / (2.0 * math.sqrt(mean_avar))

    def table(kind, errs):
        return ErrorTable(
            ns=tuple(ns),
            deltas=deltas,
            horizon=horizon,
            estimator_kind=kind,
            errors=errs,
        )

    return EfficiencyReport(
        config=config,
        riemann=table(EstimatorKind.RIEMANN, err_r),
        trapezoid=table(EstimatorKind.TRAPEZOID, err_t),
        bridge=table(EstimatorKind.BRIDGE, err_b),
        predicted_floor=floor,
        floor_stderr=floor_se,
        mean_avar=mean_avar,
    )


@dataclass(frozen=True)
class LocalTimeReport:
    config: ExperimentConfig
    hurst: float
    level: float
    rho: float
    table: ErrorTable
    fit: RateFit
    predicted_exponent: float
    oracle_shift: float  # worst relative L2 move under eps0 -> eps0/2
    oracle_halving_rms: float  # per-path rms of the oracle move itself


def local_time_experiment(
    config: ExperimentConfig,
    level: float,
    rho: float,
    drop_smallest_n: bool = True,
    shift_tolerance: float = 0.10,
) -> LocalTimeReport:
    """L2 error of the shrinking-window local-time estimator across the
    ladder, against a fine-grid oracle with window eps0 = Delta_fine^alpha.

    The oracle must be insensitive to halving eps0; otherwise the run
    aborts rather than reporting rates against a moving target.
    """
    spec = config.process
    if spec.dim != 1:
        raise ModelError("local-time study runs in dimension 1")
    if spec.kind == ProcessKind.FRACTIONAL_BM:
        hurst = float(spec.params.hurst)
    elif spec.kind == ProcessKind.BROWNIAN_MOTION:
        hurst = 0.5
    else:
        raise ModelError(
            f"local-time study covers bm and fbm, not {spec.kind.value}"
        )
    alpha = local_time_bandwidth_exponent(hurst, rho)
    ns = config.n_ladder
    n_fine = config.n_fine
    horizon = spec.horizon
    eps0 = (horizon / n_fine) ** alpha
    kernel_full = make_local_time_kernel(level, eps0)
    kernel_half = make_local_time_kernel(level, eps0 / 2.0)
    shape = (config.replications, len(ns))
    errors = np.empty(shape)
    errors_half = np.empty(shape)
    oracle_moves = np.empty(config.replications)
    for r in range(config.replications):
        fine = simulate(spec, n_fine, config.seed, replicate=r)
        if fine.n_steps < n_fine:
            raise OracleResolutionError("fine path coarser than requested")
        oracle = riemann_sum(fine, kernel_full, horizon)
        oracle_h = riemann_sum(fine, kernel_half, horizon)
        oracle_moves[r] = oracle - oracle_h
        for j, n in enumerate(ns):
            skel = subsample(fine, n)
            est = local_time_estimator(skel, level, hurst, rho)
            errors[r, j] = est - oracle
            errors_half[r, j] = est - oracle_h
    deltas = np.asarray([horizon / n for n in ns])
    table = ErrorTable(
        ns=tuple(ns),
        deltas=deltas,
        horizon=horizon,
        estimator_kind=EstimatorKind.LOCAL_TIME,
        errors=errors,
    )
    l2_full = table.rms
    l2_half = np.sqrt(np.mean(errors_half**2, axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(l2_full - l2_half) / l2_full
    shift = float(np.max(rel))
    if not math.isfinite(shift) or shift > shift_tolerance:
        raise OracleResolutionError(
            f"local-time oracle unstable: halving eps0 moves the L2 error "
            f"by {100 * shift:.1f}% (gate {100 * shift_tolerance:.0f}%)"
        )
    fit = fit_rate(table, drop_smallest_n=drop_smallest_n)
    base = theoretical_rate(spec, 0.0, RateContext.LOCAL_TIME).delta_exponent
    return LocalTimeReport(
        config=config,
        hurst=hurst,
        level=level,
        rho=rho,
        table=table,
        fit=fit,
        predicted_exponent=base - rho,
        oracle_shift=shift,
        oracle_halving_rms=float(np.sqrt(np.mean(oracle_moves**2))),
    )


@dataclass(frozen=True)
class TScalingReport:
    config: ExperimentConfig
    t_ladder: tuple
    ns: tuple
    delta: float
    window_radius: float
    rms: np.ndarray
    rms_stderr: np.ndarray
    fit: RateFit  # slope = fitted T-exponent
    predicted_exponent: float
    overflow_fractions: np.ndarray
    overflow_flagged: bool


def _model_hurst_for_scaling(spec: ProcessSpec) -> float:
    if spec.kind == ProcessKind.BROWNIAN_MOTION:
        return 0.5
    if spec.kind == ProcessKind.FRACTIONAL_BM:
        return float(spec.params.hurst)
    raise ModelError(
        f"T-scaling study covers bm and fbm, not {spec.kind.value}"
    )


def t_scaling_experiment(
    config: ExperimentConfig,
    t_ladder: Sequence[float],
    window_radius: float | None = None,
) -> TScalingReport:
    """Error growth in the horizon at fixed Delta, for the compactified
    identity.

    Delta is config.process.horizon / max(config.n_ladder); every ladder
    horizon must be an integer multiple of it.  The flat window is
    6 * T_max^H unless given, and the fraction of fine-path points
    outside it is monitored (flagged above 1%).
    """
    spec = config.process
    hurst = _model_hurst_for_scaling(spec)
    t_ladder = tuple(float(t) for t in t_ladder)
    if len(t_ladder) < 3:
        raise ParameterError("t_ladder needs at least 3 horizons")
    if any(b <= a for a, b in zip(t_ladder, t_ladder[1:])):
        raise ParameterError("t_ladder must be strictly increasing")
    delta = spec.horizon / config.n_ladder[-1]
    ns = []
    for t in t_ladder:
        ratio = t / delta
        n_t = int(round(ratio))
        if abs(ratio - n_t) > 1e-9 * max(1.0, ratio) or n_t < 2:
            raise AlignmentError(
                f"horizon {t:g} is not an integer multiple of Delta={delta:g}"
            )
        ns.append(n_t)
    t_max = t_ladder[-1]
    radius = float(window_radius) if window_radius is not None else 6.0 * t_max**hurst
    f = identity_window(radius)
    rms_sq = np.empty((config.replications, len(t_ladder)))
    overflow = np.zeros(len(t_ladder))
    total_points = np.zeros(len(t_ladder))
    for j, (t, n_t) in enumerate(zip(t_ladder, ns)):
        spec_t = dataclasses.replace(spec, horizon=t)
        n_fine_t = config.oracle_factor * n_t
        for r in range(config.replications):
            fine = simulate(spec_t, n_fine_t, config.seed, replicate=r)
            oracle = occupation_oracle(fine, f, t, min_steps=n_fine_t)
            skel = subsample(fine, n_t)
            rms_sq[r, j] = (riemann_sum(skel, f, t) - oracle) ** 2
            overflow[j] += np.count_nonzero(np.abs(fine.values[:, 0]) > radius)
            total_points[j] += fine.values.shape[0]
    rms = np.sqrt(np.mean(rms_sq, axis=0))
    se_mean = np.std(rms_sq, axis=0, ddof=1) / math.sqrt(config.replications)
    with np.errstate(divide="ignore", invalid="ignore"):
        rms_se = np.where(rms > 0, se_mean / (2.0 * rms), np.nan)
    overflow_frac = overflow / total_points
    # slope of log error against log T; reuse the Delta fitter on (T, err)
    fit = fit_rate(np.asarray(t_ladder), rms, drop_smallest_n=False)
    predicted = theoretical_rate(spec, 0.0, RateContext.L2_ERROR).T_exponent
    return TScalingReport(
        config=config,
        t_ladder=t_ladder,
        ns=tuple(ns),
        delta=delta,
        window_radius=radius,
        rms=rms,
        rms_stderr=rms_se,
        fit=fit,
        predicted_exponent=predicted,
        overflow_fractions=overflow_frac,
        overflow_flagged=bool(np.any(overflow_frac > 0.01)),
    )
