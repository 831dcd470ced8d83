"""Occupation-time estimators, oracles, and the standardized CLT statistic.

All sums follow the discrete-observation definitions: with spacing Δ and
m = ⌊t/Δ⌋ (snapped down to the grid),

    riemann    Δ Σ_{k=1}^{m} f(X_{t_{k-1}})
    trapezoid  Δ Σ_{k=1}^{m} (f(X_{t_{k-1}}) + f(X_{t_k})) / 2

and the ground-truth occupation time is realized numerically as the
composite trapezoid quadrature of r -> f(X_r) on a much finer grid of
the same path.  Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng
from .errors import (
    CapabilityError,
    DegenerateVarianceError,
    ModelError,
    ParameterError,
)
from .functions import TestFunction, grad_f, make_local_time_kernel
from .paths import PathGrid, ProcessKind, _as_master_seed

AVAR_FLOOR = 1e-12


class EstimatorKind(str, Enum):
    RIEMANN = "riemann"
    TRAPEZOID = "trapezoid"
    ORACLE = "oracle"
    BRIDGE = "bridge"
    LOCAL_TIME = "local_time"


@dataclass(frozen=True)
class EstimateRecord:
    estimator_kind: EstimatorKind
    value: float
    n: int
    t: float
    function_id: str

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ParameterError("estimate value must be finite")


def _snap_steps(skeleton: PathGrid, t: float) -> tuple[float, int]:
    """Return (Δ, ⌊t/Δ⌋) with a tolerance so t=k·Δ hits k exactly."""
    if skeleton.n_steps == 0:
        raise ParameterError("skeleton must contain at least one step")
    delta = skeleton.delta
    horizon = skeleton.horizon
    if t < -1e-12 or t > horizon * (1.0 + 1e-12):
        raise ParameterError(f"evaluation time {t} outside [0, {horizon}]")
    m = int(math.floor(t / delta + 1e-9))
    return delta, min(m, skeleton.n_steps)


def _eval_on(f: TestFunction, values: np.ndarray) -> np.ndarray:
    if values.shape[1] != f.dim:
        raise ParameterError(
            f"path dimension {values.shape[1]} != function dimension {f.dim}"
        )
    return f.eval_fn(values)


def riemann_sum(skeleton: PathGrid, f: TestFunction, t: float) -> float:
    """Left-endpoint sum Δ Σ_{k=1}^{⌊t/Δ⌋} f(X_{t_{k-1}})."""
    delta, m = _snap_steps(skeleton, t)
    if m == 0:
        return 0.0
    vals = _eval_on(f, skeleton.values[:m])
    return float(delta * vals.sum())


def trapezoid(skeleton: PathGrid, f: TestFunction, t: float) -> float:
    """Trapezoid sum Δ Σ_{k=1}^{⌊t/Δ⌋} (f(X_{t_{k-1}}) + f(X_{t_k})) / 2."""
    delta, m = _snap_steps(skeleton, t)
    if m == 0:
        return 0.0
    vals = _eval_on(f, skeleton.values[: m + 1])
    return float(delta * (vals.sum() - 0.5 * (vals[0] + vals[m])))


def occupation_oracle(
    fine_path: PathGrid, f: TestFunction, t: float, min_steps: int | None = None
) -> float:
    """Ground truth ∫_0^t f(X_r) dr by composite trapezoid on the fine grid.

    min_steps, when given, encodes the resolution the caller requires
    (oracle_factor times the largest skeleton size under study).
    """
    if min_steps is not None and fine_path.n_steps < min_steps:
        from .errors import OracleResolutionError

        raise OracleResolutionError(
            f"oracle path has {fine_path.n_steps} steps, "
            f"required at least {min_steps}"
        )
    return trapezoid(fine_path, f, t)


def avar_hat(skeleton: PathGrid, f: TestFunction) -> float:
    """(1/12) Σ_k <∇f(X_{t_{k-1}}), X_{t_k} - X_{t_{k-1}}>²."""
    if not f.supports_gradient:
        raise CapabilityError(
            f"{f.function_id}: asymptotic variance needs a gradient"
        )
    if skeleton.n_steps == 0:
        raise ParameterError("skeleton must contain at least one step")
    vals = skeleton.values
    if vals.shape[1] != f.dim:
        raise ParameterError(
            f"path dimension {vals.shape[1]} != function dimension {f.dim}"
        )
    g = f.grad_fn(vals[:-1])
    dx = np.diff(vals, axis=0)
    if f.dim == 1:
        inner = g * dx[:, 0]
    else:
        inner = np.sum(g * dx, axis=1)
    return float(np.sum(inner * inner) / 12.0)


def standardized_error(
    oracle: float, theta_hat: float, avar: float, delta_n: float
) -> float:
    """Δ_n^{-1} AVAR^{-1/2} (Γ_T - Θ̂); the feasible CLT statistic."""
    if delta_n <= 0.0:
        raise ParameterError("delta_n must be positive")
    if avar <= AVAR_FLOOR:
        raise DegenerateVarianceError(
            f"estimated asymptotic variance {avar:g} at or below floor {AVAR_FLOOR:g}"
        )
    return float((oracle - theta_hat) / (delta_n * math.sqrt(avar)))


def bridge_conditional_detail(
    skeleton: PathGrid,
    f: TestFunction,
    inner_samples: int,
    seed,
    *,
    replicate: int = 0,
    points_per_interval: int = 16,
    process_kind: ProcessKind | None = None,
) -> tuple[float, float]:
    """Monte Carlo E[Γ_T(f) | observed skeleton] for Brownian paths.

    Each inner sample fills every observation interval with a Brownian
    bridge pinned at the observed endpoints, evaluated at the stratified
    interior times t_{k-1} + j Δ/p, and integrates f along the filled
    path by composite trapezoid.  Samples are drawn in antithetic pairs
    (fluctuation sign flipped), which makes the identity function exact
    and cancels the leading odd term for smooth f.

    Returns (estimate, standard error); the standard error is computed
    over antithetic pair averages and is nan for inner_samples < 4.
    """
    if process_kind is not None and process_kind != ProcessKind.BROWNIAN_MOTION:
        raise ModelError(
            "bridge conditional expectation is only valid for Brownian motion, "
            f"got {process_kind}"
        )
    if inner_samples < 1:
        raise ParameterError("inner_samples must be >= 1")
    if points_per_interval < 1:
        raise ParameterError("points_per_interval must be >= 1")
    if skeleton.dim != 1:
        raise CapabilityError("bridge filling implemented for dim=1 only")
    delta = skeleton.delta
    n = skeleton.n_steps
    p = points_per_interval
    theta = trapezoid(skeleton, f, skeleton.horizon)
    if p == 1:
        return theta, 0.0
    dt_f = delta / p
    xl = skeleton.values[:-1, 0]
    xr = skeleton.values[1:, 0]
    frac = np.arange(1, p) / p
    base = xl[:, None] + (xr - xl)[:, None] * frac[None, :]  # (n, p-1)

    master = _as_master_seed(seed)
    gen = rng.stream(master, rng.BRIDGE, replicate)
    estimates = np.empty(inner_samples)
    pair_means = []
    i = 0
    while i < inner_samples:
        noise = math.sqrt(dt_f) * gen.standard_normal((n, p))
        w = np.cumsum(noise, axis=1)
        fluct = w[:, : p - 1] - w[:, p - 1 : p] * frac[None, :]
        for sign in (1.0, -1.0):
            if i >= inner_samples:
                break
            pts = (base + sign * fluct).reshape(-1, 1)
            interior = float(f.eval_fn(pts).sum()) * dt_f
            estimates[i] = theta / p + interior
            i += 1
        if i >= 2 and i % 2 == 0:
            pair_means.append(0.5 * (estimates[i - 2] + estimates[i - 1]))
    value = float(estimates.mean())
    if len(pair_means) >= 2:
        pm = np.asarray(pair_means)
        stderr = float(pm.std(ddof=1) / math.sqrt(len(pm)))
    else:
        stderr = float("nan")
    return value, stderr


def bridge_conditional_expectation(
    skeleton: PathGrid,
    f: TestFunction,
    inner_samples: int,
    seed,
    *,
    replicate: int = 0,
    points_per_interval: int = 16,
    process_kind: ProcessKind | None = None,
) -> float:
    value, _ = bridge_conditional_detail(
        skeleton,
        f,
        inner_samples,
        seed,
        replicate=replicate,
        points_per_interval=points_per_interval,
        process_kind=process_kind,
    )
    return value


def local_time_estimator(skeleton: PathGrid, a: float, hurst: float, rho: float) -> float:
    """Riemann sum of the (2ε)^{-1} window at level a with ε = Δ^{α_H}."""
    from .rates import local_time_bandwidth_exponent

    if skeleton.dim != 1:
        raise CapabilityError("local time estimation implemented for dim=1 only")
    alpha = local_time_bandwidth_exponent(hurst, rho)
    delta = skeleton.delta
    eps = delta**alpha
    kernel = make_local_time_kernel(a, eps)
    return riemann_sum(skeleton, kernel, skeleton.horizon)
