"""Predicted convergence rates as data, and the Gaussian Fourier-domain bound.

The rate catalog maps (process model, smoothness s, context) to the
exponents the estimation-error theory predicts for the L2 error of the
Riemann-sum estimator:

    Brownian motion      Delta^{(1+s)/2},           T^{1/2}, 0 <= s <= 1
    Ito diffusion        Delta^{(1+s)/2} (log),     T^{1/2}, 0 <= s <= 1
    fBM, H >= 1/2        Delta^{(1+s)/2},           T^{H}
    fBM, H <  1/2        Delta^{(1+2sH)/2},         T^{1/2}
    symmetric stable     Delta^{1/2+s/gamma},       T^{1/2}, 0 <= s <= gamma/2
    compound Poisson     Delta^{1},                 T^{1},   any f in L2

and, in the local-time context (window estimator at a level a),

    H >= 1/2             Delta^{(3/4)(1-H)/(1+H)},  T^{H}
    H <  1/2             Delta^{(1-H)/2},           T^{1/2}

local-time exponents are quoted at vanishing window-tuning margin rho;
the estimator's bandwidth uses alpha_H = (3/2)H/(1+H) - rho (H >= 1/2)
or H - rho (H < 1/2), and its achieved exponent loses the same rho.

Requests outside a regime's hypotheses raise CoverageError naming the
violated condition rather than extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, CoverageError, ParameterError, ResolutionError
from .functions import TestFunction
from .kernels import bound_accumulate, bound_point_tables, gauss_legendre_01
from .paths import ProcessKind, ProcessSpec


class RateContext(str, Enum):
    L2_ERROR = "l2_error"
    LOCAL_TIME = "local_time"


@dataclass(frozen=True)
class RatePrediction:
    """Predicted error decay: L2 error ~ T^T_exponent * Delta^delta_exponent.

    L2-error catalog entries always land in [1/2, 1]; local-time window
    exponents are smaller (0.25 at H=1/2), so the type admits (0, 1].
    """

    delta_exponent: float
    T_exponent: float
    log_factor: bool
    source: str

    def __post_init__(self):
        if not 0.0 < self.delta_exponent <= 1.0 + 1e-12:
            raise ParameterError(
                f"delta exponent {self.delta_exponent:g} outside (0, 1]"
            )


def smoothness_cap(spec: ProcessSpec) -> float:
    """Largest smoothness the rate hypotheses admit for this model."""
    if spec.kind == ProcessKind.SYMMETRIC_STABLE:
        return spec.params.gamma / 2.0
    if spec.kind == ProcessKind.COMPOUND_POISSON:
        return math.inf
    return 1.0


def local_time_bandwidth_exponent(hurst: float, rho: float) -> float:
    """alpha_H for the shrinking window eps = Delta^{alpha_H}."""
    if not 0.0 < hurst < 1.0:
        raise ParameterError("Hurst index must lie in (0,1)")
    base = 1.5 * hurst / (1.0 + hurst) if hurst >= 0.5 else hurst
    alpha = base - rho
    if not 0.0 < rho < alpha:
        raise ParameterError(
            f"window margin rho={rho:g} must lie in (0, {base:g} - rho)"
        )
    return alpha


def _context(context) -> RateContext:
    if isinstance(context, RateContext):
        return context
    key = str(context).strip().lower().replace("-", "_")
    aliases = {
        "l2error": RateContext.L2_ERROR,
        "l2_error": RateContext.L2_ERROR,
        "localtime": RateContext.LOCAL_TIME,
        "local_time": RateContext.LOCAL_TIME,
    }
    if key not in aliases:
        raise ParameterError(f"unknown rate context {context!r}")
    return aliases[key]


def theoretical_rate(spec: ProcessSpec, s: float, context="l2_error") -> RatePrediction:
    """Predicted (Delta exponent, T exponent, log flag, provenance)."""
    ctx = _context(context)
    kind = spec.kind

    if ctx == RateContext.LOCAL_TIME:
        if kind == ProcessKind.BROWNIAN_MOTION:
            hurst = 0.5
        elif kind == ProcessKind.FRACTIONAL_BM:
            hurst = float(spec.params.hurst)
        else:
            raise CoverageError(
                "local-time rates cover Brownian and fractional Brownian "
                f"motion only, not {kind.value}"
            )
        if hurst >= 0.5:
            return RatePrediction(
                delta_exponent=0.75 * (1.0 - hurst) / (1.0 + hurst),
                T_exponent=hurst,
                log_factor=False,
                source=(
                    "shrinking-window local time, locally nondeterministic "
                    f"Gaussian regime H={hurst:g}>=1/2 (quoted at rho=0)"
                ),
            )
        return RatePrediction(
            delta_exponent=(1.0 - hurst) / 2.0,
            T_exponent=0.5,
            log_factor=False,
            source=(
                "shrinking-window local time, rough Gaussian regime "
                f"H={hurst:g}<1/2 (quoted at rho=0)"
            ),
        )

    if kind == ProcessKind.BROWNIAN_MOTION:
        if not 0.0 <= s <= 1.0:
            raise CoverageError(
                f"Brownian rate needs Sobolev smoothness 0<=s<=1, got s={s:g}"
            )
        return RatePrediction(
            delta_exponent=(1.0 + s) / 2.0,
            T_exponent=0.5,
            log_factor=False,
            source="additive process with nondegenerate Gaussian part, H^s smoothness",
        )
    if kind == ProcessKind.ITO_DIFFUSION:
        if not 0.0 <= s <= 1.0:
            raise CoverageError(
                f"diffusion rate needs Sobolev smoothness 0<=s<=1, got s={s:g}"
            )
        return RatePrediction(
            delta_exponent=(1.0 + s) / 2.0,
            T_exponent=0.5,
            log_factor=True,
            source="Markov heat-kernel estimate, H^s smoothness, log factor retained",
        )
    if kind == ProcessKind.FRACTIONAL_BM:
        hurst = float(spec.params.hurst)
        if not 0.0 <= s <= 1.0:
            raise CoverageError(
                f"fractional Brownian rate needs 0<=s<=1, got s={s:g}"
            )
        if hurst >= 0.5:
            return RatePrediction(
                delta_exponent=(1.0 + s) / 2.0,
                T_exponent=hurst,
                log_factor=False,
                source=(
                    "locally nondeterministic Gaussian bound, "
                    f"H={hurst:g}>=1/2 regime"
                ),
            )
        return RatePrediction(
            delta_exponent=(1.0 + 2.0 * s * hurst) / 2.0,
            T_exponent=0.5,
            log_factor=False,
            source=(
                "locally nondeterministic Gaussian bound, "
                f"H={hurst:g}<1/2 regime"
            ),
        )
    if kind == ProcessKind.SYMMETRIC_STABLE:
        gamma = float(spec.params.gamma)
        if not 0.0 <= s <= gamma / 2.0:
            raise CoverageError(
                f"stable rate needs 0<=s<=gamma/2={gamma / 2.0:g}, got s={s:g}"
            )
        return RatePrediction(
            delta_exponent=0.5 + s / gamma,
            T_exponent=0.5,
            log_factor=False,
            source=f"self-similar additive bound, stability index gamma={gamma:g}",
        )
    if kind == ProcessKind.COMPOUND_POISSON:
        return RatePrediction(
            delta_exponent=1.0,
            T_exponent=1.0,
            log_factor=False,
            source="bounded characteristic-exponent derivative, any f in L2",
        )
    raise CoverageError(f"no rate prediction for process kind {kind!r}")


def indicator_sharp_rate() -> RatePrediction:
    """The interpolation-improved Delta^{3/4} for Brownian indicators."""
    return RatePrediction(
        delta_exponent=0.75,
        T_exponent=0.5,
        log_factor=False,
        source="Brownian indicator rate, sharp by interpolation",
    )


# ---------------------------------------------------------------------------
# Fourier-domain bound evaluation (Gaussian models)


def _model_hurst(spec: ProcessSpec) -> float:
    if spec.dim != 1:
        raise CapabilityError("bound evaluation implemented for dim=1 only")
    if spec.kind == ProcessKind.BROWNIAN_MOTION:
        return 0.5
    if spec.kind == ProcessKind.FRACTIONAL_BM:
        return float(spec.params.hurst)
    raise CapabilityError(
        "bound evaluation covers Brownian and fractional Brownian motion, "
        f"not {spec.kind.value}"
    )


def _frequency_grid(truncation: float, panels_per_segment: int, order: int):
    """Composite GL nodes on [-U, U], aligned so |u| <= U/2 is a sub-grid.

    Returns (nodes, weights, inner_mask).
    """
    gx, gw = gauss_legendre_01(order)
    edges_inner = np.linspace(0.0, truncation / 2.0, panels_per_segment + 1)
    edges_outer = np.linspace(truncation / 2.0, truncation, panels_per_segment + 1)
    edges = np.concatenate([edges_inner[:-1], edges_outer])
    nodes, weights, inner = [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        pos = lo + width * gx
        for sign in (1.0, -1.0):
            nodes.append(sign * pos)
            weights.append(width * gw)
            inner.append(np.full(pos.shape, hi <= truncation / 2.0 + 1e-12))
    nodes = np.concatenate(nodes)
    order_idx = np.argsort(nodes)
    return (
        nodes[order_idx],
        np.concatenate(weights)[order_idx],
        np.concatenate(inner)[order_idx],
    )


@lru_cache(maxsize=4)
def _cached_tables(n: int, horizon: float, hurst: float, diag_order: int, off_order: int):
    return bound_point_tables(n, horizon, hurst, diag_order, off_order)


def fourier_bound_evaluator(
    spec: ProcessSpec,
    f: TestFunction,
    n: int,
    truncation: float,
    horizon: float | None = None,
    *,
    panels_per_segment: int = 3,
    freq_order: int = 8,
    diag_order: int = 8,
    off_order: int = 4,
) -> float:
    """Numeric value (absolute constant set to 1) of the Gaussian
    Fourier-domain squared-error bound at sample size n.

    Frequency integration runs over [-U, U]^2 at the given truncation U;
    the contribution of the band beyond U/2 serves as the truncation-tail
    estimate and must stay below 5% of the value.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if truncation <= 0.0:
        raise ParameterError("truncation must be positive")
    if f.ft_fn is None:
        raise CapabilityError(
            f"{f.function_id}: bound evaluation needs a Fourier transform"
        )
    if f.dim != 1:
        raise CapabilityError("bound evaluation implemented for dim=1 only")
    hurst = _model_hurst(spec)
    t_hor = float(spec.horizon if horizon is None else horizon)
    tables = _cached_tables(int(n), t_hor, hurst, int(diag_order), int(off_order))
    uu, ww, inner = _frequency_grid(float(truncation), panels_per_segment, freq_order)
    coef = ww * np.abs(f.ft_fn(uu))
    value = bound_accumulate(uu, coef, *tables)
    inner_value = bound_accumulate(uu[inner], coef[inner], *tables)
    tail = value - inner_value
    if value > 0.0 and tail > 0.05 * value:
        raise ResolutionError(
            f"frequency truncation {truncation:g} too small: outer band "
            f"carries {100 * tail / value:.1f}% of the bound value"
        )
    return float(value)
