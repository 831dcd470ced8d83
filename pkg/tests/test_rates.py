"""Rate catalog values, coverage errors, and the Fourier-domain bound."""

import math

import numpy as np
import pytest

import occutime as ot
from occutime.errors import (
    CapabilityError,
    CoverageError,
    ParameterError,
    ResolutionError,
)
from occutime.functions import TestFunction as FnEntry
from occutime.paths import subsample
from occutime.rates import RateContext, RatePrediction

from _bound_brute import brute_force_bound

BM = ot.brownian_spec()


def fbm(h):
    return ot.ProcessSpec(ot.ProcessKind.FRACTIONAL_BM, 1, 1.0, ot.FbmParams(h))


def stable(gamma):
    return ot.ProcessSpec(
        ot.ProcessKind.SYMMETRIC_STABLE, 1, 1.0, ot.StableParams(gamma, 1.0)
    )


# ---------------------------------------------------------------------------
# catalog


def test_brownian_indicator_rate():
    pred = ot.theoretical_rate(BM, 0.49)
    assert pred.delta_exponent == pytest.approx(0.745)
    assert pred.T_exponent == 0.5
    assert pred.log_factor is False


def test_rough_fbm_rate():
    pred = ot.theoretical_rate(fbm(0.3), 0.49)
    assert pred.delta_exponent == pytest.approx(0.647)
    assert pred.T_exponent == 0.5


def test_smooth_fbm_rate_keeps_indicator_exponent():
    pred = ot.theoretical_rate(fbm(0.7), 0.49)
    assert pred.delta_exponent == pytest.approx(0.745)
    assert pred.T_exponent == 0.7


def test_diffusion_rate_carries_log_factor():
    pred = ot.theoretical_rate(ot.ou_process(), 1.0)
    assert pred.delta_exponent == 1.0
    assert pred.log_factor is True


def test_stable_rate():
    pred = ot.theoretical_rate(stable(1.5), 0.5)
    assert pred.delta_exponent == pytest.approx(0.5 + 0.5 / 1.5)
    assert pred.T_exponent == 0.5


def test_compound_poisson_rate():
    spec = ot.ProcessSpec(
        ot.ProcessKind.COMPOUND_POISSON,
        1,
        1.0,
        ot.PoissonParams(2.0, ot.JumpLaw(kind="normal", mean=0.0, std=1.0)),
    )
    pred = ot.theoretical_rate(spec, 0.0)
    assert pred.delta_exponent == 1.0
    assert pred.T_exponent == 1.0


def test_local_time_context_rates():
    assert ot.theoretical_rate(fbm(0.5), 0.0, RateContext.LOCAL_TIME).delta_exponent == pytest.approx(0.25)
    assert ot.theoretical_rate(fbm(0.3), 0.0, "local_time").delta_exponent == pytest.approx(0.35)
    assert ot.theoretical_rate(BM, 0.0, "local-time").delta_exponent == pytest.approx(0.25)
    assert ot.theoretical_rate(fbm(0.5), 0.0, RateContext.LOCAL_TIME).T_exponent == 0.5


def test_coverage_errors_name_the_condition():
    with pytest.raises(CoverageError, match="0<=s<=1"):
        ot.theoretical_rate(BM, 1.2)
    with pytest.raises(CoverageError, match="gamma/2"):
        ot.theoretical_rate(stable(1.5), 0.8)
    with pytest.raises(CoverageError):
        ot.theoretical_rate(stable(1.5), 0.0, RateContext.LOCAL_TIME)
    with pytest.raises(ParameterError):
        ot.theoretical_rate(BM, 0.5, context="banana")


def test_smoothness_cap():
    assert ot.smoothness_cap(stable(1.5)) == 0.75
    assert ot.smoothness_cap(BM) == 1.0
    assert math.isinf(
        ot.smoothness_cap(
            ot.ProcessSpec(
                ot.ProcessKind.COMPOUND_POISSON,
                1,
                1.0,
                ot.PoissonParams(1.0, ot.JumpLaw(kind="point", value=1.0)),
            )
        )
    )


def test_bandwidth_exponent_regimes():
    assert ot.local_time_bandwidth_exponent(0.3, 0.01) == pytest.approx(0.29)
    assert ot.local_time_bandwidth_exponent(0.7, 0.01) == pytest.approx(
        1.5 * 0.7 / 1.7 - 0.01
    )


def test_indicator_sharp_rate_value():
    assert ot.indicator_sharp_rate().delta_exponent == 0.75


def test_rate_prediction_validation():
    RatePrediction(0.25, 0.5, False, "x")
    with pytest.raises(ParameterError):
        RatePrediction(1.2, 0.5, False, "x")
    with pytest.raises(ParameterError):
        RatePrediction(0.0, 0.5, False, "x")


# ---------------------------------------------------------------------------
# bound evaluator


def test_bound_zero_function():
    zero = FnEntry(
        kind="zero",
        function_id="zero",
        smoothness_s=math.inf,
        supports_gradient=False,
        dim=1,
        eval_fn=lambda x: np.zeros(x.shape[0]),
        ft_fn=lambda u: np.zeros_like(u),
    )
    assert ot.fourier_bound_evaluator(BM, zero, 8, truncation=8.0) == 0.0


def test_bound_matches_brute_force_quadrature():
    bump = ot.gaussian_bump()
    fast = ot.fourier_bound_evaluator(BM, bump, 2, truncation=8.0)
    brute = brute_force_bound(
        2, 1.0, 0.5, lambda u: np.abs(bump.ft_fn(u)), umax=8.0, nu=101, nt=51
    )
    assert fast == pytest.approx(brute, rel=0.01)


def test_bound_scales_like_delta_squared():
    bump = ot.gaussian_bump()
    ns = np.array([8, 16, 32, 64], dtype=float)
    vals = np.array(
        [ot.fourier_bound_evaluator(BM, bump, int(n), truncation=8.0) for n in ns]
    )
    slope = -np.polyfit(np.log(ns), np.log(vals), 1)[0]
    assert abs(slope - 2.0) <= 0.15


def test_bound_resolution_and_capability_guards():
    bump = ot.gaussian_bump()
    with pytest.raises(ResolutionError):
        ot.fourier_bound_evaluator(BM, bump, 8, truncation=2.0)
    with pytest.raises(CapabilityError):
        ot.fourier_bound_evaluator(BM, ot.identity_window(3.0), 8, truncation=8.0)
    with pytest.raises(CapabilityError):
        ot.fourier_bound_evaluator(stable(1.5), bump, 8, truncation=8.0)
    with pytest.raises(ParameterError):
        ot.fourier_bound_evaluator(BM, bump, 0, truncation=8.0)


def test_empirical_error_dominated_by_bound():
    # fitted constant at the largest n covers the smaller ones within 2x
    bump = ot.gaussian_bump()
    ns = (8, 32)
    reps = 300
    factor = 64
    emp = {}
    for n in ns:
        errs = np.empty(reps)
        for rep in range(reps):
            fine = ot.simulate(BM, factor * n, 1234, rep)
            coarse = subsample(fine, n)
            errs[rep] = ot.riemann_sum(coarse, bump, 1.0) - ot.occupation_oracle(
                fine, bump, 1.0
            )
        emp[n] = float(np.mean(errs**2))
    bound = {n: ot.fourier_bound_evaluator(BM, bump, n, truncation=8.0) for n in ns}
    c_fit = emp[32] / bound[32]
    assert emp[8] <= 2.0 * c_fit * bound[8]
