"""Estimator definitions, algebraic identities, and the bridge lower bound."""

import math

import numpy as np
import pytest

import occutime as ot
from occutime.errors import (
    CapabilityError,
    DegenerateVarianceError,
    ModelError,
    OracleResolutionError,
    ParameterError,
)
from occutime.estimators import EstimateRecord, EstimatorKind
from occutime.functions import TestFunction as FnEntry
from occutime.paths import PathGrid, simulate_bm, subsample

BM = ot.brownian_spec()


def bm_path(n, seed, replicate=0):
    return simulate_bm(BM, n, seed, replicate)


def deterministic_path(n, fn=lambda t: t):
    times = np.linspace(0.0, 1.0, n + 1)
    return PathGrid(times=times, values=fn(times)[:, None], dim=1)


def wide_indicator(path_or_m=50.0):
    # covers any path range we use; f == 1 on the path
    m = float(path_or_m)
    return ot.indicator(-m, m)


def scaled(f, c):
    grad = None if f.grad_fn is None else (lambda x: c * f.grad_fn(x))
    return FnEntry(
        kind=f.kind,
        function_id=f"{c:g}*{f.function_id}",
        smoothness_s=f.smoothness_s,
        supports_gradient=f.supports_gradient,
        dim=f.dim,
        eval_fn=lambda x: c * f.eval_fn(x),
        grad_fn=grad,
        ft_fn=None,
    )


def combination(alpha, g, beta, h):
    return FnEntry(
        kind="combination",
        function_id=f"{alpha:g}*{g.function_id}+{beta:g}*{h.function_id}",
        smoothness_s=min(g.smoothness_s, h.smoothness_s),
        supports_gradient=False,
        dim=1,
        eval_fn=lambda x: alpha * g.eval_fn(x) + beta * h.eval_fn(x),
    )


# ---------------------------------------------------------------------------
# Riemann sum


def test_riemann_constant_function_counts_steps():
    path = bm_path(64, seed=11)
    f = wide_indicator()
    delta = path.delta
    for t in (1.0, 0.37, 0.5, 0.015, 0.0):
        m = int(math.floor(t / delta + 1e-9))
        assert ot.riemann_sum(path, f, t) == pytest.approx(delta * m, rel=1e-13)


def test_riemann_deterministic_hand_sum():
    path = deterministic_path(2)
    f = ot.identity_window(5.0)
    assert ot.riemann_sum(path, f, 1.0) == pytest.approx(0.25, abs=1e-15)


def test_riemann_empty_skeleton_rejected():
    grid = PathGrid(times=np.array([0.0]), values=np.zeros((1, 1)), dim=1)
    with pytest.raises(ParameterError):
        ot.riemann_sum(grid, wide_indicator(), 0.0)
    path = bm_path(8, seed=3)
    with pytest.raises(ParameterError):
        ot.riemann_sum(path, wide_indicator(), 1.5)


def test_riemann_on_fine_grid_within_one_cell_of_oracle():
    f = ot.gaussian_bump()
    path = bm_path(4096, seed=21)
    riem = ot.riemann_sum(path, f, 1.0)
    oracle = ot.occupation_oracle(path, f, 1.0)
    max_f = float(np.max(f.eval_fn(path.values)))
    assert abs(riem - oracle) <= path.delta * max_f + 1e-15


# ---------------------------------------------------------------------------
# trapezoid


def test_trapezoid_deterministic_exact():
    path = deterministic_path(2)
    f = ot.identity_window(5.0)
    assert ot.trapezoid(path, f, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_trapezoid_riemann_identity_pathwise():
    fns = [ot.gaussian_bump(), ot.indicator(0.0, 1.0), ot.exp_abs(), ot.triangular_hat(0.0, 1.0)]
    for rep in range(3):
        path = bm_path(128, seed=77, replicate=rep)
        delta = path.delta
        for f in fns:
            for t in (1.0, 0.53, 0.0078125):
                m = int(math.floor(t / delta + 1e-9))
                gap = ot.trapezoid(path, f, t) - ot.riemann_sum(path, f, t)
                f0 = float(f.eval_fn(path.values[:1])[0])
                fm = float(f.eval_fn(path.values[m : m + 1])[0])
                assert gap == pytest.approx(delta * (fm - f0) / 2.0, abs=1e-14)


def test_trapezoid_constant_equals_riemann():
    path = bm_path(32, seed=5)
    f = wide_indicator()
    assert ot.trapezoid(path, f, 1.0) == ot.riemann_sum(path, f, 1.0)


# ---------------------------------------------------------------------------
# occupation oracle


def test_oracle_constant_gives_time():
    path = bm_path(1024, seed=9)
    assert ot.occupation_oracle(path, wide_indicator(), 0.625) == pytest.approx(
        0.625, abs=1e-12
    )


def test_oracle_polynomial_quadrature():
    path = deterministic_path(2**16)
    f = FnEntry(
        kind="poly",
        function_id="square",
        smoothness_s=math.inf,
        supports_gradient=False,
        dim=1,
        eval_fn=lambda x: x[:, 0] ** 2,
    )
    assert ot.occupation_oracle(path, f, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_oracle_resolution_guard():
    path = bm_path(256, seed=2)
    with pytest.raises(OracleResolutionError):
        ot.occupation_oracle(path, wide_indicator(), 1.0, min_steps=1024)
    # satisfied precondition passes through
    ot.occupation_oracle(path, wide_indicator(), 1.0, min_steps=256)


def test_oracle_refinement_negligible_vs_coarse_error():
    # doubling the oracle resolution moves the oracle by well under 10%
    # of the coarse-estimator error it is used to measure
    f = ot.indicator(0.0, 1.0)
    n, factor, reps = 256, 64, 100
    moved = np.empty(reps)
    err = np.empty(reps)
    for rep in range(reps):
        finest = bm_path(2 * factor * n, seed=431, replicate=rep)
        fine = subsample(finest, factor * n)
        coarse = subsample(finest, n)
        o2 = ot.occupation_oracle(finest, f, 1.0)
        o1 = ot.occupation_oracle(fine, f, 1.0)
        moved[rep] = o2 - o1
        err[rep] = ot.riemann_sum(coarse, f, 1.0) - o2
    rms = lambda a: float(np.sqrt(np.mean(a * a)))
    assert rms(moved) < 0.1 * rms(err)


# ---------------------------------------------------------------------------
# avar and the standardized statistic


def test_avar_mean_matches_quadratic_variation():
    f = ot.identity_window(100.0)
    reps = 1000
    vals = np.empty(reps)
    for rep in range(reps):
        path = bm_path(2**12, seed=52, replicate=rep)
        vals[rep] = ot.avar_hat(path, f)
    assert abs(vals.mean() - 1.0 / 12.0) < 0.02 / 12.0


def test_avar_constant_path_zero():
    grid = PathGrid(times=np.linspace(0.0, 1.0, 9), values=np.full((9, 1), 0.3), dim=1)
    assert ot.avar_hat(grid, ot.gaussian_bump()) == 0.0


def test_avar_scaling_and_capability():
    path = bm_path(64, seed=8)
    f = ot.gaussian_bump()
    base = ot.avar_hat(path, f)
    assert ot.avar_hat(path, scaled(f, 2.0)) == pytest.approx(4.0 * base, rel=1e-12)
    with pytest.raises(CapabilityError):
        ot.avar_hat(path, ot.indicator(0.0, 1.0))


def test_standardized_error_algebra():
    assert ot.standardized_error(1.7, 1.7, 0.5, 0.01) == 0.0
    one = ot.standardized_error(2.0, 1.0, 0.25, 0.1)
    half = ot.standardized_error(2.0, 1.0, 1.0, 0.1)
    assert half == pytest.approx(0.5 * one, rel=1e-13)
    with pytest.raises(DegenerateVarianceError):
        ot.standardized_error(1.0, 0.0, 1e-13, 0.1)
    with pytest.raises(ParameterError):
        ot.standardized_error(1.0, 0.0, 1.0, 0.0)


# ---------------------------------------------------------------------------
# bridge conditional expectation


def test_bridge_identity_equals_trapezoid():
    path = bm_path(64, seed=31)
    f = ot.identity_window(50.0)
    value, stderr = ot.bridge_conditional_detail(path, f, inner_samples=8, seed=101)
    want = ot.trapezoid(path, f, 1.0)
    assert abs(value - want) <= 3.0 * stderr + 1e-10


def test_bridge_constant_exact_zero_variance():
    path = bm_path(32, seed=12)
    value, stderr = ot.bridge_conditional_detail(
        path, wide_indicator(), inner_samples=8, seed=55
    )
    assert value == pytest.approx(1.0, abs=1e-12)
    assert stderr <= 1e-12


def test_bridge_approaches_riemann_linearly():
    f = ot.gaussian_bump()
    reps = 20
    gap = {}
    for n in (64, 1024):
        d = np.empty(reps)
        for rep in range(reps):
            path = subsample(bm_path(1024, seed=92, replicate=rep), n)
            b = ot.bridge_conditional_expectation(
                path, f, inner_samples=16, seed=92, replicate=rep
            )
            d[rep] = b - ot.riemann_sum(path, f, 1.0)
        gap[n] = float(np.sqrt(np.mean(d * d)))
    # difference is O(delta): a 16x finer grid shrinks it at least 8x
    assert gap[1024] <= gap[64] / 8.0


def test_bridge_guards():
    path = bm_path(16, seed=4)
    with pytest.raises(ModelError):
        ot.bridge_conditional_expectation(
            path,
            ot.gaussian_bump(),
            inner_samples=4,
            seed=0,
            process_kind=ot.ProcessKind.FRACTIONAL_BM,
        )
    with pytest.raises(ParameterError):
        ot.bridge_conditional_expectation(path, ot.gaussian_bump(), inner_samples=0, seed=0)


def test_bridge_l2_below_riemann_and_trapezoid():
    # conditional expectation minimizes L2 distance to the target among
    # skeleton-measurable estimates, so its empirical error sits below both
    f = ot.gaussian_bump()
    n, factor, reps = 64, 64, 500
    errs = {"riemann": [], "trapezoid": [], "bridge": []}
    for rep in range(reps):
        fine = bm_path(factor * n, seed=815, replicate=rep)
        coarse = subsample(fine, n)
        target = ot.occupation_oracle(fine, f, 1.0)
        errs["riemann"].append(ot.riemann_sum(coarse, f, 1.0) - target)
        errs["trapezoid"].append(ot.trapezoid(coarse, f, 1.0) - target)
        b = ot.bridge_conditional_expectation(
            coarse, f, inner_samples=16, seed=815, replicate=rep
        )
        errs["bridge"].append(b - target)
    rms = {k: float(np.sqrt(np.mean(np.square(v)))) for k, v in errs.items()}
    assert rms["bridge"] <= rms["riemann"]
    assert rms["bridge"] <= rms["trapezoid"]


# ---------------------------------------------------------------------------
# local time estimator


def test_local_time_bandwidth_arithmetic():
    assert ot.local_time_bandwidth_exponent(0.5, 0.01) == pytest.approx(0.49)
    with pytest.raises(ParameterError):
        ot.local_time_bandwidth_exponent(0.5, 0.6)
    with pytest.raises(ParameterError):
        ot.local_time_bandwidth_exponent(1.2, 0.01)


def test_local_time_zero_off_window():
    grid = PathGrid(
        times=np.linspace(0.0, 1.0, 65), values=np.full((65, 1), 5.0), dim=1
    )
    assert ot.local_time_estimator(grid, a=0.0, hurst=0.5, rho=0.01) == 0.0


def test_local_time_window_height():
    n = 64
    grid = PathGrid(times=np.linspace(0.0, 1.0, n + 1), values=np.zeros((n + 1, 1)), dim=1)
    eps = (1.0 / n) ** 0.49
    got = ot.local_time_estimator(grid, a=0.0, hurst=0.5, rho=0.01)
    assert got == pytest.approx(1.0 / (2.0 * eps), rel=1e-12)


# ---------------------------------------------------------------------------
# shared invariants


def test_linearity_in_f():
    path = bm_path(256, seed=66)
    g, h = ot.gaussian_bump(), ot.triangular_hat(0.2, 1.0)
    combo = combination(0.7, g, -0.3, h)
    for op in (ot.riemann_sum, ot.trapezoid, ot.occupation_oracle):
        want = 0.7 * op(path, g, 1.0) - 0.3 * op(path, h, 1.0)
        assert op(path, combo, 1.0) == pytest.approx(want, abs=1e-13)


def test_nonnegative_functions_give_nonnegative_estimates():
    for rep in range(5):
        path = bm_path(128, seed=41, replicate=rep)
        for f in (ot.indicator(-0.5, 0.5), ot.gaussian_bump(), ot.exp_abs()):
            assert ot.riemann_sum(path, f, 1.0) >= 0.0
            assert ot.trapezoid(path, f, 1.0) >= 0.0
            assert ot.occupation_oracle(path, f, 1.0) >= 0.0


def test_estimate_record_validation():
    rec = EstimateRecord(EstimatorKind.RIEMANN, 0.5, 64, 1.0, "gaussian_bump")
    assert rec.estimator_kind is EstimatorKind.RIEMANN
    with pytest.raises(ParameterError):
        EstimateRecord(EstimatorKind.ORACLE, math.nan, 64, 1.0, "gaussian_bump")
