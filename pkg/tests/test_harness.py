"""Experiment driver: coupling, determinism, fitting, and the study wrappers."""

import dataclasses

import numpy as np
import pytest

import occutime as ot
from occutime.errors import (
    AlignmentError,
    FitError,
    ModelError,
    OracleResolutionError,
    ParameterError,
)
from occutime.estimators import EstimatorKind
from occutime.harness import ErrorTable, RateFit, run_error_experiment

BM = ot.brownian_spec()


def fbm(h):
    return ot.ProcessSpec(ot.ProcessKind.FRACTIONAL_BM, 1, 1.0, ot.FbmParams(h))


def small_config(**kw):
    base = dict(
        process=BM,
        function_id="gaussian_bump",
        n_ladder=(64, 128, 256),
        replications=100,
        oracle_factor=16,
        seed=7,
    )
    base.update(kw)
    return ot.ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# config validation


def test_config_rejects_bad_ladders():
    with pytest.raises(ParameterError):
        small_config(n_ladder=())
    with pytest.raises(ParameterError):
        small_config(n_ladder=(256, 128))
    with pytest.raises(ParameterError):
        small_config(replications=0)
    with pytest.raises(AlignmentError):
        small_config(n_ladder=(100, 256))
    with pytest.raises(ParameterError):
        small_config(experiment_kind="treasure_hunt")


def test_config_function_resolution_is_lazy():
    cfg = small_config(function_id="no_such_function")
    with pytest.raises(ParameterError):
        cfg.function()


def test_config_n_fine():
    assert small_config().n_fine == 16 * 256


# ---------------------------------------------------------------------------
# error experiment


def test_constant_function_has_zero_error():
    cfg = small_config(function_id="indicator:-60:60", replications=1)
    table = run_error_experiment(cfg)
    assert np.all(table.errors == 0.0)


def test_errors_decrease_across_ladder():
    cfg = ot.ExperimentConfig(
        BM,
        "gaussian_bump",
        n_ladder=(64, 128, 256, 512, 1024, 2048, 4096),
        replications=500,
        seed=23,
    )
    table = run_error_experiment(cfg)
    rms = table.rms
    se = table.rms_stderr
    assert np.all(np.diff(rms) < 0.0)
    gaps = rms[:-1] - rms[1:]
    comb = np.sqrt(se[:-1] ** 2 + se[1:] ** 2)
    assert np.all(gaps > 3.0 * comb)


def test_doubling_replications_is_consistent():
    t1 = run_error_experiment(small_config(replications=200))
    t2 = run_error_experiment(small_config(replications=400))
    comb = np.sqrt(t1.rms_stderr**2 + t2.rms_stderr**2)
    assert np.all(np.abs(t1.rms - t2.rms) <= 3.0 * comb)


def test_experiment_is_deterministic():
    a = run_error_experiment(small_config())
    b = run_error_experiment(small_config())
    assert np.array_equal(a.errors, b.errors)


def test_replicate_errors_match_manual_recomputation():
    cfg = small_config(replications=3)
    table = run_error_experiment(cfg, EstimatorKind.TRAPEZOID)
    f = cfg.function()
    for r in range(3):
        fine = ot.simulate(BM, cfg.n_fine, cfg.seed, r)
        oracle = ot.occupation_oracle(fine, f, 1.0)
        for j, n in enumerate(cfg.n_ladder):
            skel = ot.subsample(fine, n)
            want = ot.trapezoid(skel, f, 1.0) - oracle
            assert table.errors[r, j] == want


def test_error_experiment_rejects_non_skeleton_estimators():
    with pytest.raises(ParameterError):
        run_error_experiment(small_config(), EstimatorKind.BRIDGE)


# ---------------------------------------------------------------------------
# rate fitting


def synthetic_table(ns, err_fn):
    deltas = np.array([1.0 / n for n in ns])
    errors = np.array([[err_fn(d) for d in deltas]])
    return ErrorTable(
        ns=tuple(ns),
        deltas=deltas,
        horizon=1.0,
        estimator_kind=EstimatorKind.RIEMANN,
        errors=errors,
    )


def test_fit_exact_power_law():
    table = synthetic_table((64, 128, 256, 512), lambda d: d**0.75)
    fit = ot.fit_rate(table)
    assert fit.slope == pytest.approx(0.75, abs=1e-12)
    assert fit.points_used == 3
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_log_factor_absorbed_into_slope():
    ns = tuple(2**k for k in range(6, 13))
    table = synthetic_table(ns, lambda d: d * np.sqrt(np.log(1.0 / d)))
    fit = ot.fit_rate(table, drop_smallest_n=False)
    assert 0.9 < fit.slope < 1.0


def test_fit_guards():
    table = synthetic_table((64, 128, 256), lambda d: 0.0)
    with pytest.raises(FitError):
        ot.fit_rate(table)
    with pytest.raises(FitError):
        # all three points kept, but a 3-point ladder cannot drop one
        ot.fit_rate(synthetic_table((64, 128), lambda d: d))
    with pytest.raises(FitError):
        RateFit(0.75, 0.0, 0.01, 0.99, points_used=2)


def test_rate_study_report_carries_prediction():
    cfg = small_config(function_id="indicator:0:1", replications=60)
    rep = ot.rate_study(cfg)
    assert rep.prediction.delta_exponent == pytest.approx(0.745)
    assert rep.abs_deviation == pytest.approx(
        abs(rep.fit.slope - 0.745), abs=1e-12
    )
    assert rep.effective_smoothness == pytest.approx(0.49)


def test_slope_ordering_tracks_smoothness():
    slopes = {}
    for fid in ("indicator:0:1", "hat:0.5:1"):
        cfg = ot.ExperimentConfig(
            BM,
            fid,
            n_ladder=(64, 128, 256, 512, 1024),
            replications=300,
            oracle_factor=32,
            seed=19,
        )
        rep = ot.rate_study(cfg)
        slopes[fid] = rep.fit
    gap = slopes["hat:0.5:1"].slope - slopes["indicator:0:1"].slope
    comb = np.hypot(slopes["hat:0.5:1"].slope_stderr, slopes["indicator:0:1"].slope_stderr)
    assert gap > 3.0 * comb


# ---------------------------------------------------------------------------
# study wrappers


def test_clt_smoke_and_model_guard():
    cfg = ot.ExperimentConfig(
        BM,
        "gaussian_bump",
        n_ladder=(256,),
        replications=300,
        seed=18,
        experiment_kind="clt_study",
    )
    d = ot.clt_experiment(cfg, "trapezoid")
    assert d.ks_distance <= 0.10
    assert d.excluded_count == 0
    assert not d.invalid
    with pytest.raises(ModelError):
        ot.clt_experiment(
            dataclasses.replace(cfg, process=fbm(0.7)), "trapezoid"
        )


def test_efficiency_orderings_small():
    cfg = ot.ExperimentConfig(
        BM,
        "gaussian_bump",
        n_ladder=(128, 256),
        replications=200,
        oracle_factor=32,
        seed=29,
        experiment_kind="efficiency_study",
    )
    rep = ot.efficiency_experiment(cfg)
    assert np.all(rep.predicted_floor > 0.0)
    assert np.all(rep.bridge.rms <= rep.trapezoid.rms)
    # the sharp floor comparison needs the asymptotic regime (n=2^12 in the
    # acceptance run); here only check the right order of magnitude
    ratio = rep.trapezoid.rms / rep.predicted_floor
    assert np.all((ratio > 0.7) & (ratio < 1.3))


def test_local_time_small_run_and_gate():
    cfg = ot.ExperimentConfig(
        fbm(0.5),
        "lt_kernel:0.0:0.01",
        n_ladder=(64, 128, 256, 512),
        replications=150,
        oracle_factor=128,
        seed=31,
        experiment_kind="local_time_study",
    )
    rep = ot.local_time_experiment(cfg, level=0.0, rho=0.01)
    assert rep.predicted_exponent == pytest.approx(0.24)
    assert 0.0 < rep.oracle_shift <= 0.10
    with pytest.raises(OracleResolutionError):
        ot.local_time_experiment(cfg, level=0.0, rho=0.01, shift_tolerance=1e-4)
    with pytest.raises(ModelError):
        ot.local_time_experiment(
            dataclasses.replace(cfg, process=ot.ou_process()), level=0.0, rho=0.01
        )


def test_t_scaling_brownian_boundary_case():
    cfg = ot.ExperimentConfig(
        BM,
        "identity:auto",
        n_ladder=(64,),
        replications=400,
        seed=17,
        experiment_kind="t_scaling_study",
    )
    rep = ot.t_scaling_experiment(cfg, (1.0, 2.0, 4.0))
    assert abs(rep.fit.slope - 0.5) <= 0.1
    assert rep.window_radius == pytest.approx(12.0)
    assert not rep.overflow_flagged
    with pytest.raises(ParameterError):
        ot.t_scaling_experiment(cfg, (1.0, 2.0))
    with pytest.raises(AlignmentError):
        ot.t_scaling_experiment(cfg, (1.0, 2.0, 3.1416))
