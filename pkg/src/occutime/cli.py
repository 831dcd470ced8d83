"""Command-line front end, config parsing, and result persistence.

Config files are JSON with strict unknown-key rejection; every floating
point number written to CSV or JSON carries 17 significant digits so
reruns can be compared bitwise.  Output directory resolution: --out flag,
else the OCCUTIME_OUTPUT_DIR environment variable, else ./out.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    NumericGateError,
    OccutimeError,
    ParameterError,
)
from .estimators import EstimatorKind
from .functions import from_id
from .harness import (
    DIFFUSION_PRESETS,
    DEFAULT_N_LADDER,
    DEFAULT_ORACLE_FACTOR,
    DEFAULT_REPLICATIONS,
    ErrorTable,
    ExperimentConfig,
    ExperimentKind,
    RateFit,
    clt_experiment,
    efficiency_experiment,
    fit_rate,
    local_time_experiment,
    rate_study,
    t_scaling_experiment,
)
from .paths import (
    FbmParams,
    InitialLaw,
    JumpLaw,
    PoissonParams,
    ProcessKind,
    ProcessSpec,
    StableParams,
    brownian_spec,
    simulate,
)
from .rates import RateContext, fourier_bound_evaluator, theoretical_rate

TOOL_VERSION = "0.1.0"

_EXPERIMENT_NAMES = {
    "rate-study": ExperimentKind.RATE_STUDY,
    "clt-study": ExperimentKind.CLT_STUDY,
    "local-time": ExperimentKind.LOCAL_TIME_STUDY,
    "efficiency": ExperimentKind.EFFICIENCY_STUDY,
    "t-scaling": ExperimentKind.T_SCALING_STUDY,
}

_PROCESS_KINDS = ("bm", "diffusion", "fbm", "stable", "cpoisson")


# ---------------------------------------------------------------------------
# 17-significant-digit serialization


def fmt_float(x) -> str:
    return format(float(x), ".17g")


def _json_value(obj, out: list, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f'{pad}  {json.dumps(str(k))}: ')
            _json_value(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad + "  ")
            _json_value(v, out, indent + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(obj))
    else:
        out.append(json.dumps(str(obj)))


def dump_json(obj) -> str:
    """JSON text with floats at 17 significant digits, stable key order."""
    out: list = []
    _json_value(obj, out, 0)
    out.append("\n")
    return "".join(out)


def write_json(obj, path: Path):
    path.write_text(dump_json(obj))


# ---------------------------------------------------------------------------
# Config parsing


@dataclass(frozen=True)
class RunPlan:
    """Parsed config plus the per-study extras that ride along with it."""

    config: ExperimentConfig
    raw: dict
    estimator: EstimatorKind = EstimatorKind.RIEMANN
    level: float = 0.0
    rho: float = 0.01
    t_ladder: tuple = ()
    window_radius: float | None = None


def _require(node: dict, key: str, path: str):
    if key not in node:
        raise ConfigError(f"{path}.{key}: required key missing")
    return node[key]


def _check_keys(node: dict, allowed, path: str):
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in node:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _parse_initial(node, path: str) -> InitialLaw:
    kinds = ("point", "gaussian")
    kind = _require(node, "kind", path)
    if kind == "point":
        _check_keys(node, {"kind", "value"}, path)
        return InitialLaw.point(float(node.get("value", 0.0)))
    if kind == "gaussian":
        _check_keys(node, {"kind", "mean", "variance"}, path)
        var = float(node.get("variance", 1.0))
        if var <= 0.0:
            raise ConfigError(f"{path}.variance: must be positive")
        return InitialLaw.gaussian(float(node.get("mean", 0.0)), [[var]])
    raise ConfigError(f"{path}.kind: unknown initial law {kind!r}; valid: {kinds}")


def _parse_jump(node, path: str) -> JumpLaw:
    kind = _require(node, "kind", path)
    if kind == "point":
        _check_keys(node, {"kind", "value"}, path)
        return JumpLaw(kind="point", value=float(node.get("value", 1.0)))
    if kind == "normal":
        _check_keys(node, {"kind", "mean", "std"}, path)
        return JumpLaw(
            kind="normal",
            mean=float(node.get("mean", 0.0)),
            std=float(node.get("std", 1.0)),
        )
    if kind == "uniform":
        _check_keys(node, {"kind", "low", "high"}, path)
        return JumpLaw(
            kind="uniform",
            low=float(node.get("low", -1.0)),
            high=float(node.get("high", 1.0)),
        )
    raise ConfigError(
        f"{path}.kind: unknown jump law {kind!r}; valid: ('point', 'normal', 'uniform')"
    )


def _parse_process(node, path: str = "process") -> ProcessSpec:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _require(node, "kind", path)
    if kind not in _PROCESS_KINDS:
        raise ConfigError(
            f"{path}.kind: unknown process kind {kind!r}; valid: {_PROCESS_KINDS}"
        )
    common = {"kind", "dim", "horizon", "initial"}
    per_kind = {
        "bm": set(),
        "fbm": {"hurst"},
        "stable": {"gamma", "scale"},
        "cpoisson": {"rate", "jump"},
        "diffusion": {"preset"},
    }
    _check_keys(node, common | per_kind[kind], path)
    dim = int(node.get("dim", 1))
    horizon = float(node.get("horizon", 1.0))
    initial = None
    if "initial" in node:
        initial = _parse_initial(node["initial"], f"{path}.initial")
    try:
        if kind == "bm":
            spec = brownian_spec(dim=dim, horizon=horizon, initial_law=initial)
        elif kind == "fbm":
            spec = ProcessSpec(
                kind=ProcessKind.FRACTIONAL_BM,
                dim=dim,
                horizon=horizon,
                params=FbmParams(hurst=float(_require(node, "hurst", path))),
                initial_law=initial or InitialLaw.point(0.0),
            )
        elif kind == "stable":
            spec = ProcessSpec(
                kind=ProcessKind.SYMMETRIC_STABLE,
                dim=dim,
                horizon=horizon,
                params=StableParams(
                    gamma=float(_require(node, "gamma", path)),
                    scale=float(node.get("scale", 1.0)),
                ),
                initial_law=initial or InitialLaw.point(0.0),
            )
        elif kind == "cpoisson":
            jump = JumpLaw(kind="point", value=1.0)
            if "jump" in node:
                jump = _parse_jump(node["jump"], f"{path}.jump")
            spec = ProcessSpec(
                kind=ProcessKind.COMPOUND_POISSON,
                dim=dim,
                horizon=horizon,
                params=PoissonParams(
                    rate=float(_require(node, "rate", path)), jump_law=jump
                ),
                initial_law=initial or InitialLaw.point(0.0),
            )
        else:  # diffusion
            preset = _require(node, "preset", path)
            if preset not in DIFFUSION_PRESETS:
                raise ConfigError(
                    f"{path}.preset: unknown diffusion preset {preset!r}; "
                    f"valid: {tuple(DIFFUSION_PRESETS)}"
                )
            spec = DIFFUSION_PRESETS[preset](horizon=horizon, initial_law=initial)
    except ConfigError:
        raise
    except (ParameterError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return spec


_TOP_KEYS = {
    "experiment",
    "process",
    "function",
    "n_ladder",
    "replications",
    "oracle_factor",
    "seed",
    "estimator",
    "level",
    "rho",
    "t_ladder",
    "window_radius",
}


def load_run_plan(path) -> RunPlan:
    """Parse and validate a JSON config file into a runnable plan."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    exp_name = raw.get("experiment", "rate-study")
    if exp_name not in _EXPERIMENT_NAMES:
        raise ConfigError(
            f"config.experiment: unknown experiment {exp_name!r}; "
            f"valid: {tuple(_EXPERIMENT_NAMES)}"
        )
    kind = _EXPERIMENT_NAMES[exp_name]

    scoped = {
        "estimator": (ExperimentKind.RATE_STUDY, ExperimentKind.CLT_STUDY),
        "level": (ExperimentKind.LOCAL_TIME_STUDY,),
        "rho": (ExperimentKind.LOCAL_TIME_STUDY,),
        "t_ladder": (ExperimentKind.T_SCALING_STUDY,),
        "window_radius": (ExperimentKind.T_SCALING_STUDY,),
    }
    for key, kinds in scoped.items():
        if key in raw and kind not in kinds:
            names = tuple(k for k, v in _EXPERIMENT_NAMES.items() if v in kinds)
            raise ConfigError(f"config.{key}: only applies to {names}")

    process = _parse_process(_require(raw, "process", "config"), "config.process")

    if kind == ExperimentKind.T_SCALING_STUDY:
        function_id = raw.get("function", "identity:auto")
    else:
        function_id = _require(raw, "function", "config")
        try:
            from_id(function_id)
        except (ParameterError, OccutimeError) as exc:
            raise ConfigError(f"config.function: {exc}") from exc

    n_ladder = tuple(int(n) for n in raw.get("n_ladder", DEFAULT_N_LADDER))
    oracle_factor = int(raw.get("oracle_factor", DEFAULT_ORACLE_FACTOR))
    if n_ladder and oracle_factor >= 2:
        n_fine = oracle_factor * max(n_ladder)
        for n in n_ladder:
            if n < 2 or n_fine % n != 0:
                raise ConfigError(
                    f"config.n_ladder: entry {n} does not divide "
                    f"n_fine={n_fine} (oracle_factor x max ladder)"
                )
    try:
        config = ExperimentConfig(
            process=process,
            function_id=function_id,
            n_ladder=n_ladder,
            replications=int(raw.get("replications", DEFAULT_REPLICATIONS)),
            oracle_factor=oracle_factor,
            seed=int(raw.get("seed", 0)),
            experiment_kind=kind,
        )
    except OccutimeError as exc:
        raise ConfigError(f"config: {exc}") from exc

    default_estimator = (
        "trapezoid" if kind == ExperimentKind.CLT_STUDY else "riemann"
    )
    try:
        estimator = EstimatorKind(raw.get("estimator", default_estimator))
    except ValueError as exc:
        raise ConfigError(f"config.estimator: {exc}") from exc
    if estimator not in (EstimatorKind.RIEMANN, EstimatorKind.TRAPEZOID):
        raise ConfigError("config.estimator: must be 'riemann' or 'trapezoid'")
    t_ladder = tuple(float(t) for t in raw.get("t_ladder", ()))
    if kind == ExperimentKind.T_SCALING_STUDY and not t_ladder:
        raise ConfigError("config.t_ladder: required key missing")
    window_radius = raw.get("window_radius")
    return RunPlan(
        config=config,
        raw=raw,
        estimator=estimator,
        level=float(raw.get("level", 0.0)),
        rho=float(raw.get("rho", 0.01)),
        t_ladder=t_ladder,
        window_radius=None if window_radius is None else float(window_radius),
    )


def parse_config(path) -> ExperimentConfig:
    """Validated ExperimentConfig from a JSON config file."""
    return load_run_plan(path).config


# ---------------------------------------------------------------------------
# Manifest and table persistence


def config_hash(raw: dict) -> str:
    """sha256 of the canonical (key-sorted) JSON; reordering-invariant."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_manifest(out_dir: Path, raw_config: dict, master_seed: int, outputs):
    manifest = {
        "schema": "occutime.manifest.v1",
        "tool_version": TOOL_VERSION,
        "config_hash": config_hash(raw_config),
        "master_seed": int(master_seed),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": [str(p) for p in outputs],
    }
    write_json(manifest, out_dir / "manifest.json")
    return manifest


def write_samples_csv(tables, path: Path):
    """ErrorSample rows for one or more ErrorTables."""
    lines = ["# schema: occutime.samples.v1"]
    lines.append("estimator,n,delta,horizon,replicate,error")
    for table in tables:
        for s in table.samples():
            lines.append(
                f"{s.estimator_kind.value},{s.n},{fmt_float(s.delta)},"
                f"{fmt_float(s.horizon)},{s.replicate},{fmt_float(s.error)}"
            )
    path.write_text("\n".join(lines) + "\n")


def _write_loglog(xs, errs, fit: RateFit, path: Path, x_name: str = "delta"):
    xs = np.asarray(xs, float)
    errs = np.asarray(errs, float)
    lines = ["# schema: occutime.loglog.v1"]
    lines.append(f"log10_{x_name},log10_error,fitted_log10_error,fitted_slope")
    ln10 = np.log(10.0)
    for x, e in zip(xs, errs):
        fitted = (fit.intercept + fit.slope * np.log(x)) / ln10
        lines.append(
            f"{fmt_float(np.log10(x))},{fmt_float(np.log10(e))},"
            f"{fmt_float(fitted)},{fmt_float(fit.slope)}"
        )
    path.write_text("\n".join(lines) + "\n")


def emit_plot_data(table: ErrorTable, path, fit: RateFit | None = None):
    """Two-column log10 CSV plus fitted-line columns for an ErrorTable."""
    if len(table.ns) == 0:
        raise ParameterError("cannot emit plot data for an empty table")
    if fit is None:
        fit = fit_rate(table)
    _write_loglog(table.deltas, table.rms, fit, Path(path))
    return Path(path)


def _fit_dict(fit: RateFit) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "slope_stderr": fit.slope_stderr,
        "r_squared": fit.r_squared,
        "points_used": fit.points_used,
    }


def _resolve_out_dir(flag_value) -> Path:
    if flag_value:
        out = Path(flag_value)
    elif os.environ.get("OCCUTIME_OUTPUT_DIR"):
        out = Path(os.environ["OCCUTIME_OUTPUT_DIR"])
    else:
        out = Path("out")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_rate_study(args) -> int:
    plan = load_run_plan(args.config)
    out = _resolve_out_dir(args.out)
    report = rate_study(plan.config, plan.estimator)
    table = report.table
    summary = {
        "schema": "occutime.rate_study.v1",
        "experiment": "rate-study",
        "process": plan.raw.get("process", {}).get("kind"),
        "function": plan.config.function_id,
        "estimator": plan.estimator.value,
        "n_ladder": list(table.ns),
        "delta": list(table.deltas),
        "rms_error": list(table.rms),
        "rms_stderr": list(table.rms_stderr),
        "fit": _fit_dict(report.fit),
        "prediction": {
            "delta_exponent": report.prediction.delta_exponent,
            "T_exponent": report.prediction.T_exponent,
            "log_factor": report.prediction.log_factor,
            "source": report.prediction.source,
        },
        "abs_deviation": report.abs_deviation,
        "effective_smoothness": report.effective_smoothness,
    }
    write_json(summary, out / "summary.json")
    write_samples_csv([table], out / "samples.csv")
    emit_plot_data(table, out / "loglog.csv", report.fit)
    write_manifest(
        out, plan.raw, plan.config.seed,
        [out / "summary.json", out / "samples.csv", out / "loglog.csv"],
    )
    print(
        f"rate-study: fitted slope {report.fit.slope:.4f} "
        f"(predicted {report.prediction.delta_exponent:.4f}), outputs in {out}"
    )
    return 0


def _cmd_clt_study(args) -> int:
    plan = load_run_plan(args.config)
    out = _resolve_out_dir(args.out)
    diag = clt_experiment(plan.config, plan.estimator)
    summary = {
        "schema": "occutime.clt_study.v1",
        "experiment": "clt-study",
        "estimator": diag.estimator_kind.value,
        "n": diag.n,
        "replications": diag.replications,
        "ks_distance": diag.ks_distance,
        "mean": diag.mean,
        "variance": diag.variance,
        "mean_square": diag.mean_square,
        "excluded_count": diag.excluded_count,
        "invalid": diag.invalid,
        "delta_f_sq_mean": diag.delta_f_sq_mean,
        "grad_energy_mean": diag.grad_energy_mean,
        "predicted_second_moment": diag.predicted_second_moment,
    }
    write_json(summary, out / "summary.json")
    stats_lines = ["# schema: occutime.clt_stats.v1", "standardized_error"]
    stats_lines += [fmt_float(s) for s in diag.stats]
    (out / "stats.csv").write_text("\n".join(stats_lines) + "\n")
    write_manifest(
        out, plan.raw, plan.config.seed, [out / "summary.json", out / "stats.csv"]
    )
    print(
        f"clt-study: ks {diag.ks_distance:.4f}, mean {diag.mean:+.4f}, "
        f"variance {diag.variance:.4f}, excluded {diag.excluded_count}"
    )
    return 0


def _cmd_efficiency(args) -> int:
    plan = load_run_plan(args.config)
    out = _resolve_out_dir(args.out)
    report = efficiency_experiment(plan.config)
    summary = {
        "schema": "occutime.efficiency.v1",
        "experiment": "efficiency",
        "n_ladder": list(report.ns),
        "delta": list(report.riemann.deltas),
        "riemann_error": list(report.riemann.rms),
        "riemann_stderr": list(report.riemann.rms_stderr),
        "trapezoid_error": list(report.trapezoid.rms),
        "trapezoid_stderr": list(report.trapezoid.rms_stderr),
        "bridge_error": list(report.bridge.rms),
        "bridge_stderr": list(report.bridge.rms_stderr),
        "predicted_floor": list(report.predicted_floor),
        "floor_stderr": list(report.floor_stderr),
        "mean_avar": report.mean_avar,
    }
    write_json(summary, out / "summary.json")
    write_samples_csv(
        [report.riemann, report.trapezoid, report.bridge], out / "samples.csv"
    )
    write_manifest(
        out, plan.raw, plan.config.seed, [out / "summary.json", out / "samples.csv"]
    )
    floor_ratio = report.trapezoid.rms[-1] / report.predicted_floor[-1]
    print(
        f"efficiency: trapezoid/floor ratio at n={report.ns[-1]}: "
        f"{floor_ratio:.4f}, outputs in {out}"
    )
    return 0


def _cmd_local_time(args) -> int:
    plan = load_run_plan(args.config)
    out = _resolve_out_dir(args.out)
    report = local_time_experiment(plan.config, plan.level, plan.rho)
    summary = {
        "schema": "occutime.local_time.v1",
        "experiment": "local-time",
        "hurst": report.hurst,
        "level": report.level,
        "rho": report.rho,
        "n_ladder": list(report.table.ns),
        "delta": list(report.table.deltas),
        "rms_error": list(report.table.rms),
        "rms_stderr": list(report.table.rms_stderr),
        "fit": _fit_dict(report.fit),
        "predicted_exponent": report.predicted_exponent,
        "oracle_shift": report.oracle_shift,
        "oracle_halving_rms": report.oracle_halving_rms,
    }
    write_json(summary, out / "summary.json")
    write_samples_csv([report.table], out / "samples.csv")
    emit_plot_data(report.table, out / "loglog.csv", report.fit)
    write_manifest(
        out, plan.raw, plan.config.seed,
        [out / "summary.json", out / "samples.csv", out / "loglog.csv"],
    )
    print(
        f"local-time: fitted slope {report.fit.slope:.4f} "
        f"(predicted {report.predicted_exponent:.4f}), outputs in {out}"
    )
    return 0


def _cmd_t_scaling(args) -> int:
    plan = load_run_plan(args.config)
    out = _resolve_out_dir(args.out)
    report = t_scaling_experiment(plan.config, plan.t_ladder, plan.window_radius)
    summary = {
        "schema": "occutime.t_scaling.v1",
        "experiment": "t-scaling",
        "t_ladder": list(report.t_ladder),
        "n_per_horizon": list(report.ns),
        "delta": report.delta,
        "window_radius": report.window_radius,
        "rms_error": list(report.rms),
        "rms_stderr": list(report.rms_stderr),
        "fit": _fit_dict(report.fit),
        "predicted_T_exponent": report.predicted_exponent,
        "overflow_fractions": list(report.overflow_fractions),
        "overflow_flagged": report.overflow_flagged,
    }
    write_json(summary, out / "summary.json")
    _write_loglog(
        report.t_ladder, report.rms, report.fit, out / "loglog.csv", x_name="horizon"
    )
    write_manifest(
        out, plan.raw, plan.config.seed, [out / "summary.json", out / "loglog.csv"]
    )
    print(
        f"t-scaling: fitted T-exponent {report.fit.slope:.4f} "
        f"(predicted {report.predicted_exponent:.4f}), outputs in {out}"
    )
    return 0


def _spec_from_flags(args) -> ProcessSpec:
    node: dict = {"kind": args.process, "horizon": args.horizon}
    if args.process == "fbm":
        if args.hurst is None:
            raise ConfigError("--hurst is required for fbm")
        node["hurst"] = args.hurst
    elif args.process == "stable":
        if args.gamma is None:
            raise ConfigError("--gamma is required for stable")
        node["gamma"] = args.gamma
    elif args.process == "cpoisson":
        if args.rate is None:
            raise ConfigError("--rate is required for cpoisson")
        node["rate"] = args.rate
    elif args.process == "diffusion":
        node["preset"] = args.preset
    return _parse_process(node, "flags")


def _cmd_simulate(args) -> int:
    spec = _spec_from_flags(args)
    path = simulate(spec, args.n, args.seed, replicate=args.replicate)
    out = _resolve_out_dir(args.out)
    dest = out / args.filename
    cols = ",".join(f"x{i}" for i in range(path.dim))
    lines = ["# schema: occutime.path.v1", f"time,{cols}"]
    for i in range(path.values.shape[0]):
        row = ",".join(fmt_float(v) for v in path.values[i])
        lines.append(f"{fmt_float(path.times[i])},{row}")
    dest.write_text("\n".join(lines) + "\n")
    print(f"simulate: wrote {path.values.shape[0]} states to {dest}")
    return 0


def _cmd_predict_rate(args) -> int:
    spec = _spec_from_flags(args)
    context = (
        RateContext.LOCAL_TIME if args.context == "local-time" else RateContext.L2_ERROR
    )
    pred = theoretical_rate(spec, args.smoothness, context)
    print(f"{pred.delta_exponent:.3f}")
    log_note = "log factor retained" if pred.log_factor else "no log factor"
    print(f"T-exponent {pred.T_exponent:.3f}, {log_note}")
    print(f"source: {pred.source}")
    return 0


def _cmd_eval_bound(args) -> int:
    spec = _spec_from_flags(args)
    f = from_id(args.function)
    value = fourier_bound_evaluator(spec, f, args.n, args.truncation)
    print(fmt_float(value))
    return 0


# ---------------------------------------------------------------------------
# Argument parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occutime",
        description="Occupation time estimation studies for discretely observed paths",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_cmd(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(fn=fn)
        return p

    add_config_cmd("rate-study", _cmd_rate_study, "L2 error ladder + rate fit")
    add_config_cmd("clt-study", _cmd_clt_study, "standardized-error diagnostics")
    add_config_cmd("local-time", _cmd_local_time, "local time estimation rates")
    add_config_cmd("efficiency", _cmd_efficiency, "estimator comparison vs lower bound")
    add_config_cmd("t-scaling", _cmd_t_scaling, "error growth in the horizon")

    def add_process_flags(p, with_smoothness=False):
        p.add_argument("--process", required=True, choices=_PROCESS_KINDS)
        p.add_argument("--hurst", type=float, default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--rate", type=float, default=None)
        p.add_argument("--preset", default="ou")
        p.add_argument("--horizon", type=float, default=1.0)
        if with_smoothness:
            p.add_argument("--smoothness", type=float, required=True)

    p_sim = sub.add_parser("simulate", help="write one simulated path as CSV")
    add_process_flags(p_sim)
    p_sim.add_argument("--n", type=int, required=True, help="number of steps")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--replicate", type=int, default=0)
    p_sim.add_argument("--out", default=None, help="output directory")
    p_sim.add_argument("--filename", default="path.csv")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_pred = sub.add_parser("predict-rate", help="print the predicted exponents")
    add_process_flags(p_pred, with_smoothness=True)
    p_pred.add_argument("--context", choices=("l2", "local-time"), default="l2")
    p_pred.set_defaults(fn=_cmd_predict_rate)

    p_bound = sub.add_parser("eval-bound", help="evaluate the Fourier-domain bound")
    add_process_flags(p_bound)
    p_bound.add_argument("--function", required=True, help="function id, e.g. gaussian_bump")
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--truncation", type=float, default=8.0)
    p_bound.set_defaults(fn=_cmd_eval_bound)

    return parser


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericGateError as exc:
        print(f"numeric gate failure: {exc}", file=sys.stderr)
        return 3
    except OccutimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
