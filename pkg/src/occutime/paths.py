"""Process simulators on a fine reference grid, plus skeleton subsampling.

Every simulator is a pure function of (spec, n_fine, seed, replicate) and
returns a PathGrid on the equispaced grid of n_fine+1 points covering
[0, T].  Observation skeletons at t_k = k T / n are taken from the fine
path by exact subsampling, never by interpolation, so estimators and the
fine-grid oracle always consume the same randomness.

Gaussian driving noise (Brownian motion itself and the Euler driver) is
laid down by a dyadic bridge construction whenever n_fine is a power of
two: level 0 draws the endpoint, level l fills interval midpoints.  Each
level consumes its own derived stream, so refining n_fine by a power of
two reuses every coarse draw and the two paths agree at shared times
bit-for-bit.  Non-dyadic n_fine falls back to a plain increment cumsum
(exact in law, but without cross-resolution coupling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from . import rng
from .errors import (
    AlignmentError,
    NumericError,
    ParameterError,
    SimulationError,
)
from .kernels import euler_chain

_EQUISPACE_RTOL = 1e-12


class ProcessKind(str, Enum):
    BROWNIAN_MOTION = "bm"
    ITO_DIFFUSION = "diffusion"
    FRACTIONAL_BM = "fbm"
    SYMMETRIC_STABLE = "stable"
    COMPOUND_POISSON = "cpoisson"


@dataclass(frozen=True)
class PathGrid:
    """Observed path: strictly increasing times from 0, values (n_points x d)."""

    times: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        times = np.ascontiguousarray(np.asarray(self.times, dtype=float))
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.shape[0] == 1 and times.shape[0] > 1:
            values = values.T
        if times.ndim != 1 or times.shape[0] == 0:
            raise ParameterError("times must be a nonempty 1-d array")
        if times.shape[0] != values.shape[0]:
            raise ParameterError(
                f"times length {times.shape[0]} != values rows {values.shape[0]}"
            )
        if values.shape[1] != self.dim:
            raise ParameterError(
                f"values have {values.shape[1]} columns, expected dim={self.dim}"
            )
        if times[0] != 0.0:
            raise ParameterError("times must start at 0")
        if times.shape[0] > 1 and np.min(np.diff(times)) <= 0.0:
            raise ParameterError("times must be strictly increasing")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_steps(self) -> int:
        return self.times.shape[0] - 1

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def delta(self) -> float:
        """Grid spacing; raises if the grid is not equispaced."""
        if self.n_steps == 0:
            raise ParameterError("single-point grid has no spacing")
        d = self.horizon / self.n_steps
        incs = np.diff(self.times)
        if np.max(np.abs(incs - d)) > _EQUISPACE_RTOL * max(d, 1.0):
            raise ParameterError("grid is not equispaced")
        return d


@dataclass(frozen=True)
class SeedPolicy:
    """Master seed; streams derive as Philox(master_seed, purpose, replicate)."""

    master_seed: int


def _as_master_seed(seed) -> int:
    if isinstance(seed, SeedPolicy):
        return int(seed.master_seed)
    return int(seed)


@dataclass(frozen=True)
class InitialLaw:
    kind: str  # "point" | "gaussian" | "sampler"
    point_value: np.ndarray | None = None
    mean: np.ndarray | None = None
    cov: np.ndarray | None = None
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None

    @staticmethod
    def point(x0) -> "InitialLaw":
        return InitialLaw(kind="point", point_value=np.atleast_1d(np.asarray(x0, float)))

    @staticmethod
    def gaussian(mean, cov) -> "InitialLaw":
        mean = np.atleast_1d(np.asarray(mean, float))
        cov = np.atleast_2d(np.asarray(cov, float))
        return InitialLaw(kind="gaussian", mean=mean, cov=cov)

    @staticmethod
    def from_sampler(fn: Callable[[np.random.Generator, int], np.ndarray]) -> "InitialLaw":
        return InitialLaw(kind="sampler", sampler=fn)

    def draw(self, gen: np.random.Generator, dim: int) -> np.ndarray:
        if self.kind == "point":
            x0 = np.broadcast_to(self.point_value, (dim,)).astype(float)
            return x0
        if self.kind == "gaussian":
            mean = np.broadcast_to(self.mean, (dim,)).astype(float)
            cov = self.cov
            if cov.shape != (dim, dim):
                raise ParameterError(f"covariance shape {cov.shape} != ({dim},{dim})")
            chol = np.linalg.cholesky(cov)
            return mean + chol @ gen.standard_normal(dim)
        if self.kind == "sampler":
            x0 = np.atleast_1d(np.asarray(self.sampler(gen, dim), float))
            if x0.shape != (dim,):
                raise ParameterError("initial sampler returned wrong shape")
            return x0
        raise ParameterError(f"unknown initial law kind {self.kind!r}")

    def consumes_randomness(self) -> bool:
        return self.kind != "point"


@dataclass(frozen=True)
class JumpLaw:
    kind: str  # "point" | "normal" | "uniform"
    value: float = 1.0
    mean: float = 0.0
    std: float = 1.0
    low: float = -1.0
    high: float = 1.0

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "point":
            return np.full(size, self.value)
        if self.kind == "normal":
            return self.mean + self.std * gen.standard_normal(size)
        if self.kind == "uniform":
            return gen.uniform(self.low, self.high, size)
        raise ParameterError(f"unknown jump law kind {self.kind!r}")


@dataclass(frozen=True)
class BmParams:
    pass


@dataclass(frozen=True)
class DiffusionParams:
    """Coefficient callables b(x), sigma(x).

    For dim=1 both map float -> float; for dim>1 drift maps (d,) -> (d,)
    and diffusion maps (d,) -> (d, d).  Scalar dim=1 coefficients that
    compile under numba run on the compiled Euler kernel automatically.
    """

    drift: Callable
    diffusion: Callable
    label: str = "custom"


@dataclass(frozen=True)
class FbmParams:
    hurst: float


@dataclass(frozen=True)
class StableParams:
    gamma: float
    scale: float = 1.0


@dataclass(frozen=True)
class PoissonParams:
    rate: float
    jump_law: JumpLaw = field(default_factory=lambda: JumpLaw(kind="point", value=1.0))


@dataclass(frozen=True)
class ProcessSpec:
    kind: ProcessKind
    dim: int
    horizon: float
    params: object
    initial_law: InitialLaw = field(default_factory=lambda: InitialLaw.point(0.0))

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError("dim must be >= 1")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ParameterError("horizon must be positive and finite")
        if self.kind == ProcessKind.FRACTIONAL_BM:
            if self.dim != 1:
                raise ParameterError("fractional Brownian motion supports dim=1 only")
            if not (0.0 < self.params.hurst < 1.0):
                raise ParameterError("Hurst index must lie in (0,1)")
        if self.kind == ProcessKind.SYMMETRIC_STABLE:
            if self.dim != 1:
                raise ParameterError("stable simulation supports dim=1 only")
            if not (0.0 < self.params.gamma <= 2.0):
                raise ParameterError("stability index must lie in (0,2]")
            if self.params.scale <= 0.0:
                raise ParameterError("stable scale must be positive")
        if self.kind == ProcessKind.COMPOUND_POISSON:
            if self.dim != 1:
                raise ParameterError("compound Poisson simulation supports dim=1 only")
            if self.params.rate <= 0.0:
                raise ParameterError("jump rate must be positive")


def brownian_spec(dim: int = 1, horizon: float = 1.0, initial_law: InitialLaw | None = None) -> ProcessSpec:
    return ProcessSpec(
        kind=ProcessKind.BROWNIAN_MOTION,
        dim=dim,
        horizon=horizon,
        params=BmParams(),
        initial_law=initial_law or InitialLaw.point(np.zeros(dim)),
    )


def _grid_times(n_fine: int, horizon: float) -> np.ndarray:
    return np.linspace(0.0, horizon, n_fine + 1)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _dyadic_wiener(master: int, replicate: int, n_fine: int, horizon: float, dim: int) -> np.ndarray:
    """Standard Wiener path on n_fine+1 dyadic points via midpoint bridging."""
    levels = n_fine.bit_length() - 1
    w = np.zeros((n_fine + 1, dim))
    g0 = rng.stream(master, rng.LEVEL, replicate, 0)
    w[n_fine] = math.sqrt(horizon) * g0.standard_normal(dim)
    for level in range(1, levels + 1):
        npts = 1 << (level - 1)
        step = n_fine >> (level - 1)
        half = step >> 1
        xi = rng.stream(master, rng.LEVEL, replicate, level).standard_normal((npts, dim))
        left = np.arange(npts) * step
        length = horizon * step / n_fine
        w[left + half] = 0.5 * (w[left] + w[left + step]) + 0.5 * math.sqrt(length) * xi
    return w


def _wiener_path(master: int, replicate: int, n_fine: int, horizon: float, dim: int) -> np.ndarray:
    if _is_power_of_two(n_fine):
        return _dyadic_wiener(master, replicate, n_fine, horizon, dim)
    gen = rng.stream(master, rng.PATH, replicate)
    dt = horizon / n_fine
    inc = math.sqrt(dt) * gen.standard_normal((n_fine, dim))
    w = np.vstack([np.zeros((1, dim)), np.cumsum(inc, axis=0)])
    return w


def _initial_state(spec: ProcessSpec, master: int, replicate: int) -> np.ndarray:
    gen = rng.stream(master, rng.INITIAL, replicate)
    return spec.initial_law.draw(gen, spec.dim)


def _check_n_fine(n_fine: int):
    if n_fine < 2:
        raise ParameterError("n_fine must be >= 2")


def simulate_bm(spec: ProcessSpec, n_fine: int, seed, replicate: int) -> PathGrid:
    """X_0 + W on the fine grid; increments are exact Gaussian draws."""
    if spec.kind != ProcessKind.BROWNIAN_MOTION:
        raise ParameterError("spec.kind must be BrownianMotion")
    _check_n_fine(n_fine)
    master = _as_master_seed(seed)
    w = _wiener_path(master, replicate, n_fine, spec.horizon, spec.dim)
    x0 = _initial_state(spec, master, replicate)
    return PathGrid(times=_grid_times(n_fine, spec.horizon), values=w + x0, dim=spec.dim)


def simulate_diffusion(spec: ProcessSpec, n_fine: int, seed, replicate: int) -> PathGrid:
    """Euler-Maruyama path driven by the coupled Wiener construction.

    The fine-grid Euler path is defined to be the process for experiment
    purposes; refining n_fine by a power of two reuses the same Gaussian
    draws, so refinement studies compare coupled paths.
    """
    if spec.kind != ProcessKind.ITO_DIFFUSION:
        raise ParameterError("spec.kind must be ItoDiffusion")
    _check_n_fine(n_fine)
    master = _as_master_seed(seed)
    w = _wiener_path(master, replicate, n_fine, spec.horizon, spec.dim)
    dw = np.diff(w, axis=0)
    dt = spec.horizon / n_fine
    x0 = _initial_state(spec, master, replicate)
    drift = spec.params.drift
    diffusion = spec.params.diffusion
    if spec.dim == 1:
        values = euler_chain(float(x0[0]), dt, dw[:, 0], drift, diffusion)[:, None]
    else:
        values = np.empty((n_fine + 1, spec.dim))
        values[0] = x0
        x = x0
        for i in range(n_fine):
            b = np.asarray(drift(x), float)
            s = np.asarray(diffusion(x), float)
            x = x + b * dt + s @ dw[i]
            values[i + 1] = x
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.all(np.isfinite(values), axis=1)))
        raise SimulationError(f"non-finite state at step {bad}", step=bad)
    return PathGrid(times=_grid_times(n_fine, spec.horizon), values=values, dim=spec.dim)


@lru_cache(maxsize=8)
def _fgn_unit_eigs(hurst: float, m: int) -> np.ndarray:
    """Circulant-embedding eigenvalues for unit-spacing fGn of length m."""
    k = np.arange(m + 1, dtype=float)
    two_h = 2.0 * hurst
    gamma = 0.5 * ((k + 1) ** two_h + np.abs(k - 1) ** two_h - 2.0 * k**two_h)
    row = np.concatenate([gamma, gamma[m - 1 : 0 : -1]])
    eigs = np.fft.fft(row).real
    return eigs


def _fgn_cholesky(hurst: float, m: int, z: np.ndarray) -> np.ndarray:
    """Dense Cholesky fallback for unit-spacing fGn; O(m^2) memory."""
    if m > 4096:
        raise NumericError(
            "circulant embedding failed and dense Cholesky fallback "
            f"is limited to 4096 steps (requested {m})"
        )
    k = np.arange(m, dtype=float)
    two_h = 2.0 * hurst
    gamma = 0.5 * (np.abs(k + 1) ** two_h + np.abs(k - 1) ** two_h - 2.0 * k**two_h)
    cov = gamma[np.abs(np.subtract.outer(np.arange(m), np.arange(m)))]
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError("fGn covariance is not positive definite") from exc
    return chol @ z[:m]


def simulate_fbm(spec: ProcessSpec, n_fine: int, seed, replicate: int) -> PathGrid:
    """Exact fractional Brownian motion via circulant embedding of fGn.

    Unit-spacing embedding eigenvalues are cached per (H, n_fine) and
    rescaled by dt^{2H}; the sample costs one length-2n FFT.  If the
    embedding is not nonnegative-definite (beyond rounding), a dense
    Cholesky fallback runs; if that also fails, a numeric error is
    raised rather than approximating silently.
    """
    if spec.kind != ProcessKind.FRACTIONAL_BM:
        raise ParameterError("spec.kind must be FractionalBM")
    _check_n_fine(n_fine)
    master = _as_master_seed(seed)
    hurst = float(spec.params.hurst)
    m = n_fine
    dt = spec.horizon / n_fine
    gen = rng.stream(master, rng.PATH, replicate)
    eigs = _fgn_unit_eigs(hurst, m)
    z = gen.standard_normal(2 * m)
    if eigs.min() < -1e-8 * eigs.max():
        fgn_unit = _fgn_cholesky(hurst, m, z)
    else:
        lam = np.maximum(eigs, 0.0)
        w = np.empty(m + 1, dtype=complex)
        w[0] = math.sqrt(lam[0]) * z[0]
        w[m] = math.sqrt(lam[m]) * z[1]
        w[1:m] = np.sqrt(0.5 * lam[1:m]) * (z[2 : m + 1] + 1j * z[m + 1 : 2 * m])
        fgn_unit = np.fft.irfft(w, n=2 * m)[:m] * math.sqrt(2 * m)
    fgn = dt**hurst * fgn_unit
    values = np.concatenate([[0.0], np.cumsum(fgn)])
    x0 = _initial_state(spec, master, replicate)
    return PathGrid(
        times=_grid_times(n_fine, spec.horizon), values=values[:, None] + x0, dim=1
    )


def simulate_stable(spec: ProcessSpec, n_fine: int, seed, replicate: int) -> PathGrid:
    """Symmetric gamma-stable increments by the Chambers-Mallows-Stuck transform.

    Each increment has characteristic function exp(-c dt |v|^gamma), i.e.
    scale (c dt)^{1/gamma}; gamma=2 is special-cased to Gaussian draws
    with variance 2 c dt.
    """
    if spec.kind != ProcessKind.SYMMETRIC_STABLE:
        raise ParameterError("spec.kind must be SymmetricStable")
    _check_n_fine(n_fine)
    master = _as_master_seed(seed)
    gamma = float(spec.params.gamma)
    c = float(spec.params.scale)
    dt = spec.horizon / n_fine
    gen = rng.stream(master, rng.PATH, replicate)
    if gamma == 2.0:
        inc = math.sqrt(2.0 * c * dt) * gen.standard_normal(n_fine)
    else:
        theta = gen.uniform(-math.pi / 2.0, math.pi / 2.0, n_fine)
        expo = gen.exponential(1.0, n_fine)
        core = np.sin(gamma * theta) / np.cos(theta) ** (1.0 / gamma)
        tilt = (np.cos((1.0 - gamma) * theta) / expo) ** ((1.0 - gamma) / gamma)
        inc = (c * dt) ** (1.0 / gamma) * core * tilt
    values = np.concatenate([[0.0], np.cumsum(inc)])
    x0 = _initial_state(spec, master, replicate)
    return PathGrid(
        times=_grid_times(n_fine, spec.horizon), values=values[:, None] + x0, dim=1
    )


def simulate_compound_poisson(spec: ProcessSpec, n_fine: int, seed, replicate: int) -> PathGrid:
    """Piecewise-constant path with exact exponential jump times."""
    if spec.kind != ProcessKind.COMPOUND_POISSON:
        raise ParameterError("spec.kind must be CompoundPoisson")
    _check_n_fine(n_fine)
    master = _as_master_seed(seed)
    rate = float(spec.params.rate)
    horizon = spec.horizon
    gen = rng.stream(master, rng.PATH, replicate)
    mean_count = rate * horizon
    chunk = max(16, int(mean_count + 6.0 * math.sqrt(mean_count) + 16))
    total = 0.0
    gaps = []
    while True:
        block = gen.exponential(1.0 / rate, chunk)
        gaps.append(block)
        total += float(block.sum())
        if total > horizon:
            break
    jump_times = np.cumsum(np.concatenate(gaps))
    jump_times = jump_times[jump_times <= horizon]
    sizes = spec.params.jump_law.sample(gen, jump_times.shape[0])
    cum = np.concatenate([[0.0], np.cumsum(sizes)])
    times = _grid_times(n_fine, horizon)
    counts = np.searchsorted(jump_times, times, side="right")
    values = cum[counts]
    x0 = _initial_state(spec, master, replicate)
    return PathGrid(times=times, values=values[:, None] + x0, dim=1)


_SIMULATORS = {
    ProcessKind.BROWNIAN_MOTION: simulate_bm,
    ProcessKind.ITO_DIFFUSION: simulate_diffusion,
    ProcessKind.FRACTIONAL_BM: simulate_fbm,
    ProcessKind.SYMMETRIC_STABLE: simulate_stable,
    ProcessKind.COMPOUND_POISSON: simulate_compound_poisson,
}


def simulate(spec: ProcessSpec, n_fine: int, seed, replicate: int) -> PathGrid:
    """Dispatch to the simulator for spec.kind."""
    return _SIMULATORS[spec.kind](spec, n_fine, seed, replicate)


def randomize_initial(path: PathGrid, initial_law: InitialLaw, seed, replicate: int) -> PathGrid:
    """Add one independent X_0 ~ initial_law draw to every path value."""
    if np.any(path.values[0] != 0.0):
        raise ParameterError("randomize_initial requires a path started at 0")
    master = _as_master_seed(seed)
    gen = rng.stream(master, rng.INITIAL, replicate)
    x0 = initial_law.draw(gen, path.dim)
    return PathGrid(times=path.times, values=path.values + x0, dim=path.dim)


def subsample(path: PathGrid, n: int) -> PathGrid:
    """Exact skeleton at t_k = k T / n; n must divide the fine step count."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    n_fine = path.n_steps
    path.delta  # validates equispacing
    if n_fine % n != 0:
        raise AlignmentError(
            f"skeleton size {n} does not divide the fine step count {n_fine}; "
            "refusing to interpolate"
        )
    stride = n_fine // n
    return PathGrid(
        times=path.times[::stride], values=path.values[::stride], dim=path.dim
    )
