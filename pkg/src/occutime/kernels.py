"""Hot numeric kernels: numba-compiled with pure-numpy fallbacks.

Two inner loops dominate runtime and carry @njit versions:

* Euler-Maruyama chaining for scalar diffusions (sequential in time,
  cannot be vectorized across steps);
* the frequency x time-cell accumulation of the Gaussian Fourier-domain
  error bound (a triple loop over frequency pairs and quadrature points).

The active implementation is chosen at import time by `_accel.USE_NUMBA`
(env var OCCUTIME_NO_NUMBA selects the fallbacks).  Fallbacks compute
identical quantities: the Euler fallback runs the same recursion in
Python, the bound fallback evaluates the same quadrature-point tables by
chunked numpy broadcasting.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ._accel import USE_NUMBA, njit

if USE_NUMBA:
    import numba


# ---------------------------------------------------------------------------
# Euler-Maruyama chain (scalar state)
# ---------------------------------------------------------------------------


def _euler_chain_py(x0: float, dt: float, dw: np.ndarray, drift, diffusion) -> np.ndarray:
    out = np.empty(dw.shape[0] + 1)
    out[0] = x0
    x = x0
    for i in range(dw.shape[0]):
        x = x + drift(x) * dt + diffusion(x) * dw[i]
        out[i + 1] = x
    return out


if USE_NUMBA:

    @njit(cache=False)  # function-typed arguments are not cacheable
    def _euler_chain_njit(x0, dt, dw, drift, diffusion):
        out = np.empty(dw.shape[0] + 1)
        out[0] = x0
        x = x0
        for i in range(dw.shape[0]):
            x = x + drift(x) * dt + diffusion(x) * dw[i]
            out[i + 1] = x
        return out


_scalar_jit_cache: dict[Callable, object] = {}


def compile_scalar(fn: Callable) -> object | None:
    """Compile a scalar float -> float callable for the njit Euler path.

    Returns None when numba is off or the callable is not nopython
    compilable; callers then fall back to the Python chain.
    """
    if not USE_NUMBA:
        return None
    if fn in _scalar_jit_cache:
        return _scalar_jit_cache[fn]
    try:
        jf = numba.njit("float64(float64)")(fn)
        jf(0.0)
    except Exception:
        jf = None
    _scalar_jit_cache[fn] = jf
    return jf


def euler_chain(x0: float, dt: float, dw: np.ndarray, drift, diffusion) -> np.ndarray:
    """Scalar Euler recursion x_{i+1} = x_i + b(x_i) dt + s(x_i) dW_i.

    `drift`/`diffusion` are plain Python callables; the compiled kernel is
    used when both compile under numba, otherwise the Python loop runs.
    The two paths perform the identical sequence of float64 operations.
    """
    if USE_NUMBA:
        jd = compile_scalar(drift)
        js = compile_scalar(diffusion)
        if jd is not None and js is not None:
            return _euler_chain_njit(float(x0), float(dt), dw, jd, js)
    return _euler_chain_py(float(x0), float(dt), dw, drift, diffusion)


# ---------------------------------------------------------------------------
# Gaussian Fourier-bound accumulation
# ---------------------------------------------------------------------------
#
# The bound's integrand is built from the joint characteristic function of
# (X_h, X_r), h <= r, for a centered Gaussian process with stationary
# increments and covariance c(h,r) = (r^{2H} + h^{2H} - (r-h)^{2H})/2:
#
#   phi(h,r;u,v) = exp(-Phi/2),  Phi = u^2 h^{2H} + v^2 r^{2H} + 2uv c(h,r)
#   dPhi/dr   = 2H (v^2+uv) r^{2H-1} - 2H uv (r-h)^{2H-1}
#   dPhi/dh   = 2H (u^2+uv) h^{2H-1} + 2H uv (r-h)^{2H-1}
#   d2Phi/dhdr = 2H(2H-1) uv (r-h)^{2H-2}
#   |dphi/dr| = |dPhi/dr| phi / 2,  |dphi/dh| = |dPhi/dh| phi / 2
#   |d2phi/dhdr| = |d2Phi/dhdr/2 - dPhi/dr dPhi/dh / 4| phi
#
# The accumulated expression, per frequency pair (u, v), is the time sum
#
#   Delta^2 [ Delta^{-1} sum_k ( int_{cell_k^2} |d phi_{h,r}| dh dr
#                                + int_{cell_k^2} |d_r phi_{t_{k-1},r}| dh dr )
#             + sum_{k-1>j>=2} int_{cell_k} int_{cell_j} |d2 phi_{h,r}| dh dr ]
#
# where the in-cell square integral of the ordered-pair derivative equals,
# after the symmetric frequency integration, the ordered triangle h <= r
# carrying (|dPhi/dr| + |dPhi/dh|) phi / 2.  Quadrature points are
# precomputed once per (n, T, H) with all u,v-independent powers tabulated,
# so the inner loop is multiply-add plus one exp per (frequency pair, point).


def gauss_legendre_01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def bound_point_tables(
    n: int, horizon: float, hurst: float, diag_order: int = 8, off_order: int = 4
) -> tuple[np.ndarray, ...]:
    """Quadrature-point tables for the bound accumulation.

    Returns (tri_tab, tri_w, anch_tab, anch_w, off_tab, off_w), one
    (points x columns) table per term of the expression above:

    * tri_tab: in-cell ordered triangle h <= r, columns
      [h^{2H}, r^{2H}, c(h,r), 2H r^{2H-1}, 2H (r-h)^{2H-1}, 2H h^{2H-1}];
    * anch_tab: r over the cell with h pinned at the left cell endpoint,
      first five columns of the above;
    * off_tab: cross-cell pairs (j, k), 2 <= j <= k-2, columns of tri_tab
      plus [2H(2H-1)(r-h)^{2H-2}].

    Weights fold in every jacobian and the Delta^2 / Delta^{-1} prefactors,
    so accumulation is a plain weighted sum of integrand values.
    """
    H = float(hurst)
    delta = horizon / n
    gx, gw = gauss_legendre_01(diag_order)
    ox, ow = gauss_legendre_01(off_order)

    h_list, r_list, w_list = [], [], []
    # in-cell ordered triangle: r in cell, h in [t_{k-1}, r]
    for k in range(1, n + 1):
        t0 = (k - 1) * delta
        r_nodes = t0 + delta * gx
        for r, wr in zip(r_nodes, gw):
            span = r - t0
            h_nodes = t0 + span * gx
            h_list.append(h_nodes)
            r_list.append(np.full_like(h_nodes, r))
            # Delta jacobian (r) * span jacobian (h) * Delta^{-1} prefactor
            w_list.append(span * wr * gw)
    th = np.concatenate(h_list)
    tr = np.concatenate(r_list)
    tri_w = np.concatenate(w_list) * delta**2

    h_list, r_list, w_list = [], [], []
    # anchored term: h = t_{k-1}, r over the cell; the trivial h-integral
    # contributes Delta, cancelling the Delta^{-1} prefactor
    for k in range(1, n + 1):
        t0 = (k - 1) * delta
        r_nodes = t0 + delta * gx
        h_list.append(np.full_like(r_nodes, t0))
        r_list.append(r_nodes)
        w_list.append(delta * gw)
    ah = np.concatenate(h_list)
    ar = np.concatenate(r_list)
    anch_w = np.concatenate(w_list) * delta**2

    oh_list, or_list, ow_list = [], [], []
    for k in range(4, n + 1):
        t0k = (k - 1) * delta
        r_nodes = t0k + delta * ox
        for j in range(2, k - 1):
            t0j = (j - 1) * delta
            h_nodes = t0j + delta * ox
            hh, rr = np.meshgrid(h_nodes, r_nodes)
            wh, wr = np.meshgrid(ow, ow)
            oh_list.append(hh.ravel())
            or_list.append(rr.ravel())
            ow_list.append((delta * delta * wh * wr).ravel())
    if oh_list:
        oh = np.concatenate(oh_list)
        orr = np.concatenate(or_list)
        off_w = np.concatenate(ow_list) * delta**2
    else:
        oh = np.empty(0)
        orr = np.empty(0)
        off_w = np.empty(0)

    def _powers(h, r, mixed: bool) -> np.ndarray:
        rmh = r - h
        safe_h = np.where(h > 0, h, 1.0)
        safe_gap = np.where(rmh > 0, rmh, 1.0)
        cols = [
            h ** (2 * H),
            r ** (2 * H),
            0.5 * (r ** (2 * H) + h ** (2 * H) - rmh ** (2 * H)),
            2 * H * r ** (2 * H - 1),
            2 * H * safe_gap ** (2 * H - 1),
            2 * H * safe_h ** (2 * H - 1),
        ]
        if mixed:
            cols.append(2 * H * (2 * H - 1) * safe_gap ** (2 * H - 2))
        return np.column_stack(cols)

    tri_tab = _powers(th, tr, mixed=False)
    anch_tab = _powers(ah, ar, mixed=False)
    off_tab = _powers(oh, orr, mixed=True) if oh.size else np.empty((0, 7))
    return tri_tab, tri_w, anch_tab, anch_w, off_tab, off_w


def _bound_accumulate_numpy(
    uu: np.ndarray,
    coef: np.ndarray,
    tri_tab: np.ndarray,
    tri_w: np.ndarray,
    anch_tab: np.ndarray,
    anch_w: np.ndarray,
    off_tab: np.ndarray,
    off_w: np.ndarray,
    chunk: int = 256,
) -> float:
    """Pure-numpy bound accumulation: sum_ij coef_i coef_j K(u_i, u_j)."""
    N = uu.shape[0]
    u2 = (uu**2)[:, None, None]
    v2 = (uu**2)[None, :, None]
    uv = np.multiply.outer(uu, uu)[:, :, None]
    kmat = np.zeros((N, N))
    for lo in range(0, tri_tab.shape[0], chunk):
        t = tri_tab[lo : lo + chunk]
        w = tri_w[lo : lo + chunk]
        phi = u2 * t[:, 0] + v2 * t[:, 1] + 2.0 * uv * t[:, 2]
        drphi = (v2 + uv) * t[:, 3] - uv * t[:, 4]
        dhphi = (u2 + uv) * t[:, 5] + uv * t[:, 4]
        integrand = 0.5 * (np.abs(drphi) + np.abs(dhphi))
        kmat += np.sum(w * integrand * np.exp(-0.5 * phi), axis=2)
    for lo in range(0, anch_tab.shape[0], chunk):
        t = anch_tab[lo : lo + chunk]
        w = anch_w[lo : lo + chunk]
        phi = u2 * t[:, 0] + v2 * t[:, 1] + 2.0 * uv * t[:, 2]
        drphi = (v2 + uv) * t[:, 3] - uv * t[:, 4]
        kmat += np.sum(w * 0.5 * np.abs(drphi) * np.exp(-0.5 * phi), axis=2)
    for lo in range(0, off_tab.shape[0], chunk):
        t = off_tab[lo : lo + chunk]
        w = off_w[lo : lo + chunk]
        phi = u2 * t[:, 0] + v2 * t[:, 1] + 2.0 * uv * t[:, 2]
        drphi = (v2 + uv) * t[:, 3] - uv * t[:, 4]
        dhphi = (u2 + uv) * t[:, 5] + uv * t[:, 4]
        mixed = -0.5 * uv * t[:, 6] + 0.25 * drphi * dhphi
        kmat += np.sum(w * np.abs(mixed) * np.exp(-0.5 * phi), axis=2)
    return float(coef @ kmat @ coef)


if USE_NUMBA:

    @njit(cache=True)
    def _bound_accumulate_njit(
        uu, coef, tri_tab, tri_w, anch_tab, anch_w, off_tab, off_w
    ):
        N = uu.shape[0]
        total = 0.0
        for i in range(N):
            u = uu[i]
            for j in range(N):
                v = uu[j]
                u2 = u * u
                v2 = v * v
                uv = u * v
                acc = 0.0
                for p in range(tri_tab.shape[0]):
                    phi = (
                        u2 * tri_tab[p, 0]
                        + v2 * tri_tab[p, 1]
                        + 2.0 * uv * tri_tab[p, 2]
                    )
                    drphi = (v2 + uv) * tri_tab[p, 3] - uv * tri_tab[p, 4]
                    dhphi = (u2 + uv) * tri_tab[p, 5] + uv * tri_tab[p, 4]
                    acc += (
                        tri_w[p]
                        * 0.5
                        * (abs(drphi) + abs(dhphi))
                        * np.exp(-0.5 * phi)
                    )
                for p in range(anch_tab.shape[0]):
                    phi = (
                        u2 * anch_tab[p, 0]
                        + v2 * anch_tab[p, 1]
                        + 2.0 * uv * anch_tab[p, 2]
                    )
                    drphi = (v2 + uv) * anch_tab[p, 3] - uv * anch_tab[p, 4]
                    acc += anch_w[p] * 0.5 * abs(drphi) * np.exp(-0.5 * phi)
                for p in range(off_tab.shape[0]):
                    phi = (
                        u2 * off_tab[p, 0]
                        + v2 * off_tab[p, 1]
                        + 2.0 * uv * off_tab[p, 2]
                    )
                    drphi = (v2 + uv) * off_tab[p, 3] - uv * off_tab[p, 4]
                    dhphi = (u2 + uv) * off_tab[p, 5] + uv * off_tab[p, 4]
                    mixed = -0.5 * uv * off_tab[p, 6] + 0.25 * drphi * dhphi
                    acc += off_w[p] * abs(mixed) * np.exp(-0.5 * phi)
                total += coef[i] * coef[j] * acc
        return total


def bound_accumulate(
    uu: np.ndarray,
    coef: np.ndarray,
    tri_tab: np.ndarray,
    tri_w: np.ndarray,
    anch_tab: np.ndarray,
    anch_w: np.ndarray,
    off_tab: np.ndarray,
    off_w: np.ndarray,
) -> float:
    if USE_NUMBA:
        return float(
            _bound_accumulate_njit(
                uu, coef, tri_tab, tri_w, anch_tab, anch_w, off_tab, off_w
            )
        )
    return _bound_accumulate_numpy(
        uu, coef, tri_tab, tri_w, anch_tab, anch_w, off_tab, off_w
    )
