"""Hot evaluation kernels for periodic B-spline interpolation.

Two backends compute identical results: a numba-compiled loop (default)
and a vectorized numpy gather.  Set the environment variable
``EULERLAB_NO_NUMBA=1`` before import to force the numpy backend (or to
run on installs without numba).

Inputs are spline *coefficients* (already prefiltered, see interp.py)
and query points in grid units; indices wrap periodically.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "eval_spline_2d", "eval_spline_3d"]


def _cubic_weights_np(f: np.ndarray) -> np.ndarray:
    """Cubic B-spline weights at offsets -1..2; f = fractional part, shape (M,)."""
    g = 1.0 - f
    return np.stack([
        g * g * g / 6.0,
        (4.0 - 6.0 * f * f + 3.0 * f * f * f) / 6.0,
        (1.0 + 3.0 * f + 3.0 * f * f - 3.0 * f * f * f) / 6.0,
        f * f * f / 6.0,
    ])


def _quintic_weights_np(f: np.ndarray) -> np.ndarray:
    """Quintic B-spline weights at offsets -2..3."""
    g = 1.0 - f
    return np.stack([
        g**5 / 120.0,
        ((2.0 - f) ** 5 - 6.0 * g**5) / 120.0,
        ((3.0 - f) ** 5 - 6.0 * (2.0 - f) ** 5 + 15.0 * g**5) / 120.0,
        ((2.0 + f) ** 5 - 6.0 * (1.0 + f) ** 5 + 15.0 * f**5) / 120.0,
        ((1.0 + f) ** 5 - 6.0 * f**5) / 120.0,
        f**5 / 120.0,
    ])


def _eval_2d_numpy(coeffs: np.ndarray, tx: np.ndarray, ty: np.ndarray,
                   order: int) -> np.ndarray:
    n = coeffs.shape[-1]
    wfun, lo = (_cubic_weights_np, 1) if order == 3 else (_quintic_weights_np, 2)
    ix, iy = np.floor(tx).astype(np.int64), np.floor(ty).astype(np.int64)
    wx = wfun(tx - ix)
    wy = wfun(ty - iy)
    out = np.zeros((coeffs.shape[0], tx.size))
    for a in range(order + 1):
        ja = (ix + (a - lo)) % n
        for b in range(order + 1):
            jb = (iy + (b - lo)) % n
            out += (wx[a] * wy[b]) * coeffs[:, ja, jb]
    return out


def _eval_3d_numpy(coeffs: np.ndarray, tx: np.ndarray, ty: np.ndarray,
                   tz: np.ndarray, order: int) -> np.ndarray:
    n = coeffs.shape[-1]
    wfun, lo = (_cubic_weights_np, 1) if order == 3 else (_quintic_weights_np, 2)
    ix, iy, iz = (np.floor(t).astype(np.int64) for t in (tx, ty, tz))
    wx, wy, wz = wfun(tx - ix), wfun(ty - iy), wfun(tz - iz)
    out = np.zeros((coeffs.shape[0], tx.size))
    for a in range(order + 1):
        ja = (ix + (a - lo)) % n
        for b in range(order + 1):
            jb = (iy + (b - lo)) % n
            wab = wx[a] * wy[b]
            for c in range(order + 1):
                jc = (iz + (c - lo)) % n
                out += (wab * wz[c]) * coeffs[:, ja, jb, jc]
    return out


_want_numba = os.environ.get("EULERLAB_NO_NUMBA", "") not in ("1", "true", "yes")

if _want_numba:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover - exercised only without numba
        _want_numba = False

if _want_numba:
    BACKEND = "numba"

    @njit(cache=True, inline="always")
    def _weights(f, order, w):
        if order == 3:
            g = 1.0 - f
            w[0] = g * g * g / 6.0
            w[1] = (4.0 - 6.0 * f * f + 3.0 * f * f * f) / 6.0
            w[2] = (1.0 + 3.0 * f + 3.0 * f * f - 3.0 * f * f * f) / 6.0
            w[3] = f * f * f / 6.0
        else:
            g = 1.0 - f
            w[0] = g**5 / 120.0
            w[1] = ((2.0 - f) ** 5 - 6.0 * g**5) / 120.0
            w[2] = ((3.0 - f) ** 5 - 6.0 * (2.0 - f) ** 5 + 15.0 * g**5) / 120.0
            w[3] = ((2.0 + f) ** 5 - 6.0 * (1.0 + f) ** 5 + 15.0 * f**5) / 120.0
            w[4] = ((1.0 + f) ** 5 - 6.0 * f**5) / 120.0
            w[5] = f**5 / 120.0

    @njit(cache=True, parallel=True)
    def _eval_2d_numba(coeffs, tx, ty, order):
        ncomp = coeffs.shape[0]
        n = coeffs.shape[-1]
        lo = 1 if order == 3 else 2
        out = np.zeros((ncomp, tx.size))
        for m in prange(tx.size):
            wx = np.empty(order + 1)
            wy = np.empty(order + 1)
            ix = int(np.floor(tx[m]))
            iy = int(np.floor(ty[m]))
            _weights(tx[m] - ix, order, wx)
            _weights(ty[m] - iy, order, wy)
            for a in range(order + 1):
                ja = (ix + a - lo) % n
                for b in range(order + 1):
                    jb = (iy + b - lo) % n
                    w = wx[a] * wy[b]
                    for c in range(ncomp):
                        out[c, m] += w * coeffs[c, ja, jb]
        return out

    @njit(cache=True, parallel=True)
    def _eval_3d_numba(coeffs, tx, ty, tz, order):
        ncomp = coeffs.shape[0]
        n = coeffs.shape[-1]
        lo = 1 if order == 3 else 2
        out = np.zeros((ncomp, tx.size))
        for m in prange(tx.size):
            wx = np.empty(order + 1)
            wy = np.empty(order + 1)
            wz = np.empty(order + 1)
            ix = int(np.floor(tx[m]))
            iy = int(np.floor(ty[m]))
            iz = int(np.floor(tz[m]))
            _weights(tx[m] - ix, order, wx)
            _weights(ty[m] - iy, order, wy)
            _weights(tz[m] - iz, order, wz)
            for a in range(order + 1):
                ja = (ix + a - lo) % n
                for b in range(order + 1):
                    jb = (iy + b - lo) % n
                    wab = wx[a] * wy[b]
                    for c in range(order + 1):
                        jc = (iz + c - lo) % n
                        w = wab * wz[c]
                        for k in range(ncomp):
                            out[k, m] += w * coeffs[k, ja, jb, jc]
        return out

    def eval_spline_2d(coeffs, tx, ty, order):
        return _eval_2d_numba(coeffs, tx, ty, order)

    def eval_spline_3d(coeffs, tx, ty, tz, order):
        return _eval_3d_numba(coeffs, tx, ty, tz, order)

else:
    BACKEND = "numpy"
    eval_spline_2d = _eval_2d_numpy
    eval_spline_3d = _eval_3d_numpy
