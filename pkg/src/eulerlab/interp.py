"""Periodic interpolation of grid fields at arbitrary points.

Two families:

- B-spline (order 3 or 5): an FFT prefilter turns samples into spline
  coefficients (division by the spline's transfer function along each
  axis), then the compact-support kernel is evaluated per query point.
  O(1) per point after the prefilter; accuracy O(h^{order+1}).
- Exact trigonometric evaluation (``order="fourier"``): sums the Fourier
  series at the query points.  Exact for band-limited fields, O(#modes)
  per point; used for convergence studies.

Query points are physical coordinates on the torus; any real values are
accepted and wrapped.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import _kernels
from .spectral import Grid, _Field

__all__ = ["Interpolant", "sample", "DEFAULT_ORDER"]

DEFAULT_ORDER = 3

# transfer function of the centered B-spline on the integer grid
_THETA_GAIN = {
    3: lambda th: (4.0 + 2.0 * np.cos(th)) / 6.0,
    5: lambda th: (66.0 + 52.0 * np.cos(th) + 2.0 * np.cos(2.0 * th)) / 120.0,
}


def _prefilter(field: _Field, order: int) -> np.ndarray:
    grid = field.grid
    theta = 2.0 * np.pi * grid._kint / grid.n
    hat = field.hat.reshape((-1,) + grid.shape).copy()
    gain = _THETA_GAIN[order]
    for j in range(grid.dim):
        shape = [1] * grid.dim
        shape[j] = grid.n
        hat /= gain(theta).reshape(shape)
    return grid.ifft(hat)


class Interpolant:
    """Prepared interpolant of one field; evaluate with ``.at(points)``.

    ``points`` has shape (dim, ...) in physical coordinates; the result
    has the field's component axes followed by the point shape.
    """

    def __init__(self, field: _Field, order: int | str = DEFAULT_ORDER,
                 nyquist_warn: float = 1e-6):
        grid = field.grid
        if order not in (3, 5, "fourier"):
            raise ValueError(f"order must be 3, 5 or 'fourier', got {order!r}")
        self.grid = grid
        self.order = order
        self._comp_shape = field.data.shape[: field.data.ndim - grid.dim]
        if order == "fourier":
            hat = field.hat.reshape((-1,) + grid.shape)
            flat = hat.reshape(hat.shape[0], -1)
            live = np.any(np.abs(flat) > 1e-300, axis=0)
            self._hat_rows = np.ascontiguousarray(flat[:, live])
            xi = np.stack([np.broadcast_to(a, grid.shape).ravel()[live]
                           for a in grid.xi_axes], axis=1)
            self._xi_rows = np.ascontiguousarray(xi)
        else:
            total = float(np.sum(np.abs(field.hat) ** 2))
            nyq = float(np.sum(np.abs(np.where(grid.nyquist_mask, field.hat, 0.0)) ** 2))
            if total > 0 and nyq > nyquist_warn * total:
                warnings.warn(
                    "field has significant unpaired Nyquist content; "
                    "spline interpolation of it is not well defined",
                    stacklevel=2,
                )
            self._coeffs = np.ascontiguousarray(
                _prefilter(field, order).reshape((-1,) + grid.shape)
            )

    def at(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        if points.shape[0] != self.grid.dim:
            raise ValueError(f"points must have leading axis {self.grid.dim}")
        pshape = points.shape[1:]
        flat = points.reshape(self.grid.dim, -1)
        if self.order == "fourier":
            vals = self._fourier_at(flat)
        else:
            t = (flat % self.grid.length) / self.grid.spacing
            if self.grid.dim == 2:
                vals = _kernels.eval_spline_2d(self._coeffs, t[0], t[1], self.order)
            else:
                vals = _kernels.eval_spline_3d(self._coeffs, t[0], t[1], t[2],
                                               self.order)
        return vals.reshape(self._comp_shape + pshape)

    def _fourier_at(self, flat: np.ndarray, block: int = 4096) -> np.ndarray:
        m = flat.shape[1]
        out = np.empty((self._hat_rows.shape[0], m))
        for start in range(0, m, block):
            sl = slice(start, min(start + block, m))
            phase = flat[:, sl].T @ self._xi_rows.T
            basis = np.exp(1j * phase)
            out[:, sl] = np.real(self._hat_rows @ basis.T)
        return out


def sample(field: _Field, points: np.ndarray,
           order: int | str = DEFAULT_ORDER) -> np.ndarray:
    """One-shot interpolation; see :class:`Interpolant`."""
    return Interpolant(field, order=order).at(points)
