"""Vector/matrix field calculus: divergence, Jacobian, advection, Leray
projection, vorticity, Biot-Savart inversion, mollifiers and bump fields."""

from __future__ import annotations

import numpy as np
from scipy.special import j0

from .spectral import (
    Grid,
    MatrixField,
    ScalarField,
    VectorField,
    _check_same_grid,
    dealias_values,
    partial_derivative,
    sobolev_norm,
)

__all__ = [
    "gradient",
    "divergence",
    "jacobian",
    "advect",
    "leray_project",
    "vorticity",
    "biot_savart",
    "mollify",
    "bump",
    "div_free_bump",
    "random_div_free",
]


def gradient(f: ScalarField) -> VectorField:
    return VectorField.from_components(
        [partial_derivative(f, j) for j in range(f.grid.dim)]
    )


def divergence(u: VectorField) -> ScalarField:
    grid = u.grid
    hat = np.zeros(grid.shape, dtype=np.complex128)
    for j in range(grid.dim):
        hat += 1j * grid.xi_axes[j] * u.hat[j]
    hat = np.where(grid.nyquist_mask, 0.0, hat)
    return ScalarField.from_hat(grid, hat)


def jacobian(u: VectorField) -> MatrixField:
    """Entry (i, j) = d u_i / d x_j, computed spectrally."""
    grid = u.grid
    hat = np.empty((grid.dim, grid.dim) + grid.shape, dtype=np.complex128)
    for i in range(grid.dim):
        for j in range(grid.dim):
            hat[i, j] = np.where(grid.nyquist_mask, 0.0,
                                 1j * grid.xi_axes[j] * u.hat[i])
    return MatrixField.from_hat(grid, hat)


def advect(u: VectorField, w: VectorField | None = None) -> VectorField:
    """(u . grad) w (w defaults to u) with dealiased products."""
    if w is None:
        w = u
    grid = _check_same_grid(u, w)
    du = jacobian(w)
    out = np.zeros_like(u.data)
    for i in range(grid.dim):
        acc = np.zeros(grid.shape)
        for k in range(grid.dim):
            acc += u.data[k] * du.data[i, k]
        out[i] = dealias_values(grid, acc)
    return VectorField(grid, out)


def leray_project(u: VectorField) -> VectorField:
    """L^2-orthogonal projection onto divergence-free fields.

    Spectrally u_hat <- (I - xi xi^T / |xi|^2) u_hat; the mean mode is
    left unchanged.
    """
    grid = u.grid
    safe = np.where(grid.xi_sq > 0, grid.xi_sq, 1.0)
    div_hat = sum(grid.xi_axes[j] * u.hat[j] for j in range(grid.dim))
    hat = np.empty_like(u.hat)
    for i in range(grid.dim):
        hat[i] = u.hat[i] - np.where(grid.xi_sq > 0,
                                     grid.xi_axes[i] * div_hat / safe, 0.0)
    return VectorField.from_hat(grid, hat)


def vorticity(u: VectorField) -> MatrixField:
    """Skew matrix Omega_ij = d_j u_i - d_i u_j."""
    du = jacobian(u)
    return MatrixField(u.grid, du.data - np.swapaxes(du.data, 0, 1))


def biot_savart(omega: MatrixField, skew_tol: float = 1e-8) -> VectorField:
    """Unique mean-free divergence-free u with vorticity(u) = omega.

    Spectral inversion u_hat_l(xi) = (1/i) sum_j omega_hat_lj(xi) xi_j/|xi|^2
    for xi != 0.
    """
    grid = omega.grid
    scale = float(np.max(np.abs(omega.data)))
    if scale > 0 and omega.skew_defect() > skew_tol * scale:
        raise ValueError("biot_savart requires a skew-symmetric vorticity")
    mean = np.abs(omega.hat[(slice(None), slice(None)) + (0,) * grid.dim])
    if scale > 0 and np.max(mean) > skew_tol * scale:
        raise ValueError("biot_savart requires a mean-free vorticity")
    safe = np.where(grid.xi_sq > 0, grid.xi_sq, 1.0)
    hat = np.zeros((grid.dim,) + grid.shape, dtype=np.complex128)
    for ell in range(grid.dim):
        acc = np.zeros(grid.shape, dtype=np.complex128)
        for j in range(grid.dim):
            acc += omega.hat[ell, j] * grid.xi_axes[j]
        hat[ell] = np.where(grid.xi_sq > 0, -1j * acc / safe, 0.0)
    return VectorField.from_hat(grid, hat)


# ---------------------------------------------------------------------------
# mollifiers
# ---------------------------------------------------------------------------

_MOLLIFIER_NODES = 512


def _mollifier_profile(q: np.ndarray, dim: int) -> np.ndarray:
    """Fourier transform of the unit-mass radial bump rho on |x| < 1.

    rho(r) = c exp(-1/(1-r^2)); the profile is normalised so that the
    value at q = 0 is exactly 1.  2D uses the Hankel (J0) transform,
    3D the spherical (sinc) transform.
    """
    r = (np.arange(_MOLLIFIER_NODES) + 0.5) / _MOLLIFIER_NODES
    rho = np.exp(-1.0 / (1.0 - r * r))
    qf = np.asarray(q, dtype=np.float64).ravel()
    if dim == 2:
        weight = r * rho
        kernel = j0(np.outer(qf, r))
    else:
        weight = r * r * rho
        qr = np.outer(qf, r)
        kernel = np.ones_like(qr)
        nz = qr != 0
        kernel[nz] = np.sin(qr[nz]) / qr[nz]
    vals = kernel @ weight
    vals /= np.sum(weight)
    return vals.reshape(np.shape(q))


def mollify(f, eps: float):
    """Convolution with the rescaled radial bump, spectrally: f_hat * rho_hat(eps xi)."""
    if not eps > 0:
        raise ValueError(f"mollifier width must be positive, got {eps}")
    grid = f.grid
    mult = _mollifier_profile(eps * np.sqrt(grid.xi_sq), grid.dim)
    return type(f).from_hat(grid, f.hat * mult)


# ---------------------------------------------------------------------------
# bump constructions
# ---------------------------------------------------------------------------


def _check_support(grid: Grid, center, r: float) -> np.ndarray:
    center = np.asarray(center, dtype=np.float64)
    if center.shape != (grid.dim,):
        raise ValueError(f"center must have {grid.dim} coordinates")
    if not r > 0:
        raise ValueError(f"bump radius must be positive, got {r}")
    if r >= 0.5 * grid.length:
        raise ValueError(
            f"support ball of radius {r} does not fit in a box of length {grid.length}"
        )
    return center % grid.length


def _torus_dist_sq(grid: Grid, center: np.ndarray) -> np.ndarray:
    d2 = np.zeros(grid.shape)
    for j, x in enumerate(grid.coords()):
        d = np.abs(x - center[j])
        d = np.minimum(d, grid.length - d)
        d2 += d * d
    return d2


def bump(grid: Grid, center, r: float, amplitude: float = 1.0) -> ScalarField:
    """C^inf bump a * exp(-r^2/(r^2 - |y - x|^2)) on |y - x| < r, 0 outside."""
    center = _check_support(grid, center, r)
    d2 = _torus_dist_sq(grid, center)
    inside = d2 < r * r
    denom = np.where(inside, r * r - d2, 1.0)
    vals = np.where(inside, amplitude * np.exp(-r * r / denom), 0.0)
    return ScalarField(grid, vals)


def plateau(grid: Grid, center, r_flat: float, r: float,
            amplitude: float = 1.0) -> ScalarField:
    """Smooth cutoff equal to `amplitude` on |y - x| <= r_flat, 0 outside r.

    Built from the standard C^inf transition h(t)/(h(t)+h(1-t)),
    h(t) = exp(-1/t).
    """
    if not 0 < r_flat < r:
        raise ValueError("need 0 < r_flat < r")
    center = _check_support(grid, center, r)
    d = np.sqrt(_torus_dist_sq(grid, center))
    t = np.clip((r - d) / (r - r_flat), 0.0, 1.0)

    def h(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    vals = amplitude * h(t) / (h(t) + h(1.0 - t))
    return ScalarField(grid, vals)


def div_free_bump(grid: Grid, center, r: float, s: float = 2.5,
                  norm_value: float = 1.0, modulation: float = 0.0,
                  modulation_axis: int = 0) -> VectorField:
    """Compactly supported divergence-free field, normalised in H^s.

    2D: the perpendicular gradient (-d2 psi, d1 psi) of a bump psi;
    3D: curl of the vector potential (0, 0, psi).  Derivatives are taken
    spectrally, so the discrete divergence vanishes to round-off (the
    support is then exact only up to spectral truncation of psi).

    ``modulation`` > 0 multiplies psi by cos(modulation * x_axis), giving a
    wave packet whose vorticity is concentrated near that wavenumber.
    """
    psi = bump(grid, center, r)
    if modulation > 0.0:
        x = grid.coords()[modulation_axis]
        psi = ScalarField(grid, psi.data * np.cos(modulation * x))
    if grid.dim == 2:
        u = VectorField.from_components(
            [-1.0 * partial_derivative(psi, 1), partial_derivative(psi, 0)]
        )
    else:
        u = VectorField.from_components(
            [partial_derivative(psi, 1), -1.0 * partial_derivative(psi, 0),
             ScalarField.zero(grid)]
        )
    nrm = sobolev_norm(u, s)
    if nrm == 0:
        raise ValueError("degenerate bump (radius below grid resolution?)")
    return u * (norm_value / nrm)


def random_div_free(grid: Grid, rng: np.random.Generator, s: float = 3.0,
                    norm_value: float = 1.0, max_xi: float | None = None,
                    decay: float = 2.0) -> VectorField:
    """Random smooth mean-free divergence-free field with ||u||_s = norm_value."""
    from .spectral import random_scalar

    comps = [random_scalar(grid, rng, max_xi=max_xi, decay=decay)
             for _ in range(grid.dim)]
    u = leray_project(VectorField.from_components(comps))
    nrm = sobolev_norm(u, s)
    if nrm == 0:
        raise ValueError("degenerate random field")
    return u * (norm_value / nrm)


def taylor_green(grid: Grid) -> VectorField:
    """Stationary Taylor-Green vortex (2D), u = (sin x1 cos x2, -cos x1 sin x2).

    Stationary on the 2*pi-periodic box; on other box lengths the wavenumber
    is scaled to stay periodic.
    """
    if grid.dim != 2:
        raise ValueError("taylor_green is 2D")
    a = 2.0 * np.pi / grid.length
    x, y = grid.coords()
    return VectorField(grid, np.stack([
        np.sin(a * x) * np.cos(a * y),
        -np.cos(a * x) * np.sin(a * y),
    ]))
