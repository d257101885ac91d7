"""Periodic grid, Fourier transforms, multiplier operators and Sobolev norms.

Coefficient convention: for a field f sampled on the uniform grid of
[0, L)^dim, the spectral coefficient attached to the wavenumber
xi = 2*pi*k/L is

    f_hat[k] = (1/N^dim) * sum_j f(x_j) exp(-i xi . x_j)

so that a single cosine mode carries coefficients of magnitude 1/2
independent of the grid.  All Sobolev norms below use this convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DEFAULT_BOX_LENGTH",
    "Grid",
    "GridMismatchError",
    "ScalarField",
    "VectorField",
    "MatrixField",
    "SpectralMultiplier",
    "chi_symbol",
    "apply_multiplier",
    "chi_cutoff",
    "inv_laplace_highpass",
    "spectral_truncate",
    "partial_derivative",
    "dealias",
    "sobolev_norm",
    "sobolev_inner",
    "random_scalar",
]

# Large default box so compactly supported test data sits far from its
# periodic images.
DEFAULT_BOX_LENGTH = 16.0 * np.pi


class GridMismatchError(ValueError):
    """Raised when an operation mixes fields living on different grids."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L)^dim together with its frequency lattice.

    Parameters
    ----------
    dim : 2 or 3.
    n : points per axis; a power of two >= 8.
    length : physical period L of the box.
    """

    dim: int = 2
    n: int = 64
    length: float = DEFAULT_BOX_LENGTH

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.length > 0 and np.isfinite(self.length)):
            raise ValueError(f"length must be positive, got {self.length}")

        kint = np.rint(np.fft.fftfreq(self.n) * self.n).astype(np.int64)
        # Broadcastable physical wavenumber along each axis.
        xi_axes = []
        for j in range(self.dim):
            shape = [1] * self.dim
            shape[j] = self.n
            xi_axes.append((2.0 * np.pi / self.length) * kint.reshape(shape))
        xi_sq = sum(x * x for x in xi_axes)
        kmax = self.n // 3  # 2/3-rule retention limit (integer modes)
        keep = np.ones((self.n,) * self.dim, dtype=bool)
        nyq = np.zeros_like(keep)
        for j in range(self.dim):
            shape = [1] * self.dim
            shape[j] = self.n
            ka = np.abs(kint).reshape(shape)
            keep &= ka <= kmax
            nyq |= np.rint(ka) == self.n // 2

        object.__setattr__(self, "_kint", kint)
        object.__setattr__(self, "xi_axes", tuple(xi_axes))
        object.__setattr__(self, "xi_sq", xi_sq)
        object.__setattr__(self, "dealias_mask", keep)
        object.__setattr__(self, "nyquist_mask", nyq)

    # -- geometry ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def xi_max(self) -> float:
        """Largest resolved physical wavenumber per axis (Nyquist)."""
        return np.pi / self.spacing

    def axis_coords(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    def coords(self) -> tuple[np.ndarray, ...]:
        """Full coordinate arrays, one per axis, each of shape ``self.shape``."""
        x = self.axis_coords()
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    # -- transforms ----------------------------------------------------

    def fft(self, values: np.ndarray) -> np.ndarray:
        axes = tuple(range(-self.dim, 0))
        return np.fft.fftn(values, axes=axes) / self.size

    def ifft(self, hat: np.ndarray) -> np.ndarray:
        axes = tuple(range(-self.dim, 0))
        return np.real(np.fft.ifftn(hat, axes=axes)) * self.size


def _check_same_grid(*objs) -> Grid:
    grid = objs[0].grid if hasattr(objs[0], "grid") else objs[0]
    for o in objs[1:]:
        g = o.grid if hasattr(o, "grid") else o
        if g is not grid and g != grid:
            raise GridMismatchError("fields live on different grids")
    return grid


class _Field:
    """Samples of a (possibly tensor-valued) field with a lazy spectral cache."""

    kind: str = ""
    _comp_axes: int = 0

    def __init__(self, grid: Grid, data: np.ndarray, hat: np.ndarray | None = None):
        data = np.asarray(data, dtype=np.float64)
        expected = self._expected_shape(grid)
        if data.shape != expected:
            raise ValueError(f"{type(self).__name__} data shape {data.shape} != {expected}")
        if not np.all(np.isfinite(data)):
            raise ValueError(f"{type(self).__name__} contains non-finite samples")
        self.grid = grid
        self.data = data
        self.data.flags.writeable = False
        self._hat = hat

    def _expected_shape(self, grid: Grid) -> tuple[int, ...]:
        return (grid.dim,) * self._comp_axes + grid.shape

    @property
    def hat(self) -> np.ndarray:
        if self._hat is None:
            self._hat = self.grid.fft(self.data)
        return self._hat

    @classmethod
    def from_hat(cls, grid: Grid, hat: np.ndarray):
        hat = np.asarray(hat, dtype=np.complex128)
        return cls(grid, grid.ifft(hat), hat=hat)

    # basic vector-space arithmetic (kept minimal; heavy lifting is in ops)
    def __add__(self, other):
        _check_same_grid(self, other)
        if type(other) is not type(self):
            raise TypeError("can only add fields of the same kind")
        return type(self)(self.grid, self.data + other.data)

    def __sub__(self, other):
        _check_same_grid(self, other)
        if type(other) is not type(self):
            raise TypeError("can only subtract fields of the same kind")
        return type(self)(self.grid, self.data - other.data)

    def __mul__(self, c: float):
        return type(self)(self.grid, self.data * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(self.grid, -self.data)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.grid.n}, dim={self.grid.dim})"


class ScalarField(_Field):
    kind = "scalar"
    _comp_axes = 0

    @classmethod
    def zero(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, f: Callable) -> "ScalarField":
        return cls(grid, f(*grid.coords()))


class VectorField(_Field):
    kind = "vector"
    _comp_axes = 1

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.data[i],
                           hat=None if self._hat is None else self._hat[i])

    @classmethod
    def zero(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros((grid.dim,) + grid.shape))

    @classmethod
    def from_components(cls, comps) -> "VectorField":
        grid = _check_same_grid(*comps)
        return cls(grid, np.stack([c.data for c in comps]))

    @classmethod
    def from_function(cls, grid: Grid, f: Callable) -> "VectorField":
        return cls(grid, np.stack(f(*grid.coords())))


class MatrixField(_Field):
    kind = "matrix"
    _comp_axes = 2

    def entry(self, i: int, j: int) -> ScalarField:
        return ScalarField(self.grid, self.data[i, j])

    @classmethod
    def zero(cls, grid: Grid) -> "MatrixField":
        return cls(grid, np.zeros((grid.dim, grid.dim) + grid.shape))

    def skew_defect(self) -> float:
        """sup-norm of Omega + Omega^T (zero for a vorticity field)."""
        return float(np.max(np.abs(self.data + np.swapaxes(self.data, 0, 1))))


# ---------------------------------------------------------------------------
# multiplier operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralMultiplier:
    """Real even symbol m(xi) applied pointwise on the frequency lattice.

    ``symbol`` receives the broadcastable wavenumber arrays (one per axis)
    plus |xi|^2 and must return a real array; its value at xi = 0 must be
    finite (1/|xi|^2-type symbols define it explicitly).
    """

    symbol: Callable

    def on(self, grid: Grid) -> np.ndarray:
        m = np.asarray(self.symbol(grid.xi_axes, grid.xi_sq), dtype=np.float64)
        m = np.broadcast_to(m, grid.shape)
        if not np.all(np.isfinite(m)):
            raise ValueError("multiplier symbol evaluated to a non-finite value")
        return m


def chi_symbol(radius: float = 1.0) -> SpectralMultiplier:
    """Sharp low-pass: indicator of the closed ball |xi| <= radius."""
    if not radius > 0:
        raise ValueError(f"cutoff radius must be positive, got {radius}")
    r2 = radius * radius * (1.0 + 1e-12)
    return SpectralMultiplier(lambda xi, xi_sq: (xi_sq <= r2).astype(np.float64))


def apply_multiplier(m: SpectralMultiplier | np.ndarray, f: _Field):
    mult = m.on(f.grid) if isinstance(m, SpectralMultiplier) else m
    return type(f).from_hat(f.grid, f.hat * mult)


def chi_cutoff(f: _Field, radius: float = 1.0):
    return apply_multiplier(chi_symbol(radius), f)


def inv_laplace_highpass(f: _Field, radius: float = 1.0):
    """Apply -(1 - chi(xi)) / |xi|^2; zero on |xi| <= radius (and at xi = 0)."""
    if not radius > 0:
        raise ValueError(f"cutoff radius must be positive, got {radius}")
    r2 = radius * radius * (1.0 + 1e-12)

    def sym(xi, xi_sq):
        outside = xi_sq > r2
        safe = np.where(outside, xi_sq, 1.0)
        return np.where(outside, -1.0 / safe, 0.0)

    return apply_multiplier(SpectralMultiplier(sym), f)


def spectral_truncate(f: _Field, k: float):
    """Keep modes with |xi| <= k (the operator chi_k(D))."""
    if not k >= 1:
        raise ValueError(f"truncation radius must be >= 1, got {k}")
    return chi_cutoff(f, radius=float(k))


def partial_derivative(f: _Field, axis: int):
    """Spectral d/dx_axis; the unpaired Nyquist mode is zeroed."""
    grid = f.grid
    if not 0 <= axis < grid.dim:
        raise ValueError(f"axis must be in [0, {grid.dim}), got {axis}")
    hat = f.hat * (1j * grid.xi_axes[axis])
    hat = np.where(grid.nyquist_mask, 0.0, hat)
    return type(f).from_hat(grid, hat)


def dealias(f: _Field):
    """2/3-rule truncation; applied after every pointwise product."""
    return type(f).from_hat(f.grid, np.where(f.grid.dealias_mask, f.hat, 0.0))


def dealias_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    hat = grid.fft(values)
    return grid.ifft(np.where(grid.dealias_mask, hat, 0.0))


# ---------------------------------------------------------------------------
# Sobolev norms
# ---------------------------------------------------------------------------


def _sobolev_weight(grid: Grid, s: float) -> np.ndarray:
    return (1.0 + grid.xi_sq) ** s


def sobolev_norm(f: _Field, s: float) -> float:
    """H^s norm ( sum_k (1+|xi_k|^2)^s |f_hat_k|^2 )^(1/2).

    Vector and matrix fields sum the squared norms of their components.
    """
    if not np.isfinite(s):
        raise ValueError("s must be finite")
    w = _sobolev_weight(f.grid, s)
    return float(np.sqrt(np.sum(w * np.abs(f.hat) ** 2)))


def sobolev_inner(f: _Field, g: _Field, s: float = 0.0) -> float:
    _check_same_grid(f, g)
    if type(f) is not type(g):
        raise TypeError("inner product requires fields of the same kind")
    w = _sobolev_weight(f.grid, s)
    return float(np.real(np.sum(w * f.hat * np.conj(g.hat))))


# ---------------------------------------------------------------------------
# random test fields
# ---------------------------------------------------------------------------


def random_scalar(grid: Grid, rng: np.random.Generator, max_xi: float | None = None,
                  decay: float = 2.0, norm_s: float | None = None,
                  norm_value: float = 1.0) -> ScalarField:
    """Random smooth band-limited real field (mean-free).

    Spectrum: white noise shaped by (1+|xi|^2)^(-decay), truncated to
    |xi| <= max_xi (default: 80% of the dealiasing limit).
    """
    if max_xi is None:
        max_xi = 0.8 * (grid.n // 3) * (2.0 * np.pi / grid.length)
    w = rng.standard_normal(grid.shape)
    hat = grid.fft(w) * (1.0 + grid.xi_sq) ** (-decay / 2.0)
    hat = np.where(grid.xi_sq <= max_xi**2, hat, 0.0)
    hat.flat[0] = 0.0
    f = ScalarField.from_hat(grid, hat)
    if norm_s is not None:
        nrm = sobolev_norm(f, norm_s)
        if nrm == 0:
            raise ValueError("degenerate random field")
        f = f * (norm_value / nrm)
    return f
