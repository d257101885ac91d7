"""The quadratic form B = B1 + B2 replacing the pressure.

For a velocity field v,

    B1(v) = sum_{i,k} chi(D) Laplace^{-1} d_i d_k (v_i v_k)
    B2(v) = sum_{i,k} Laplace^{-1} (1 - chi(D)) (d_i v_k d_k v_i)

so that grad B(v) = -grad p whenever v is divergence-free.  The band
split at the cutoff radius keeps each piece a bounded operation: on low
modes Laplace^{-1} d_i d_k has the bounded symbol xi_i xi_k / |xi|^2, on
high modes plain Laplace inversion is bounded.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fields import advect, divergence, gradient, jacobian, leray_project
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    dealias_values,
    inv_laplace_highpass,
    sobolev_norm,
)

__all__ = ["BAssembly"]


@dataclass(frozen=True)
class BAssembly:
    """Evaluator for B, its pieces and its gradient on a fixed grid.

    ``cutoff`` is the radius of the sharp low/high frequency split; the
    sum B1 + B2 is independent of it up to the band bookkeeping, so any
    positive value yields a consistent pressure.
    """

    grid: Grid
    cutoff: float = 1.0

    def __post_init__(self) -> None:
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        r2 = self.cutoff * self.cutoff * (1.0 + 1e-12)
        low = self.grid.xi_sq <= r2
        safe = np.where(self.grid.xi_sq > 0, self.grid.xi_sq, 1.0)
        # chi(xi) xi_i xi_k / |xi|^2, zero at the origin.
        p_sym = np.empty((self.grid.dim, self.grid.dim) + self.grid.shape)
        for i in range(self.grid.dim):
            for k in range(self.grid.dim):
                sym = self.grid.xi_axes[i] * self.grid.xi_axes[k] / safe
                p_sym[i, k] = np.where(low & (self.grid.xi_sq > 0), sym, 0.0)
        object.__setattr__(self, "_p_symbol", p_sym)

    # -- the two pieces --------------------------------------------------

    def b1(self, u: VectorField) -> ScalarField:
        """Low-pass piece; output spectrally supported on |xi| <= cutoff."""
        self._check(u)
        hat = np.zeros(self.grid.shape, dtype=np.complex128)
        for i in range(self.grid.dim):
            for k in range(i, self.grid.dim):
                prod = dealias_values(self.grid, u.data[i] * u.data[k])
                weight = 1.0 if i == k else 2.0
                hat += weight * self._p_symbol[i, k] * self.grid.fft(prod)
        return ScalarField.from_hat(self.grid, hat)

    def b2(self, u: VectorField) -> ScalarField:
        """High-pass piece; output spectrally supported on |xi| > cutoff."""
        self._check(u)
        du = jacobian(u)
        acc = np.zeros(self.grid.shape)
        for i in range(self.grid.dim):
            for k in range(self.grid.dim):
                acc += du.data[i, k] * du.data[k, i]
        trace = ScalarField(self.grid, dealias_values(self.grid, acc))
        return inv_laplace_highpass(trace, radius=self.cutoff)

    def b(self, u: VectorField) -> ScalarField:
        return self.b1(u) + self.b2(u)

    def grad_b(self, u: VectorField) -> VectorField:
        return gradient(self.b(u))

    # -- pressure bridge --------------------------------------------------

    def pressure_from(self, u: VectorField, div_tol: float = 1e-6) -> ScalarField:
        """Classical pressure p = -B(u); meaningful for divergence-free u."""
        drift = sobolev_norm(divergence(u), 0.0)
        scale = max(sobolev_norm(u, 1.0), 1.0)
        if drift > div_tol * scale:
            warnings.warn(
                f"pressure_from called with ||div u||_0 = {drift:.3e}; "
                "the pressure identification assumes a divergence-free field",
                stacklevel=2,
            )
        return -1.0 * self.b(u)

    def gradient_residual(self, u: VectorField) -> float:
        """|| grad B(u) - (I - P)(u . grad)u ||_0 for divergence-free u.

        grad B(u) = -grad p = (I - P)(u . grad)u on divergence-free
        fields, so this vanishes (to round-off) exactly when B
        reproduces the pressure gradient of the classical formulation.
        """
        adv = advect(u)
        return sobolev_norm(self.grad_b(u) - (adv - leray_project(adv)), 0.0)

    def _check(self, u: VectorField) -> None:
        if u.grid != self.grid:
            raise ValueError("field does not live on this assembly's grid")
