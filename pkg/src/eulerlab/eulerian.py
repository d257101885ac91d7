"""Time integration of the pressure-free Euler equation in Eulerian form.

The evolution is  d_t u = grad B(u) - (u . grad) u  with B from
:mod:`eulerlab.bform`; for divergence-free data this coincides with the
incompressible Euler equation and the divergence stays zero along the
flow, which the solver instruments per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bform import BAssembly
from .fields import advect, divergence
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    chi_cutoff,
    dealias_values,
    partial_derivative,
    sobolev_norm,
)

__all__ = [
    "BlowUpError",
    "EulerState",
    "StepperConfig",
    "Trajectory",
    "rhs",
    "step",
    "solve",
    "div_evolution_residual",
    "energy",
]


class BlowUpError(RuntimeError):
    """Raised when the solution leaves the smooth regime (NaN or norm blow-up)."""


@dataclass(frozen=True)
class EulerState:
    t: float
    u: VectorField


@dataclass(frozen=True)
class StepperConfig:
    dt: float = 1e-3
    method: str = "rk4"  # "rk4" or "rk2"
    s_monitor: float = 3.0
    drift_budget: float = 1e-6
    cutoff: float = 1.0
    norm_growth_limit: float = 1e6

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.method not in ("rk4", "rk2"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class Trajectory:
    """Solver output: states at t = 0, dt, ..., T plus per-step diagnostics."""

    states: tuple[EulerState, ...]
    energies: np.ndarray
    norms: np.ndarray
    div_drifts: np.ndarray
    drift_budget_exceeded: bool

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> EulerState:
        return self.states[-1]

    def sample(self, t: float, tol: float = 1e-9) -> EulerState:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.states[idx].t - t) > tol:
            raise KeyError(f"no stored state at t = {t}")
        return self.states[idx]


def rhs(u: VectorField, bb: BAssembly | None = None) -> VectorField:
    """grad B(u) - (u . grad) u."""
    if bb is None:
        bb = BAssembly(u.grid)
    return bb.grad_b(u) - advect(u)


def _rk_step(u: VectorField, dt: float, bb: BAssembly, method: str) -> VectorField:
    if method == "rk2":
        k1 = rhs(u, bb)
        k2 = rhs(u + 0.5 * dt * k1, bb)
        return u + dt * k2
    k1 = rhs(u, bb)
    k2 = rhs(u + 0.5 * dt * k1, bb)
    k3 = rhs(u + 0.5 * dt * k2, bb)
    k4 = rhs(u + dt * k3, bb)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state: EulerState, cfg: StepperConfig,
         bb: BAssembly | None = None) -> EulerState:
    """One explicit Runge-Kutta step; aborts on non-finite samples."""
    if bb is None:
        bb = BAssembly(state.u.grid, cutoff=cfg.cutoff)
    try:
        u_next = _rk_step(state.u, cfg.dt, bb, cfg.method)
    except ValueError as exc:  # non-finite samples rejected by field ctor
        raise BlowUpError(f"non-finite state at t = {state.t + cfg.dt}") from exc
    return EulerState(state.t + cfg.dt, u_next)


def solve(u0: VectorField, T: float, cfg: StepperConfig | None = None) -> Trajectory:
    """Integrate from u0 to time T, recording energy / H^s norm / div drift.

    The step count is round(T / dt); T must be an integer multiple of dt
    up to round-off, so stored states land exactly on the sample times.
    """
    if cfg is None:
        cfg = StepperConfig()
    if not T > 0:
        raise ValueError(f"final time must be positive, got {T}")
    n_steps = int(round(T / cfg.dt))
    if n_steps < 1 or abs(n_steps * cfg.dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"T = {T} is not a multiple of dt = {cfg.dt}")

    bb = BAssembly(u0.grid, cutoff=cfg.cutoff)
    norm0 = max(sobolev_norm(u0, cfg.s_monitor), 1e-300)
    states = [EulerState(0.0, u0)]
    energies = [energy(u0)]
    norms = [norm0]
    drifts = [sobolev_norm(divergence(u0), cfg.s_monitor - 1.0)]
    exceeded = drifts[0] > cfg.drift_budget * norm0

    state = states[0]
    for i in range(n_steps):
        state = step(state, cfg, bb)
        # keep stored times exact multiples of dt (no accumulation error)
        state = EulerState((i + 1) * cfg.dt, state.u)
        nrm = sobolev_norm(state.u, cfg.s_monitor)
        if not np.isfinite(nrm) or nrm > cfg.norm_growth_limit * norm0:
            raise BlowUpError(
                f"H^{cfg.s_monitor} norm grew to {nrm:.3e} at t = {state.t}"
            )
        drift = sobolev_norm(divergence(state.u), cfg.s_monitor - 1.0)
        exceeded = exceeded or drift > cfg.drift_budget * norm0
        states.append(state)
        energies.append(energy(state.u))
        norms.append(nrm)
        drifts.append(drift)

    return Trajectory(tuple(states), np.array(energies), np.array(norms),
                      np.array(drifts), exceeded)


def div_evolution_residual(u: VectorField, cutoff: float = 1.0) -> ScalarField:
    """Instantaneous drift of div u along the evolution:

        chi(D)(2 (u . grad) div u + (div u)^2) - (u . grad) div u.

    Identically zero on divergence-free fields, since every term carries
    a factor of div u.
    """
    grid = u.grid
    d = divergence(u)
    adv = np.zeros(grid.shape)
    for k in range(grid.dim):
        adv += u.data[k] * partial_derivative(d, k).data
    adv = dealias_values(grid, adv)
    sq = dealias_values(grid, d.data * d.data)
    low = chi_cutoff(ScalarField(grid, 2.0 * adv + sq), radius=cutoff)
    return ScalarField(grid, low.data - adv)


def energy(u: VectorField) -> float:
    """Squared L^2 norm sum_k |u_hat_k|^2 (Parseval, grid-size normalized)."""
    return float(np.sum(np.abs(u.hat) ** 2))
