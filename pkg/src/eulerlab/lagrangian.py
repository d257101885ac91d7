"""Lagrangian side: diffeomorphism arithmetic, the geodesic equation and
the exponential map.

A diffeomorphism of the torus is stored through its periodic displacement
g, phi(x) = x + g(x), so Sobolev norms of phi - id are directly those of
g and periodicity is automatic.  The geodesic equation for the flow of an
ideal fluid reads

    d_t (phi, v) = (v, Gamma_phi(v, v)),
    Gamma_phi(v, v) = (grad B(v o phi^{-1})) o phi,

with B the pressure quadratic form; its time-1 solution map u0 -> phi(1)
is the Riemannian exponential map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bform import BAssembly
from .eulerian import BlowUpError, EulerState, Trajectory
from .fields import jacobian
from .interp import DEFAULT_ORDER, Interpolant
from .spectral import (
    Grid,
    MatrixField,
    ScalarField,
    VectorField,
    _check_same_grid,
    sobolev_norm,
)

__all__ = [
    "Diffeo",
    "GeodesicState",
    "GeodesicConfig",
    "GeodesicTrajectory",
    "identity",
    "shift",
    "compose",
    "compose_diffeo",
    "invert",
    "det_jacobian",
    "christoffel",
    "geodesic_step",
    "geodesic_solve",
    "exp_map",
    "flow_of",
    "eulerian_from_lagrangian",
    "vorticity_pullback",
]


@dataclass(frozen=True)
class Diffeo:
    """phi = id + g with periodic displacement g; orientation preserving."""

    displacement: VectorField

    @property
    def grid(self) -> Grid:
        return self.displacement.grid

    def positions(self) -> np.ndarray:
        """phi evaluated on the grid, shape (dim,) + grid.shape (not wrapped)."""
        return np.stack(self.grid.coords()) + self.displacement.data

    def check_orientation(self) -> None:
        det = det_jacobian(self).data
        if np.min(det) <= 0.0:
            raise ValueError(
                f"map is not orientation preserving (min det = {np.min(det):.3e})"
            )


def identity(grid: Grid) -> Diffeo:
    return Diffeo(VectorField.zero(grid))


def shift(grid: Grid, a) -> Diffeo:
    """Rigid translation x -> x + a."""
    a = np.asarray(a, dtype=np.float64).reshape(grid.dim, *([1] * grid.dim))
    return Diffeo(VectorField(grid, np.broadcast_to(a, (grid.dim,) + grid.shape).copy()))


def compose(f, phi: Diffeo, order=DEFAULT_ORDER):
    """Right translation R_phi f = f o phi by periodic interpolation."""
    _check_same_grid(f, phi.displacement)
    vals = Interpolant(f, order=order).at(phi.positions())
    return type(f)(f.grid, vals)


def compose_diffeo(outer: Diffeo, inner: Diffeo, order=DEFAULT_ORDER) -> Diffeo:
    """(outer o inner)(x) = inner(x) + g_outer(inner(x))."""
    g = compose(outer.displacement, inner, order=order)
    return Diffeo(inner.displacement + g)


def invert(phi: Diffeo, order=DEFAULT_ORDER, tol: float = 1e-10,
           max_iter: int = 100, guess: VectorField | None = None) -> Diffeo:
    """Inverse diffeomorphism: psi with phi(psi(x)) = x on the torus.

    The displacement h of psi solves the fixed-point equation
    h(x) = -g(x + h(x)); iterated with damping, with a Newton step using
    the interpolated Jacobian of g when the contraction stalls.
    """
    grid = phi.grid
    g_interp = Interpolant(phi.displacement, order=order)
    x = np.stack(grid.coords())
    h = np.zeros_like(x) if guess is None else guess.data.copy()

    dg_interp = None
    newton = False
    prev_res = np.inf
    for _ in range(max_iter):
        gh = g_interp.at(x + h)
        res = float(np.max(np.abs(h + gh)))
        if res <= tol:
            return Diffeo(VectorField(grid, h))
        if not newton and res >= 0.5 * prev_res:
            # contraction too slow to hit tol in the iteration budget:
            # switch (permanently) to Newton on F(h) = h + g(x + h)
            newton = True
        if newton:
            if dg_interp is None:
                dg_interp = Interpolant(jacobian(phi.displacement), order=order)
            dg = dg_interp.at(x + h)
            jac = np.moveaxis(dg, (0, 1), (-2, -1)) + np.eye(grid.dim)
            f_val = np.moveaxis(h + gh, 0, -1)
            delta = np.linalg.solve(jac, f_val[..., None])[..., 0]
            h = h - np.moveaxis(delta, -1, 0)
        else:
            h = -gh
        prev_res = res
    raise RuntimeError(
        f"diffeomorphism inversion did not reach {tol:.1e} in {max_iter} "
        f"iterations (residual {prev_res:.3e})"
    )


def det_jacobian(phi: Diffeo) -> ScalarField:
    """Pointwise det(d phi) = det(I + dg) with spectral derivatives."""
    grid = phi.grid
    dg = jacobian(phi.displacement).data
    mats = np.moveaxis(dg, (0, 1), (-2, -1)) + np.eye(grid.dim)
    return ScalarField(grid, np.linalg.det(mats))


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicState:
    t: float
    phi: Diffeo
    v: VectorField


@dataclass(frozen=True)
class GeodesicConfig:
    dt: float = 1e-2
    order: object = DEFAULT_ORDER  # 3, 5 or "fourier"
    cutoff: float = 1.0
    inversion_tol: float = 1e-10

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")


@dataclass(frozen=True)
class GeodesicTrajectory:
    states: tuple[GeodesicState, ...]
    speeds: np.ndarray  # L^2 norm of v per state

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> GeodesicState:
        return self.states[-1]


def christoffel(phi: Diffeo, v: VectorField, bb: BAssembly | None = None,
                order=DEFAULT_ORDER, inv_guess: VectorField | None = None,
                tol: float = 1e-10) -> VectorField:
    """Gamma_phi(v, v) = R_phi grad B(v o phi^{-1})."""
    gamma, _ = _christoffel(phi, v, bb=bb, order=order, inv_guess=inv_guess,
                            tol=tol)
    return gamma


def _christoffel(phi, v, bb, order, inv_guess, tol):
    _check_same_grid(v, phi.displacement)
    if bb is None:
        bb = BAssembly(v.grid)
    psi = invert(phi, order=order, tol=tol, guess=inv_guess)
    u = compose(v, psi, order=order)
    return compose(bb.grad_b(u), phi, order=order), psi


def _geodesic_step(state: GeodesicState, dt: float, bb: BAssembly,
                   cfg: GeodesicConfig, inv_guess: VectorField | None):
    g, v = state.phi.displacement, state.v
    kw = dict(bb=bb, order=cfg.order, tol=cfg.inversion_tol)

    k1v, psi = _christoffel(Diffeo(g), v, inv_guess=inv_guess, **kw)
    k1g = v
    k2v, psi = _christoffel(Diffeo(g + 0.5 * dt * k1g), v + 0.5 * dt * k1v,
                            inv_guess=psi.displacement, **kw)
    k2g = v + 0.5 * dt * k1v
    k3v, psi = _christoffel(Diffeo(g + 0.5 * dt * k2g), v + 0.5 * dt * k2v,
                            inv_guess=psi.displacement, **kw)
    k3g = v + 0.5 * dt * k2v
    k4v, psi = _christoffel(Diffeo(g + dt * k3g), v + dt * k3v,
                            inv_guess=psi.displacement, **kw)
    k4g = v + dt * k3v

    g_new = g + (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
    v_new = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    phi_new = Diffeo(g_new)
    phi_new.check_orientation()
    return GeodesicState(state.t + dt, phi_new, v_new), psi.displacement


def geodesic_step(state: GeodesicState, dt: float, bb: BAssembly | None = None,
                  cfg: GeodesicConfig | None = None) -> GeodesicState:
    """One RK4 step of d_t(phi, v) = (v, Gamma_phi(v, v))."""
    if cfg is None:
        cfg = GeodesicConfig(dt=dt)
    if bb is None:
        bb = BAssembly(state.v.grid, cutoff=cfg.cutoff)
    new_state, _ = _geodesic_step(state, dt, bb, cfg, None)
    return new_state


def geodesic_solve(u0: VectorField, T: float,
                   cfg: GeodesicConfig | None = None) -> GeodesicTrajectory:
    """Integrate the geodesic system from (id, u0) up to time T."""
    if cfg is None:
        cfg = GeodesicConfig()
    if not T > 0:
        raise ValueError(f"final time must be positive, got {T}")
    n_steps = int(round(T / cfg.dt))
    if n_steps < 1 or abs(n_steps * cfg.dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"T = {T} is not a multiple of dt = {cfg.dt}")
    bb = BAssembly(u0.grid, cutoff=cfg.cutoff)

    state = GeodesicState(0.0, identity(u0.grid), u0)
    states = [state]
    speeds = [sobolev_norm(u0, 0.0)]
    guess: VectorField | None = None
    for i in range(n_steps):
        state, guess = _geodesic_step(state, cfg.dt, bb, cfg, guess)
        state = GeodesicState((i + 1) * cfg.dt, state.phi, state.v)
        if not np.all(np.isfinite(state.v.data)):
            raise BlowUpError(f"non-finite velocity at t = {state.t}")
        states.append(state)
        speeds.append(sobolev_norm(state.v, 0.0))
    return GeodesicTrajectory(tuple(states), np.array(speeds))


def exp_map(u0: VectorField, t: float, cfg: GeodesicConfig | None = None) -> Diffeo:
    """Exponential map: time-t endpoint of the geodesic issued from (id, u0).

    Satisfies exp_map(t*u0, 1) = exp_map(u0, t) (geodesic rescaling);
    with step counts paired as n(1)/dt and n(t)/(dt*t) the identity even
    holds at round-off because the Runge-Kutta recursion commutes with
    the rescaling of a quadratic-homogeneous right-hand side.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if t == 0 or sobolev_norm(u0, 0.0) == 0.0:
        return identity(u0.grid)
    return geodesic_solve(u0, t, cfg=cfg).final.phi


def flow_of(traj: Trajectory, order=DEFAULT_ORDER) -> list[tuple[float, Diffeo]]:
    """Flow map of a solved Eulerian trajectory: d_t phi = u(t) o phi.

    Integrates with RK4 using a flow step of two solver steps so every
    Runge-Kutta stage lands on a stored state (no interpolation in time).
    Returns (t, phi(t)) at t = 0, 2 dt, 4 dt, ...; the trajectory must
    contain an even number of steps.
    """
    n = len(traj.states) - 1
    if n % 2 != 0:
        raise ValueError("flow_of needs an even number of solver steps")
    grid = traj.states[0].u.grid
    h = 2.0 * (traj.states[1].t - traj.states[0].t)

    out = [(0.0, identity(grid))]
    g = VectorField.zero(grid)
    x = np.stack(grid.coords())
    for i in range(0, n, 2):
        ua = Interpolant(traj.states[i].u, order=order)
        um = Interpolant(traj.states[i + 1].u, order=order)
        ub = Interpolant(traj.states[i + 2].u, order=order)
        k1 = ua.at(x + g.data)
        k2 = um.at(x + g.data + 0.5 * h * k1)
        k3 = um.at(x + g.data + 0.5 * h * k2)
        k4 = ub.at(x + g.data + h * k3)
        g = VectorField(grid, g.data + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
        out.append((traj.states[i + 2].t, Diffeo(g)))
    return out


def eulerian_from_lagrangian(traj: GeodesicTrajectory,
                             order=DEFAULT_ORDER) -> list[EulerState]:
    """Recover u(t) = v(t) o phi(t)^{-1} along a geodesic trajectory."""
    out = []
    guess: VectorField | None = None
    for st in traj.states:
        psi = invert(st.phi, order=order, guess=guess)
        guess = psi.displacement
        out.append(EulerState(st.t, compose(st.v, psi, order=order)))
    return out


def vorticity_pullback(phi: Diffeo, omega: MatrixField,
                       order=DEFAULT_ORDER) -> MatrixField:
    """Congruence transport d(phi)^T (Omega o phi) d(phi).

    Along a solved flow this is constant in time (vorticity conservation):
    pulling back Omega(t) with phi(t) recovers Omega(0).
    """
    _check_same_grid(omega, phi.displacement)
    grid = phi.grid
    om_phi = Interpolant(omega, order=order).at(phi.positions())
    dphi = jacobian(phi.displacement).data + np.eye(grid.dim).reshape(
        (grid.dim, grid.dim) + (1,) * grid.dim
    )
    pulled = np.einsum("ji...,jk...,kl...->il...", dphi, om_phi, dphi)
    return MatrixField(grid, pulled)
