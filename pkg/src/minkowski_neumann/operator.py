"""Discrete fixed-point operator for the radial Neumann problem.

For theta in [0, 1] and alpha >= 0,

    (T u)(r) = u(0) - R^{1-N} int_0^R z^{N-1} [f(z, u) + alpha v(z)] dz
               + int_0^r phi_inv(-w(z)) dz,

    w(r) = theta r^{1-N} int_0^r x^{N-1} [f(x, u) + alpha v(x)] dx,

and (T u)' = phi_inv(-w) with (T u)'(0) = 0.  Fixed points of T are
exactly the solutions of the Neumann problem for the deformed equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .curvature import extend_f, extend_f_u, phi_inv, phi_inv_prime
from .grid import Grid


@dataclass
class GridProfile:
    grid: Grid
    u: np.ndarray
    du: Optional[np.ndarray] = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != self.grid.r.shape:
            raise ValueError("profile size does not match grid")
        if self.du is not None:
            self.du = np.asarray(self.du, dtype=float)

    @property
    def r(self):
        return self.grid.r

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u)))

    @classmethod
    def constant(cls, grid: Grid, level: float) -> "GridProfile":
        return cls(grid, np.full(grid.r.shape, float(level)))

    def copy(self) -> "GridProfile":
        return GridProfile(self.grid, self.u.copy(), None if self.du is None else self.du.copy())


@dataclass(frozen=True)
class HomotopyState:
    """Deformation parameters: theta scales the flux, alpha the forcing v."""

    theta: float = 1.0
    alpha: float = 0.0
    forcing: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    def forcing_values(self, r, side):
        if self.forcing is None or self.alpha == 0.0:
            return np.zeros_like(r)
        v = np.asarray(self.forcing(r, side) if _takes_side(self.forcing) else self.forcing(r), float)
        return np.broadcast_to(v, np.shape(r)).astype(float)


def _takes_side(fn) -> bool:
    try:
        import inspect
        return len(inspect.signature(fn).parameters) >= 2
    except (TypeError, ValueError):
        return False


PHYSICAL = HomotopyState(1.0, 0.0)


def _source(problem, grid: Grid, u, state: HomotopyState):
    """Extended samples of f(r, u) + alpha v(r)."""
    ue = grid.expand(u)
    h = extend_f(problem, grid.ext_r, ue, grid.ext_side)
    if state.alpha:
        h = h + state.alpha * state.forcing_values(grid.ext_r, grid.ext_side)
    return np.asarray(h, dtype=float)


def _moment_weight(problem, grid: Grid):
    return grid.ext_r ** (problem.N - 1)


def _inv_rpow(problem, grid: Grid):
    out = np.zeros_like(grid.r)
    out[1:] = grid.r[1:] ** (1 - problem.N)
    return out


def moment_integral(problem, profile: GridProfile, state: HomotopyState = PHYSICAL):
    """int_0^r x^{N-1} [f + alpha v] dx at every node."""
    grid = profile.grid
    return grid.cumulative(_moment_weight(problem, grid) * _source(problem, grid, profile.u, state))


def cumulative_flux(problem, profile: GridProfile, state: HomotopyState = PHYSICAL):
    """w(r) = theta r^{1-N} int_0^r x^{N-1} [f + alpha v] dx, with w(0) = 0."""
    Q = moment_integral(problem, profile, state)
    return state.theta * Q * _inv_rpow(problem, profile.grid)


def apply_T(problem, profile: GridProfile, state: HomotopyState = PHYSICAL) -> GridProfile:
    grid = profile.grid
    Q = moment_integral(problem, profile, state)
    w = state.theta * Q * _inv_rpow(problem, grid)
    du = phi_inv(-w)
    du[0] = 0.0
    R = grid.R
    out = profile.u[0] - Q[-1] / R ** (problem.N - 1) + grid.cumulative_nodal(du)
    return GridProfile(grid, out, du)


def residual(problem, profile: GridProfile, state: HomotopyState = PHYSICAL):
    """(u - T u, sup norm)."""
    Tu = apply_T(problem, profile, state)
    res = profile.u - Tu.u
    return GridProfile(profile.grid, res, None), float(np.max(np.abs(res)))


def neumann_defect(problem, profile: GridProfile, state: HomotopyState = PHYSICAL) -> float:
    """R^{1-N} int_0^R r^{N-1} [f(r, u) + alpha v] dr; zero at solutions."""
    Q = moment_integral(problem, profile, state)
    return float(Q[-1] / profile.grid.R ** (problem.N - 1))


class Linearization:
    """Jacobian-vector products of u -> u - T u at a fixed profile."""

    def __init__(self, problem, profile: GridProfile, state: HomotopyState = PHYSICAL):
        grid = profile.grid
        self.grid = grid
        self.problem = problem
        self.state = state
        ue = grid.expand(profile.u)
        self._mw = _moment_weight(problem, grid) * extend_f_u(problem, grid.ext_r, ue, grid.ext_side)
        Q = grid.cumulative(_moment_weight(problem, grid) * _source(problem, grid, profile.u, state))
        self._irp = _inv_rpow(problem, grid)
        w = state.theta * Q * self._irp
        self._dphi = phi_inv_prime(-w)
        self._dphi[0] = 0.0
        self._scale = grid.R ** (problem.N - 1)

    def dT(self, du):
        grid = self.grid
        dQ = grid.cumulative(self._mw * grid.expand(du))
        dslope = -self._dphi * self.state.theta * dQ * self._irp
        return du[0] - dQ[-1] / self._scale + grid.cumulative_nodal(dslope)

    def matvec(self, du):
        du = np.asarray(du, dtype=float).ravel()
        return du - self.dT(du)
