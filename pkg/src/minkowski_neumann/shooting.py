"""Shooting on the planar system, an independent check on the fixed-point solver.

With v = r^{N-1} phi(u'):

    u' = phi_inv(v / r^{N-1}),     v' = -r^{N-1} f(r, u),

started from (u, v)(0) = (c, 0).  A shot is a Neumann solution when
u'(R) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .curvature import extend_f, phi_inv
from .grid import Grid, grid_for
from .operator import GridProfile

SLOPE_LIMIT = 1.0 - 1e-9


@dataclass
class ShotControls:
    rtol: float = 1e-12
    atol: float = 1e-14
    method: str = "DOP853"
    switch_fraction: float = 1e-3   # series start below r_switch = fraction * R
    slope_limit: float = SLOPE_LIMIT
    max_step: float = np.inf


@dataclass
class ShotResult:
    c: float
    defect: float
    valid: bool
    profile: Optional[GridProfile] = None
    v_end: float = float("nan")
    saturated_at: Optional[float] = None
    max_abs_slope: float = float("nan")
    flux: Optional[np.ndarray] = field(default=None, repr=False)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _series_start(problem, c, r):
    """Taylor start near the centre: u = c - h0 r^2/(2N) - h1 r^3/(3(N+1))."""
    N = problem.N
    h0 = float(extend_f(problem, 0.0, c))
    dr = 1e-6 * problem.R
    h1 = (float(extend_f(problem, dr, c)) - h0) / dr
    u = c - h0 * r ** 2 / (2 * N) - h1 * r ** 3 / (3 * (N + 1))
    v = -h0 * r ** N / N - h1 * r ** (N + 1) / (N + 1)
    return u, v


def _centre_state(problem, c, r, sweeps: int = 2):
    """(u, v) at small r by Picard sweeps of the integral form of the ODE.

    Each sweep evaluates

        w(s) = s int_0^1 x^{N-1} f(s x, u(s x)) dx,
        u(r) = c + r int_0^1 phi_inv(-w(r y)) dy,

    with 16-point Gauss rules, starting from the Taylor polynomial.  Each
    sweep gains a factor O(r^2 |f_u|) in accuracy.
    """
    N = problem.N

    def make_u(prev):
        def u_next(rr):
            rr = np.asarray(rr, dtype=float)
            s = rr[..., None] * _GL_X                       # outer points
            t = s[..., None] * _GL_X                        # inner points
            h = extend_f(problem, t, prev(t))
            w = s * np.sum(_GL_W * _GL_X ** (N - 1) * h, axis=-1)
            return c + rr * np.sum(_GL_W * phi_inv(-w), axis=-1)
        return u_next

    u = lambda rr: _series_start(problem, c, rr)[0]
    for _ in range(sweeps - 1):
        u = make_u(u)
    r = np.asarray(r, dtype=float)
    t = r[..., None] * _GL_X
    h = extend_f(problem, t, u(t))
    v = -r ** N * np.sum(_GL_W * _GL_X ** (N - 1) * h, axis=-1)
    return make_u(u)(r), v


def integrate_shot(problem, c: float, controls: ShotControls | None = None,
                   grid: Optional[Grid] = None, dense: bool = True) -> ShotResult:
    """Integrate from the centre with u(0) = c, u'(0) = 0.

    The integration is restarted at every jump of the weight.  A shot
    whose slope reaches ``slope_limit`` is stopped and marked invalid.
    """
    if c < 0:
        raise ValueError("initial level must be non-negative")
    controls = controls or ShotControls()
    N, R = problem.N, problem.R
    if grid is None and dense:
        grid = grid_for(problem)
    if c == 0.0:
        prof = GridProfile(grid, np.zeros_like(grid.r), np.zeros_like(grid.r)) if dense else None
        return ShotResult(0.0, 0.0, True, prof, 0.0, None, 0.0,
                          np.zeros_like(grid.r) if dense else None)

    def rhs(hi):
        # at the right end of a piece use the left limit of a
        def f(r, y):
            rp = r ** (N - 1)
            side = -1 if r >= hi else 1
            return [phi_inv(y[1] / rp), -rp * extend_f(problem, r, y[0], side)]
        return f

    def slope_event(r, y):
        return controls.slope_limit - abs(phi_inv(y[1] / r ** (N - 1)))
    slope_event.terminal = True

    r0 = controls.switch_fraction * R if N > 1 else 0.0
    bps = problem.weight.breakpoints
    if N > 1 and bps.size and bps[0] <= r0:
        r0 = 0.5 * bps[0]
    y = [float(x) for x in _centre_state(problem, c, r0)] if N > 1 else [c, 0.0]
    edges = [r0, *[b for b in problem.weight.breakpoints if r0 < b < R], R]
    sols = []
    saturated = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(rhs(hi), (lo, hi), y, method=controls.method, rtol=controls.rtol,
                        atol=controls.atol, dense_output=dense, events=slope_event,
                        max_step=controls.max_step)
        sols.append((lo, hi, sol))
        if sol.status == 1:
            saturated = float(sol.t_events[0][0])
            break
        if sol.status < 0:
            saturated = float(sol.t[-1])
            break
        y = sol.y[:, -1]
    v_end = float(y[1])
    defect = float(phi_inv(v_end / R ** (N - 1)))
    valid = saturated is None
    prof = None
    flux = None
    max_slope = float("nan")
    if dense and valid:
        r = grid.r
        U = np.empty_like(r)
        V = np.empty_like(r)
        for lo, hi, sol in sols:
            m = (r >= lo) & (r <= hi)
            Y = sol.sol(r[m])
            U[m], V[m] = Y[0], Y[1]
        inner = r < r0
        if np.any(inner):
            U[inner], V[inner] = _centre_state(problem, c, r[inner])
        du = np.zeros_like(r)
        du[1:] = phi_inv(V[1:] / r[1:] ** (N - 1))
        prof = GridProfile(grid, U, du)
        flux = V
        max_slope = float(np.max(np.abs(du)))
    elif valid:
        max_slope = float(max(np.max(np.abs(phi_inv(s.y[1] / np.maximum(s.t, 1e-300) ** (N - 1))))
                              for _, _, s in sols))
    return ShotResult(float(c), defect, valid, prof, v_end, saturated, max_slope, flux)


def find_roots(problem, c_range, samples: int = 64, controls: ShotControls | None = None,
               grid: Optional[Grid] = None, defect_tol: float = 1e-10) -> list:
    """Scan u'(R) over initial levels and bisect every sign change.

    Scans geometrically spaced levels in ``c_range``; each bracketed
    root is refined with Brent's method and returned as a dense
    ShotResult.  No sign change gives an empty list.
    """
    lo, hi = map(float, c_range)
    if not 0 < lo < hi:
        raise ValueError("c_range must satisfy 0 < lo < hi")
    if samples < 8:
        raise ValueError("samples must be >= 8")
    controls = controls or ShotControls()
    grid = grid if grid is not None else grid_for(problem)
    cs = np.geomspace(lo, hi, samples)
    shots = [integrate_shot(problem, c, controls, dense=False) for c in cs]
    roots = []
    for (c0, s0), (c1, s1) in zip(zip(cs[:-1], shots[:-1]), zip(cs[1:], shots[1:])):
        if not (s0.valid and s1.valid):
            continue
        if s0.defect == 0.0:
            roots.append(c0)
            continue
        if np.sign(s0.defect) == np.sign(s1.defect):
            continue

        def d(c):
            s = integrate_shot(problem, c, controls, dense=False)
            return s.defect if s.valid else np.nan

        try:
            root = brentq(d, c0, c1, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        except ValueError:
            continue
        roots.append(root)
    out = []
    for c in roots:
        s = integrate_shot(problem, c, controls, grid=grid)
        if s.valid and abs(s.defect) <= max(defect_tol, 1e3 * np.finfo(float).eps):
            out.append(s)
        elif s.valid:
            # steep defect: a one-ulp change in c moves u'(R) by more than tol
            s.valid = abs(s.defect) <= 1e-6
            if s.valid:
                out.append(s)
    return out


def oracle_match(problem, profile: GridProfile, window: float = 1e-3,
                 controls: ShotControls | None = None):
    """Shoot from the level u(0) of a computed profile and return
    (oracle ShotResult, sup distance / |u|_inf) on the profile's grid.

    The root is searched in u(0) * (1 -/+ window); (None, inf) when no
    Neumann shot is found there.
    """
    c = float(profile.u[0])
    if not c > 0:
        raise ValueError("profile must have u(0) > 0")
    roots = find_roots(problem, (c * (1 - window), c * (1 + window)), samples=8,
                       controls=controls, grid=profile.grid)
    if not roots:
        return None, float("inf")
    best = min(roots, key=lambda s: abs(s.c - c))
    dist = float(np.max(np.abs(best.profile.u - profile.u))) / profile.sup_norm
    return best, dist
