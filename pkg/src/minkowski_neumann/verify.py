"""Solver-independent certification of candidate solution profiles.

A profile (r, u, u') is checked against the integrated form of the
equation,

    phi(u'(r)) + r^{1-N} int_0^r x^{N-1} lam a(x) g(u(x)) dx = 0,

on a grid with every cell halved (u is carried to the midpoints by cubic
Hermite interpolation), against the Neumann conditions, the slope bound,
positivity, and the flux identity int_0^R r^{N-1} lam a g(u) dr = 0.
Qualitative properties of solutions (flux monotonicity, the trimmed-
interval slope bound) are recorded alongside.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .curvature import extend_f, phi, phi_inv
from .grid import Grid
from .operator import GridProfile


@dataclass
class Tolerances:
    ode_rel: float = 1e-6          # times 1 + lam |a|_inf max g(u)
    boundary: float = 1e-8
    slope_limit: float = 1.0 - 1e-9
    integral_rel: float = 1e-8     # times 1 + lam int r^{N-1} |a| g(u)
    consistency_rel: float = 1e-8  # u - u(0) - int u', times 1 + |u|_inf
    claim_slack: float = 1e-9
    trivial: float = 1e-9


@dataclass
class Certificate:
    ode_residual_sup: float
    ode_tolerance: float
    neumann_defect_0: float
    neumann_defect_R: float
    min_u: float
    max_abs_slope: float
    integral_identity: float
    integral_tolerance: float
    consistency: float
    sup_norm: float
    trivial: bool
    claims: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    overall: bool = False

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "Certificate":
        return cls(**json.loads(Path(path).read_text()))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def refined_moments(problem, profile: GridProfile):
    """Cumulative moments int_0^r x^{N-1} f(x, u) dx on the halved grid.

    Returns (fine grid, fine u, moments at fine nodes, moments of
    x^{N-1} |f| at fine nodes).
    """
    grid = profile.grid
    fine = grid.refined()
    spline = CubicHermiteSpline(grid.r, profile.u, profile.du)
    uf = spline(fine.r)
    uf[0::2] = profile.u
    ue = fine.expand(uf)
    f = extend_f(problem, fine.ext_r, ue, fine.ext_side)
    wgt = fine.ext_r ** (problem.N - 1)
    return fine, uf, fine.cumulative(wgt * f), fine.cumulative(wgt * np.abs(f))


def flux(problem, profile: GridProfile):
    """r^{N-1} phi(u') at the nodes; raises SlopeSaturation if |u'| >= 1."""
    return profile.r ** (problem.N - 1) * phi(profile.du)


def certify(problem, profile: GridProfile, tolerances: Tolerances | None = None,
            bundle=None, structure=None) -> Certificate:
    """Check a profile with u and du populated.  Never raises on failure.

    ``bundle`` (a ConstantsBundle) enables the trimmed-interval checks;
    ``structure`` (a SignStructure) the flux monotonicity check, and is
    taken from the bundle's intervals when omitted.
    """
    if profile.du is None:
        raise ValueError("certify needs a profile with du")
    tol = tolerances or Tolerances()
    N, R, lam = problem.N, problem.R, problem.lam
    r, u, du = profile.r, profile.u, profile.du
    grid = profile.grid

    sup = profile.sup_norm
    max_slope = float(np.max(np.abs(du)))
    saturated = not max_slope < 1.0

    fine, uf, Qf, Qabs = refined_moments(problem, profile)
    Q = Qf[0::2]
    w = np.zeros_like(r)
    w[1:] = Q[1:] / r[1:] ** (N - 1)
    gmax = float(np.max(problem.g(np.maximum(u, 0.0)))) if u.size else 0.0
    a_inf = float(np.max(np.abs(problem.a(fine.r))))
    ode_tol = tol.ode_rel * (1.0 + lam * a_inf * gmax)
    if saturated:
        ode_res = float("inf")
    else:
        ode_res = float(np.max(np.abs(phi(du) + w)))

    integral = float(Q[-1])
    int_tol = tol.integral_rel * (1.0 + float(Qabs[-1]))
    # the slopes must integrate back to u
    cons = float(np.max(np.abs(u - u[0] - grid.cumulative_nodal(du))))

    trivial = sup <= tol.trivial
    min_u = float(np.min(u))
    checks = {
        "ode_residual": ode_res <= ode_tol,
        "neumann_0": abs(du[0]) <= tol.boundary,
        "neumann_R": abs(du[-1]) <= tol.boundary,
        "slope": max_slope <= tol.slope_limit,
        "integral_identity": abs(integral) <= int_tol,
        "consistency": cons <= tol.consistency_rel * (1.0 + sup),
        "positivity": trivial or min_u > 0.0,
    }
    claims = {}
    if structure is None and bundle is not None:
        structure = [tuple(iv) for iv in bundle.intervals]
    elif structure is not None:
        structure = list(structure.intervals)
    if structure is not None and not saturated and min_u >= 0.0:
        claims["flux_monotone"] = _flux_monotone(problem, profile, structure, tol.claim_slack)
    if bundle is not None and min_u >= 0.0:
        claims.update(_trimmed_claims(profile, bundle, N, tol.claim_slack))
    for key in ("flux_monotone", "slope_bound", "slope_half"):
        if claims.get(key) is not None:
            checks[key] = claims[key]
    overall = bool(all(checks.values()))
    return Certificate(
        ode_residual_sup=ode_res, ode_tolerance=ode_tol,
        neumann_defect_0=float(du[0]), neumann_defect_R=float(du[-1]),
        min_u=min_u, max_abs_slope=max_slope,
        integral_identity=integral, integral_tolerance=int_tol,
        consistency=cons, sup_norm=sup, trivial=bool(trivial),
        claims=claims, checks={k: bool(v) for k, v in checks.items()}, overall=overall,
    )


def _flux_monotone(problem, profile, intervals, slack) -> bool:
    """r^{N-1} phi(u') non-increasing on the positivity intervals and
    non-decreasing on the gaps between them."""
    r = profile.r
    v = flux(problem, profile)
    scale = 1.0 + float(np.max(np.abs(v)))
    inside = np.zeros(r.size - 1, dtype=bool)
    for s, t in intervals:
        inside |= (r[:-1] >= s) & (r[1:] <= t)
    dv = np.diff(v)
    # cells straddling an interval end belong to neither side
    edge = np.zeros_like(inside)
    for s, t in intervals:
        for x in (s, t):
            edge |= (r[:-1] < x) & (r[1:] > x)
    ok_in = np.all(dv[inside] <= slack * scale)
    ok_out = np.all(dv[~inside & ~edge] >= -slack * scale)
    return bool(ok_in and ok_out)


def _trimmed_claims(profile, bundle, N, slack) -> dict:
    """|u'| <= tau^{N-1} / (2 eps)^N * u on each trimmed interval, the
    |u'| <= 1/2 consequence when |u|_inf <= delta*, and the lower bound
    min u >= delta_low when |u|_inf is within 10% of delta*."""
    r, u, du = profile.r, profile.u, profile.du
    eps = bundle.epsilon
    sup = profile.sup_norm
    bound_ok, half_ok, low_ok = True, True, True
    for s, t in bundle.intervals:
        m = (r >= s + 2 * eps) & (r <= t - 2 * eps)
        if not np.any(m):
            continue
        k = t ** (N - 1) / (2 * eps) ** N
        bound_ok &= bool(np.all(np.abs(du[m]) <= k * u[m] * (1 + slack) + slack))
        half_ok &= bool(np.all(np.abs(du[m]) <= 0.5 + slack))
        low_ok &= bool(np.min(u[m]) >= bundle.delta_low * (1 - slack))
    out = {"slope_bound": bound_ok}
    out["slope_half"] = half_ok if sup <= bundle.delta_star else None
    near = 0.9 * bundle.delta_star <= sup <= 1.1 * bundle.delta_star
    out["lower_level"] = low_ok if near else None
    return out


# ----------------------------------------------------------------------
# profile CSV
# ----------------------------------------------------------------------

def write_profile_csv(profile: GridProfile, path) -> None:
    """Columns r, u, du with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "u", "du"])
        for row in zip(profile.r, profile.u, profile.du):
            w.writerow([f"{x:.17g}" for x in row])


def read_profile_csv(path, breakpoints=()) -> GridProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected columns r, u, du")
    grid = Grid(data[:, 0], breakpoints)
    return GridProfile(grid, data[:, 1], data[:, 2])
