"""Fixed-point solves, homotopy paths, multi-start search and lambda sweeps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .grid import Grid, graded_grid, grid_for
from .operator import PHYSICAL, GridProfile, HomotopyState, Linearization, apply_T

log = logging.getLogger(__name__)


@dataclass
class SolveOptions:
    """Knobs for a single fixed-point solve.

    method ``"newton"`` runs Newton-GMRES on u - T u with backtracking;
    ``"picard"`` runs damped Picard u <- (1-damping) u + damping T u with
    Anderson mixing over the last ``acceleration_depth`` residuals.
    """

    tol: float = 1e-11
    max_iter: int = 60
    damping: float = 1.0
    acceleration_depth: int = 8
    method: str = "newton"
    grid_size: int = 2000
    gmres_rtol: float = 1e-12
    trivial_tol: float = 1e-9
    start_profile: object = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.acceleration_depth < 0:
            raise ValueError("acceleration_depth must be >= 0")
        if self.method not in ("newton", "picard"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    final_residual: float
    sup_norm: float
    classification: str = "unclassified"
    min_u: float = float("nan")
    max_abs_slope: float = float("nan")
    message: str = ""
    history: list = field(default_factory=list, repr=False)


def _start_profile(problem, start, options, grid: Optional[Grid]):
    if isinstance(start, GridProfile):
        return start.copy()
    g = grid if grid is not None else grid_for(problem, options.grid_size)
    return GridProfile.constant(g, float(start))


def solve(problem, state: HomotopyState = PHYSICAL, options: SolveOptions | None = None,
          start=None, grid: Optional[Grid] = None, bundle=None):
    """Find a fixed point of T starting from ``start``.

    ``start`` is a GridProfile or a constant level (default
    ``options.start_profile``, else 0).  Non-convergence is reported, not
    raised; the best iterate is returned in that case.  With ``bundle``
    the report is classified against its delta* bracket.
    """
    options = options or SolveOptions()
    if start is None:
        start = options.start_profile if options.start_profile is not None else 0.0
    prof = _start_profile(problem, start, options, grid)
    if options.method == "newton":
        u, hist, ok, msg = _newton(problem, state, prof, options)
    else:
        u, hist, ok, msg = _anderson(problem, state, prof, options)
    Tu = apply_T(problem, GridProfile(prof.grid, u), state)
    res = float(np.max(np.abs(u - Tu.u)))
    # keep the iterate itself: T u amplifies its residual by |dT| (large
    # for steep profiles); the slope of a fixed point is the one from T
    out = GridProfile(prof.grid, u, Tu.du)
    report = SolveReport(
        converged=bool(ok and res <= max(options.tol, 1e2 * np.finfo(float).eps * (1 + out.sup_norm))),
        iterations=len(hist) - 1,
        final_residual=res,
        sup_norm=out.sup_norm,
        min_u=float(out.u.min()),
        max_abs_slope=float(np.max(np.abs(out.du))),
        message=msg,
        history=hist,
    )
    if report.converged and state.alpha == 0.0 and _collapsed(out):
        # Newton creeps into u = 0 only linearly along the constant mode;
        # a small flat iterate is the trivial solution, which is exact
        out = GridProfile(prof.grid, np.zeros_like(out.u), np.zeros_like(out.u))
        report.final_residual = 0.0
        report.sup_norm = report.min_u = report.max_abs_slope = 0.0
    report.classification = classify(report.sup_norm, bundle, options)
    return out, report


def _collapsed(profile: GridProfile, level: float = 1e-4) -> bool:
    # no nonzero constant solves the problem when the weighted mean is nonzero
    n = profile.sup_norm
    return n <= level and np.ptp(profile.u) <= 1e-6 * n


def classify(sup_norm: float, bundle=None, options: SolveOptions | None = None,
             bracket_gap: float | None = None) -> str:
    """trivial / small / middle-excluded / large against delta*.

    Without a bundle a nonzero solution is labelled ``"nontrivial"``.
    """
    options = options or SolveOptions()
    if sup_norm <= options.trivial_tol:
        return "trivial"
    if bundle is None:
        return "nontrivial"
    ds = bundle.delta_star
    gap = 1e-3 * ds if bracket_gap is None else bracket_gap
    if abs(sup_norm - ds) <= gap:
        return "middle-excluded"
    return "small" if sup_norm < ds else "large"


def _newton(problem, state, prof, options):
    grid = prof.grid
    u = prof.u.copy()

    def F(v):
        return v - apply_T(problem, GridProfile(grid, v), state).u

    r = F(u)
    hist = [float(np.max(np.abs(r)))]
    n = u.size
    for it in range(options.max_iter):
        if hist[-1] <= options.tol:
            return u, hist, True, "converged"
        lin = Linearization(problem, GridProfile(grid, u), state)
        A = LinearOperator((n, n), matvec=lin.matvec, dtype=float)
        step, info = gmres(A, -r, rtol=options.gmres_rtol, atol=0.0, restart=min(n, 200), maxiter=5)
        if not np.all(np.isfinite(step)):
            return u, hist, False, "linear solve failed"
        # backtracking on the sup norm of the residual
        t = options.damping
        accepted = False
        while t >= 1e-4:
            trial = u + t * step
            rt = F(trial)
            nt = float(np.max(np.abs(rt)))
            if np.isfinite(nt) and nt < (1 - 1e-4 * t) * hist[-1]:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # accept a small step anyway once, then give up if it stalls
            return u, hist, False, "line search stalled"
        u, r = trial, rt
        hist.append(nt)
    return u, hist, hist[-1] <= options.tol, "max_iter reached" if hist[-1] > options.tol else "converged"


def _anderson(problem, state, prof, options):
    grid = prof.grid
    u = prof.u.copy()
    beta = options.damping
    m = options.acceleration_depth
    G_hist, F_hist = [], []
    hist = []
    best = (np.inf, u)
    for it in range(options.max_iter + 1):
        Tu = apply_T(problem, GridProfile(grid, u), state).u
        f = Tu - u
        nf = float(np.max(np.abs(f)))
        hist.append(nf)
        if nf < best[0]:
            best = (nf, u.copy())
        if nf <= options.tol:
            return u, hist, True, "converged"
        if not np.isfinite(nf):
            break
        if it == options.max_iter:
            break
        G_hist.append(Tu)
        F_hist.append(f)
        if len(F_hist) > m + 1:
            G_hist.pop(0)
            F_hist.pop(0)
        if m == 0 or len(F_hist) == 1:
            u = (1 - beta) * u + beta * Tu
            continue
        dF = np.diff(np.array(F_hist), axis=0).T
        dG = np.diff(np.array(G_hist), axis=0).T
        gamma, *_ = np.linalg.lstsq(dF, f, rcond=None)
        u_new = Tu - dG @ gamma
        f_bar = f - dF @ gamma
        u = u_new - (1 - beta) * f_bar
    # oscillation or divergence: hand back the best iterate seen
    return best[1], hist, False, "no convergence; best iterate returned"


def regrid(problem, profile: GridProfile, M: int | None = None, layer_share: float = 0.6,
           growth: float = 0.2) -> GridProfile:
    """Move nodes toward the layers where u' turns, keeping jump points.

    The node density is 1 + alpha |u''| with alpha chosen so that about
    ``layer_share`` of the nodes go where u'' is large.  u is carried
    over by cubic Hermite interpolation using the stored slopes.
    Neighbouring cells differ in width by at most a factor 1 + growth.
    """
    from scipy.interpolate import CubicHermiteSpline

    grid = profile.grid
    M = M or grid.M
    r, du = grid.r, profile.du
    d2 = np.abs(np.gradient(du, r))
    tv = float(np.trapezoid(d2, r))
    alpha = 0.0 if tv == 0 else layer_share / (1 - layer_share) * grid.R / tv
    rho = _limit_growth(r, 1.0 + alpha * d2, M, growth)
    new = graded_grid(grid.R, M, r, rho, grid.breakpoints)
    spline = CubicHermiteSpline(r, profile.u, du)
    return GridProfile(new, spline(new.r))


def _limit_growth(r, rho, M, growth, rounds=3):
    """Raise rho so that the equidistributed cell width h = mass/rho
    changes by at most 1 + growth per cell."""
    rho = rho.copy()
    dr = np.diff(r)
    for _ in range(rounds):
        cell = np.trapezoid(rho, r) / M
        for i in range(1, rho.size):
            rho[i] = max(rho[i], rho[i - 1] / (1 + growth * rho[i - 1] * dr[i - 1] / cell))
        for i in range(rho.size - 2, -1, -1):
            rho[i] = max(rho[i], rho[i + 1] / (1 + growth * rho[i + 1] * dr[i] / cell))
    return rho


def solve_adaptive(problem, state: HomotopyState = PHYSICAL, options: SolveOptions | None = None,
                   start=None, grid: Optional[Grid] = None, sweeps: int = 6, rel_change: float = 1e-9):
    """solve() followed by regrid/re-solve sweeps until u(0) settles."""
    options = options or SolveOptions()
    prof, rep = solve(problem, state, options, start, grid)
    if rep.classification == "trivial":
        return prof, rep
    if not rep.converged and rep.final_residual > 1e-4:
        return prof, rep
    for _ in range(sweeps):
        moved = regrid(problem, prof, options.grid_size)
        new, new_rep = solve(problem, state, options, moved)
        if not new_rep.converged and new_rep.final_residual > 10 * max(rep.final_residual, options.tol):
            break
        change = abs(new.u[0] - prof.u[0]) / max(1.0, abs(prof.u[0]))
        prof, rep = new, new_rep
        if change <= rel_change:
            break
    return prof, rep


# ----------------------------------------------------------------------
# homotopy paths
# ----------------------------------------------------------------------

class HomotopyError(RuntimeError):
    """The first solve of a homotopy path did not converge."""


def homotopy_path(problem, from_state: HomotopyState, to_state: HomotopyState, steps: int,
                  options: SolveOptions | None = None, start=None):
    """Warm-started solves along the straight path between two states.

    Returns a list of (state, profile, report), stopping at the first
    solve that fails to converge (which is kept as the last entry).  The
    forcing of ``to_state`` (else ``from_state``) is used throughout.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    options = options or SolveOptions()
    forcing = to_state.forcing if to_state.forcing is not None else from_state.forcing
    if (from_state.theta, from_state.alpha) == (to_state.theta, to_state.alpha):
        ts = [0.0]
    else:
        ts = np.linspace(0.0, 1.0, steps + 1)
    out = []
    prof = start
    for k, t in enumerate(ts):
        st = HomotopyState(
            theta=float((1 - t) * from_state.theta + t * to_state.theta),
            alpha=float((1 - t) * from_state.alpha + t * to_state.alpha),
            forcing=forcing,
        )
        prof, rep = solve(problem, st, options, prof)
        out.append((st, prof, rep))
        if not rep.converged:
            if k == 0:
                raise HomotopyError(f"no convergence at the starting state {st}: {rep.message}")
            break
    return out


# ----------------------------------------------------------------------
# multi-start search
# ----------------------------------------------------------------------

class MultiplicityNotFound(RuntimeError):
    """Fewer than two certified nontrivial solutions were found."""

    def __init__(self, report):
        super().__init__(report.message)
        self.report = report


@dataclass
class Attempt:
    label: str
    level: float
    converged: bool
    sup_norm: float
    classification: str
    certified: bool = False


@dataclass
class Found:
    profile: GridProfile
    report: SolveReport
    certificate: object
    label: str


@dataclass
class SearchReport:
    solutions: list
    attempts: list
    bracketed: bool = False
    message: str = ""

    @property
    def norms(self):
        return [s.report.sup_norm for s in self.solutions]


def sup_distance(p: GridProfile, q: GridProfile) -> float:
    """Sup distance between two profiles, on the union of their nodes."""
    if p.grid.r.shape == q.grid.r.shape and np.array_equal(p.grid.r, q.grid.r):
        return float(np.max(np.abs(p.u - q.u)))
    from scipy.interpolate import CubicHermiteSpline
    r = np.union1d(p.r, q.r)
    up = CubicHermiteSpline(p.r, p.u, p.du)(r) if p.du is not None else np.interp(r, p.r, p.u)
    uq = CubicHermiteSpline(q.r, q.u, q.du)(r) if q.du is not None else np.interp(r, q.r, q.u)
    return float(np.max(np.abs(up - uq)))


def _distinct_tol(options: SolveOptions, norm: float) -> float:
    # solves on different (graded) grids differ by the discretisation error
    return max(10 * options.tol, 1e-6 * (1.0 + norm))


def _polish(problem, prof, rep, options, bundle, structure):
    from .verify import certify
    cert = certify(problem, prof, bundle=bundle, structure=structure)
    if cert.overall:
        return prof, rep, cert
    prof2, rep2 = solve_adaptive(problem, PHYSICAL, options, prof)
    if rep2.converged and rep2.classification != "trivial":
        cert2 = certify(problem, prof2, bundle=bundle, structure=structure)
        if cert2.overall or not rep.converged:
            return prof2, rep2, cert2
    return prof, rep, cert


def start_schedule(bundle, problem, ladder_ratio: float = np.sqrt(2.0), ceiling: float | None = None):
    """Constant start levels: the small-branch levels, a geometric ladder
    across (d*, delta*), and the large-branch ladder 2 delta* q^k up to
    the ceiling (D* when known)."""
    ds = bundle.delta_star
    d = bundle.d_star if bundle.d_star else 1e-3 * ds
    top = ceiling or bundle.D_star or default_ceiling(bundle, problem)
    small = [1.5 * d, 0.5 * (d + ds), 0.9 * ds]
    lad = []
    x = 1.5 * d * ladder_ratio
    while x < 0.9 * ds:
        lad.append(x)
        x *= ladder_ratio
    large = []
    x = 2 * ds
    while x <= top:
        large.append(x)
        x *= ladder_ratio
    levels = [("small", c) for c in small] + [("bracket", c) for c in lad] + [("large", c) for c in large]
    return levels


def default_ceiling(bundle, problem) -> float:
    return max(64 * bundle.delta_star, 4 * problem.R)


class Collector:
    """Runs solves from given starts and keeps the distinct certified
    nontrivial solutions, recording every attempt."""

    def __init__(self, problem, bundle=None, options: SolveOptions | None = None, structure=None):
        self.problem = problem
        self.bundle = bundle
        self.options = options or SolveOptions()
        self.structure = structure
        self.grid = grid_for(problem, self.options.grid_size)
        self.attempts, self.solutions = [], []

    def _match(self, prof, norm):
        for s in self.solutions:
            if sup_distance(s.profile, prof) <= _distinct_tol(self.options, norm):
                return s
        return None

    def consider(self, label, level, start):
        problem, bundle, options = self.problem, self.bundle, self.options
        prof, rep = solve(problem, PHYSICAL, options, start, self.grid, bundle)
        att = Attempt(label, float(level), rep.converged, rep.sup_norm, rep.classification)
        self.attempts.append(att)
        if not rep.converged and rep.final_residual > 1e-6:
            return None
        if rep.classification == "trivial" or rep.min_u <= 0:
            return None
        hit = self._match(prof, rep.sup_norm)
        if hit is not None:
            att.certified = bool(hit.certificate.overall)
            return hit
        prof, rep, cert = _polish(problem, prof, rep, options, bundle, self.structure)
        rep.classification = classify(rep.sup_norm, bundle, options)
        att.certified = bool(cert.overall)
        if not (rep.converged and cert.overall):
            return None
        hit = self._match(prof, rep.sup_norm)
        if hit is not None:
            return hit
        found = Found(prof, rep, cert, label)
        self.solutions.append(found)
        return found

    def report(self) -> SearchReport:
        sols = sorted(self.solutions, key=lambda s: s.report.sup_norm)
        rep = SearchReport(sols, list(self.attempts))
        if len(sols) >= 2 and self.bundle is not None:
            ds = self.bundle.delta_star
            rep.bracketed = bool(sols[0].report.sup_norm < ds < sols[-1].report.sup_norm)
        return rep


def search_solutions(problem, bundle, options: SolveOptions | None = None, extra_starts=(),
                     continuation: bool = True, ladder_ratio: float = np.sqrt(2.0),
                     ceiling: float | None = None, structure=None) -> SearchReport:
    """All distinct certified nontrivial solutions reachable from the
    start schedule, warm starts in ``extra_starts`` and (optionally) a
    continuation in lambda from 2 lambda downward."""
    col = Collector(problem, bundle, options, structure)
    for k, st in enumerate(extra_starts):
        col.consider(f"warm{k}", float(np.max(st.u)) if isinstance(st, GridProfile) else float(st), st)
    schedule = start_schedule(bundle, problem, ladder_ratio, ceiling)
    for label, c in schedule:
        col.consider(label, c, c)
    if continuation:
        for prof in _continuation_starts(problem, bundle, col.options, col.grid, schedule):
            col.consider("continuation", prof.sup_norm, prof)
    return col.report()


def _continuation_starts(problem, bundle, options, grid, schedule, factor=2.0, steps=8):
    """Large-branch solutions at factor * lambda continued down to lambda."""
    high = problem.with_lambda(factor * problem.lam)
    seeds = []
    for label, c in schedule:
        if label != "large":
            continue
        prof, rep = solve(high, PHYSICAL, options, c, grid)
        if rep.converged and rep.classification != "trivial" and rep.min_u > 0:
            if all(sup_distance(s, prof) > _distinct_tol(options, rep.sup_norm) for s in seeds):
                seeds.append(prof)
    out = []
    lams = np.geomspace(factor * problem.lam, problem.lam, steps + 1)[1:-1]
    for prof in seeds:
        ok = True
        for lam in lams:
            prof, rep = solve(problem.with_lambda(lam), PHYSICAL, options, prof)
            if not rep.converged or rep.classification == "trivial":
                ok = False
                break
        if ok:
            out.append(prof)
    return out


def find_two_solutions(problem, constants, options: SolveOptions | None = None, **search_kw):
    """Two certified positive solutions of smallest and largest norm.

    Returns (u_s, u_l, report).  Raises MultiplicityNotFound, carrying the
    SearchReport with every attempt, when fewer than two are found.
    """
    rep = search_solutions(problem, constants, options, **search_kw)
    n = len(rep.solutions)
    if n < 2:
        rep.message = (f"multiplicity not found: {n} certified nontrivial solution(s) "
                       f"after {len(rep.attempts)} attempts at lambda={problem.lam:g}"
                       f" (lambda*={constants.lambda_star:g})")
        raise MultiplicityNotFound(rep)
    rep.message = f"{n} certified nontrivial solutions; extremal pair returned"
    return rep.solutions[0].profile, rep.solutions[-1].profile, rep


# ----------------------------------------------------------------------
# lambda sweeps
# ----------------------------------------------------------------------

@dataclass
class SweepRow:
    lam: float
    n_solutions: int
    norms: list
    attempts: int


def lambda_sweep(problem, lambda_grid, options: SolveOptions | None = None, constants=None,
                 continuation: bool = False, **search_kw):
    """Count distinct certified nontrivial solutions at each lambda.

    Solutions at the previous lambda warm-start the next one.  Returns a
    list of SweepRow.
    """
    lams = np.asarray(lambda_grid, dtype=float).ravel()
    if lams.size == 0:
        raise ValueError("lambda grid is empty")
    if np.any(~np.isfinite(lams)) or np.any(lams <= 0):
        raise ValueError("lambda values must be positive")
    if np.any(np.diff(lams) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    options = options or SolveOptions()
    if constants is None:
        from .constants import constants_for
        constants = constants_for(problem)
    rows = []
    warm = []
    for lam in lams:
        p = problem.with_lambda(float(lam))
        rep = search_solutions(p, constants, options, extra_starts=warm,
                               continuation=continuation, **search_kw)
        rows.append(SweepRow(float(lam), len(rep.solutions), rep.norms, len(rep.attempts)))
        warm = [s.profile for s in rep.solutions]
    return rows
