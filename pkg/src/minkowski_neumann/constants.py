"""Threshold constants: trim epsilon, sup-norm barrier delta*, lower level
delta_low, parameter threshold lambda*, and the empirical radii d*, D*.

The first four are closed-form once epsilon is fixed.  d* and D* only
have existence proofs, so they are estimated from solver sweeps and
labelled ``empirical``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .curvature import PHI_HALF
from .problem import ProblemError, SignStructure, weighted_integral


class EpsilonError(ProblemError):
    """No admissible trim epsilon (weight too thin or too oscillatory)."""


class UnboundedBranch(RuntimeError):
    pass


@dataclass
class ConstantsBundle:
    epsilon: float
    delta_star: float
    delta_low: float
    lambda_star: float
    min_g: float
    gamma: Optional[float] = None
    d_star: Optional[float] = None
    D_star: Optional[float] = None
    trimmed_integrals: list = field(default_factory=list)
    intervals: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ConstantsBundle":
        return cls(**data)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "ConstantsBundle":
        return cls.from_dict(json.loads(Path(path).read_text()))


def trimmed_integral(problem, interval, epsilon, grid_points=4096) -> float:
    s, t = interval
    return weighted_integral(problem, s + 2 * epsilon, t - 2 * epsilon, grid_points)


def _admissible(structure, problem, eps) -> bool:
    if eps <= 0:
        return False
    for s, t in structure.intervals:
        if not eps < (t - s) / 4 or not trimmed_integral(problem, (s, t), eps) > 0:
            return False
    return True


def choose_epsilon(structure: SignStructure, problem, strategy: str = "max", levels: int = 20) -> float:
    """Pick the trim epsilon.

    ``strategy="max"`` bisects (``levels`` halvings) for the largest
    admissible epsilon: epsilon < |I_i|/4 and a positive trimmed integral
    on every positivity interval.  ``strategy="lambda"`` scans the dyadic
    lattice bound * j / 2**8 and returns the admissible point with the
    smallest lambda*.
    """
    if not structure.intervals:
        raise EpsilonError("no positivity interval")
    bound = min(t - s for s, t in structure.intervals) / 4.0
    if not bound > 1e-12 * structure.R:
        raise EpsilonError("weight too thin/oscillatory: a positivity interval is degenerate")
    if strategy == "max":
        lo, hi = 0.0, bound
        for _ in range(levels):
            mid = 0.5 * (lo + hi)
            if _admissible(structure, problem, mid):
                lo = mid
            else:
                hi = mid
        if lo == 0.0:
            raise EpsilonError("weight too thin/oscillatory: no admissible epsilon on the lattice")
        return lo
    if strategy == "lambda":
        best = None
        for j in range(1, 256):
            eps = bound * j / 256.0
            if not _admissible(structure, problem, eps):
                continue
            try:
                lam = compute_bundle(structure, problem, eps, g_samples=256, refine=False).lambda_star
            except EpsilonError:
                continue
            if best is None or lam < best[1]:
                best = (eps, lam)
        if best is None:
            raise EpsilonError("weight too thin/oscillatory: no admissible epsilon on the lattice")
        return best[0]
    raise ValueError(f"unknown strategy {strategy!r}")


def min_g(problem, lo, hi, samples=1024, refine=True) -> float:
    """min of g on [lo, hi]: dense sampling, then a bounded golden-section
    refinement around the best sample."""
    u = np.linspace(lo, hi, samples)
    gu = problem.g(u)
    k = int(np.argmin(gu))
    best = float(gu[k])
    if refine and samples > 2:
        a, b = u[max(k - 1, 0)], u[min(k + 1, samples - 1)]
        if b > a:
            res = minimize_scalar(lambda x: float(problem.g(x)), bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-14 * max(1.0, hi)})
            best = min(best, float(res.fun))
    return best


def compute_bundle(structure: SignStructure, problem, epsilon: float,
                   g_samples: int = 1024, refine: bool = True) -> ConstantsBundle:
    N, R = problem.N, problem.R
    eps = float(epsilon)
    intervals = list(structure.intervals)
    trimmed = [trimmed_integral(problem, iv, eps) for iv in intervals]
    if any(not t > 0 for t in trimmed) or any(not eps < (t - s) / 4 for s, t in intervals):
        raise EpsilonError(f"epsilon={eps} is inconsistent with the positivity intervals")
    delta_star = 2.0 ** (N - 1) * eps ** N / R ** (N - 1)
    two_eps_N = (2 * eps) ** N

    def ratio(i, base):
        s, t = intervals[i]
        return 1.0 + 2.0 * PHI_HALF * (t - s) * t ** (2 * N - 2) / (base ** (N - 1) * two_eps_N)

    gamma = None
    candidates = []
    if intervals[0][0] == 0.0:
        gamma = min(delta_star, intervals[0][1]) / 2.0
        candidates.append((delta_star - gamma) / ratio(0, gamma))
        rest = range(1, len(intervals))
    else:
        rest = range(len(intervals))
    candidates += [delta_star / ratio(i, intervals[i][0]) for i in rest]
    delta_low = float(min(candidates))
    mg = min_g(problem, delta_low, delta_star, g_samples, refine)
    if not mg > 0:
        raise ProblemError("g is not positive on [delta_low, delta*]")
    lambda_star = max(2.0 * R ** (N - 1) * PHI_HALF / (mg * t) for t in trimmed)
    return ConstantsBundle(
        epsilon=eps, delta_star=float(delta_star), delta_low=delta_low,
        lambda_star=float(lambda_star), min_g=float(mg), gamma=gamma,
        trimmed_integrals=[float(t) for t in trimmed],
        intervals=[[float(s), float(t)] for s, t in intervals],
        provenance={"epsilon": "lattice search", "delta_star": "formula", "delta_low": "formula",
                    "lambda_star": "formula", "gamma": "formula" if gamma is not None else "n/a",
                    "d_star": "absent", "D_star": "absent"},
    )


def constants_for(problem, structure: SignStructure | None = None, strategy: str = "lambda") -> ConstantsBundle:
    """Sign structure, epsilon and closed-form constants in one call."""
    from .problem import detect_sign_structure
    structure = structure or detect_sign_structure(problem, strict=True)
    eps = choose_epsilon(structure, problem, strategy)
    return compute_bundle(structure, problem, eps)


# ----------------------------------------------------------------------
# empirical radii
# ----------------------------------------------------------------------

def _hypotheses(problem, need: str) -> None:
    from .problem import check_nonlinearity
    chk = check_nonlinearity(problem)
    if not chk["g_star"]:
        raise ProblemError("g(0) = 0 < g(u) for u > 0 fails; estimate unreliable")
    if not chk[need]:
        raise ProblemError(f"growth condition {need} fails; estimate unreliable")


def estimate_d_star(problem, bundle: ConstantsBundle, options=None, levels: int = 30,
                    thetas=(1.0,), known_norms=()) -> float:
    """Empirical d*: half the largest level delta* 2^-k below which every
    constant start (for each theta) collapses to u = 0.

    Falls back to 1e-3 delta* when even the lowest level does not collapse.
    Collapse of constant starts does not rule out small solutions, so the
    result is also capped at half the smallest of ``known_norms``.
    """
    from .operator import HomotopyState
    from .solver import SolveOptions, solve
    _hypotheses(problem, "g_zero")
    options = options or SolveOptions()
    cs = bundle.delta_star * 2.0 ** -np.arange(levels, 0, -1)
    best = None
    for c in cs:
        collapsed = True
        for th in thetas:
            _, rep = solve(problem, HomotopyState(theta=float(th)), options, float(c))
            if not (rep.converged and rep.classification == "trivial"):
                collapsed = False
                break
        if not collapsed:
            break
        best = float(c)
    d = 1e-3 * bundle.delta_star if best is None else 0.5 * best
    if len(known_norms):
        d = min(d, 0.5 * min(known_norms))
    return d


def estimate_D_star(problem, bundle: Optional[ConstantsBundle] = None, options=None,
                    first: float | None = None, growth: float = 2.0, hard_cap: float = 1e6,
                    ladder_ratio: float = np.sqrt(2.0)) -> float:
    """Empirical D*: grow a ceiling geometrically, collecting solutions
    from constant starts below it, until two consecutive ceilings hold the
    same solution set.  Returns the lower of the two ceilings.

    Raises UnboundedBranch when the ceiling passes ``hard_cap``.
    """
    from .solver import Collector, SolveOptions
    _hypotheses(problem, "g_infinity")
    options = options or SolveOptions()
    ds = bundle.delta_star if bundle is not None else 1e-3 * problem.R
    ceiling = first or max(2 * ds, problem.R)
    col = Collector(problem, bundle, options)
    level = 2 * ds if bundle is not None else 1e-3 * problem.R
    prev = None
    while True:
        while level <= ceiling:
            col.consider("ceiling", level, level)
            level *= ladder_ratio
        norms = sorted(s.report.sup_norm for s in col.solutions if s.report.sup_norm < ceiling)
        if prev is not None and len(norms) == len(prev[1]):
            return prev[0]
        prev = (ceiling, norms)
        ceiling *= growth
        if ceiling > hard_cap:
            raise UnboundedBranch(f"solution norms keep growing past {hard_cap:g}: unbounded branch suspected")


def empirical_radii(problem, bundle: ConstantsBundle, options=None) -> ConstantsBundle:
    """Bundle with d* and D* filled in and labelled empirical."""
    from dataclasses import replace
    from .solver import search_solutions
    D = estimate_D_star(problem, bundle, options)
    found = search_solutions(problem, replace(bundle, D_star=float(D)), options)
    d = estimate_d_star(problem, bundle, options, known_norms=found.norms)
    prov = dict(bundle.provenance, d_star="empirical", D_star="empirical")
    return replace(bundle, d_star=float(d), D_star=float(D), provenance=prov)
