"""Radial problem data: weight, nonlinearity, sign structure.

The radial Neumann problem is

    (r^{N-1} phi(u'))' + lambda r^{N-1} a(r) g(u) = 0,   u'(0) = u'(R) = 0,

with phi(s) = s / sqrt(1 - s^2).  This module holds the data (N, R, a, g,
lambda), evaluates a and g, and locates the intervals where a is
non-negative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SIGN_TOL = 1e-10
GRID_POINTS = 4096


class ProblemError(ValueError):
    """Invalid problem data or a violated structural hypothesis."""


class ConfigError(ProblemError):
    """Malformed or unreadable problem configuration."""


class NoPositivityInterval(ProblemError):
    pass


class MeanConditionViolated(ProblemError):
    pass


# ----------------------------------------------------------------------
# weight a(r)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSpec:
    """A weight function a(r) on [0, R].

    kind is one of

    ``cosine-shifted``
        a(r) = cos(|r - center|**exponent + shift); params
        ``center``, ``shift``, ``exponent``.
    ``piecewise-constant``
        params ``breakpoints`` (strictly increasing) and ``values``
        (one more than breakpoints).  At a breakpoint the value of the
        piece to the right is returned unless ``side=-1`` is requested.
    ``table``
        params ``r`` and ``a``; linear interpolation.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        if self.kind == "cosine-shifted":
            for key in ("center", "shift", "exponent"):
                if key not in p:
                    raise ProblemError(f"cosine-shifted weight needs '{key}'")
        elif self.kind == "piecewise-constant":
            bp = np.asarray(p.get("breakpoints", []), dtype=float)
            vals = np.asarray(p.get("values", []), dtype=float)
            if len(vals) != len(bp) + 1:
                raise ProblemError("piecewise-constant: need len(values) == len(breakpoints) + 1")
            if np.any(np.diff(bp) <= 0):
                raise ProblemError("piecewise-constant: breakpoints must be strictly increasing")
        elif self.kind == "table":
            r = np.asarray(p.get("r", []), dtype=float)
            a = np.asarray(p.get("a", []), dtype=float)
            if len(r) < 2 or len(r) != len(a):
                raise ProblemError("table weight: need matching 'r' and 'a' with >= 2 samples")
            if np.any(np.diff(r) <= 0):
                raise ProblemError("table weight: 'r' must be strictly increasing")
        else:
            raise ProblemError(f"unknown weight kind {self.kind!r}")

    @property
    def breakpoints(self) -> np.ndarray:
        """Points where a may jump (empty for continuous kinds)."""
        if self.kind == "piecewise-constant":
            return np.asarray(self.params["breakpoints"], dtype=float)
        return np.empty(0)

    def __call__(self, r, side=1):
        r = np.asarray(r, dtype=float)
        p = self.params
        if self.kind == "cosine-shifted":
            return np.cos(np.abs(r - p["center"]) ** p["exponent"] + p["shift"])
        if self.kind == "piecewise-constant":
            bp = np.asarray(p["breakpoints"], dtype=float)
            vals = np.asarray(p["values"], dtype=float)
            how = "right" if np.all(np.asarray(side) > 0) else "left"
            if np.ndim(side) == 0:
                return vals[np.searchsorted(bp, r, side=how)]
            side = np.broadcast_to(side, r.shape)
            idx = np.where(side > 0, np.searchsorted(bp, r, side="right"),
                           np.searchsorted(bp, r, side="left"))
            return vals[idx]
        return np.interp(r, p["r"], p["a"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": _plain(self.params)}


# ----------------------------------------------------------------------
# nonlinearity g(u)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NonlinearitySpec:
    """A nonlinearity g: [0, inf) -> [0, inf).

    kinds: ``power`` (g = u**p), ``power-sum`` (g = u**p + u**q) and
    ``table`` (params ``u`` and ``g``, linear interpolation, linear
    extrapolation past the last sample).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        if self.kind == "power":
            if "p" not in p or p["p"] <= 0:
                raise ProblemError("power nonlinearity needs p > 0")
        elif self.kind == "power-sum":
            if p.get("p", 0) <= 0 or p.get("q", 0) <= 0:
                raise ProblemError("power-sum nonlinearity needs p, q > 0")
        elif self.kind == "table":
            u = np.asarray(p.get("u", []), dtype=float)
            g = np.asarray(p.get("g", []), dtype=float)
            if len(u) < 2 or len(u) != len(g):
                raise ProblemError("table nonlinearity: need matching 'u' and 'g'")
            if u[0] != 0.0 or np.any(np.diff(u) <= 0):
                raise ProblemError("table nonlinearity: 'u' must start at 0 and increase")
        else:
            raise ProblemError(f"unknown nonlinearity kind {self.kind!r}")

    def __call__(self, u):
        u = np.maximum(np.asarray(u, dtype=float), 0.0)
        p = self.params
        if self.kind == "power":
            return u ** p["p"]
        if self.kind == "power-sum":
            return u ** p["p"] + u ** p["q"]
        us, gs = np.asarray(p["u"], float), np.asarray(p["g"], float)
        slope = (gs[-1] - gs[-2]) / (us[-1] - us[-2])
        return np.where(u <= us[-1], np.interp(u, us, gs), gs[-1] + slope * (u - us[-1]))

    def derivative(self, u):
        u = np.maximum(np.asarray(u, dtype=float), 0.0)
        p = self.params
        if self.kind == "power":
            return p["p"] * u ** (p["p"] - 1) if p["p"] != 1 else np.ones_like(u)
        if self.kind == "power-sum":
            return p["p"] * u ** (p["p"] - 1) + p["q"] * u ** (p["q"] - 1)
        us, gs = np.asarray(p["u"], float), np.asarray(p["g"], float)
        slopes = np.diff(gs) / np.diff(us)
        idx = np.clip(np.searchsorted(us, u, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": _plain(self.params)}


# ----------------------------------------------------------------------
# problem
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProblem:
    N: int
    R: float
    weight: WeightSpec
    nonlinearity: NonlinearitySpec
    lam: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ProblemError("dimension N must be a positive integer")
        if not self.R > 0:
            raise ProblemError("radius R must be positive")
        if not self.lam > 0:
            raise ProblemError("lambda must be positive")
        bp = self.weight.breakpoints
        if bp.size and (bp[0] <= 0 or bp[-1] >= self.R):
            raise ProblemError("weight breakpoints must lie strictly inside (0, R)")

    def with_lambda(self, lam: float) -> "RadialProblem":
        return RadialProblem(self.N, self.R, self.weight, self.nonlinearity, lam)

    def a(self, r, side=1):
        return self.weight(r, side)

    def g(self, u):
        return self.nonlinearity(u)

    def to_dict(self) -> dict:
        return {
            "N": int(self.N),
            "R": float(self.R),
            "lambda": float(self.lam),
            "weight": self.weight.to_dict(),
            "nonlinearity": self.nonlinearity.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RadialProblem":
        try:
            return cls(
                N=int(data["N"]),
                R=float(data["R"]),
                lam=float(data["lambda"]),
                weight=WeightSpec(data["weight"]["kind"], dict(data["weight"].get("params", {}))),
                nonlinearity=NonlinearitySpec(
                    data["nonlinearity"]["kind"], dict(data["nonlinearity"].get("params", {}))),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ConfigError(f"malformed problem config: missing or bad field {exc}") from exc
        except ConfigError:
            raise
        except ProblemError as exc:
            raise ConfigError(f"malformed problem config: {exc}") from exc


def load_problem(path) -> RadialProblem:
    """Read a problem config (JSON)."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return RadialProblem.from_dict(data)


def save_problem(problem: RadialProblem, path) -> None:
    Path(path).write_text(json.dumps(problem.to_dict(), indent=2) + "\n")


def figure1_problem() -> RadialProblem:
    """N=2, R=5, a(r) = cos(|r-5|^{3/2} + 1), g(u) = u^2 + u^3, lambda = 0.1."""
    return RadialProblem(
        N=2, R=5.0, lam=0.1,
        weight=WeightSpec("cosine-shifted", {"center": 5.0, "shift": 1.0, "exponent": 1.5}),
        nonlinearity=NonlinearitySpec("power-sum", {"p": 2.0, "q": 3.0}),
    )


def desk_problem(lam: float = 1.0, p: float = 2.0) -> RadialProblem:
    """N=1, R=3, a = 1 on [1, 2] and -1 elsewhere, g(u) = u^p."""
    return RadialProblem(
        N=1, R=3.0, lam=lam,
        weight=WeightSpec("piecewise-constant", {"breakpoints": [1.0, 2.0], "values": [-1.0, 1.0, -1.0]}),
        nonlinearity=NonlinearitySpec("power", {"p": p}),
    )


def eval_weight(problem: RadialProblem, r: float, side: int = 1) -> float:
    if not 0.0 <= r <= problem.R:
        raise ProblemError(f"r={r} outside [0, {problem.R}]")
    return float(problem.a(r, side))


# ----------------------------------------------------------------------
# hypotheses on g
# ----------------------------------------------------------------------

def check_nonlinearity(problem: RadialProblem, u_max: float = 1e3) -> dict:
    """Sampled checks of g(0)=0, g>0, g(u)/u -> 0 at 0 and regular
    variation at 0 and infinity.  Returns a dict of booleans."""
    g = problem.g
    u = np.geomspace(1e-8, u_max, 400)
    gu = g(u)
    small = np.geomspace(1e-8, 1e-6, 20)
    large = np.geomspace(u_max / 10, u_max, 20)
    omega = 1.01
    out = {
        "g_star": bool(g(0.0) == 0.0 and np.all(gu > 0)),
        "g_zero": bool(np.all(g(small) / small < 1e-2)
                       and np.all(np.abs(g(omega * small) / g(small) - 1) < 0.1)),
        "g_infinity": bool(np.all(np.abs(g(omega * large) / g(large) - 1) < 0.1)),
    }
    out["ok"] = all(out.values())
    return out


# ----------------------------------------------------------------------
# sign structure
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SignStructure:
    intervals: tuple
    weighted_mean: float
    N: int
    R: float

    @property
    def sigma(self):
        return np.array([iv[0] for iv in self.intervals])

    @property
    def tau(self):
        return np.array([iv[1] for iv in self.intervals])

    def indicator(self, r):
        """Indicator of the union of the positivity intervals."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for s, t in self.intervals:
            out[(r >= s) & (r <= t)] = 1.0
        return out


def _refine_root(fun, lo, hi, flo, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def weighted_integral(problem: RadialProblem, lo: float, hi: float, grid_points: int = GRID_POINTS) -> float:
    """Integral of r^{N-1} a(r) over [lo, hi].

    Exact (closed-form moments) for piecewise-constant weights, composite
    trapezoid on a uniform sampling grid otherwise.
    """
    if hi <= lo:
        return 0.0
    N = problem.N
    w = problem.weight
    if w.kind == "piecewise-constant":
        bp = w.breakpoints
        edges = np.concatenate([[lo], bp[(bp > lo) & (bp < hi)], [hi]])
        total = 0.0
        for x0, x1 in zip(edges[:-1], edges[1:]):
            val = float(w(0.5 * (x0 + x1)))
            total += val * (x1 ** N - x0 ** N) / N
        return total
    nodes = np.linspace(lo, hi, max(grid_points, 16) + 1)
    if w.kind == "table":
        nodes = np.union1d(nodes, [x for x in w.params["r"] if lo < x < hi])
    return float(np.trapezoid(nodes ** (N - 1) * w(nodes), nodes))


def detect_sign_structure(problem: RadialProblem, sign_tol: float = SIGN_TOL,
                          grid_points: int = GRID_POINTS, strict: bool = False) -> SignStructure:
    """Locate the maximal intervals where a >= 0.

    Regions where |a| <= sign_tol next to a positive region are absorbed
    into it.  Endpoints are refined by bisection on the sign of a.
    """
    if grid_points < 16:
        raise ProblemError("grid_points must be >= 16")
    R = problem.R
    w = problem.weight
    r = np.linspace(0.0, R, grid_points + 1)
    extra = []
    if w.kind == "piecewise-constant":
        extra = list(w.breakpoints)
    elif w.kind == "table":
        extra = [x for x in w.params["r"] if 0 < x < R]
    if extra:
        r = np.union1d(r, extra)
    a = np.asarray(w(r), dtype=float)
    if w.kind == "piecewise-constant":
        # classify each cell by its midpoint to see jumps exactly
        mid = 0.5 * (r[1:] + r[:-1])
        am = w(mid)
        cls = np.where(am > sign_tol, 1, np.where(am < -sign_tol, -1, 0))
        cells_nonneg = cls >= 0
        positive = cls > 0
        intervals = _cells_to_intervals(r, cells_nonneg, positive)
    else:
        cls = np.where(a > sign_tol, 1, np.where(a < -sign_tol, -1, 0))
        fa = lambda t: float(w(t)) + sign_tol
        intervals = []
        n = len(r)
        i = 0
        while i < n:
            if cls[i] < 0:
                i += 1
                continue
            j = i
            while j + 1 < n and cls[j + 1] >= 0:
                j += 1
            if np.any(cls[i:j + 1] > 0):
                s = r[i] if i == 0 else _refine_root(fa, r[i - 1], r[i], fa(r[i - 1]))
                t = r[j] if j == n - 1 else _refine_root(fa, r[j], r[j + 1], fa(r[j]))
                intervals.append((s, t))
            i = j + 1

    if not intervals:
        raise NoPositivityInterval("no positivity interval: the weight is never positive")
    mean = weighted_integral(problem, 0.0, R, grid_points)
    if strict and not mean < 0:
        raise MeanConditionViolated(f"mean condition violated: weighted mean {mean:.6g} is not negative")
    return SignStructure(tuple((float(s), float(t)) for s, t in intervals), float(mean), problem.N, R)


def _cells_to_intervals(r, nonneg, positive):
    intervals = []
    n = len(nonneg)
    i = 0
    while i < n:
        if not nonneg[i]:
            i += 1
            continue
        j = i
        while j < n and nonneg[j]:
            j += 1
        if np.any(positive[i:j]):
            intervals.append((r[i], r[j]))
        i = j
    return intervals


def check_mean_condition(structure: SignStructure) -> bool:
    return structure.weighted_mean < 0


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
