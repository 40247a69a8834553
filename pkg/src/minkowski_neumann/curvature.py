"""Scalar Minkowski-curvature map phi(s) = s / sqrt(1 - s^2) and friends."""

from __future__ import annotations

import numpy as np

SLOPE_GUARD = 1e-12
PHI_HALF = 1.0 / np.sqrt(3.0)  # phi(1/2)


class SlopeSaturation(ArithmeticError):
    """|s| reached 1 - guard; the gradient constraint is lost."""


def phi(s, guard: float = SLOPE_GUARD):
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) >= 1.0 - guard):
        raise SlopeSaturation(f"slope saturation: max |s| = {np.max(np.abs(s)):.17g}")
    out = s / np.sqrt((1.0 - s) * (1.0 + s))
    return out if out.ndim else float(out)


def phi_inv(y):
    """Inverse of phi, total on the reals, values in (-1, 1)."""
    y = np.asarray(y, dtype=float)
    out = y / np.hypot(1.0, y)
    return out if out.ndim else float(out)


def phi_inv_prime(y):
    """Derivative of phi_inv: (1 + y^2)^(-3/2)."""
    y = np.asarray(y, dtype=float)
    return np.hypot(1.0, y) ** -3


def extend_f(problem, r, u, side=1):
    """f(r, u) = lambda a(r) g(u) for u >= 0 and -u for u < 0."""
    u = np.asarray(u, dtype=float)
    pos = problem.lam * problem.a(r, side) * problem.g(u)
    out = np.where(u >= 0, pos, -u)
    return out if out.ndim else float(out)


def extend_f_u(problem, r, u, side=1):
    """Partial derivative of extend_f in u (right derivative at u = 0)."""
    u = np.asarray(u, dtype=float)
    pos = problem.lam * problem.a(r, side) * problem.nonlinearity.derivative(u)
    return np.where(u >= 0, pos, -1.0)


def check_phi_inequalities(samples: int = 10_000, seed: int = 0) -> dict:
    """Check the three elementary inequalities used in the a-priori bounds.

    1. phi_inv(theta * phi(s)) >= theta * s   for theta in [0, 1], s in [0, 1)
    2. phi(s) <= 2 phi(1/2) s                 for s in [0, 1/2]
    3. |phi_inv(y)| <= |y|                    for all y

    Sampling is a deterministic grid plus seeded random points.  The
    report gives the worst margin (>= 0 means satisfied) per inequality.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    rng = np.random.default_rng(seed)
    k = int(np.ceil(np.sqrt(samples)))
    th = np.concatenate([np.linspace(0.0, 1.0, k), rng.uniform(0, 1, samples)])
    s = np.concatenate([np.linspace(0.0, 1.0 - 1e-6, k), rng.uniform(0, 1 - 1e-6, samples)])
    TH, S = np.meshgrid(th[:k], s[:k])
    TH = np.concatenate([TH.ravel(), th[k:]])
    S = np.concatenate([S.ravel(), s[k:]])
    m1 = phi_inv(TH * phi(S)) - TH * S

    s2 = np.concatenate([np.linspace(0.0, 0.5, samples), rng.uniform(0, 0.5, samples)])
    m2 = 2.0 * PHI_HALF * s2 - phi(s2)

    y = np.concatenate([np.linspace(-1e3, 1e3, samples), rng.standard_cauchy(samples)])
    m3 = np.abs(y) - np.abs(phi_inv(y))

    # rounding slack at equality points
    slack = 1e-15
    report = {
        "convexity": {"n": int(m1.size), "worst_margin": float(m1.min()),
                      "violations": int(np.sum(m1 < -slack))},
        "chord": {"n": int(m2.size), "worst_margin": float(m2.min()),
                  "violations": int(np.sum(m2 < -slack))},
        "contraction": {"n": int(m3.size), "worst_margin": float(m3.min()),
                        "violations": int(np.sum(m3 < -slack))},
    }
    report["ok"] = all(v["violations"] == 0 for v in report.values())
    return report
