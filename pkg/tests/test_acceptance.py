"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line
(also collected in the pytest terminal summary)."""

import time

import numpy as np
import pytest

from conftest import DESK_LAMBDA_STAR, negative_weight_problem, report
from minkowski_neumann import (GridProfile, HomotopyState, SolveOptions, apply_T, certify,
                               check_phi_inequalities, compute_bundle, constants_for, desk_problem,
                               detect_sign_structure, find_two_solutions, grid_for,
                               lambda_sweep, oracle_match, phi, phi_inv, search_solutions,
                               solve, uniform_grid)
from minkowski_neumann.curvature import PHI_HALF

# independent shooting-oracle values (DOP853, rtol 1e-12), frozen
FIG1_U0 = (1.976404512384229, 5.7224414669264)
FIG1_NORM = (2.311437145394491, 6.533703834823752)


def test_figure1_reproduction(fig1, fig1_bundle, fig1_structure):
    t0 = time.perf_counter()
    us, ul, rep = find_two_solutions(fig1, fig1_bundle, structure=fig1_structure)
    matches = [oracle_match(fig1, u)[1] for u in (us, ul)]
    elapsed = time.perf_counter() - t0
    certs = [certify(fig1, u, bundle=fig1_bundle, structure=fig1_structure) for u in (us, ul)]
    slope = float(np.max(np.abs(ul.du)))
    checks = {
        "two_certified": len(rep.solutions) >= 2 and all(c.overall for c in certs),
        "positive": us.u.min() > 0 and ul.u.min() > 0,
        "ordered": us.sup_norm < ul.sup_norm,
        "sharp": slope > 0.9,
        "oracle": all(m <= 1e-4 for m in matches),
        "baseline_u0": np.allclose([us.u[0], ul.u[0]], FIG1_U0, rtol=1e-6),
        "baseline_norm": np.allclose([us.sup_norm, ul.sup_norm], FIG1_NORM, rtol=1e-6),
        "runtime": elapsed <= 60,
    }
    ok = all(checks.values())
    report("figure-1 reproduction", ok,
           f"norms {us.sup_norm:.8f} < {ul.sup_norm:.8f}, max|u_l'|={slope:.5f}, "
           f"oracle dist/|u| {matches[0]:.1e}, {matches[1]:.1e}, {elapsed:.1f}s; "
           + ", ".join(k for k, v in checks.items() if not v))
    assert ok, checks


def test_weight_zeros(fig1_structure):
    expected = [0.359781, 1.39176, 2.60244, 4.3119]
    zeros = sorted(x for iv in fig1_structure.intervals for x in iv if 0 < x < 5)
    ok = len(zeros) == 4 and np.all(np.abs(np.array(zeros) - expected) <= 1e-3)
    report("weight zeros", ok, ", ".join(f"{z:.6f}" for z in zeros))
    assert ok


def test_constants_hand_check():
    problem = desk_problem(1.0)
    structure = detect_sign_structure(problem)
    b = compute_bundle(structure, problem, 0.2)
    ds_closed = 0.2
    dl_closed = 0.2 / (1 + 2 * (1 / np.sqrt(3)) * (1 / 0.4))
    # g = u^2 is increasing, so min g on [delta_low, delta*] is delta_low^2
    lam_closed = 2 * 3.0 ** 0 * PHI_HALF / (dl_closed ** 2 * (2 - 1 - 4 * 0.2))
    ok = (abs(b.delta_star - ds_closed) <= 1e-12 and abs(b.delta_low - dl_closed) <= 1e-12
          and abs(b.lambda_star / lam_closed - 1) <= 1e-6)
    report("constants hand-check", ok,
           f"delta*={b.delta_star!r}, delta_low={b.delta_low!r}, lambda*={b.lambda_star:.10g} "
           f"(closed {lam_closed:.10g})")
    assert ok


def test_operator_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    s = rng.uniform(-1, 1, 20000)
    s = s[np.abs(s) < 1 - 1e-6]
    y = rng.standard_normal(20000) * np.exp(rng.uniform(-10, 10, 20000))
    pair = np.max(np.abs(phi_inv(phi(s)) - s))
    odd = max(np.max(np.abs(phi(-s) + phi(s))), np.max(np.abs(phi_inv(-y) + phi_inv(y))))
    ineq = check_phi_inequalities(samples=20000, seed=7)
    elapsed = time.perf_counter() - t0
    n_viol = sum(v["violations"] for k, v in ineq.items() if isinstance(v, dict))
    ok = pair <= 1e-14 and odd == 0 and ineq["ok"] and n_viol == 0 and elapsed <= 5
    report("operator identities", ok,
           f"inverse err {pair:.1e}, {n_viol} inequality violations on "
           f"{min(v['n'] for v in ineq.values() if isinstance(v, dict))}+ points each, {elapsed:.2f}s")
    assert ok


def test_fixed_point_ode_equivalence(fig1, fig1_pair, fig1_bundle, desk, desk_pair, desk_bundle):
    lines = []
    ok = True
    for name, problem, pair, bundle in (("fig1", fig1, fig1_pair, fig1_bundle),
                                        ("desk", desk, desk_pair, desk_bundle)):
        for prof in pair[:2]:
            c = certify(problem, prof, bundle=bundle)
            good = (c.overall and c.ode_residual_sup <= c.ode_tolerance
                    and abs(c.integral_identity) <= c.integral_tolerance
                    and abs(c.neumann_defect_0) <= 1e-8 and abs(c.neumann_defect_R) <= 1e-8
                    and c.max_abs_slope < 1 and c.min_u > 0)
            bad = certify(problem, GridProfile(prof.grid, prof.u + 0.01, prof.du), bundle=bundle)
            ok &= good and not bad.overall
            lines.append(f"{name} |u|={prof.sup_norm:.4g}: ode {c.ode_residual_sup:.1e}, "
                         f"int {c.integral_identity:.1e}, perturbed fails={not bad.overall}")
    report("fixed-point/ODE equivalence", ok, "; ".join(lines))
    assert ok


def test_theta_zero_reduction():
    worst = 0.0
    for N in (1, 2, 3):
        for R in (1.0, 2.5):
            for lam in (0.3, 1.0, 4.0):
                problem = negative_weight_problem(N, R, lam)
                grid = uniform_grid(R, 200)
                for c in np.linspace(-2, 2, 9):
                    Tc = apply_T(problem, GridProfile.constant(grid, c), HomotopyState(theta=0.0))
                    fsharp = -R * c / N if c <= 0 else -lam * R * c * c / N
                    worst = max(worst, float(np.max(np.abs(Tc.u - (c - fsharp)))))
    ok = worst <= 1e-10
    report("theta=0 reduction", ok, f"max error {worst:.1e}")
    assert ok


def test_a_priori_estimates(desk_bundle):
    eps, ds = desk_bundle.epsilon, desk_bundle.delta_star
    checked = 0
    ok = True
    for factor in (0.01, 1.5, 2.0, 4.0):
        problem = desk_problem(factor * DESK_LAMBDA_STAR)
        for sol in search_solutions(problem, desk_bundle, continuation=False).solutions:
            if sol.report.sup_norm > ds:
                continue
            r, u, du = sol.profile.r, sol.profile.u, sol.profile.du
            N = problem.N
            for s, t in desk_bundle.intervals:
                m = (r >= s + 2 * eps) & (r <= t - 2 * eps)
                k = t ** (N - 1) / (2 * eps) ** N
                ok &= bool(np.all(np.abs(du[m]) <= k * u[m]) and np.all(np.abs(du[m]) <= 0.5))
                checked += int(m.sum())
    ok &= checked > 0
    report("a-priori estimates", ok, f"{checked} trimmed-interval nodes checked, zero violations={ok}")
    assert ok


@pytest.mark.slow
def test_multiplicity_threshold(desk_bundle):
    problem = desk_problem(1.0)
    lams = [0.01 * DESK_LAMBDA_STAR, 2 * DESK_LAMBDA_STAR]
    rows = lambda_sweep(problem, lams, constants=desk_bundle)
    high = problem.with_lambda(lams[1])
    rep = search_solutions(high, desk_bundle)
    oracle = [oracle_match(high, s.profile)[1] for s in rep.solutions]
    ok = (rows[1].n_solutions >= 2 and len(rep.solutions) >= 2
          and all(s.certificate.overall for s in rep.solutions)
          and all(d <= 1e-4 for d in oracle))
    low = rows[0].n_solutions
    note = ("0 at 0.01 lambda* as expected" if low == 0 else
            f"expectation of 0 at 0.01 lambda* violated: {low} found (reported, not asserted)")
    report("multiplicity threshold", ok,
           f"2 lambda*: {rows[1].n_solutions} solutions, norms {[f'{x:.6g}' for x in rows[1].norms]}, "
           f"oracle dist/|u| max {max(oracle):.1e}; {note}")
    assert ok


def _richardson(problem, seed, Ms):
    sols = []
    for M in Ms:
        grid = grid_for(problem, M)
        start = GridProfile(grid, np.interp(grid.r, seed.r, seed.u))
        prof, rep = solve(problem, options=SolveOptions(grid_size=M), start=start)
        assert rep.converged and rep.sup_norm > 0
        sols.append(prof)
    diffs = [float(np.max(np.abs(sols[k + 1].u[::2] - sols[k].u))) for k in range(len(Ms) - 1)]
    order = np.log2(diffs[0] / diffs[1])
    hs = [problem.R / M for M in Ms[:-1]]
    C = max(d / h ** 2 for d, h in zip(diffs, hs))
    return sols[-1], diffs, order, C


def test_grid_convergence(fig1, fig1_pair, smooth):
    smooth_small = search_solutions(smooth, constants_for(smooth), continuation=False).solutions[0]
    lines = []
    ok = True
    for name, problem, seed in (("smooth", smooth, smooth_small.profile), ("fig1", fig1, fig1_pair[0])):
        fine, diffs, order, C = _richardson(problem, seed, (500, 1000, 2000))
        cert = certify(problem, fine)
        good = cert.overall and order >= 1.9 and diffs[1] <= C * (problem.R / 1000) ** 2
        ok &= good
        lines.append(f"{name} |u|={fine.sup_norm:.6g}: sup changes {diffs[0]:.2e}, {diffs[1]:.2e}, "
                     f"observed order {order:.2f}")
    report("grid convergence", ok, "; ".join(lines))
    assert ok
