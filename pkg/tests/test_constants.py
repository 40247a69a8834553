import numpy as np
import pytest
from dataclasses import replace

from conftest import negative_weight_problem
from minkowski_neumann import (ConstantsBundle, NonlinearitySpec, RadialProblem, SolveOptions,
                               WeightSpec, choose_epsilon, compute_bundle, constants_for,
                               desk_problem, detect_sign_structure)
from minkowski_neumann.constants import (EpsilonError, UnboundedBranch, estimate_D_star,
                                         estimate_d_star, min_g)
from minkowski_neumann.problem import ProblemError

FAST = SolveOptions(grid_size=300)


def _piecewise(values, breakpoints=(1.0, 2.0), R=3.0, N=1, p=2.0, lam=1.0):
    return RadialProblem(N, R, WeightSpec("piecewise-constant",
                                          {"breakpoints": list(breakpoints), "values": list(values)}),
                         NonlinearitySpec("power", {"p": p}), lam)


def test_max_epsilon_on_desk():
    p = desk_problem()
    eps = choose_epsilon(detect_sign_structure(p), p, "max")
    assert eps == pytest.approx(0.25, rel=1e-5)
    assert eps < 0.25


def test_lambda_strategy_minimises_lambda_star():
    p = desk_problem()
    s = detect_sign_structure(p)
    best = compute_bundle(s, p, choose_epsilon(s, p, "lambda")).lambda_star
    for eps in (0.05, 0.1, 0.15, 0.2, 0.24):
        assert best <= compute_bundle(s, p, eps).lambda_star * (1 + 1e-6)


def test_degenerate_interval():
    p = desk_problem()
    s = replace(detect_sign_structure(p), intervals=((1.0, 1.0 + 1e-13),))
    with pytest.raises(EpsilonError):
        choose_epsilon(s, p)
    with pytest.raises(ValueError):
        choose_epsilon(detect_sign_structure(p), p, "median")


def test_inconsistent_epsilon():
    p = desk_problem()
    with pytest.raises(EpsilonError):
        compute_bundle(detect_sign_structure(p), p, 0.3)


def test_gamma_branch_when_positive_at_centre():
    p = _piecewise([1.0, -1.0], breakpoints=(1.0,))
    b = constants_for(p)
    assert b.intervals[0][0] == 0.0
    assert b.gamma == pytest.approx(min(b.delta_star, 1.0) / 2)
    assert 0 < b.delta_low < b.delta_star - b.gamma
    assert b.provenance["gamma"] == "formula"


@pytest.mark.parametrize("N", [1, 2, 3])
def test_delta_ordering(N):
    p = _piecewise([-1.0, 1.0, -1.0], N=N, breakpoints=(1.0, 2.0))
    s = detect_sign_structure(p)
    if not s.weighted_mean < 0:
        pytest.skip("mean condition fails for this N")
    b = constants_for(p, s)
    assert 0 < b.delta_low < b.delta_star
    assert b.min_g == pytest.approx(b.delta_low ** 2, rel=1e-9)


def test_doubling_the_weight_halves_lambda_star():
    p1 = _piecewise([-1.0, 1.0, -1.0])
    p2 = _piecewise([-2.0, 2.0, -2.0])
    b1 = compute_bundle(detect_sign_structure(p1), p1, 0.2)
    b2 = compute_bundle(detect_sign_structure(p2), p2, 0.2)
    assert b2.lambda_star == pytest.approx(b1.lambda_star / 2, rel=1e-10)
    assert b2.delta_star == b1.delta_star


def test_min_g_refines_interior_minimum():
    p = RadialProblem(1, 3.0, desk_problem().weight,
                      NonlinearitySpec("table", {"u": [0.0, 1.0, 2.0], "g": [1.0, 0.2, 1.0]}), 1.0)
    assert min_g(p, 0.0, 2.0, samples=10, refine=False) > 0.25
    assert min_g(p, 0.0, 2.0, samples=10) == pytest.approx(0.2, abs=1e-7)


def test_bundle_json_round_trip(tmp_path, desk_bundle):
    path = tmp_path / "c.json"
    desk_bundle.save(path)
    back = ConstantsBundle.load(path)
    assert back.to_dict() == desk_bundle.to_dict()


def test_d_star_estimate(desk_bundle):
    p = desk_problem(2 * 2165.2271999219128)
    d = estimate_d_star(p, desk_bundle, FAST, levels=12)
    assert 0 < d < desk_bundle.delta_star
    assert estimate_d_star(p, desk_bundle, FAST, levels=12, known_norms=(1e-5,)) <= 5e-6


def test_D_star_for_negative_weight():
    p = negative_weight_problem(R=3.0)
    assert estimate_D_star(p, options=FAST) == pytest.approx(3.0)
    with pytest.raises(UnboundedBranch):
        estimate_D_star(p, options=FAST, hard_cap=4.0)


def test_linear_g_is_flagged(desk_bundle):
    p = desk_problem(p=1.0)
    with pytest.raises(ProblemError):
        estimate_d_star(p, desk_bundle, FAST)
