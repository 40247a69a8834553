import numpy as np
import pytest

from conftest import negative_weight_problem
from minkowski_neumann import desk_problem, find_roots, grid_for, integrate_shot, oracle_match
from minkowski_neumann.curvature import extend_f
from minkowski_neumann.shooting import ShotControls


def test_zero_level_shot():
    s = integrate_shot(desk_problem(), 0.0)
    assert s.valid and s.defect == 0.0
    assert np.all(s.profile.u == 0)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_negative_weight_pushes_up(N):
    p = negative_weight_problem(N=N, R=2.0, lam=0.5)
    s = integrate_shot(p, 0.3)
    assert s.valid and s.defect > 0
    assert np.all(np.diff(s.profile.u) >= -1e-14)
    # and no Neumann shot exists
    assert find_roots(p, (0.01, 2.0), samples=16) == []


def test_bad_arguments():
    p = desk_problem()
    with pytest.raises(ValueError):
        integrate_shot(p, -1.0)
    with pytest.raises(ValueError):
        find_roots(p, (1.0, 0.5))
    with pytest.raises(ValueError):
        find_roots(p, (0.1, 1.0), samples=4)


@pytest.mark.parametrize("c", [0.05, 0.5])
def test_flux_identity(c):
    p = desk_problem(20.0)
    s = integrate_shot(p, c, grid=grid_for(p, 3000))
    g = s.profile.grid
    f = extend_f(p, g.ext_r, g.expand(s.profile.u), g.ext_side)
    assert s.v_end == pytest.approx(-g.integrate(f), rel=1e-9, abs=1e-12)


def test_flux_monotone_on_positivity_interval(desk, desk_pair):
    for prof in desk_pair[:2]:
        s, _ = oracle_match(desk, prof)
        r, V = s.profile.r, s.flux
        inside = (r >= 1.0) & (r <= 2.0)
        outside = ~inside
        assert np.all(np.diff(V[inside]) <= 1e-12)
        assert np.all(np.diff(V[outside & (r < 1.0)]) >= -1e-12)


def test_step_halving_stability(fig1):
    a = integrate_shot(fig1, 2.0, ShotControls(max_step=0.02))
    b = integrate_shot(fig1, 2.0, ShotControls(max_step=0.01))
    assert a.valid and b.valid
    assert np.max(np.abs(a.profile.u - b.profile.u)) <= 1e-9
    assert abs(a.defect - b.defect) <= 1e-9


def test_roots_are_neumann_shots(desk):
    roots = find_roots(desk, (1e-5, 3.0), samples=48)
    assert len(roots) >= 2
    for s in roots:
        assert abs(s.defect) <= 1e-6
        assert s.profile.u.min() > 0
