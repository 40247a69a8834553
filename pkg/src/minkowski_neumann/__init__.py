"""Positive radial solutions of Neumann problems for the Minkowski-curvature
operator with an indefinite weight.

    (r^{N-1} phi(u'))' + lambda r^{N-1} a(r) g(u) = 0,   u'(0) = u'(R) = 0,
    phi(s) = s / sqrt(1 - s^2).

Problems are described by RadialProblem; solve() finds fixed points of the
integral operator, find_two_solutions() runs the multi-start search,
certify() checks a profile independently, and the shooting module gives
an ODE-integrator cross-check.
"""

from .constants import (ConstantsBundle, EpsilonError, UnboundedBranch, choose_epsilon,
                        compute_bundle, constants_for, empirical_radii, estimate_D_star,
                        estimate_d_star)
from .curvature import SlopeSaturation, check_phi_inequalities, extend_f, phi, phi_inv
from .grid import Grid, graded_grid, grid_for, uniform_grid
from .operator import (PHYSICAL, GridProfile, HomotopyState, Linearization, apply_T,
                       cumulative_flux, neumann_defect, residual)
from .problem import (ConfigError, MeanConditionViolated, NoPositivityInterval,
                      NonlinearitySpec, ProblemError, RadialProblem, SignStructure, WeightSpec,
                      check_mean_condition, check_nonlinearity, desk_problem,
                      detect_sign_structure, figure1_problem, load_problem, save_problem,
                      weighted_integral)
from .shooting import ShotControls, ShotResult, find_roots, integrate_shot, oracle_match
from .solver import (HomotopyError, MultiplicityNotFound, SolveOptions, SolveReport,
                     classify, find_two_solutions, homotopy_path, lambda_sweep,
                     search_solutions, solve, solve_adaptive)
from .verify import Certificate, Tolerances, certify, read_profile_csv, write_profile_csv

__version__ = "0.1.0"
