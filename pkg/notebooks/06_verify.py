# # Certificates
#
# `certify` checks a profile (r, u, u') without reference to the solver:
# the integrated equation on a refined grid, both Neumann conditions, the
# slope bound |u'| < 1, positivity and the flux identity.  Profiles are
# exchanged as CSV, so anything that writes r, u, du can be checked.

import numpy as np

from minkowski_neumann import GridProfile, certify, constants_for, desk_problem, find_two_solutions
from minkowski_neumann.verify import read_profile_csv, write_profile_csv

problem = desk_problem(1.0)
bundle = constants_for(problem)
problem = problem.with_lambda(2 * bundle.lambda_star)
small, large, _ = find_two_solutions(problem, bundle)

write_profile_csv(large, "/tmp/u_large.csv")
back = read_profile_csv("/tmp/u_large.csv", problem.weight.breakpoints)
cert = certify(problem, back, bundle=bundle)
print(cert.to_json())

# A one-percent perturbation is caught by the residual check.

bad = certify(problem, GridProfile(back.grid, 1.01 * back.u, back.du))
print({k: v for k, v in bad.checks.items() if not v})
