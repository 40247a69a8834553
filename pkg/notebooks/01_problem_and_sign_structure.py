# # Problems and the sign structure of the weight
#
# A problem is a radius `R`, a dimension `N`, a sign-changing weight `a(r)`,
# a nonlinearity `g(u)` and a parameter `lam`.  Everything downstream only
# needs the intervals where `a > 0` and the sign of the weighted mean
# `int_0^R r^(N-1) a dr`.

import numpy as np

from minkowski_neumann import (desk_problem, detect_sign_structure, figure1_problem,
                               load_problem, save_problem)

# The reference problem: N = 2, R = 5, a(r) = cos(|r - 5|^1.5 + 1), g = u^2 + u^3.

fig1 = figure1_problem()
s = detect_sign_structure(fig1, strict=True)
print("positivity intervals:", [tuple(round(x, 6) for x in iv) for iv in s.intervals])
print("weighted mean:", s.weighted_mean)

# The weight is positive at the centre, so the first interval starts at 0.
# Zeros inside (0, R):

zeros = sorted(x for iv in s.intervals for x in iv if 0 < x < fig1.R)
print(np.round(zeros, 6))

# A one-dimensional hand-checkable problem with a piecewise-constant weight.
# Jumps are carried through the grid as breakpoints, so integrals of the
# weight are exact.

desk = desk_problem(lam=1.0)
print(detect_sign_structure(desk))

# Problems round-trip through JSON, which is what the command line reads.

save_problem(desk, "/tmp/desk.json")
print(load_problem("/tmp/desk.json").to_dict())
