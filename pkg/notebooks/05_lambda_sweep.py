# # Counting solutions along lam
#
# On the desk problem the guaranteed threshold `lambda*` is about 2165,
# yet two solutions persist far below it.  The sweep warm-starts each
# value from the solutions found at the previous one.

import numpy as np

from minkowski_neumann import constants_for, desk_problem, lambda_sweep

problem = desk_problem(1.0)
bundle = constants_for(problem)
lams = np.geomspace(0.1, 2 * bundle.lambda_star, 9)
for row in lambda_sweep(problem, lams, constants=bundle):
    print(f"lam={row.lam:10.3f}  n={row.n_solutions}  norms={np.round(row.norms, 6)}")

# Below lam ~ 1 no nontrivial solution is found; the count jumps to two
# well before `lambda*`, so the threshold is sufficient, not sharp.
