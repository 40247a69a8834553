# # Cross-checking with an independent shooting method
#
# The shooting oracle integrates the ODE from the centre with `u(0) = c`
# and looks for levels where `u'(R) = 0`.  It shares no code with the
# fixed-point solver beyond the problem definition.

import numpy as np

from minkowski_neumann import (constants_for, figure1_problem, find_roots, find_two_solutions,
                               integrate_shot, oracle_match)

problem = figure1_problem()
small, large, _ = find_two_solutions(problem, constants_for(problem))

for prof in (small, large):
    shot, dist = oracle_match(problem, prof)
    print(f"solver u(0)={prof.u[0]:.12f}  oracle c={shot.c:.12f}  sup dist/|u| = {dist:.1e}")

# A coarse scan of the Neumann defect u'(R) over initial levels shows
# every sign change; the brackets are refined with Brent's method.

cs = np.geomspace(0.5, 10, 12)
for c in cs:
    s = integrate_shot(problem, c, dense=False)
    print(f"c={c:7.3f}  u'(R)={s.defect:+.4e}  {'ok' if s.valid else 'saturated'}")

roots = find_roots(problem, (0.5, 10.0), samples=32)
print("Neumann levels:", [round(s.c, 10) for s in roots])
