# # Two positive solutions of the reference problem
#
# `find_two_solutions` runs a deterministic multi-start search (constant
# starts below and above `delta*`, plus a continuation in `lam`), certifies
# each converged profile and keeps the distinct ones.

import time

import numpy as np

from minkowski_neumann import certify, constants_for, figure1_problem, find_two_solutions

problem = figure1_problem()
bundle = constants_for(problem)

t0 = time.perf_counter()
small, large, rep = find_two_solutions(problem, bundle)
print(f"{len(rep.solutions)} solutions in {time.perf_counter() - t0:.1f}s, norms {rep.norms}")

for name, prof in (("small", small), ("large", large)):
    c = certify(problem, prof, bundle=bundle)
    print(f"{name}: u(0)={prof.u[0]:.10f}  |u|={prof.sup_norm:.10f}  "
          f"max|u'|={np.max(np.abs(prof.du)):.5f}  certified={c.overall}")

# The large solution has slopes close to 1: the graph is nearly light-like
# near the jumps of the flux, which is the "sharp corner" look of the plot.

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax[0].plot(small.r, problem.a(small.r), "k-", lw=1)
    ax[0].axhline(0, color="0.7", lw=0.5)
    ax[0].set_ylabel("a(r)")
    ax[1].plot(small.r, small.u, label="small")
    ax[1].plot(large.r, large.u, label="large")
    ax[1].set_xlabel("r")
    ax[1].legend()
    fig.savefig("/tmp/figure1.png", dpi=120)
