# # Closed-form constants
#
# Given the positivity intervals and a trim `eps`, the bundle holds the
# level `delta*` that separates small from large solutions, the lower level
# `delta_low`, and the threshold `lambda*` above which two positive
# solutions are guaranteed.

from minkowski_neumann import (choose_epsilon, compute_bundle, constants_for, desk_problem,
                               detect_sign_structure, figure1_problem)
from minkowski_neumann.constants import empirical_radii

desk = desk_problem(1.0)
s = detect_sign_structure(desk)

# `eps` trades off the two constants.  The default strategy scans a lattice
# and keeps the `eps` with the smallest `lambda*`.

for eps in (0.05, 0.1, 0.2, choose_epsilon(s, desk, "max")):
    b = compute_bundle(s, desk, eps)
    print(f"eps={eps:.4f}  delta*={b.delta_star:.4f}  delta_low={b.delta_low:.5f}  "
          f"lambda*={b.lambda_star:.1f}")

b = constants_for(desk)
print("chosen:", b.epsilon, b.lambda_star)

# The existence radii `d*` and `D*` have no closed form here; they are
# estimated from solves and labelled as empirical.

emp = empirical_radii(desk.with_lambda(2 * b.lambda_star), b)
print("d* =", emp.d_star, " D* =", emp.D_star, emp.provenance)

# On the reference problem `lambda*` is astronomically large, which is why
# the reference run at lam = 0.1 sits far below the guaranteed regime.

print(f"{constants_for(figure1_problem()).lambda_star:.3e}")
