"""The field action as a minimum over launch points.

With initial action S0(y) = m v0 y every point y launches a particle with
velocity v0. The field action at (x, t) is the smallest S0(y) + S_cl(x, t; y)
over y. For m = 1, K = 1, v0 = 1, x = 2, t = 1 the minimum is 17/6,
reached at y = 1/2.
"""
import numpy as np

from leastaction import (
    LinearForm,
    SingularAt,
    analytic_el_action_linear,
    analytic_hj_action_linear,
    hj_action_hopf_lax,
    hj_action_nested,
    linear_model,
    minimizing_trajectory,
)

spec = linear_model(1.0, [1.0])
s0 = LinearForm([1.0])
x, t = [2.0], 1.0

res = hj_action_hopf_lax(spec, s0, x, t, [[-10, 10]])
print(f"minimum over launch points  S = {res.value:.12f}  at y = {res.argmin_x0[0]:.8f}")
print(f"closed form                 S = {analytic_hj_action_linear(spec, [1.0], x, t):.12f}")
print(f"nested direct minimisation  S = {hj_action_nested(spec, s0, x, t, [[-10, 10]]):.12f}")

print("\nS0(y) + S_cl(x, t; y) for a few launch points:")
for y in np.linspace(-1, 2, 7):
    g = s0.value([y]) + analytic_el_action_linear(spec, [y], x, t)
    print(f"  y = {y:+.2f}  {g:.6f}")

traj = minimizing_trajectory(spec, s0, x, t, [[-10, 10]])
print(f"\noptimal path leaves y with velocity {traj.velocities[0, 0]:.8f} (the field value v0 = 1)")

# with a point-like initial action the minimum collapses onto the classical action
field2 = linear_model(1.0, [2.0])
sing = hj_action_hopf_lax(field2, SingularAt([0.0]), [1.0], 1.0)
print(f"\nsingular S0 at 0, K = 2: S = {sing.value:.12f} (classical action 4/3)")
