"""The classical action between two fixed endpoints.

A particle of mass 1 in a uniform force K = 2 goes from x0 = 0 at s = 0 to
x = 1 at s = t = 1. Three routes give its action: the closed form, shooting
on the equation of motion, and direct minimisation of the discretised
action. Perturbing the optimal path always raises the action.
"""
import math

from leastaction import (
    analytic_el_action_linear,
    el_action_direct,
    linear_model,
    solve_bvp_shooting,
    trajectory_family,
)

spec = linear_model(1.0, [2.0])
x0, x, t = [0.0], [1.0], 1.0

exact = analytic_el_action_linear(spec, x0, x, t)
shoot = solve_bvp_shooting(spec, x0, x, t)
print(f"closed form      S_cl = {exact:.12f}")
print(f"shooting         S_cl = {shoot.action:.12f}  launch velocity {shoot.initial_velocity[0]:+.2e}")
for n in (32, 128, 512):
    print(f"direct, n = {n:4d}  S_cl = {el_action_direct(spec, x0, x, t, n_segments=n).action:.12f}")

print("\nhalf-sine perturbations a sin(pi s / t) of the optimal path:")
amps = [-0.2, -0.1, 0.1, 0.2, 0.3]
family = trajectory_family(spec, x0, x, t, amps)
base = family[0][1]
for amp, (_, action) in zip(amps, family[1:]):
    print(f"  a = {amp:+.1f}  S = {action:.9f}  increase {action - base:.9f}  a^2 pi^2/4 = {amp**2 * math.pi**2 / 4:.9f}")
