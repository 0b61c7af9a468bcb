"""The field action from the Hamilton-Jacobi equation on a grid.

A first-order monotone scheme advances S0(x) = x under K = 1 to t = 1.
Halving dx halves the error against the closed form.
"""
import math

import numpy as np

from leastaction import (
    LinearForm,
    SingularAt,
    SpatialGrid,
    analytic_el_action_linear,
    analytic_hj_action_linear,
    linear_model,
    pde_residual,
    sample_initial_action,
    solve_hj_pde,
)

spec = linear_model(1.0, [1.0])
prev = None
print("  n     dx        max error   order")
for n in (129, 257, 513, 1025):
    grid = SpatialGrid(-8, 8, n)
    field = solve_hj_pde(spec, grid, sample_initial_action(LinearForm([1.0]), grid), 1.0,
                         snapshot_times=[0.9, 0.95, 1.0])
    x = grid.points
    inner = np.abs(x) <= 6
    exact = np.array([analytic_hj_action_linear(spec, [1.0], [xi], 1.0) for xi in x[inner]])
    err = float(np.max(np.abs(field.values[-1][inner] - exact)))
    order = "" if prev is None else f"{math.log2(prev / err):.2f}"
    print(f"{n:5d}  {grid.dx:.5f}  {err:.3e}   {order}")
    prev = err
print(f"equation residual at t = 0.95 on the finest grid: {pde_residual(field, 2, n // 4):.2e}")

# the point-like initial action, regularised as a narrow parabola
field2 = linear_model(1.0, [2.0])
exact = analytic_el_action_linear(field2, [0.0], [1.0], 1.0)
print("\nsingular S0 at 0, K = 2, value at (x, t) = (1, 1); classical action 4/3")
for n in (257, 513, 1025, 2049):
    grid = SpatialGrid(-6, 6, n)
    s0 = sample_initial_action(SingularAt([0.0]), grid)
    value = solve_hj_pde(field2, grid, s0, 1.0).sample(1.0, 1.0)
    print(f"  n = {n:5d}  S = {value:.6f}  error {value - exact:+.2e}")
