"""Particles piloted by the velocity field v = grad S / m.

For S0 = m v0 x in a uniform force the field is v0 + K t / m at every x.
Particles that follow it trace the parabolas x0 + v0 t + K t^2 / 2m, both
for the exact field and for the one read off the grid solution.
"""
import numpy as np

from leastaction import (
    LinearForm,
    SpatialGrid,
    analytic_view,
    field_constancy_report,
    field_view,
    hj_action_hopf_lax,
    integrate_pilot_trajectory,
    linear_model,
    sample_initial_action,
    solve_hj_pde,
    velocity_field,
)

spec = linear_model(1.0, [1.0])
exact = analytic_view(spec, [1.0])
for t in (0.0, 1.0, 2.0):
    print(f"t = {t:.0f}  v = {velocity_field(exact, [0.0], t)[0]:g}")

grid = SpatialGrid(-10, 10, 513)
field = solve_hj_pde(spec, grid, sample_initial_action(LinearForm([1.0]), grid), 2.0,
                     snapshot_times=np.linspace(0.1, 2.0, 20))
numeric = field_view(field)
mean, dev = field_constancy_report(numeric, 1.0, [[x] for x in np.linspace(-4, 4, 20)])
print(f"grid field at t = 1: mean {mean[0]:.12f}, spread {dev:.1e}")

print("\nstart   exact endpoint   piloted (exact field)   piloted (grid field)")
for x0 in (-1.0, 0.0, 1.0):
    a = integrate_pilot_trajectory(exact, [x0], 0.0, 2.0).positions[-1, 0]
    b = integrate_pilot_trajectory(numeric, [x0], 0.0, 2.0).positions[-1, 0]
    print(f"{x0:+.1f}    {x0 + 2 + 2:.6f}         {a:.12f}         {b:.12f}")

# the launch point chosen by the minimum is the one the field carries to x
y = hj_action_hopf_lax(spec, LinearForm([1.0]), [2.0], 1.0, [[-10, 10]]).argmin_x0
end = integrate_pilot_trajectory(numeric, y, 0.0, 1.0).positions[-1, 0]
print(f"\nfrom the minimising launch point {y[0]:.8f} the field delivers the particle to x = {end:.8f} at t = 1")
