import math

import numpy as np
import pytest

from leastaction.errors import DivergenceError, InvalidInputError
from leastaction.hj_pde import (
    MAX_SNAPSHOTS,
    ActionField,
    SpatialGrid,
    pde_residual,
    sample_initial_action,
    solve_hj_pde,
)
from leastaction.hopf_lax import LinearForm, SingularAt, Tabulated
from leastaction.model import analytic_el_action_linear, analytic_hj_action_linear, linear_model


def _max_interior_error(spec, v0, n, lo=-8.0, hi=8.0, t_final=1.0, margin=2.0):
    grid = SpatialGrid(lo, hi, n)
    field = solve_hj_pde(spec, grid, sample_initial_action(LinearForm([v0], spec.mass), grid), t_final)
    x = grid.points
    inner = (x >= lo + margin) & (x <= hi - margin)
    exact = np.array([analytic_hj_action_linear(spec, [v0], [xi], t_final) for xi in x[inner]])
    return float(np.max(np.abs(field.values[-1][inner] - exact)))


def test_grid_validation():
    with pytest.raises(InvalidInputError):
        SpatialGrid(1.0, 1.0, 32)
    with pytest.raises(InvalidInputError):
        SpatialGrid(0.0, 1.0, 15)
    assert SpatialGrid(-5, 5, 11 * 10 + 1).dx == pytest.approx(10 / 110)


def test_sample_initial_action_examples():
    grid = SpatialGrid(-5, 5, 101)
    np.testing.assert_allclose(sample_initial_action(LinearForm([1.0]), grid), grid.points, atol=0)
    sing = sample_initial_action(SingularAt([0.0]), grid, cap=1e4)
    assert sing[50] == 0.0
    assert sing[0] == 125.0
    far = SpatialGrid(-500, 500, 1001)
    assert sample_initial_action(SingularAt([0.0]), far, cap=1e4)[0] == 1e4
    with pytest.raises(InvalidInputError):
        sample_initial_action(SingularAt([0.0]), grid, cap=0.0)


def test_sample_tabulated_must_cover_grid():
    grid = SpatialGrid(-5, 5, 101)
    xs = np.linspace(-6, 6, 25)
    np.testing.assert_allclose(sample_initial_action(Tabulated((xs,), 2 * xs), grid), 2 * grid.points, atol=1e-12)
    short = np.linspace(-1, 1, 5)
    with pytest.raises(InvalidInputError):
        sample_initial_action(Tabulated((short,), short), grid)


def test_free_particle_linear_initial_action(free1):
    grid = SpatialGrid(-5, 5, 201)
    field = solve_hj_pde(free1, grid, sample_initial_action(LinearForm([1.0]), grid), 1.0)
    x = grid.points
    inner = np.abs(x) <= 3
    np.testing.assert_allclose(field.values[-1][inner], x[inner] - 0.5, atol=1e-12)


def test_null_solution(free1):
    grid = SpatialGrid(-1, 1, 33)
    field = solve_hj_pde(free1, grid, np.zeros(33), 2.0, snapshot_times=[0.5, 1.0, 2.0])
    assert np.all(field.values == 0.0)
    assert list(field.times) == [0.0, 0.5, 1.0, 2.0]


def test_uniform_field_point_converges_first_order():
    spec = linear_model(1.0, [1.0])
    # m v0 x - m v0^2 t/2 + K x t - K v0 t^2/2 - K^2 t^3/6m at x = t = 1/2
    exact = 0.5 - 0.25 + 0.25 - 0.125 - 1 / 48
    assert analytic_hj_action_linear(spec, [1.0], [0.5], 0.5) == pytest.approx(exact, abs=1e-15)
    errs = []
    for n in (129, 257, 513):
        grid = SpatialGrid(-8, 8, n)
        field = solve_hj_pde(spec, grid, sample_initial_action(LinearForm([1.0]), grid), 0.5)
        errs.append(abs(field.sample(0.5, 0.5) - exact))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 0.9
    assert errs[-1] <= 16 / 512


@pytest.mark.parametrize("k", [0.0, 1.0])
def test_consistency_with_closed_form(k):
    spec = linear_model(1.0, [k])
    errs = [_max_interior_error(spec, 1.0, n) for n in (129, 257, 513)]
    assert errs[-1] <= 5e-3
    if k == 0.0:
        # the scheme reproduces x - t/2 to roundoff, so there is no rate to measure
        assert max(errs) <= 1e-12
    else:
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        assert min(orders) >= 0.9


def test_initial_snapshot_is_bit_exact(field2):
    grid = SpatialGrid(-4, 4, 65)
    s0 = np.sin(grid.points) * 0.1
    field = solve_hj_pde(field2, grid, s0, 0.3)
    assert field.values[0].tobytes() == s0.tobytes()
    assert field.values[0] is not s0


def test_steps_land_on_snapshot_times(field2):
    grid = SpatialGrid(-6, 6, 97)
    times = [0.1 * i for i in range(1, 11)]
    field = solve_hj_pde(field2, grid, sample_initial_action(LinearForm([0.5]), grid), 1.0, snapshot_times=times)
    np.testing.assert_array_equal(field.times[1:], sorted(times))
    assert np.all(np.isfinite(field.values))
    np.testing.assert_array_equal(field.snapshot(0.5), field.values[5])


def test_growth_is_at_most_linear(field2):
    grid = SpatialGrid(-10, 10, 257)
    ts = np.linspace(0.25, 2.0, 8)
    field = solve_hj_pde(field2, grid, sample_initial_action(LinearForm([1.0]), grid), 2.0, snapshot_times=ts)
    inner = np.abs(grid.points) <= 4
    peaks = np.max(np.abs(field.values[:, inner]), axis=1)
    increments = np.diff(peaks)
    # S grows like t^3 for a uniform force; the discrete increments stay bounded
    assert np.all(np.isfinite(peaks))
    assert np.max(increments) <= 10 * (peaks[1] - peaks[0] + 1)


def test_singular_data_monotone_in_cap_and_convergent(field2):
    exact = analytic_el_action_linear(field2, [0.0], [1.0], 1.0)
    grid = SpatialGrid(-6, 6, 513)
    values = []
    for cap in (1.0, 10.0, 100.0, 1e4):
        s0 = sample_initial_action(SingularAt([0.0]), grid, cap=cap, mass=1.0)
        values.append(solve_hj_pde(field2, grid, s0, 1.0).sample(1.0, 1.0))
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    errs = []
    for n in (257, 513, 1025):
        g = SpatialGrid(-6, 6, n)
        s0 = sample_initial_action(SingularAt([0.0]), g, cap=1e4)
        errs.append(abs(solve_hj_pde(field2, g, s0, 1.0).sample(1.0, 1.0) - exact))
    assert errs[0] > errs[1] > errs[2]
    assert math.log2(errs[1] / errs[2]) >= 0.9
    assert errs[-1] <= 5e-2


def test_divergence_reports_step(free1):
    grid = SpatialGrid(0, 1, 17)

    def exploding(x, t):
        return np.full_like(x, np.inf)

    with pytest.raises(DivergenceError) as info:
        solve_hj_pde(free1, grid, np.zeros(17), 1.0, potential=exploding)
    assert info.value.step == 1


def test_time_dependent_potential(free1):
    # V = -t gives S = t^2 / 2 from S0 = 0; forward Euler is off by dt/2
    grid = SpatialGrid(-1, 1, 33)
    field = solve_hj_pde(free1, grid, np.zeros(33), 1.0, potential=lambda x, t: np.full_like(x, -t), max_dt=1e-3)
    assert field.steps == 1000
    np.testing.assert_allclose(field.values[-1], 0.5 - 0.5e-3, atol=1e-12)
    with pytest.raises(InvalidInputError):
        solve_hj_pde(free1, grid, np.zeros(33), 1.0, max_dt=0.0)


def test_snapshot_limits(free1):
    grid = SpatialGrid(0, 1, 17)
    with pytest.raises(InvalidInputError):
        solve_hj_pde(free1, grid, np.zeros(17), 1.0, snapshot_times=np.linspace(0.01, 1, MAX_SNAPSHOTS))
    with pytest.raises(InvalidInputError):
        solve_hj_pde(free1, grid, np.zeros(17), 1.0, snapshot_times=[1.5])
    with pytest.raises(InvalidInputError):
        solve_hj_pde(free1, grid, np.zeros(17), 1.0, cfl=1.5)
    with pytest.raises(InvalidInputError):
        solve_hj_pde(free1, grid, np.zeros(16), 1.0)
    with pytest.raises(InvalidInputError):
        solve_hj_pde(linear_model(1, [1, 1]), grid, np.zeros(17), 1.0)


def _analytic_field(spec, v0, grid, times):
    values = np.array([[analytic_hj_action_linear(spec, [v0], [x], t) for x in grid.points] for t in times])
    return ActionField(grid, np.asarray(times, float), values, spec)


def test_residual_of_null_field(free1):
    grid = SpatialGrid(-1, 1, 33)
    field = ActionField(grid, np.array([0.0, 0.1, 0.2]), np.zeros((3, 33)), free1)
    assert pde_residual(field, 1) == 0.0


def test_residual_of_analytic_field():
    grid = SpatialGrid(-3, 3, 61)
    free = linear_model(1.0, [0.0])
    assert pde_residual(_analytic_field(free, 0.7, grid, [0.4, 0.5, 0.6]), 1) <= 1e-10
    # cubic time dependence: the three-point S_t error is h^2 K^2 / 6m
    spec = linear_model(1.0, [1.0])
    h = 1e-3
    res = pde_residual(_analytic_field(spec, 0.7, grid, [0.5 - h, 0.5, 0.5 + h]), 1)
    assert res <= h * h / 6 + 1e-9
    res_nonuniform = pde_residual(_analytic_field(spec, 0.7, grid, [0.5 - h, 0.5, 0.5 + 2 * h]), 1)
    assert res_nonuniform <= 1e-5


def test_residual_of_solver_output_is_first_order():
    spec = linear_model(1.0, [1.0])
    res = []
    for n in (129, 257):
        grid = SpatialGrid(-8, 8, n)
        ts = [0.4, 0.5, 0.6]
        field = solve_hj_pde(spec, grid, sample_initial_action(LinearForm([1.0]), grid), 0.6, snapshot_times=ts)
        res.append(pde_residual(field, 2, interior_margin=n // 4))
    assert res[1] < res[0]


def test_residual_needs_three_snapshots(free1):
    grid = SpatialGrid(-1, 1, 33)
    field = ActionField(grid, np.array([0.0, 0.1]), np.zeros((2, 33)), free1)
    with pytest.raises(InvalidInputError):
        pde_residual(field, 1)


def test_field_sampling_bounds(free1):
    grid = SpatialGrid(-1, 1, 33)
    field = ActionField(grid, np.array([0.0, 1.0]), np.vstack([grid.points, grid.points + 1]), free1)
    assert field.sample(0.5, 0.5) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        field.sample(2.0, 0.5)
    with pytest.raises(InvalidInputError):
        field.sample(0.0, 2.0)
    with pytest.raises(InvalidInputError):
        field.snapshot(0.3)
