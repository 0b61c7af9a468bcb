"""Classical (endpoint-conditioned) action.

Two independent routes to the minimal action between (x0, 0) and (x, t):
shooting on the Euler-Lagrange boundary-value problem, and direct minimisation
of a discretised action over pinned paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solveh_banded

from .errors import InvalidInputError, NoConvergenceError
from .model import (
    Free,
    Harmonic,
    Linear,
    ModelSpec,
    as_vector,
    grad_potential,
    lagrangian_values,
    potential_values,
)

NEWTON_FD_STEP = 1e-6
NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class Trajectory:
    """Sampled path. ``times`` are elapsed since ``t0`` and start at 0."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        velocities = np.asarray(self.velocities, dtype=float)
        if positions.ndim == 1:
            positions = positions[:, None]
        if velocities.ndim == 1:
            velocities = velocities[:, None]
        n = len(times)
        if n < 2 or len(positions) != n or len(velocities) != n:
            raise InvalidInputError("times/positions/velocities must share a length >= 2")
        if times[0] != 0.0:
            raise InvalidInputError("times must start at 0")
        if np.any(np.diff(times) <= 0):
            raise InvalidInputError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "velocities", velocities)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def absolute_times(self) -> np.ndarray:
        return self.t0 + self.times

    def action(self, spec: ModelSpec) -> float:
        """Action of the sampled path by composite Simpson quadrature."""
        lag = lagrangian_values(spec, self.positions, self.velocities)
        return float(simpson(lag, x=self.times))


@dataclass(frozen=True)
class BvpSolution:
    trajectory: Trajectory
    action: float
    initial_velocity: np.ndarray
    residual: float
    iterations: int = 0


@dataclass(frozen=True)
class DirectActionResult:
    action: float
    path: Trajectory
    stalled: bool
    iterations: int


def _potential_code(spec: ModelSpec):
    pot = spec.potential
    if isinstance(pot, Free):
        return 0, np.zeros(spec.dimension), 0.0
    if isinstance(pot, Linear):
        return 1, np.array(pot.k), 0.0
    if isinstance(pot, Harmonic):
        return 2, np.zeros(spec.dimension), pot.omega
    raise InvalidInputError(f"unknown potential {pot!r}")


@numba.njit(cache=True)
def _accel(kind, k, omega, mass, x, out):
    # m x'' = -grad V
    if kind == 0:
        out[:] = 0.0
    elif kind == 1:
        out[:] = k / mass
    else:
        out[:] = -omega * omega * x


@numba.njit(cache=True)
def _rk4_newtonian(x0, v0, t, n, kind, k, omega, mass):
    d = x0.shape[0]
    h = t / n
    xs = np.empty((n + 1, d))
    vs = np.empty((n + 1, d))
    xs[0] = x0
    vs[0] = v0
    a1 = np.empty(d)
    a2 = np.empty(d)
    a3 = np.empty(d)
    a4 = np.empty(d)
    x = x0.copy()
    v = v0.copy()
    for i in range(n):
        _accel(kind, k, omega, mass, x, a1)
        v2 = v + 0.5 * h * a1
        _accel(kind, k, omega, mass, x + 0.5 * h * v, a2)
        v3 = v + 0.5 * h * a2
        _accel(kind, k, omega, mass, x + 0.5 * h * v2, a3)
        v4 = v + h * a3
        _accel(kind, k, omega, mass, x + h * v3, a4)
        x = x + h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        xs[i + 1] = x
        vs[i + 1] = v
    return xs, vs


def integrate_newtonian(spec: ModelSpec, x0, v0, t: float, n_steps: int):
    """Fixed-step RK4 for m x'' = -grad V from (x0, v0); returns (times, xs, vs)."""
    kind, k, omega = _potential_code(spec)
    xs, vs = _rk4_newtonian(
        as_vector(spec, x0, "x0"), as_vector(spec, v0, "v0"),
        float(t), int(n_steps), kind, k, float(omega), spec.mass,
    )
    return np.linspace(0.0, t, n_steps + 1), xs, vs


def _check_times(t, n):
    if not t > 0:
        raise InvalidInputError(f"t must be positive, got {t}")
    if n < 2:
        raise InvalidInputError(f"need at least 2 steps/segments, got {n}")


def solve_bvp_shooting(
    spec: ModelSpec, x0, x, t: float, n_steps: int = 4096, tol: float = 1e-10
) -> BvpSolution:
    """Shoot from x0 on the launch velocity until the RK4 endpoint hits x.

    Newton on the endpoint map with a forward-difference Jacobian; the step is
    halved while it fails to reduce the miss distance.
    """
    _check_times(t, n_steps)
    if not tol > 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    x0 = as_vector(spec, x0, "x0")
    x = as_vector(spec, x, "x")
    d = spec.dimension

    def endpoint(v):
        _, xs, _ = integrate_newtonian(spec, x0, v, t, n_steps)
        return xs[-1] - x

    v = (x - x0) / t
    miss = endpoint(v)
    res = float(np.linalg.norm(miss))
    best_v, best_res = v, res
    it = 0
    while res > tol and it < NEWTON_MAX_ITER:
        it += 1
        jac = np.empty((d, d))
        for j in range(d):
            dv = np.zeros(d)
            dv[j] = NEWTON_FD_STEP
            jac[:, j] = (endpoint(v + dv) - miss) / NEWTON_FD_STEP
        try:
            step = np.linalg.solve(jac, -miss)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while True:
            trial = v + lam * step
            trial_miss = endpoint(trial)
            trial_res = float(np.linalg.norm(trial_miss))
            if trial_res < res or lam < 1e-6:
                break
            lam *= 0.5
        v, miss, res = trial, trial_miss, trial_res
        if res < best_res:
            best_v, best_res = v, res
    if best_res > tol:
        raise NoConvergenceError("shooting did not reach the target endpoint", best_res)

    times, xs, vs = integrate_newtonian(spec, x0, best_v, t, n_steps)
    lag = lagrangian_values(spec, xs, vs)
    action = float(np.trapezoid(lag, times))
    traj = Trajectory(times, xs, vs)
    return BvpSolution(traj, action, vs[0].copy(), float(np.linalg.norm(xs[-1] - x)), it)


def initial_velocity(sol: BvpSolution) -> np.ndarray:
    return np.array(sol.initial_velocity, copy=True)


def _discrete_action(spec, nodes, ds):
    dx = np.diff(nodes, axis=0)
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    kinetic = 0.5 * spec.mass * np.sum(dx * dx) / ds
    return kinetic - float(np.sum(potential_values(spec, mid))) * ds


def _discrete_gradient(spec, nodes, ds):
    """Gradient of the discrete action with respect to the interior nodes."""
    dx = np.diff(nodes, axis=0)
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    gv = grad_potential(spec, mid)
    kin = spec.mass * (dx[:-1] - dx[1:]) / ds
    return kin - 0.5 * ds * (gv[:-1] + gv[1:])


def el_action_direct(
    spec: ModelSpec,
    x0,
    x,
    t: float,
    n_segments: int = 256,
    max_iter: int = 500,
    grad_tol: float = 1e-20,
) -> DirectActionResult:
    """Minimise sum_i L(midpoint_i, (x_{i+1} - x_i)/ds) ds over interior nodes.

    Descent directions are gradients taken in the metric of the kinetic term
    (a tridiagonal solve), so the stiff high-frequency modes do not dictate
    the step size. Armijo backtracking on every step; starts from the straight
    line between the pinned endpoints.
    """
    _check_times(t, n_segments)
    x0 = as_vector(spec, x0, "x0")
    x = as_vector(spec, x, "x")
    ds = t / n_segments
    frac = np.linspace(0.0, 1.0, n_segments + 1)[:, None]
    nodes = x0 + frac * (x - x0)
    nodes[0], nodes[-1] = x0, x

    ni = n_segments - 1
    band = np.empty((2, ni))
    band[0, :] = -spec.mass / ds
    band[1, :] = 2.0 * spec.mass / ds

    f = _discrete_action(spec, nodes, ds)
    converged = False
    it = 0
    while it < max_iter:
        g = _discrete_gradient(spec, nodes, ds)
        direction = -solveh_banded(band, g)
        slope = float(np.sum(g * direction))
        if -slope <= grad_tol * max(1.0, abs(f)):
            converged = True
            break
        it += 1
        lam = 1.0
        while lam > 1e-12:
            trial = nodes.copy()
            trial[1:-1] += lam * direction
            f_trial = _discrete_action(spec, trial, ds)
            if f_trial <= f + 1e-4 * lam * slope:
                break
            lam *= 0.5
        else:
            # no admissible step: accept only if the predicted decrease is at rounding level
            converged = -slope <= 1e-12 * max(1.0, abs(f))
            break
        nodes, f = trial, f_trial

    times = np.linspace(0.0, t, n_segments + 1)
    vel = np.gradient(nodes, times, axis=0, edge_order=2)
    return DirectActionResult(f, Trajectory(times, nodes, vel), not converged, it)


def trajectory_family(
    spec: ModelSpec,
    x0,
    x,
    t: float,
    perturbation_amplitudes: Sequence[float],
    n_steps: int = 4096,
    direction=None,
) -> list[tuple[Trajectory, float]]:
    """Optimal path plus half-sine bumps a sin(pi s / t) along ``direction``.

    The first entry is always the unperturbed optimum. All actions use the same
    Simpson quadrature so they are directly comparable.
    """
    sol = solve_bvp_shooting(spec, x0, x, t, n_steps=n_steps + n_steps % 2)
    base = sol.trajectory
    if direction is None:
        direction = np.zeros(spec.dimension)
        direction[0] = 1.0
    direction = as_vector(spec, direction, "direction")
    s = base.times
    bump = np.sin(math.pi * s / t)[:, None] * direction
    dbump = (math.pi / t) * np.cos(math.pi * s / t)[:, None] * direction
    bump[0] = bump[-1] = 0.0

    family = [(base, base.action(spec))]
    for a in perturbation_amplitudes:
        a = float(a)
        if a == 0.0:
            family.append((base, base.action(spec)))
            continue
        traj = Trajectory(s, base.positions + a * bump, base.velocities + a * dbump)
        family.append((traj, traj.action(spec)))
    return family
