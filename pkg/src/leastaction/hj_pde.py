"""Explicit grid solver for S_t + |S_x|^2 / 2m + V(x, t) = 0 in one dimension.

First-order forward Euler in time with the local Lax-Friedrichs numerical
Hamiltonian

    H*(p-, p+) = H((p- + p+)/2) - alpha_i (p+ - p-)/2,  alpha_i = max(|p-|, |p+|)/m

and dt = cfl dx / max_i alpha_i. Monotone under that step, so it converges to the viscosity
solution (the min-over-launch-points value).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DivergenceError, InvalidInputError
from .hopf_lax import InitialAction, LinearForm, SingularAt, Tabulated
from .model import ModelSpec, potential_values

MAX_SNAPSHOTS = 64


@dataclass(frozen=True)
class SpatialGrid:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidInputError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 16:
            raise InvalidInputError(f"grid needs at least 16 points, got {self.n}")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True, eq=False)
class ActionField:
    grid: SpatialGrid
    times: np.ndarray
    values: np.ndarray  # (len(times), grid.n)
    model: ModelSpec
    steps: int = 0

    def snapshot(self, t: float) -> np.ndarray:
        idx = np.flatnonzero(np.isclose(self.times, t, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise InvalidInputError(f"no stored snapshot at t = {t}")
        return self.values[idx[0]]

    def sample(self, x: float, t: float) -> float:
        """S at (x, t): linear in x between nodes, linear in t between snapshots."""
        if not self.grid.lo <= x <= self.grid.hi:
            raise InvalidInputError(f"x = {x} outside the grid")
        if not self.times[0] <= t <= self.times[-1]:
            raise InvalidInputError(f"t = {t} outside the stored time range")
        xs = self.grid.points
        j = int(np.searchsorted(self.times, t, side="right")) - 1
        j = min(max(j, 0), len(self.times) - 2) if len(self.times) > 1 else 0
        a = np.interp(x, xs, self.values[j])
        if len(self.times) == 1 or t == self.times[j]:
            return float(a)
        b = np.interp(x, xs, self.values[j + 1])
        w = (t - self.times[j]) / (self.times[j + 1] - self.times[j])
        return float((1 - w) * a + w * b)


def sample_initial_action(s0: InitialAction, grid: SpatialGrid, cap: float = 1e4, mass: float = 1.0):
    """Initial action on the grid nodes.

    ``SingularAt`` is regularised to min(cap, m |y - x0|^2 / 2 dx), the free
    action of a particle that left x0 a time dx ago; ``mass`` is the model mass
    used for that parabola.
    """
    if not cap > 0:
        raise InvalidInputError(f"cap must be positive, got {cap}")
    y = grid.points
    if isinstance(s0, LinearForm):
        if s0.dimension != 1:
            raise InvalidInputError("grid solver is one-dimensional")
        return s0.mass * s0.v0[0] * y
    if isinstance(s0, Tabulated):
        if s0.dimension != 1:
            raise InvalidInputError("grid solver is one-dimensional")
        out = np.interp(y, s0.grid[0], s0.values, left=np.nan, right=np.nan)
        if np.any(np.isnan(out)):
            raise InvalidInputError("tabulated initial action does not cover the grid")
        return out
    if isinstance(s0, SingularAt):
        if s0.dimension != 1:
            raise InvalidInputError("grid solver is one-dimensional")
        return np.minimum(cap, mass * (y - s0.x0[0]) ** 2 / (2 * grid.dx))
    raise InvalidInputError(f"unknown initial action {s0!r}")


def _with_ghosts(s):
    # linear extrapolation: ghost = 2 * edge - neighbour
    return np.concatenate(([2 * s[0] - s[1]], s, [2 * s[-1] - s[-2]]))


def solve_hj_pde(
    spec: ModelSpec,
    grid: SpatialGrid,
    s0_samples: np.ndarray,
    t_final: float,
    cfl: float = 0.25,
    snapshot_times: Optional[Sequence[float]] = None,
    potential: Optional[Callable[[np.ndarray, float], np.ndarray]] = None,
    max_dt: Optional[float] = None,
) -> ActionField:
    """Advance the sampled initial action to ``t_final``.

    ``potential(x, t)`` overrides the model potential (time-dependent fields).
    Steps are shortened to land exactly on every snapshot time; time 0 is
    always stored first. ``max_dt`` caps the step, which matters when S is
    flat and V depends on t.
    """
    if spec.dimension != 1:
        raise InvalidInputError("grid solver is one-dimensional")
    if not t_final > 0:
        raise InvalidInputError(f"t_final must be positive, got {t_final}")
    if not 0 < cfl <= 1:
        raise InvalidInputError(f"cfl must lie in (0, 1], got {cfl}")
    if max_dt is not None and not max_dt > 0:
        raise InvalidInputError(f"max_dt must be positive, got {max_dt}")
    s = np.array(s0_samples, dtype=float)
    if s.shape != (grid.n,):
        raise InvalidInputError(f"initial samples have shape {s.shape}, grid has {grid.n} points")

    targets = sorted({float(t) for t in (snapshot_times if snapshot_times is not None else [t_final])})
    if any(t < 0 or t > t_final for t in targets):
        raise InvalidInputError("snapshot times must lie in [0, t_final]")
    targets = [t for t in targets if t > 0]
    if len(targets) + 1 > MAX_SNAPSHOTS:
        raise InvalidInputError(f"at most {MAX_SNAPSHOTS} snapshots per run")

    x = grid.points
    dx = grid.dx
    m = spec.mass
    if potential is None:
        v_static = potential_values(spec, x[:, None])
        potential = lambda _x, _t: v_static  # noqa: E731

    times = [0.0]
    snaps = [np.array(s0_samples, dtype=float, copy=True)]
    t = 0.0
    step = 0
    for target in targets:
        while t < target:
            ext = _with_ghosts(s)
            p_minus = (ext[1:-1] - ext[:-2]) / dx
            p_plus = (ext[2:] - ext[1:-1]) / dx
            # per-node dissipation bounds |H_p| over [p-, p+]; the step uses the field maximum
            alpha = np.maximum(np.abs(p_minus), np.abs(p_plus)) / m
            alpha_max = float(np.max(alpha))
            remaining = target - t
            dt = remaining if alpha_max == 0 else min(cfl * dx / alpha_max, remaining)
            if max_dt is not None:
                dt = min(dt, max_dt)
            if remaining - dt <= 1e-14 * max(1.0, target):
                dt = remaining
            p_avg = 0.5 * (p_minus + p_plus)
            h_num = p_avg**2 / (2 * m) + potential(x, t) - 0.5 * alpha * (p_plus - p_minus)
            s = s - dt * h_num
            step += 1
            t = target if dt == remaining else t + dt
            if not np.all(np.isfinite(s)):
                raise DivergenceError(step, t)
        times.append(t)
        snaps.append(s.copy())

    return ActionField(grid, np.array(times), np.array(snaps), spec, step)


def pde_residual(field: ActionField, snapshot_index: int, interior_margin: int = 2) -> float:
    """Max-norm of S_t + S_x^2/2m + V on interior nodes, by centred differences.

    S_t uses the neighbouring snapshots (centred if they are equally spaced,
    otherwise the non-uniform three-point formula).
    """
    nt = len(field.times)
    if nt < 3:
        raise InvalidInputError("need at least three snapshots")
    if not 0 < snapshot_index < nt - 1:
        raise InvalidInputError("snapshot index must have neighbours on both sides")
    i = snapshot_index
    t0, t1, t2 = field.times[i - 1], field.times[i], field.times[i + 1]
    h1, h2 = t1 - t0, t2 - t1
    s_prev, s, s_next = field.values[i - 1], field.values[i], field.values[i + 1]
    s_t = (
        -h2 / (h1 * (h1 + h2)) * s_prev
        + (h2 - h1) / (h1 * h2) * s
        + h1 / (h2 * (h1 + h2)) * s_next
    )
    dx = field.grid.dx
    s_x = np.full_like(s, np.nan)
    s_x[1:-1] = (s[2:] - s[:-2]) / (2 * dx)
    x = field.grid.points
    v = potential_values(field.model, x[:, None])
    r = s_t + s_x**2 / (2 * field.model.mass) + v
    margin = max(int(interior_margin), 1)
    inner = r[margin:-margin]
    return float(np.max(np.abs(inner))) if inner.size else 0.0
