"""Field action as a minimum over launch points.

S(x, t) = min_y [ S0(y) + S_cl(x, t; y) ]

evaluated on a bounded search box: coarse grid scan, then golden-section (1-d)
or cyclic coordinate golden-section (2-3 d) refinement around the best cell.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import BoundaryMinimumWarning, InvalidInputError, StallWarning
from .euler_lagrange import Trajectory, el_action_direct, solve_bvp_shooting
from .model import (
    ModelSpec,
    analytic_el_action_linear,
    analytic_initial_velocity_linear,
    analytic_optimal_trajectory_linear,
    as_vector,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
TIE_TOL = 1e-12


@dataclass(frozen=True)
class LinearForm:
    """S0(x) = m v0.x, a uniform launch-velocity field."""

    v0: tuple[float, ...]
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "v0", tuple(float(c) for c in np.atleast_1d(self.v0)))
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def dimension(self):
        return len(self.v0)

    def value(self, y):
        return self.mass * float(np.dot(self.v0, np.atleast_1d(y)))

    def values(self, ys):
        return self.mass * (np.asarray(ys, dtype=float) @ np.asarray(self.v0))

    def gradient(self, y):
        return self.mass * np.asarray(self.v0)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Samples on a tensor grid, interpolated piecewise-linearly.

    Outside the table the initial action is +inf, i.e. inadmissible.
    """

    grid: tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        grid = self.grid
        if isinstance(grid, np.ndarray) and grid.ndim == 1:
            grid = (grid,)
        grid = tuple(np.asarray(g, dtype=float) for g in grid)
        values = np.asarray(self.values, dtype=float)
        if values.shape != tuple(len(g) for g in grid):
            raise InvalidInputError(
                f"values shape {values.shape} does not match grid {tuple(len(g) for g in grid)}"
            )
        for g in grid:
            if len(g) < 2 or np.any(np.diff(g) <= 0):
                raise InvalidInputError("tabulated grid axes must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("tabulated values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self,
            "_interp",
            RegularGridInterpolator(grid, values, method="linear", bounds_error=False, fill_value=np.inf),
        )

    def __eq__(self, other):
        return (
            isinstance(other, Tabulated)
            and len(self.grid) == len(other.grid)
            and all(np.array_equal(a, b) for a, b in zip(self.grid, other.grid))
            and np.array_equal(self.values, other.values)
        )

    @property
    def dimension(self):
        return len(self.grid)

    def value(self, y):
        return float(self._interp(np.atleast_1d(y)[None, :])[0])

    def values_at(self, ys):
        return self._interp(np.atleast_2d(ys))

    def gradient(self, y, h=1e-6):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        g = np.empty_like(y)
        for j in range(len(y)):
            e = np.zeros_like(y)
            e[j] = h
            g[j] = (self.value(y + e) - self.value(y - e)) / (2 * h)
        return g


@dataclass(frozen=True)
class SingularAt:
    """Zero at ``x0`` and +inf elsewhere; pins the launch point."""

    x0: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(c) for c in np.atleast_1d(self.x0)))

    @property
    def dimension(self):
        return len(self.x0)

    def value(self, y):
        return 0.0 if tuple(np.atleast_1d(y).astype(float)) == self.x0 else math.inf


InitialAction = Union[LinearForm, Tabulated, SingularAt]


@dataclass(frozen=True)
class HopfLaxResult:
    value: float
    argmin_x0: np.ndarray
    candidates_evaluated: int
    on_boundary: bool = False


def _check_initial_action(spec: ModelSpec, s0):
    if s0.dimension != spec.dimension:
        raise InvalidInputError(
            f"initial action has dimension {s0.dimension}, model has {spec.dimension}"
        )
    if isinstance(s0, LinearForm) and s0.mass != spec.mass:
        raise InvalidInputError(f"LinearForm mass {s0.mass} differs from model mass {spec.mass}")


def _check_box(spec: ModelSpec, search_box):
    box = np.asarray(search_box, dtype=float)
    if box.ndim == 1:
        box = box[None, :]
    if box.shape != (spec.dimension, 2) or np.any(box[:, 1] <= box[:, 0]):
        raise InvalidInputError(f"search_box must be {spec.dimension} nonempty [lo, hi] intervals")
    return box


def classical_action(spec: ModelSpec, x0, x, t, n_steps=4096) -> float:
    """S_cl(x, t; x0): closed form when available, shooting otherwise."""
    if spec.has_closed_form:
        return analytic_el_action_linear(spec, x0, x, t)
    return solve_bvp_shooting(spec, x0, x, t, n_steps=n_steps).action


def classical_path(spec: ModelSpec, x0, x, t, n_samples=1024) -> Trajectory:
    """The classical path from (x0, 0) to (x, t)."""
    if not spec.has_closed_form:
        return solve_bvp_shooting(spec, x0, x, t, n_steps=n_samples).trajectory
    x0 = as_vector(spec, x0, "x0")
    x = as_vector(spec, x, "x")
    k = spec.force
    m = spec.mass
    s = np.linspace(0.0, t, n_samples + 1)
    pos = np.array([analytic_optimal_trajectory_linear(spec, x0, x, t, si) for si in s])
    v0 = analytic_initial_velocity_linear(spec, x0, x, t)
    vel = v0 + np.outer(s, k) / m
    return Trajectory(s, pos, vel)


def golden_section(f: Callable[[float], float], a: float, b: float, rel_tol=1e-10, max_iter=200):
    """Minimise a unimodal f on [a, b]; returns (argmin, fmin, evaluations)."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    best = (c, fc) if fc <= fd else (d, fd)
    for _ in range(max_iter):
        if abs(b - a) <= rel_tol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        evals += 1
        for p, fp in ((c, fc), (d, fd)):
            if fp < best[1]:
                best = (p, fp)
    return best[0], best[1], evals


def _min_over_box(g, box, coarse_n, rel_tol=1e-10, max_sweeps=50):
    dim = len(box)
    axes = [np.linspace(lo, hi, coarse_n) for lo, hi in box]
    best_pt, best_val = None, math.inf
    evals = 0
    # itertools.product walks the grid in lexicographic order, so keeping the
    # first of any near-tie is the smallest-coordinate rule
    for idx in itertools.product(range(coarse_n), repeat=dim):
        y = np.array([axes[j][i] for j, i in enumerate(idx)])
        val = g(y)
        evals += 1
        if val < best_val - TIE_TOL * max(1.0, abs(val)):
            best_pt, best_val, best_idx = y, val, idx
    if best_pt is None:
        raise InvalidInputError("initial action is +inf over the whole search box")

    lo = np.array([axes[j][max(i - 1, 0)] for j, i in enumerate(best_idx)])
    hi = np.array([axes[j][min(i + 1, coarse_n - 1)] for j, i in enumerate(best_idx)])
    y = best_pt.copy()
    val = best_val
    for _ in range(max_sweeps if dim > 1 else 1):
        prev = val
        for j in range(dim):
            def line(s, j=j):
                z = y.copy()
                z[j] = s
                return g(z)

            s, fs, n = golden_section(line, lo[j], hi[j], rel_tol=rel_tol)
            evals += n
            if fs <= val:
                y[j], val = s, fs
        if abs(prev - val) <= rel_tol * max(1.0, abs(val)):
            break

    step = [(hi_ - lo_) / (coarse_n - 1) for lo_, hi_ in box]
    on_boundary = any(
        y[j] - box[j][0] <= step[j] * 1e-6 or box[j][1] - y[j] <= step[j] * 1e-6
        for j in range(dim)
    )
    return y, val, evals, on_boundary


def _launch_point_search(spec, s0, x, t, search_box, coarse_n, action_fn):
    _check_initial_action(spec, s0)
    if not t > 0:
        raise InvalidInputError(f"t must be positive, got {t}")
    x = as_vector(spec, x)
    if isinstance(s0, SingularAt):
        x0 = np.array(s0.x0)
        return HopfLaxResult(action_fn(x0), x0, 1, False)
    box = _check_box(spec, search_box)
    if coarse_n < 3:
        raise InvalidInputError(f"coarse_n must be at least 3, got {coarse_n}")

    def g(y):
        s0y = s0.value(y)
        if not math.isfinite(s0y):
            return math.inf
        return s0y + action_fn(y)

    y, val, evals, on_boundary = _min_over_box(g, box, coarse_n)
    if on_boundary:
        warnings.warn(
            f"minimising launch point {y} lies on the search box boundary",
            BoundaryMinimumWarning,
            stacklevel=3,
        )
    return HopfLaxResult(val, y, evals, on_boundary)


def hj_action_hopf_lax(
    spec: ModelSpec,
    s0: InitialAction,
    x,
    t: float,
    search_box: Sequence[Sequence[float]] = ((-10.0, 10.0),),
    coarse_n: int = 201,
) -> HopfLaxResult:
    """Minimise S0(y) + S_cl(x, t; y) over launch points y in ``search_box``.

    ``SingularAt`` initial data pins y and returns S_cl(x, t; x0) directly.
    """
    x_vec = as_vector(spec, x)
    return _launch_point_search(
        spec, s0, x_vec, t, search_box, coarse_n,
        lambda y: classical_action(spec, y, x_vec, t),
    )


def hj_action_nested(
    spec: ModelSpec,
    s0: InitialAction,
    x,
    t: float,
    search_box: Sequence[Sequence[float]] = ((-10.0, 10.0),),
    coarse_n: int = 41,
    n_segments: int = 256,
) -> float:
    """Same minimum as :func:`hj_action_hopf_lax`, with the inner path action
    obtained by discrete control minimisation instead of the classical route."""
    x_vec = as_vector(spec, x)
    stalls = []

    def inner(y):
        r = el_action_direct(spec, y, x_vec, t, n_segments=n_segments)
        if r.stalled:
            stalls.append(np.array(y))
        return r.action

    result = _launch_point_search(spec, s0, x_vec, t, search_box, coarse_n, inner)
    if stalls:
        warnings.warn(
            f"inner path minimisation stalled for {len(stalls)} launch point(s)",
            StallWarning,
            stacklevel=2,
        )
    return result.value


def minimizing_trajectory(
    spec: ModelSpec,
    s0: InitialAction,
    x,
    t: float,
    search_box: Sequence[Sequence[float]] = ((-10.0, 10.0),),
    coarse_n: int = 201,
    n_samples: int = 1024,
) -> Trajectory:
    """Classical path from the minimising launch point to (x, t)."""
    res = hj_action_hopf_lax(spec, s0, x, t, search_box, coarse_n)
    return classical_path(spec, res.argmin_x0, x, t, n_samples=n_samples)
