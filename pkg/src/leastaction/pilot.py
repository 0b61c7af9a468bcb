"""Velocity field v = grad S / m and the particle paths it pilots."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, InvalidInputError, NonSmoothFieldWarning, PartialTrajectoryError
from .euler_lagrange import Trajectory
from .hj_pde import ActionField
from .model import ModelSpec, as_vector

NON_SMOOTH_FACTOR = 10.0


@dataclass(frozen=True)
class AnalyticLinear:
    """Field generated by S0 = m v0.x in a uniform force field: v = v0 + K t / m."""

    v0: tuple[float, ...]
    model: ModelSpec

    def __post_init__(self):
        object.__setattr__(self, "v0", tuple(float(c) for c in np.atleast_1d(self.v0)))
        if len(self.v0) != self.model.dimension:
            raise InvalidInputError("v0 and model dimension differ")
        self.model.force  # raises for potentials without a uniform force


@dataclass(frozen=True, eq=False)
class FromActionField:
    field: ActionField

    def __post_init__(self):
        if len(self.field.times) < 2:
            raise InvalidInputError("need at least two snapshots to interpolate in time")
        grad = np.gradient(self.field.values, self.field.grid.dx, axis=1, edge_order=2)
        object.__setattr__(self, "_grad", grad)
        typical = np.median(np.abs(grad), axis=1)
        object.__setattr__(self, "_typical", typical)


@dataclass(frozen=True)
class VelocityFieldView:
    source: Union[AnalyticLinear, FromActionField]

    @property
    def dimension(self) -> int:
        if isinstance(self.source, AnalyticLinear):
            return self.source.model.dimension
        return 1

    @property
    def mass(self) -> float:
        if isinstance(self.source, AnalyticLinear):
            return self.source.model.mass
        return self.source.field.model.mass

    def contains(self, x, t) -> bool:
        if isinstance(self.source, AnalyticLinear):
            return True
        f = self.source.field
        x = float(np.atleast_1d(x)[0])
        return (
            f.grid.lo + f.grid.dx <= x <= f.grid.hi - f.grid.dx
            and f.times[0] <= t <= f.times[-1]
        )


def analytic_view(model: ModelSpec, v0) -> VelocityFieldView:
    return VelocityFieldView(AnalyticLinear(v0, model))


def field_view(field: ActionField) -> VelocityFieldView:
    return VelocityFieldView(FromActionField(field))


def _grid_gradient(src: FromActionField, x: float, t: float) -> float:
    f = src.field
    xs = f.grid.points
    times = f.times
    j = int(np.searchsorted(times, t, side="right")) - 1
    j = min(max(j, 0), len(times) - 2)
    w = (t - times[j]) / (times[j + 1] - times[j])
    i = int(np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2))
    for jj in (j, j + 1):
        row = src._grad[jj]
        lo, hi = max(i - 1, 0), min(i + 2, len(xs) - 1)
        jump = float(np.max(np.abs(np.diff(row[lo:hi + 1]))))
        if jump > NON_SMOOTH_FACTOR * max(src._typical[jj], 1e-12):
            warnings.warn(
                f"action gradient jumps by {jump:.3g} near x = {x:.6g}, t = {times[jj]:.6g}; "
                "the field may not be differentiable here",
                NonSmoothFieldWarning,
                stacklevel=3,
            )
    a = np.interp(x, xs, src._grad[j])
    b = np.interp(x, xs, src._grad[j + 1])
    return float((1 - w) * a + w * b)


def velocity_field(view: VelocityFieldView, x, t: float) -> np.ndarray:
    src = view.source
    if isinstance(src, AnalyticLinear):
        m = src.model
        as_vector(m, x)
        return np.asarray(src.v0) + m.force * t / m.mass
    if not view.contains(x, t):
        raise DomainError("query outside the field domain (one-cell margin)", (np.atleast_1d(x).tolist(), t))
    xv = float(np.atleast_1d(x)[0])
    return np.array([_grid_gradient(src, xv, t) / view.mass])


def integrate_pilot_trajectory(
    view: VelocityFieldView, x_start, t0: float, t1: float, dt: Optional[float] = None
) -> Trajectory:
    """RK4 for dx/dt = v(x, t) from (x_start, t0) to t1."""
    if not t1 > t0:
        raise InvalidInputError(f"need t1 > t0, got [{t0}, {t1}]")
    if dt is None:
        dt = (t1 - t0) / 1000
    if not dt > 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    n = max(int(np.ceil((t1 - t0) / dt - 1e-9)), 1)
    h = (t1 - t0) / n
    x = np.atleast_1d(np.asarray(x_start, dtype=float)).copy()
    if x.shape != (view.dimension,):
        raise InvalidInputError(f"x_start has shape {x.shape}, field dimension is {view.dimension}")

    rel_times = [0.0]
    xs = [x.copy()]
    vs = []

    def v(y, s):
        if not view.contains(y, s):
            raise DomainError("left field domain", (y.tolist(), s))
        return velocity_field(view, y, s)

    def partial(t_exit):
        traj = None
        if len(xs) >= 2:
            vel = list(vs[: len(xs)])
            vel += [vel[-1]] * (len(xs) - len(vel))
            traj = Trajectory(np.array(rel_times), np.array(xs), np.array(vel), t0)
        return PartialTrajectoryError(t_exit, traj)

    for i in range(n):
        t = t0 + i * h
        try:
            k1 = v(x, t)
            vs.append(k1)
            k2 = v(x + 0.5 * h * k1, t + 0.5 * h)
            k3 = v(x + 0.5 * h * k2, t + 0.5 * h)
            k4 = v(x + h * k3, t + h)
        except DomainError:
            raise partial(t) from None
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        rel_times.append((i + 1) * h)
        xs.append(x.copy())
    try:
        vs.append(v(x, t1))
    except DomainError:
        raise partial(t1) from None
    return Trajectory(np.array(rel_times), np.array(xs), np.array(vs), t0)


def field_constancy_report(view: VelocityFieldView, t: float, probe_xs: Sequence) -> tuple[np.ndarray, float]:
    """Mean velocity over the probes and the largest deviation from it."""
    vals = np.array([velocity_field(view, p, t) for p in probe_xs])
    if len(vals) == 0:
        raise InvalidInputError("no probe points")
    mean = vals[0] if np.all(vals == vals[0]) else vals.mean(axis=0)
    dev = float(np.max(np.linalg.norm(vals - mean, axis=1)))
    return mean, dev
