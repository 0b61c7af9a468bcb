"""Mechanical model: mass, potential, Lagrangian, and the closed-form solutions
for a particle in a uniform force field.

Positions and velocities are 1-d arrays of length ``spec.dimension``; scalars
are accepted for one-dimensional models.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InvalidInputError, UnsupportedOracleError


@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class Linear:
    """Uniform force field, V(x) = -k.x."""

    k: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(float(c) for c in np.atleast_1d(self.k)))


@dataclass(frozen=True)
class Harmonic:
    """Isotropic oscillator, V(x) = m omega^2 |x|^2 / 2."""

    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidInputError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "omega", float(self.omega))


PotentialSpec = Union[Free, Linear, Harmonic]


@dataclass(frozen=True)
class ModelSpec:
    mass: float = 1.0
    dimension: int = 1
    potential: PotentialSpec = field(default_factory=Free)

    def __post_init__(self):
        if not self.mass > 0:
            raise InvalidInputError(f"mass must be positive, got {self.mass}")
        if self.dimension not in (1, 2, 3):
            raise InvalidInputError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if isinstance(self.potential, Linear) and len(self.potential.k) != self.dimension:
            raise InvalidInputError(
                f"force vector has length {len(self.potential.k)}, model dimension is {self.dimension}"
            )
        if not isinstance(self.potential, (Free, Linear, Harmonic)):
            raise InvalidInputError(f"unknown potential {self.potential!r}")
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def force(self) -> np.ndarray:
        """Constant force K for Free/Linear models (zero for Free)."""
        if isinstance(self.potential, Linear):
            return np.array(self.potential.k)
        if isinstance(self.potential, Free):
            return np.zeros(self.dimension)
        raise UnsupportedOracleError("no constant force for a harmonic potential")

    @property
    def has_closed_form(self) -> bool:
        return isinstance(self.potential, (Free, Linear))


def linear_model(mass=1.0, k=(0.0,)) -> ModelSpec:
    """Shorthand for the uniform-field model used throughout the tests and demos."""
    k = tuple(np.atleast_1d(np.asarray(k, dtype=float)))
    return ModelSpec(mass=mass, dimension=len(k), potential=Linear(k))


def as_vector(spec: ModelSpec, x, name="x") -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.shape != (spec.dimension,):
        raise InvalidInputError(f"{name} has shape {v.shape}, expected ({spec.dimension},)")
    return v


def eval_potential(spec: ModelSpec, x) -> float:
    x = as_vector(spec, x)
    pot = spec.potential
    if isinstance(pot, Free):
        return 0.0
    if isinstance(pot, Linear):
        return -float(np.dot(pot.k, x))
    return 0.5 * spec.mass * pot.omega**2 * float(np.dot(x, x))


def grad_potential(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """Gradient of V, vectorised over leading axes of ``x`` (last axis = space)."""
    x = np.asarray(x, dtype=float)
    pot = spec.potential
    if isinstance(pot, Free):
        return np.zeros_like(x)
    if isinstance(pot, Linear):
        return np.broadcast_to(-np.asarray(pot.k), x.shape).copy()
    return spec.mass * pot.omega**2 * x


def potential_values(spec: ModelSpec, x: np.ndarray) -> np.ndarray:
    """V evaluated row-wise on an array of positions of shape (..., dimension)."""
    x = np.asarray(x, dtype=float)
    pot = spec.potential
    if isinstance(pot, Free):
        return np.zeros(x.shape[:-1])
    if isinstance(pot, Linear):
        return -(x @ np.asarray(pot.k))
    return 0.5 * spec.mass * pot.omega**2 * np.sum(x * x, axis=-1)


def eval_lagrangian(spec: ModelSpec, x, v, t=0.0) -> float:
    """L = m|v|^2/2 - V(x). ``t`` is accepted for signature parity; potentials are static."""
    x = as_vector(spec, x)
    v = as_vector(spec, v, "v")
    return 0.5 * spec.mass * float(np.dot(v, v)) - eval_potential(spec, x)


def lagrangian_values(spec: ModelSpec, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row-wise Lagrangian for sampled paths, shapes (n, dimension)."""
    v = np.asarray(v, dtype=float)
    return 0.5 * spec.mass * np.sum(v * v, axis=-1) - potential_values(spec, x)


def _closed_form_force(spec: ModelSpec) -> np.ndarray:
    if not spec.has_closed_form:
        raise UnsupportedOracleError(
            f"no closed form for potential {type(spec.potential).__name__}"
        )
    return spec.force


def analytic_el_action_linear(spec: ModelSpec, x0, x, t) -> float:
    """Classical action between (x0, 0) and (x, t) in a uniform field K:

        m|x - x0|^2 / 2t + K.(x + x0) t / 2 - |K|^2 t^3 / 24m
    """
    k = _closed_form_force(spec)
    if not t > 0:
        raise InvalidInputError(f"t must be positive, got {t}")
    x0 = as_vector(spec, x0, "x0")
    x = as_vector(spec, x, "x")
    m = spec.mass
    d = x - x0
    return (
        m * float(np.dot(d, d)) / (2 * t)
        + float(np.dot(k, x + x0)) * t / 2
        - float(np.dot(k, k)) * t**3 / (24 * m)
    )


def analytic_optimal_trajectory_linear(spec: ModelSpec, x0, x, t, s) -> np.ndarray:
    k = _closed_form_force(spec)
    if not t > 0:
        raise InvalidInputError(f"t must be positive, got {t}")
    if not 0 <= s <= t:
        raise InvalidInputError(f"s = {s} outside [0, {t}]")
    x0 = as_vector(spec, x0, "x0")
    x = as_vector(spec, x, "x")
    if s == 0:
        return x0.copy()
    if s == t:
        return x.copy()
    m = spec.mass
    return x0 + (x - x0) * s / t - k * t * s / (2 * m) + k * s**2 / (2 * m)


def analytic_initial_velocity_linear(spec: ModelSpec, x0, x, t) -> np.ndarray:
    """Launch velocity (x - x0)/t - K t / 2m of the classical path."""
    k = _closed_form_force(spec)
    if not t > 0:
        raise InvalidInputError(f"t must be positive, got {t}")
    x0 = as_vector(spec, x0, "x0")
    x = as_vector(spec, x, "x")
    return (x - x0) / t - k * t / (2 * spec.mass)


def analytic_hj_action_linear(spec: ModelSpec, v0, x, t) -> float:
    """Field action generated by the initial action m v0.x in a uniform field K:

        m v0.x - m|v0|^2 t/2 + K.x t - K.v0 t^2/2 - |K|^2 t^3 / 6m
    """
    k = _closed_form_force(spec)
    if t < 0:
        raise InvalidInputError(f"t must be non-negative, got {t}")
    v0 = as_vector(spec, v0, "v0")
    x = as_vector(spec, x, "x")
    m = spec.mass
    if t == 0:
        return m * float(np.dot(v0, x))
    return (
        m * float(np.dot(v0, x))
        - 0.5 * m * float(np.dot(v0, v0)) * t
        + float(np.dot(k, x)) * t
        - 0.5 * float(np.dot(k, v0)) * t**2
        - float(np.dot(k, k)) * t**3 / (6 * m)
    )
