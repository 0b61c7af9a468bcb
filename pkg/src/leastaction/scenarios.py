"""Declarative scenarios: JSON configs in, CSV/JSON artifacts out.

A config looks like::

    {
      "name": "fig1",
      "mode": "el",
      "model": {"mass": 1.0, "dimension": 1, "potential": {"kind": "linear", "k": [2.0]}},
      "params": {"x0": [0.0], "x": [1.0], "t": 1.0},
      "output": "out/fig1"
    }

Loading fills every mode parameter with its default, so a loaded config
serialises back to a complete, self-describing document.
"""
from __future__ import annotations

import copy
import itertools
import json
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import (
    DivergenceError,
    InvalidInputError,
    NoConvergenceError,
    PartialTrajectoryError,
    UnsupportedOracleError,
)
from .euler_lagrange import el_action_direct, solve_bvp_shooting, trajectory_family
from .hj_pde import SpatialGrid, sample_initial_action, solve_hj_pde
from .hopf_lax import (
    LinearForm,
    SingularAt,
    Tabulated,
    classical_action,
    classical_path,
    hj_action_hopf_lax,
    hj_action_nested,
)
from .model import (
    Free,
    Harmonic,
    Linear,
    ModelSpec,
    analytic_el_action_linear,
    analytic_hj_action_linear,
    analytic_initial_velocity_linear,
)
from .pilot import analytic_view, field_view, integrate_pilot_trajectory, velocity_field

MODES = ("el", "hopf-lax", "pde", "pilot", "compare")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2

NUMERICAL_ERRORS = (NoConvergenceError, DivergenceError, PartialTrajectoryError)

# per-route agreement expected with an exact value; a pair uses the looser of the two
ROUTE_TOLERANCES = {
    "analytic_hj": 0.0,
    "analytic_el": 0.0,
    "hopf_lax": 1e-8,
    "shooting": 1e-6,
    "nested": 5e-3,
    "pde": 5e-2,
}


class ConfigError(InvalidInputError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def fmt(v: float) -> str:
    return format(float(v), ".17g")


# ---------------------------------------------------------------- config


_DEFAULTS: dict[str, dict[str, Any]] = {
    "el": {
        "n_steps": 4096,
        "tol": 1e-10,
        "n_segments": 256,
        "amplitudes": [-0.2, -0.1, 0.1, 0.2, 0.3],
        "csv_samples": 64,
    },
    "hopf-lax": {
        "coarse_n": 201,
        "initial_points": [],
        "csv_samples": 64,
    },
    "pde": {
        "cfl": 0.25,
        "cap": 1e4,
        "snapshot_times": None,
    },
    "pilot": {
        "source": "analytic",
        "t0": 0.0,
        "dt": None,
        "start_points": [],
        "probe_times": [],
        "probe_xs": [],
        "grid": {"lo": -8.0, "hi": 8.0, "n": 513},
        "cfl": 0.25,
        "n_snapshots": 21,
        "csv_samples": 64,
    },
    "compare": {
        "coarse_n": 201,
        "nested_coarse_n": 41,
        "n_segments": 256,
        "n_steps": 4096,
        "grid": {"lo": -8.0, "hi": 8.0, "n": 1025},
        "cfl": 0.25,
        "cap": 1e4,
        "tolerances": {},
        "mandatory_routes": [],
        "record_timings": False,
    },
}

_REQUIRED = {
    "el": ("x0", "x", "t"),
    "hopf-lax": ("s0", "x", "t"),
    "pde": ("s0", "grid", "t_final"),
    "pilot": ("v0", "t1"),
    "compare": ("s0", "probes"),
}


def _vector(value, dim, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(where, f"expected a list of {dim} numbers")
    try:
        out = [float(c) for c in value]
    except (TypeError, ValueError):
        raise ConfigError(where, "entries must be numbers") from None
    if not all(math.isfinite(c) for c in out):
        raise ConfigError(where, "entries must be finite")
    return out


def _positive(value, where, allow_zero=False):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(where, "expected a number") from None
    if not (v >= 0 if allow_zero else v > 0) or not math.isfinite(v):
        raise ConfigError(where, "must be positive" if not allow_zero else "must be non-negative")
    return v


def _int(value, where, minimum):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(where, "expected an integer")
    if value < minimum:
        raise ConfigError(where, f"must be at least {minimum}")
    return int(value)


def _model_from_dict(d) -> ModelSpec:
    if not isinstance(d, dict):
        raise ConfigError("model", "expected an object")
    mass = _positive(d.get("mass", 1.0), "model.mass")
    pot = d.get("potential", {"kind": "free"})
    if not isinstance(pot, dict):
        raise ConfigError("model.potential", "expected an object")
    kind = pot.get("kind", "free")
    if kind == "linear":
        k = pot.get("k")
        dim = d.get("dimension", len(k) if isinstance(k, list) else 1)
        dim = _int(dim, "model.dimension", 1)
        potential = Linear(tuple(_vector(k, dim, "model.potential.k")))
    elif kind == "free":
        dim = _int(d.get("dimension", 1), "model.dimension", 1)
        potential = Free()
    elif kind == "harmonic":
        dim = _int(d.get("dimension", 1), "model.dimension", 1)
        potential = Harmonic(_positive(pot.get("omega"), "model.potential.omega"))
    else:
        raise ConfigError("model.potential.kind", f"unknown potential {kind!r}")
    try:
        return ModelSpec(mass=mass, dimension=dim, potential=potential)
    except InvalidInputError as exc:
        raise ConfigError("model", str(exc)) from None


def model_to_dict(spec: ModelSpec) -> dict:
    pot = spec.potential
    if isinstance(pot, Linear):
        p = {"kind": "linear", "k": list(pot.k)}
    elif isinstance(pot, Harmonic):
        p = {"kind": "harmonic", "omega": pot.omega}
    else:
        p = {"kind": "free"}
    return {"mass": spec.mass, "dimension": spec.dimension, "potential": p}


def _s0_params(d, dim, where):
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    kind = d.get("kind")
    if kind == "linear":
        return {"kind": "linear", "v0": _vector(d.get("v0"), dim, f"{where}.v0")}
    if kind == "singular":
        return {"kind": "singular", "x0": _vector(d.get("x0"), dim, f"{where}.x0")}
    if kind == "tabulated":
        grid = d.get("grid")
        values = d.get("values")
        if dim != 1:
            raise ConfigError(where, "tabulated initial actions are supported in 1-d configs only")
        if isinstance(grid, list) and grid and not isinstance(grid[0], list):
            grid = [grid]
        if not isinstance(grid, list) or len(grid) != 1 or not isinstance(values, list):
            raise ConfigError(where, "tabulated needs grid [[...]] and values [...]")
        axis = [float(c) for c in grid[0]]
        vals = [float(c) for c in values]
        try:
            Tabulated((np.array(axis),), np.array(vals))
        except InvalidInputError as exc:
            raise ConfigError(where, str(exc)) from None
        return {"kind": "tabulated", "grid": [axis], "values": vals}
    raise ConfigError(f"{where}.kind", f"expected linear, singular or tabulated, got {kind!r}")


def initial_action_from_params(d, spec: ModelSpec):
    if d["kind"] == "linear":
        return LinearForm(tuple(d["v0"]), spec.mass)
    if d["kind"] == "singular":
        return SingularAt(tuple(d["x0"]))
    return Tabulated(tuple(np.array(a) for a in d["grid"]), np.array(d["values"]))


def _grid_params(d, where):
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object with lo, hi, n")
    lo = float(d.get("lo", -8.0))
    hi = float(d.get("hi", 8.0))
    n = _int(d.get("n", 513), f"{where}.n", 16)
    if not lo < hi:
        raise ConfigError(where, "needs lo < hi")
    return {"lo": lo, "hi": hi, "n": n}


def _box(value, dim, where):
    if value is None:
        return [[-10.0, 10.0] for _ in range(dim)]
    if isinstance(value, list) and len(value) == 2 and not isinstance(value[0], list):
        value = [value]
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(where, f"expected {dim} [lo, hi] intervals")
    out = []
    for j, iv in enumerate(value):
        lo, hi = _vector(iv, 2, f"{where}[{j}]")
        if not lo < hi:
            raise ConfigError(f"{where}[{j}]", "needs lo < hi")
        out.append([lo, hi])
    return out


def _normalise_params(mode, raw, spec: ModelSpec):
    if not isinstance(raw, dict):
        raise ConfigError("params", "expected an object")
    dim = spec.dimension
    for key in _REQUIRED[mode]:
        if key not in raw:
            raise ConfigError(f"params.{key}", "required")
    p = copy.deepcopy(_DEFAULTS[mode])
    unknown = set(raw) - set(p) - set(_REQUIRED[mode]) - {"search_box", "tol"}
    if unknown:
        raise ConfigError("params", f"unknown keys {sorted(unknown)}")
    p.update(copy.deepcopy(raw))

    if mode == "el":
        p["x0"] = _vector(p["x0"], dim, "params.x0")
        p["x"] = _vector(p["x"], dim, "params.x")
        p["t"] = _positive(p["t"], "params.t")
        p["n_steps"] = _int(p["n_steps"], "params.n_steps", 2)
        p["n_segments"] = _int(p["n_segments"], "params.n_segments", 2)
        p["tol"] = _positive(p["tol"], "params.tol")
        p["csv_samples"] = _int(p["csv_samples"], "params.csv_samples", 2)
        if not isinstance(p["amplitudes"], list):
            raise ConfigError("params.amplitudes", "expected a list")
        p["amplitudes"] = [float(a) for a in p["amplitudes"]]
    elif mode == "hopf-lax":
        p["s0"] = _s0_params(p["s0"], dim, "params.s0")
        p["x"] = _vector(p["x"], dim, "params.x")
        p["t"] = _positive(p["t"], "params.t")
        p["search_box"] = _box(p.get("search_box"), dim, "params.search_box")
        p["coarse_n"] = _int(p["coarse_n"], "params.coarse_n", 3)
        p["csv_samples"] = _int(p["csv_samples"], "params.csv_samples", 2)
        if not isinstance(p["initial_points"], list):
            raise ConfigError("params.initial_points", "expected a list")
        p["initial_points"] = [
            _vector(y, dim, f"params.initial_points[{i}]") for i, y in enumerate(p["initial_points"])
        ]
    elif mode == "pde":
        if dim != 1:
            raise ConfigError("model.dimension", "the grid solver is one-dimensional")
        p["s0"] = _s0_params(p["s0"], dim, "params.s0")
        p["grid"] = _grid_params(p["grid"], "params.grid")
        p["t_final"] = _positive(p["t_final"], "params.t_final")
        p["cfl"] = _positive(p["cfl"], "params.cfl")
        if p["cfl"] > 1:
            raise ConfigError("params.cfl", "must lie in (0, 1]")
        p["cap"] = _positive(p["cap"], "params.cap")
        if p["snapshot_times"] is None:
            p["snapshot_times"] = [0.0, p["t_final"]]
        p["snapshot_times"] = sorted(
            _positive(s, f"params.snapshot_times[{i}]", allow_zero=True)
            for i, s in enumerate(p["snapshot_times"])
        )
        if any(s > p["t_final"] for s in p["snapshot_times"]):
            raise ConfigError("params.snapshot_times", "must lie in [0, t_final]")
    elif mode == "pilot":
        p["v0"] = _vector(p["v0"], dim, "params.v0")
        p["t0"] = _positive(p["t0"], "params.t0", allow_zero=True)
        p["t1"] = _positive(p["t1"], "params.t1")
        if not p["t1"] > p["t0"]:
            raise ConfigError("params.t1", "must exceed t0")
        if p["dt"] is not None:
            p["dt"] = _positive(p["dt"], "params.dt")
        if p["source"] not in ("analytic", "pde"):
            raise ConfigError("params.source", "expected 'analytic' or 'pde'")
        if p["source"] == "pde" and dim != 1:
            raise ConfigError("params.source", "grid-derived fields are one-dimensional")
        if not spec.has_closed_form and p["source"] == "analytic":
            raise ConfigError("model.potential", "analytic field needs a free or linear potential")
        p["grid"] = _grid_params(p["grid"], "params.grid")
        p["cfl"] = _positive(p["cfl"], "params.cfl")
        p["n_snapshots"] = _int(p["n_snapshots"], "params.n_snapshots", 2)
        p["csv_samples"] = _int(p["csv_samples"], "params.csv_samples", 2)
        p["start_points"] = [
            _vector(y, dim, f"params.start_points[{i}]") for i, y in enumerate(p["start_points"])
        ]
        p["probe_xs"] = [_vector(y, dim, f"params.probe_xs[{i}]") for i, y in enumerate(p["probe_xs"])]
        p["probe_times"] = [
            _positive(s, f"params.probe_times[{i}]", allow_zero=True) for i, s in enumerate(p["probe_times"])
        ]
    elif mode == "compare":
        if not spec.has_closed_form:
            raise ConfigError("model.potential", "comparison needs a free or linear potential")
        p["s0"] = _s0_params(p["s0"], dim, "params.s0")
        probes = p["probes"]
        if not isinstance(probes, list):
            raise ConfigError("params.probes", "expected a list of {x, t}")
        norm = []
        for i, pr in enumerate(probes):
            if not isinstance(pr, dict):
                raise ConfigError(f"params.probes[{i}]", "expected an object with x and t")
            t = pr.get("t")
            if isinstance(t, (int, float)) and not isinstance(t, bool) and t <= 0:
                raise ConfigError(f"params.probes[{i}].t", "probe times must be positive")
            norm.append({
                "x": _vector(pr.get("x"), dim, f"params.probes[{i}].x"),
                "t": _positive(t, f"params.probes[{i}].t"),
            })
        p["probes"] = norm
        p["search_box"] = _box(p.get("search_box"), dim, "params.search_box")
        p["grid"] = _grid_params(p["grid"], "params.grid")
        for key in ("coarse_n", "nested_coarse_n"):
            p[key] = _int(p[key], f"params.{key}", 3)
        p["n_segments"] = _int(p["n_segments"], "params.n_segments", 2)
        p["n_steps"] = _int(p["n_steps"], "params.n_steps", 2)
        p["cfl"] = _positive(p["cfl"], "params.cfl")
        p["cap"] = _positive(p["cap"], "params.cap")
        if not isinstance(p["tolerances"], dict):
            raise ConfigError("params.tolerances", "expected an object")
        p["tolerances"] = {
            str(k): _positive(v, f"params.tolerances.{k}") for k, v in sorted(p["tolerances"].items())
        }
        p["mandatory_routes"] = [str(r) for r in p["mandatory_routes"]]
        unknown_routes = set(p["mandatory_routes"]) - set(ROUTE_TOLERANCES)
        if unknown_routes:
            raise ConfigError("params.mandatory_routes", f"unknown routes {sorted(unknown_routes)}")
        p["record_timings"] = bool(p["record_timings"])
    if "tol" in p:
        p["tol"] = _positive(p["tol"], "params.tol")
    if mode in ("hopf-lax", "compare") and p["s0"]["kind"] == "tabulated" and dim != 1:
        raise ConfigError("params.s0", "tabulated initial actions are 1-d only")
    return p


@dataclass
class ScenarioConfig:
    name: str
    mode: str
    model: ModelSpec
    params: dict = field(default_factory=dict)
    output: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "expected a JSON object")
        unknown = set(d) - {"name", "mode", "model", "params", "output"}
        if unknown:
            raise ConfigError("<root>", f"unknown keys {sorted(unknown)}")
        name = d.get("name")
        if not isinstance(name, str) or not name.strip():
            raise ConfigError("name", "must be a nonempty string")
        mode = d.get("mode")
        if mode not in MODES:
            raise ConfigError("mode", f"expected one of {', '.join(MODES)}, got {mode!r}")
        spec = _model_from_dict(d.get("model", {}))
        params = _normalise_params(mode, d.get("params", {}), spec)
        output = d.get("output")
        if output is not None and not isinstance(output, str):
            raise ConfigError("output", "must be a path string")
        return cls(name, mode, spec, params, output)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "mode": self.mode,
            "model": model_to_dict(self.model),
            "params": copy.deepcopy(self.params),
        }
        if self.output is not None:
            d["output"] = self.output
        return d

    def output_dir(self, root: Optional[Path] = None) -> Path:
        if root is not None:
            return Path(root) / self.name
        return Path(self.output) if self.output else Path("out") / self.name


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return ScenarioConfig.from_dict(raw)


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- artifact writers


def write_csv(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else (str(c) if isinstance(c, int) else fmt(c)) for c in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else None
    return obj


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(_json_ready(obj), indent=2, sort_keys=True) + "\n")
    return path


def _space_cols(prefix, dim):
    return [prefix] if dim == 1 else [f"{prefix}_{j + 1}" for j in range(dim)]


def _subsample(n_points, n_out):
    if n_points <= n_out + 1:
        return np.arange(n_points)
    return np.unique(np.round(np.linspace(0, n_points - 1, n_out + 1)).astype(int))


# ---------------------------------------------------------------- figure emitters


def emit_fig1(cfg: ScenarioConfig, out: Path) -> tuple[list[Path], dict]:
    """Optimal path and half-sine perturbations between the configured endpoints."""
    p, spec = cfg.params, cfg.model
    dim = spec.dimension
    sol = solve_bvp_shooting(spec, p["x0"], p["x"], p["t"], n_steps=p["n_steps"], tol=p["tol"])
    family = trajectory_family(spec, p["x0"], p["x"], p["t"], p["amplitudes"], n_steps=p["n_steps"])
    amps = [0.0] + list(p["amplitudes"])
    rows = []
    for tid, ((traj, action), amp) in enumerate(zip(family, amps)):
        for i in _subsample(len(traj.times), p["csv_samples"]):
            rows.append([tid, amp, traj.times[i], *traj.positions[i], *traj.velocities[i], action])
    header = ["trajectory_id", "amplitude", "s", *_space_cols("x", dim), *_space_cols("v", dim), "action"]
    csv_path = write_csv(out / "fig1_trajectories.csv", header, rows)

    summary = {
        "shooting_action": sol.action,
        "initial_velocity": sol.initial_velocity,
        "residual": sol.residual,
        "newton_iterations": sol.iterations,
        "family_actions": [a for _, a in family],
        "amplitudes": amps,
    }
    direct = el_action_direct(spec, p["x0"], p["x"], p["t"], n_segments=p["n_segments"])
    summary["direct_action"] = direct.action
    summary["direct_stalled"] = direct.stalled
    if spec.has_closed_form:
        summary["analytic_action"] = analytic_el_action_linear(spec, p["x0"], p["x"], p["t"])
        summary["analytic_initial_velocity"] = analytic_initial_velocity_linear(
            spec, p["x0"], p["x"], p["t"]
        )
    json_path = write_json(out / "el_summary.json", summary)
    return [csv_path, json_path], summary


def emit_fig2(cfg: ScenarioConfig, out: Path) -> tuple[list[Path], dict]:
    """Classical paths from each configured launch point to the common (x, t)."""
    p, spec = cfg.params, cfg.model
    dim = spec.dimension
    s0 = initial_action_from_params(p["s0"], spec)
    t = p["t"]
    rows, summary_rows = [], []
    for pid, y in enumerate(p["initial_points"]):
        path = classical_path(spec, y, p["x"], t, n_samples=p["csv_samples"])
        v0 = path.velocities[0]
        if spec.has_closed_form:
            v0 = analytic_initial_velocity_linear(spec, y, p["x"], t)
        s_cl = classical_action(spec, y, p["x"], t)
        g = s0.value(np.array(y)) + s_cl
        summary_rows.append([pid, *y, *v0, s_cl, g])
        for i in range(len(path.times)):
            rows.append([pid, *y, *v0, path.times[i], *path.positions[i]])
    header = ["path_id", *_space_cols("x0", dim), *_space_cols("v0", dim), "s", *_space_cols("x", dim)]
    paths_csv = write_csv(out / "fig2_paths.csv", header, rows)
    sum_header = ["path_id", *_space_cols("x0", dim), *_space_cols("v0", dim), "s_cl", "s0_plus_s_cl"]
    sum_csv = write_csv(out / "fig2_summary.csv", sum_header, summary_rows)
    return [paths_csv, sum_csv], {"paths": len(p["initial_points"])}


def _pilot_view(cfg: ScenarioConfig):
    p, spec = cfg.params, cfg.model
    if p["source"] == "analytic":
        return analytic_view(spec, p["v0"])
    g = p["grid"]
    grid = SpatialGrid(g["lo"], g["hi"], g["n"])
    s0 = LinearForm(tuple(p["v0"]), spec.mass)
    times = np.linspace(0.0, p["t1"], p["n_snapshots"])
    field = solve_hj_pde(spec, grid, sample_initial_action(s0, grid), p["t1"], cfl=p["cfl"], snapshot_times=times)
    return field_view(field)


def emit_fig3(cfg: ScenarioConfig, out: Path) -> tuple[list[Path], dict]:
    """Velocity-field probe table and trajectories piloted by the field."""
    p, spec = cfg.params, cfg.model
    dim = spec.dimension
    view = _pilot_view(cfg)
    probe_rows = []
    for t in p["probe_times"]:
        for x in p["probe_xs"]:
            probe_rows.append([t, *x, *velocity_field(view, x, t)])
    probe_csv = write_csv(
        out / "fig3_field.csv", ["t", *_space_cols("x", dim), *_space_cols("v", dim)], probe_rows
    )
    traj_rows = []
    endpoints = []
    for tid, x_start in enumerate(p["start_points"]):
        traj = integrate_pilot_trajectory(view, x_start, p["t0"], p["t1"], p["dt"])
        endpoints.append(traj.positions[-1])
        for i in _subsample(len(traj.times), p["csv_samples"]):
            traj_rows.append([tid, traj.absolute_times[i], *traj.positions[i], *traj.velocities[i]])
    traj_csv = write_csv(
        out / "fig3_trajectories.csv",
        ["trajectory_id", "s", *_space_cols("x", dim), *_space_cols("v", dim)],
        traj_rows,
    )
    return [probe_csv, traj_csv], {"endpoints": endpoints}


FIGURE_EMITTERS = {"el": emit_fig1, "hopf-lax": emit_fig2, "pilot": emit_fig3}


def emit_figure_data(cfg: ScenarioConfig, root: Optional[Path] = None) -> list[Path]:
    if cfg.mode not in FIGURE_EMITTERS:
        raise ConfigError("mode", f"no figure data for mode {cfg.mode!r}")
    paths, _ = FIGURE_EMITTERS[cfg.mode](cfg, cfg.output_dir(root))
    return paths


# ---------------------------------------------------------------- comparison


@dataclass
class ComparisonReport:
    probes: list
    routes: list
    values: dict
    failures: dict
    pairs: list
    runtimes: dict

    @property
    def passed(self) -> bool:
        return all(pr["passed"] for pr in self.pairs)

    def to_dict(self, record_timings=False) -> dict:
        d = {
            "probes": self.probes,
            "routes": self.routes,
            "values": self.values,
            "failures": self.failures,
            "pairs": self.pairs,
            "passed": self.passed,
        }
        if record_timings:
            d["runtimes_s"] = self.runtimes
        return d


def _routes_for(s0_kind):
    if s0_kind == "linear":
        return ["analytic_hj", "hopf_lax", "nested", "pde"]
    if s0_kind == "singular":
        return ["analytic_el", "shooting", "hopf_lax", "nested", "pde"]
    return ["hopf_lax", "nested", "pde"]


def pair_tolerance(a, b, overrides):
    for key in (f"{a}~{b}", f"{b}~{a}"):
        if key in overrides:
            return overrides[key]
    return max(ROUTE_TOLERANCES[a], ROUTE_TOLERANCES[b])


def compare_actions(cfg: ScenarioConfig) -> ComparisonReport:
    """Field action at every probe by each available route, with pairwise deviations."""
    if cfg.mode != "compare":
        raise ConfigError("mode", "compare_actions needs a compare config")
    p, spec = cfg.params, cfg.model
    s0_desc = p["s0"]
    s0 = initial_action_from_params(s0_desc, spec)
    probes = p["probes"]
    routes = _routes_for(s0_desc["kind"])
    if spec.dimension != 1:
        routes = [r for r in routes if r != "pde"]
    values = {r: [None] * len(probes) for r in routes}
    failures: dict[str, str] = {}
    runtimes: dict[str, float] = {}

    def run_route(name, fn):
        start = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fn()
        except (InvalidInputError, UnsupportedOracleError, *NUMERICAL_ERRORS) as exc:
            failures[name] = f"{type(exc).__name__}: {exc}"
            values[name] = [None] * len(probes)
        runtimes[name] = time.perf_counter() - start

    def pointwise(name, f):
        def body():
            for i, pr in enumerate(probes):
                values[name][i] = float(f(pr["x"], pr["t"]))
        return body

    for name in routes:
        if name == "analytic_hj":
            fn = pointwise(name, lambda x, t: analytic_hj_action_linear(spec, s0_desc["v0"], x, t))
        elif name == "analytic_el":
            fn = pointwise(name, lambda x, t: analytic_el_action_linear(spec, s0_desc["x0"], x, t))
        elif name == "shooting":
            fn = pointwise(
                name, lambda x, t: solve_bvp_shooting(spec, s0_desc["x0"], x, t, n_steps=p["n_steps"]).action
            )
        elif name == "hopf_lax":
            fn = pointwise(
                name, lambda x, t: hj_action_hopf_lax(spec, s0, x, t, p["search_box"], p["coarse_n"]).value
            )
        elif name == "nested":
            fn = pointwise(
                name,
                lambda x, t: hj_action_nested(
                    spec, s0, x, t, p["search_box"], p["nested_coarse_n"], p["n_segments"]
                ),
            )
        else:
            def fn(name=name):
                g = p["grid"]
                grid = SpatialGrid(g["lo"], g["hi"], g["n"])
                samples = sample_initial_action(s0, grid, cap=p["cap"], mass=spec.mass)
                times = sorted({pr["t"] for pr in probes})
                field = solve_hj_pde(spec, grid, samples, max(times), cfl=p["cfl"], snapshot_times=times)
                for i, pr in enumerate(probes):
                    values[name][i] = field.sample(pr["x"][0], pr["t"])
        run_route(name, fn)

    pairs = []
    for a, b in itertools.combinations(routes, 2):
        tol = pair_tolerance(a, b, p["tolerances"])
        if a in failures or b in failures:
            pairs.append({"a": a, "b": b, "tolerance": tol, "diffs": None, "max_diff": None, "passed": False})
            continue
        diffs = [abs(va - vb) for va, vb in zip(values[a], values[b])]
        max_diff = max(diffs) if diffs else 0.0
        pairs.append({
            "a": a,
            "b": b,
            "tolerance": tol,
            "diffs": diffs,
            "max_diff": max_diff,
            "passed": bool(max_diff <= tol),
        })
    return ComparisonReport(probes, routes, values, failures, pairs, runtimes)


# ---------------------------------------------------------------- dispatch


@dataclass
class ScenarioResult:
    name: str
    mode: str
    status: int
    artifacts: list
    message: str = ""


def _run_pde(cfg: ScenarioConfig, out: Path):
    p, spec = cfg.params, cfg.model
    g = p["grid"]
    grid = SpatialGrid(g["lo"], g["hi"], g["n"])
    s0 = initial_action_from_params(p["s0"], spec)
    samples = sample_initial_action(s0, grid, cap=p["cap"], mass=spec.mass)
    field = solve_hj_pde(spec, grid, samples, p["t_final"], cfl=p["cfl"], snapshot_times=p["snapshot_times"])
    x = grid.points
    rows = [[xi, t, s] for t, snap in zip(field.times, field.values) for xi, s in zip(x, snap)]
    csv_path = write_csv(out / "pde_field.csv", ["x", "t", "S"], rows)
    json_path = write_json(out / "pde_summary.json", {
        "steps": field.steps,
        "times": field.times,
        "dx": grid.dx,
    })
    return [csv_path, json_path]


def _run_hopf_lax(cfg: ScenarioConfig, out: Path):
    p, spec = cfg.params, cfg.model
    s0 = initial_action_from_params(p["s0"], spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = hj_action_hopf_lax(spec, s0, p["x"], p["t"], p["search_box"], p["coarse_n"])
    summary = {
        "value": res.value,
        "argmin_x0": res.argmin_x0,
        "candidates_evaluated": res.candidates_evaluated,
        "on_boundary": res.on_boundary,
    }
    if isinstance(s0, LinearForm) and spec.has_closed_form:
        summary["analytic_value"] = analytic_hj_action_linear(spec, s0.v0, p["x"], p["t"])
    if isinstance(s0, SingularAt) and spec.has_closed_form:
        summary["analytic_value"] = analytic_el_action_linear(spec, s0.x0, p["x"], p["t"])
    paths, _ = emit_fig2(cfg, out)
    return [write_json(out / "hopf_lax.json", summary), *paths]


def run_scenario(cfg: ScenarioConfig, root: Optional[Path] = None, figures_only=False) -> ScenarioResult:
    """Run one validated scenario; never raises for numerical failures."""
    out = cfg.output_dir(root)
    try:
        if figures_only:
            artifacts = emit_figure_data(cfg, root)
        elif cfg.mode == "el":
            artifacts, _ = emit_fig1(cfg, out)
        elif cfg.mode == "hopf-lax":
            artifacts = _run_hopf_lax(cfg, out)
        elif cfg.mode == "pde":
            artifacts = _run_pde(cfg, out)
        elif cfg.mode == "pilot":
            artifacts, _ = emit_fig3(cfg, out)
        else:
            report = compare_actions(cfg)
            path = write_json(out / "comparison.json", report.to_dict(cfg.params["record_timings"]))
            artifacts = [path]
            missing = [r for r in cfg.params["mandatory_routes"] if r in report.failures]
            if missing:
                return ScenarioResult(cfg.name, cfg.mode, EXIT_NUMERICAL, artifacts,
                                      f"mandatory route(s) failed: {', '.join(missing)}")
            if not report.passed:
                return ScenarioResult(cfg.name, cfg.mode, EXIT_OK, artifacts,
                                      "some route pairs exceeded their tolerance")
    except NUMERICAL_ERRORS as exc:
        return ScenarioResult(cfg.name, cfg.mode, EXIT_NUMERICAL, [], f"{type(exc).__name__}: {exc}")
    except (InvalidInputError, UnsupportedOracleError) as exc:
        return ScenarioResult(cfg.name, cfg.mode, EXIT_INVALID, [], f"{type(exc).__name__}: {exc}")
    return ScenarioResult(cfg.name, cfg.mode, EXIT_OK, [str(a) for a in artifacts])
