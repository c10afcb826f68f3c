"""Scenario files: strict JSON schema for batch experiments.

Physics fields carry no silent defaults; unknown keys are rejected at every
nesting level so experiment inputs stay auditable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .apollonius import GameState, SpeedRatio
from .degree_escape import DcSolverConfig
from .errors import SchemaError
from .geometry import Circle, ConvexTarget, Ellipse, Point2
from .sim import FixedHeading, Optimal, SimConfig, Strategy


@dataclass(frozen=True)
class Scenario:
    target: ConvexTarget
    gamma: float
    v_pursuer: float
    pursuer: Point2
    evader: Point2
    sim: SimConfig
    solver: DcSolverConfig
    seed: int | None = None

    @property
    def ratio(self) -> SpeedRatio:
        return SpeedRatio(gamma=self.gamma, v_pursuer=self.v_pursuer)

    @property
    def state(self) -> GameState:
        return GameState(pursuer=self.pursuer, evader=self.evader)


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object", field=where)
    unknown = set(obj) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise SchemaError(f"unknown field '{name}' in {where}", field=name)
    missing = required - set(obj)
    if missing:
        name = sorted(missing)[0]
        raise SchemaError(f"missing required field '{name}' in {where}", field=name)


def _number(obj: dict, key: str, where: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"field '{key}' in {where} must be a number", field=key)
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(f"field '{key}' in {where} must be finite", field=key)
    return value


def _point(obj: dict, key: str, where: str) -> Point2:
    value = obj[key]
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise SchemaError(f"field '{key}' in {where} must be a [x, y] pair", field=key)
    x, y = float(value[0]), float(value[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise SchemaError(f"field '{key}' in {where} must be finite", field=key)
    return Point2(x, y)


def _parse_target(obj: dict) -> ConvexTarget:
    if not isinstance(obj, dict) or "shape" not in obj:
        raise SchemaError("target must be an object with a 'shape' field", field="shape")
    shape = obj["shape"]
    if shape == "circle":
        _require_keys(obj, {"shape", "center", "radius"}, {"shape", "center", "radius"},
                      "target")
        radius = _number(obj, "radius", "target")
        if radius <= 0.0:
            raise SchemaError("field 'radius' in target must be positive", field="radius")
        return Circle(center=_point(obj, "center", "target"), radius=radius)
    if shape == "ellipse":
        _require_keys(obj, {"shape", "center", "semi_axes", "rotation"},
                      {"shape", "center", "semi_axes"}, "target")
        axes = obj["semi_axes"]
        if (not isinstance(axes, (list, tuple)) or len(axes) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in axes)):
            raise SchemaError("field 'semi_axes' in target must be two numbers",
                              field="semi_axes")
        a, b = float(axes[0]), float(axes[1])
        if a <= 0.0 or b <= 0.0:
            raise SchemaError("field 'semi_axes' in target must be positive",
                              field="semi_axes")
        rotation = _number(obj, "rotation", "target") if "rotation" in obj else 0.0
        return Ellipse(center=_point(obj, "center", "target"), semi_axes=(a, b),
                       rotation=rotation)
    raise SchemaError(f"unsupported target shape '{shape}'", field="shape")


def _parse_strategy(value, key: str) -> Strategy:
    if value == "optimal":
        return Optimal()
    if isinstance(value, dict):
        _require_keys(value, {"fixed_heading"}, {"fixed_heading"}, f"sim.{key}")
        return FixedHeading(heading=_number(value, "fixed_heading", f"sim.{key}"))
    raise SchemaError(f"field '{key}' in sim must be 'optimal' or "
                      "{'fixed_heading': radians}", field=key)


def _parse_sim(obj: dict) -> SimConfig:
    allowed = {"dt", "capture_radius", "max_time",
               "strategy_mode_pursuer", "strategy_mode_evader"}
    _require_keys(obj, allowed, set(), "sim")
    kwargs = {}
    for key in ("dt", "capture_radius", "max_time"):
        if key in obj:
            value = _number(obj, key, "sim")
            if value <= 0.0:
                raise SchemaError(f"field '{key}' in sim must be positive", field=key)
            kwargs[key] = value
    for key in ("strategy_mode_pursuer", "strategy_mode_evader"):
        if key in obj:
            kwargs[key] = _parse_strategy(obj[key], key)
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError(f"invalid sim block: {exc}", field="sim") from exc


def _parse_solver(obj: dict) -> DcSolverConfig:
    allowed = {"max_outer_iterations", "objective_tolerance",
               "subproblem_tolerance", "multi_start_count"}
    _require_keys(obj, allowed, set(), "solver")
    kwargs = {}
    for key in ("max_outer_iterations", "multi_start_count"):
        if key in obj:
            value = obj[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise SchemaError(f"field '{key}' in solver must be an integer", field=key)
            kwargs[key] = value
    for key in ("objective_tolerance", "subproblem_tolerance"):
        if key in obj:
            kwargs[key] = _number(obj, key, "solver")
    try:
        return DcSolverConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError(f"invalid solver block: {exc}", field="solver") from exc


def parse_scenario(data: dict) -> Scenario:
    """Build a Scenario from decoded JSON, rejecting unknown or invalid fields."""
    allowed = {"target", "gamma", "v_pursuer", "pursuer", "evader", "sim", "solver", "seed"}
    required = {"target", "gamma", "v_pursuer", "pursuer", "evader"}
    _require_keys(data, allowed, required, "scenario")
    gamma = _number(data, "gamma", "scenario")
    if not 0.0 < gamma < 1.0:
        raise SchemaError(f"field 'gamma' must lie in (0, 1), got {gamma}", field="gamma")
    v_pursuer = _number(data, "v_pursuer", "scenario")
    if v_pursuer <= 0.0:
        raise SchemaError("field 'v_pursuer' must be positive", field="v_pursuer")
    seed = None
    if "seed" in data:
        raw = data["seed"]
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise SchemaError("field 'seed' must be an integer", field="seed")
        seed = raw
    try:
        target = _parse_target(data["target"])
        pursuer = _point(data, "pursuer", "scenario")
        evader = _point(data, "evader", "scenario")
        sim = _parse_sim(data["sim"]) if "sim" in data else SimConfig()
        solver = _parse_solver(data["solver"]) if "solver" in data else DcSolverConfig()
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return Scenario(target=target, gamma=gamma, v_pursuer=v_pursuer,
                    pursuer=pursuer, evader=evader, sim=sim, solver=solver, seed=seed)


def load_scenario(path: str | Path) -> Scenario:
    """Read and parse a scenario JSON file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"scenario file is not valid JSON: {exc}") from exc
    return parse_scenario(data)
