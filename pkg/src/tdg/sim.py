"""Closed-loop simulation of the target-defense game.

Both players are velocity integrators, so explicit Euler is exact over any
interval with constant headings.  Terminal events are detected continuously
inside each step (separation is quadratic in time, target entry reduces to a
root along the segment), which rules out tunneling regardless of the step
size; entry into the target is checked before capture so simultaneous
arrival goes to the evader.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

from .apollonius import GameState, SpeedRatio
from .degree_capture import capture_strategies
from .degree_escape import DcSolverConfig, solve_escape_point
from .errors import GameError, SolverFailure
from .geometry import ConvexTarget, Point2, _first_quadratic_root, dist
from .kind import Classification, GameSpace, barrier_value, classify

# Steps between full multi-start escape re-solves; in between the previous
# escape point warm-starts the solver.
FULL_RESOLVE_PERIOD = 16


@dataclass(frozen=True, slots=True)
class Optimal:
    """Play the saddle-point feedback strategy, re-solved every step."""


@dataclass(frozen=True, slots=True)
class FixedHeading:
    heading: float  # radians


@dataclass(frozen=True, slots=True)
class Custom:
    rule: Callable[[GameState], Point2]  # must return a unit vector


Strategy = Union[Optimal, FixedHeading, Custom]


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    capture_radius: float = 1e-3
    max_time: float = 100.0
    strategy_mode_pursuer: Strategy = field(default_factory=Optimal)
    strategy_mode_evader: Strategy = field(default_factory=Optimal)
    solver: DcSolverConfig | None = None

    def __post_init__(self):
        if self.dt <= 0.0 or self.max_time <= 0.0:
            raise ValueError("dt and max_time must be positive")
        if self.capture_radius <= 1e-11:
            raise ValueError("capture_radius must exceed the degeneracy threshold")


@dataclass(frozen=True)
class Captured:
    time: float
    point: Point2


@dataclass(frozen=True)
class Escaped:
    time: float
    point: Point2
    separation: float


@dataclass(frozen=True)
class Timeout:
    time: float


Outcome = Union[Captured, Escaped, Timeout]


@dataclass(frozen=True)
class TrajectoryRecord:
    """Time-stamped trajectory with controls and termination metadata.

    ``controls[k]`` is the (pursuer, evader) heading pair applied over
    [times[k], times[k+1]].
    """

    times: list[float]
    pursuer_path: list[Point2]
    evader_path: list[Point2]
    controls: list[tuple[Point2, Point2]]
    outcome: Outcome
    initial_classification: Classification
    predicted_value: float


def step(state: GameState, controls: tuple[Point2, Point2], dt: float,
         ratio: SpeedRatio) -> GameState:
    """One exact Euler update: each player advances speed * dt along its heading."""
    up, ue = controls
    vp = ratio.v_pursuer
    ve = ratio.v_evader
    return GameState(
        pursuer=Point2(state.pursuer.x + vp * dt * up.x, state.pursuer.y + vp * dt * up.y),
        evader=Point2(state.evader.x + ve * dt * ue.x, state.evader.y + ve * dt * ue.y),
    )


def _capture_entry_time(state: GameState, up: Point2, ue: Point2, ratio: SpeedRatio,
                        capture_radius: float, horizon: float) -> float | None:
    """Earliest t in (0, horizon] where separation falls to the capture radius."""
    rx = state.pursuer.x - state.evader.x
    ry = state.pursuer.y - state.evader.y
    wx = ratio.v_pursuer * up.x - ratio.v_evader * ue.x
    wy = ratio.v_pursuer * up.y - ratio.v_evader * ue.y
    a = wx * wx + wy * wy
    b = 2.0 * (rx * wx + ry * wy)
    c = rx * rx + ry * ry - capture_radius * capture_radius
    if c <= 0.0:
        return 0.0
    return _first_quadratic_root(a, b, c, horizon)


def _heading(strategy: Strategy, state: GameState, optimal: Point2 | None) -> Point2:
    if isinstance(strategy, Optimal):
        assert optimal is not None
        return optimal
    if isinstance(strategy, FixedHeading):
        return Point2(math.cos(strategy.heading), math.sin(strategy.heading))
    u = strategy.rule(state)
    n = math.hypot(u.x, u.y)
    if not (n > 0.0 and math.isfinite(n)):
        raise SolverFailure("custom strategy returned a non-normalizable heading")
    return Point2(u.x / n, u.y / n)


class _OptimalFeedback:
    """Per-run cache for the saddle-point feedback pair."""

    def __init__(self, target: ConvexTarget, ratio: SpeedRatio,
                 solver: DcSolverConfig | None):
        self.target = target
        self.ratio = ratio
        self.solver = solver
        self.last_escape_point: Point2 | None = None
        self.steps_since_full = 0

    def controls(self, state: GameState) -> tuple[Point2, Point2]:
        bval = barrier_value(state, self.target, self.ratio)
        if bval > 0.0:
            sol = capture_strategies(state, self.target, self.ratio)
            self.last_escape_point = None
            return sol.u_pursuer, sol.u_evader
        warm = self.last_escape_point if self.steps_since_full < FULL_RESOLVE_PERIOD else None
        esol = solve_escape_point(state, self.target, self.ratio, self.solver,
                                  warm_start=warm)
        self.steps_since_full = 0 if warm is None else self.steps_since_full + 1
        self.last_escape_point = esol.escape_point
        return esol.u_pursuer, esol.u_evader


def run(initial: GameState, target: ConvexTarget, ratio: SpeedRatio,
        config: SimConfig | None = None) -> TrajectoryRecord:
    """Simulate until a terminal manifold is hit or time runs out."""
    if config is None:
        config = SimConfig()
    if config.dt >= config.capture_radius / (ratio.v_pursuer + ratio.v_evader):
        warnings.warn(
            "dt exceeds capture_radius / (vP + vE); step-boundary sampling alone "
            "could tunnel (events are still caught by in-step detection)",
            RuntimeWarning, stacklevel=2)

    times = [0.0]
    pursuer_path = [initial.pursuer]
    evader_path = [initial.evader]
    controls: list[tuple[Point2, Point2]] = []

    def partial_record(outcome: Outcome) -> TrajectoryRecord:
        return TrajectoryRecord(times, pursuer_path, evader_path, controls,
                                outcome, classification, predicted)

    classification = classify(initial, target, ratio)
    try:
        if classification.space is GameSpace.CAPTURE:
            predicted = classification.barrier_value
        else:
            predicted = solve_escape_point(initial, target, ratio, config.solver).value
    except GameError as exc:
        raise SolverFailure(
            f"initial strategy solve failed: {exc}",
            record=TrajectoryRecord(times, pursuer_path, evader_path, controls,
                                    Timeout(0.0), classification, math.nan)) from exc

    state = initial
    # Terminal manifolds at t = 0: target membership first.
    if target.h(state.evader) <= 0.0:
        return partial_record(Escaped(0.0, state.evader, state.separation))
    if state.separation <= config.capture_radius:
        return partial_record(Captured(0.0, state.evader))

    needs_optimal = isinstance(config.strategy_mode_pursuer, Optimal) or \
        isinstance(config.strategy_mode_evader, Optimal)
    feedback = _OptimalFeedback(target, ratio, config.solver) if needs_optimal else None

    t = 0.0
    outcome: Outcome | None = None
    closing_speed = ratio.v_pursuer + ratio.v_evader
    # Refine the step once separation approaches the per-step relative motion,
    # otherwise stale headings make the pursuer overshoot and orbit instead of
    # closing the last stretch (the no-tunnel rule, applied adaptively).
    dt_floor = 0.25 * config.capture_radius / closing_speed
    while t < config.max_time - 1e-15:
        dt_step = min(config.dt, config.max_time - t)
        near = state.separation / (8.0 * closing_speed)
        if near < dt_step:
            dt_step = min(dt_step, max(near, dt_floor))
        try:
            opt_p = opt_e = None
            if feedback is not None:
                opt_p, opt_e = feedback.controls(state)
            up = _heading(config.strategy_mode_pursuer, state, opt_p)
            ue = _heading(config.strategy_mode_evader, state, opt_e)
        except SolverFailure:
            raise
        except GameError as exc:
            raise SolverFailure(f"strategy solve failed at t={t:.6f}: {exc}",
                                record=partial_record(Timeout(t))) from exc

        evader_velocity = Point2(ratio.v_evader * ue.x, ratio.v_evader * ue.y)
        tau_escape = target.boundary_entry_time(state.evader, evader_velocity, dt_step)
        tau_capture = _capture_entry_time(state, up, ue, ratio,
                                          config.capture_radius, dt_step)

        if tau_escape is not None and (tau_capture is None
                                       or tau_escape <= tau_capture + 1e-15):
            end = step(state, (up, ue), tau_escape, ratio)
            t += tau_escape
            times.append(t)
            pursuer_path.append(end.pursuer)
            evader_path.append(end.evader)
            controls.append((up, ue))
            outcome = Escaped(t, end.evader, end.separation)
            break
        if tau_capture is not None:
            end = step(state, (up, ue), tau_capture, ratio)
            t += tau_capture
            times.append(t)
            pursuer_path.append(end.pursuer)
            evader_path.append(end.evader)
            controls.append((up, ue))
            outcome = Captured(t, end.evader)
            break

        state = step(state, (up, ue), dt_step, ratio)
        t += dt_step
        times.append(t)
        pursuer_path.append(state.pursuer)
        evader_path.append(state.evader)
        controls.append((up, ue))

    if outcome is None:
        outcome = Timeout(t)
    return TrajectoryRecord(times, pursuer_path, evader_path, controls,
                            outcome, classification, predicted)


def capture_payoff(record: TrajectoryRecord, target: ConvexTarget) -> float:
    """Capture-game payoff of a finished run: terminal evader distance to the target.

    An escape counts as zero distance (the evader reached the set).
    """
    if isinstance(record.outcome, Captured):
        return target.distance(record.outcome.point)
    if isinstance(record.outcome, Escaped):
        return 0.0
    return target.distance(record.evader_path[-1])


def escape_payoff(record: TrajectoryRecord) -> float:
    """Escape-game payoff of a finished run: separation at target entry, else zero."""
    if isinstance(record.outcome, Escaped):
        return record.outcome.separation
    return 0.0
