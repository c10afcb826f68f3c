"""Randomized verification sweeps: HJI residuals, gradient oracles, solver cross-checks.

Shared by the ``tdg verify`` command and the acceptance tests.  All sampling
is driven by a seeded numpy generator and every reduction is ordered, so a
fixed seed reproduces a byte-identical report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .apollonius import GameState, SpeedRatio
from .degree_capture import grad_value_capture, hji_residual_capture, value_capture
from .degree_escape import (DcSolverConfig, brute_force_escape_point,
                            grad_value_escape, hji_residual_escape,
                            solve_escape_point, value_escape)
from .errors import DegenerateState
from .geometry import ConvexTarget, Point2, dist
from .kind import GameSpace, barrier_value, classify
from .sim import Captured, Escaped, SimConfig, TrajectoryRecord, run

Box = tuple[float, float, float, float]  # xmin, ymin, xmax, ymax

# State-space movement beyond which a perturbed escape point is treated as a
# basin jump (non-smooth state) rather than smooth variation.
BASIN_JUMP_DISTANCE = 0.02


def default_box(target: ConvexTarget, pursuer: Point2 | None = None) -> Box:
    """Sampling box centered on the target, wide enough to cover both subspaces."""
    reach = 4.0 * target.bounding_radius
    if pursuer is not None:
        reach += 2.0 * dist(pursuer, target.anchor)
    cx, cy = target.anchor.x, target.anchor.y
    return (cx - reach, cy - reach, cx + reach, cy + reach)


def random_point(rng: np.random.Generator, box: Box) -> Point2:
    return Point2(float(rng.uniform(box[0], box[2])), float(rng.uniform(box[1], box[3])))


def random_state(rng: np.random.Generator, box: Box) -> GameState:
    while True:
        try:
            return GameState(pursuer=random_point(rng, box), evader=random_point(rng, box))
        except DegenerateState:  # pragma: no cover - measure-zero draw
            continue


def collect_states(rng: np.random.Generator, target: ConvexTarget, ratio: SpeedRatio,
                   box: Box, count: int, space: GameSpace,
                   min_margin: float = 0.0, evader_outside_target: bool = True,
                   max_draws: int = 2_000_000) -> list[GameState]:
    """Rejection-sample states in the requested subspace with a barrier margin."""
    states: list[GameState] = []
    for _ in range(max_draws):
        if len(states) >= count:
            return states
        state = random_state(rng, box)
        if evader_outside_target and target.h(state.evader) <= 1e-9:
            continue
        value = barrier_value(state, target, ratio)
        if space is GameSpace.CAPTURE and value > min_margin:
            states.append(state)
        elif space is GameSpace.ESCAPE and value < -min_margin:
            states.append(state)
    raise RuntimeError(
        f"could not sample {count} {space.value} states in {max_draws} draws")


def fd_gradient_capture(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                        step: float = 1e-6) -> tuple[float, float, float, float]:
    """Central finite differences of the capture value over the four coordinates."""
    coords = [state.pursuer.x, state.pursuer.y, state.evader.x, state.evader.y]
    grads = []
    for i in range(4):
        plus = coords.copy()
        minus = coords.copy()
        plus[i] += step
        minus[i] -= step
        v_plus = value_capture(GameState(Point2(plus[0], plus[1]), Point2(plus[2], plus[3])),
                               target, ratio)
        v_minus = value_capture(GameState(Point2(minus[0], minus[1]), Point2(minus[2], minus[3])),
                                target, ratio)
        grads.append((v_plus - v_minus) / (2.0 * step))
    return tuple(grads)


def fd_gradient_escape(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                       config: DcSolverConfig | None = None,
                       step: float = 1e-5) -> tuple[tuple[float, ...], bool]:
    """Central finite differences of the escape value; flags basin jumps.

    Each perturbed solve is warm-started from the unperturbed escape point so
    the same boundary branch is tracked; a large jump of the escape point
    marks the state as non-smooth and the caller should skip it.
    """
    center = solve_escape_point(state, target, ratio, config)
    coords = [state.pursuer.x, state.pursuer.y, state.evader.x, state.evader.y]
    grads = []
    jumped = False
    for i in range(4):
        values = []
        for sign in (1.0, -1.0):
            pert = coords.copy()
            pert[i] += sign * step
            pstate = GameState(Point2(pert[0], pert[1]), Point2(pert[2], pert[3]))
            sol = solve_escape_point(pstate, target, ratio, config,
                                     warm_start=center.escape_point)
            if dist(sol.escape_point, center.escape_point) > BASIN_JUMP_DISTANCE:
                jumped = True
            values.append(sol.value)
        grads.append((values[0] - values[1]) / (2.0 * step))
    return tuple(grads), jumped


def max_chord_deviation(path: list[Point2]) -> float:
    """Largest perpendicular distance of path points from the start-end chord."""
    if len(path) < 3:
        return 0.0
    start, end = path[0], path[-1]
    ex, ey = end.x - start.x, end.y - start.y
    chord = math.hypot(ex, ey)
    if chord < 1e-15:
        return max(dist(p, start) for p in path)
    worst = 0.0
    for p in path:
        cross = abs((p.x - start.x) * ey - (p.y - start.y) * ex) / chord
        worst = max(worst, cross)
    return worst


def max_travel_ratio_error(record: TrajectoryRecord, gamma: float) -> float:
    """Worst per-sample violation of |evader travel| = gamma * |pursuer travel|."""
    p0 = record.pursuer_path[0]
    e0 = record.evader_path[0]
    worst = 0.0
    for p, e in zip(record.pursuer_path[1:], record.evader_path[1:]):
        worst = max(worst, abs(dist(e, e0) - gamma * dist(p, p0)))
    return worst


def simulation_max_time(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> float:
    """Generous horizon bound covering both capture and escape plays."""
    spread = (state.separation + dist(state.pursuer, target.anchor)
              + dist(state.evader, target.anchor) + 4.0 * target.bounding_radius)
    return spread / (ratio.v_pursuer * (1.0 - ratio.gamma)) + 1.0


@dataclass
class SweepReport:
    """Aggregated verification results with threshold verdicts."""

    seed: int
    samples: int
    hji_capture_count: int = 0
    hji_capture_max: float = 0.0
    hji_capture_mean: float = 0.0
    hji_escape_count: int = 0
    hji_escape_max: float = 0.0
    hji_escape_mean: float = 0.0
    grad_capture_count: int = 0
    grad_capture_max_error: float = 0.0
    grad_escape_count: int = 0
    grad_escape_max_error: float = 0.0
    grad_escape_skipped: int = 0
    oracle_count: int = 0
    oracle_worst_objective_gap: float = 0.0
    oracle_worst_position_gap: float = 0.0
    oracle_position_tolerance: float = 0.0
    agreement_count: int = 0
    agreement_matches: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "hji": {
                "capture": {"count": self.hji_capture_count,
                            "max_abs": self.hji_capture_max,
                            "mean_abs": self.hji_capture_mean},
                "escape": {"count": self.hji_escape_count,
                           "max_abs": self.hji_escape_max,
                           "mean_abs": self.hji_escape_mean},
            },
            "gradient_fd": {
                "capture": {"count": self.grad_capture_count,
                            "max_error": self.grad_capture_max_error},
                "escape": {"count": self.grad_escape_count,
                           "max_error": self.grad_escape_max_error,
                           "skipped_nonsmooth": self.grad_escape_skipped},
            },
            "oracle": {"count": self.oracle_count,
                       "worst_objective_gap": self.oracle_worst_objective_gap,
                       "worst_position_gap": self.oracle_worst_position_gap,
                       "position_tolerance": self.oracle_position_tolerance},
            "classification_vs_simulation": {"count": self.agreement_count,
                                             "matches": self.agreement_matches},
            "violations": self.violations,
            "passed": self.passed,
        }


def run_sweep(target: ConvexTarget, ratio: SpeedRatio, samples: int, seed: int,
              box: Box | None = None, solver: DcSolverConfig | None = None,
              grad_samples: int | None = None, oracle_samples: int | None = None,
              oracle_grid: int = 201, sim_samples: int | None = None) -> SweepReport:
    """Randomized verification sweep over the state box.

    ``samples`` drives the HJI sections; the finite-difference, oracle and
    simulation sections run on deterministic subsets sized for an interactive
    sweep (the acceptance suite runs them at full criterion sizes).
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if box is None:
        box = default_box(target)
    if solver is None:
        solver = DcSolverConfig(multi_start_count=4)
    grad_n = min(samples, 20) if grad_samples is None else grad_samples
    oracle_n = min(samples, 10) if oracle_samples is None else oracle_samples
    sim_n = min(samples, 100) if sim_samples is None else sim_samples
    rng = np.random.default_rng(seed)
    report = SweepReport(seed=seed, samples=samples)
    vp = ratio.v_pursuer

    capture_states = collect_states(rng, target, ratio, box, samples, GameSpace.CAPTURE,
                                    min_margin=1e-6)
    residuals = [abs(hji_residual_capture(s, target, ratio)) for s in capture_states]
    report.hji_capture_count = len(residuals)
    report.hji_capture_max = max(residuals)
    report.hji_capture_mean = sum(residuals) / len(residuals)
    if report.hji_capture_max > 1e-9 * vp:
        report.violations.append("hji_capture_max")

    escape_states = collect_states(rng, target, ratio, box, samples, GameSpace.ESCAPE,
                                   min_margin=1e-6)
    residuals = [abs(hji_residual_escape(s, target, ratio, solver)) for s in escape_states]
    report.hji_escape_count = len(residuals)
    report.hji_escape_max = max(residuals)
    report.hji_escape_mean = sum(residuals) / len(residuals)
    if report.hji_escape_max > 1e-6 * vp:
        report.violations.append("hji_escape_max")

    worst = 0.0
    for state in capture_states[:grad_n]:
        fd = fd_gradient_capture(state, target, ratio)
        closed = grad_value_capture(state, target, ratio)
        worst = max(worst, max(abs(a - b) for a, b in zip(fd, closed)))
    report.grad_capture_count = min(grad_n, len(capture_states))
    report.grad_capture_max_error = worst
    if worst > 1e-5:
        report.violations.append("grad_capture_fd")

    worst = 0.0
    used = 0
    skipped = 0
    for state in escape_states:
        if used >= grad_n:
            break
        if barrier_value(state, target, ratio) > -1e-3:
            continue  # stay clear of the barrier where the solve degrades FD
        fd, jumped = fd_gradient_escape(state, target, ratio, solver)
        if jumped:
            skipped += 1
            continue
        closed = grad_value_escape(state, target, ratio, solver)
        worst = max(worst, max(abs(a - b) for a, b in zip(fd, closed)))
        used += 1
    report.grad_escape_count = used
    report.grad_escape_max_error = worst
    report.grad_escape_skipped = skipped
    if worst > 1e-4:
        report.violations.append("grad_escape_fd")

    worst_obj = 0.0
    worst_pos = 0.0
    for state in escape_states[:oracle_n]:
        sol = solve_escape_point(state, target, ratio, solver)
        oracle = brute_force_escape_point(state, target, ratio, oracle_grid)
        ours = value_escape(state, target, ratio, solution=sol)
        theirs = (dist(oracle, state.pursuer)
                  - dist(oracle, state.evader) / ratio.gamma)
        worst_obj = max(worst_obj, ours - theirs if theirs > ours else 0.0)
        # Only flag objective regressions; position agreement is grid-limited.
        worst_pos = max(worst_pos, dist(oracle, sol.escape_point))
    report.oracle_count = min(oracle_n, len(escape_states))
    report.oracle_worst_objective_gap = worst_obj
    txmin, tymin, txmax, tymax = target.bounding_box()
    diam = math.hypot(txmax - txmin, tymax - tymin)
    report.oracle_position_tolerance = 2.0 * diam / max(oracle_grid - 1, 1)
    report.oracle_worst_position_gap = worst_pos
    if worst_obj > 1e-6:
        report.violations.append("oracle_objective_gap")

    matches = 0
    tested = 0
    for state in (capture_states[:sim_n // 2] + escape_states[:sim_n - sim_n // 2]):
        decision = classify(state, target, ratio)
        if abs(decision.barrier_value) < 1e-4:
            continue  # numerically marginal near the barrier
        cfg = SimConfig(dt=1e-2, capture_radius=1e-7,
                        max_time=simulation_max_time(state, target, ratio),
                        solver=solver)
        record = run(state, target, ratio, cfg)
        tested += 1
        if decision.space is GameSpace.CAPTURE and isinstance(record.outcome, Captured):
            matches += 1
        elif decision.space is GameSpace.ESCAPE and isinstance(record.outcome, Escaped):
            matches += 1
    report.agreement_count = tested
    report.agreement_matches = matches
    if matches != tested:
        report.violations.append("classification_vs_simulation")

    return report
