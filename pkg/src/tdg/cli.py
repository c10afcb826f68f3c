"""Batch command-line front end.

Subcommands: classify, barrier, solve, simulate, verify.  Scenario files are
strict JSON; outputs are deterministic for a fixed scenario and seed.  Exit
codes: 0 ok, 2 schema violation, 3 degenerate state, 4 barrier tracing
failure, 5 solver failure, 6 verification threshold violation.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from pathlib import Path

import click

from .apollonius import GameState, apollonius_disk
from .degree_capture import capture_strategies
from .degree_escape import certify_with_oracle, solve_escape_point
from .errors import (BracketingFailure, DegenerateState, NonConvergence,
                     SchemaError, SolverFailure)
from .geometry import Circle, Ellipse, Point2
from .kind import GameSpace, barrier_value, classify, trace_barrier_curve
from .scenario import Scenario, load_scenario
from .sim import Captured, Escaped, Timeout, run
from .verify import default_box, run_sweep

EXIT_SCHEMA = 2
EXIT_DEGENERATE = 3
EXIT_TRACING = 4
EXIT_SOLVER = 5
EXIT_VERIFICATION = 6


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str) -> Scenario:
    try:
        return load_scenario(path)
    except SchemaError as exc:
        _fail(str(exc), EXIT_SCHEMA)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit_json(data: dict, out: str | None):
    text = json.dumps(data, sort_keys=True, indent=2)
    click.echo(text)
    if out:
        Path(out).write_text(text + "\n")


def _point_json(p: Point2) -> list[float]:
    return [p.x, p.y]


@click.group()
def main():
    """Target-defense game toolkit: classification, solving, simulation, verification."""


@main.command("classify")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
def cmd_classify(scenario_path: str, out_path: str | None):
    """Classify the scenario state via the barrier function."""
    scenario = _load(scenario_path)
    try:
        decision = classify(scenario.state, scenario.target, scenario.ratio)
        disk = apollonius_disk(scenario.state, scenario.ratio)
        projection = scenario.target.project(disk.center)
    except DegenerateState as exc:
        _fail(str(exc), EXIT_DEGENERATE)
    _emit_json({
        "space": decision.space.value,
        "barrier_value": decision.barrier_value,
        "pursuer_inside_target": decision.pursuer_inside_target,
        "apollonius": {"center": _point_json(disk.center), "radius": disk.radius},
        "projection": _point_json(projection),
    }, out_path)


def _svg_path(points: list[Point2], closed: bool) -> str:
    parts = [f"M {p.x:.8f} {-p.y:.8f}" if i == 0 else f"L {p.x:.8f} {-p.y:.8f}"
             for i, p in enumerate(points)]
    if closed:
        parts.append("Z")
    return " ".join(parts)


def _svg_target_path(target) -> str:
    if isinstance(target, Circle):
        c, r = target.center, target.radius
        return (f"M {c.x + r:.8f} {-c.y:.8f} "
                f"A {r:.8f} {r:.8f} 0 1 0 {c.x - r:.8f} {-c.y:.8f} "
                f"A {r:.8f} {r:.8f} 0 1 0 {c.x + r:.8f} {-c.y:.8f} Z")
    if isinstance(target, Ellipse):
        a, b = target.semi_axes
        rot_deg = -math.degrees(target.rotation)
        c = target.center
        ct, st = math.cos(target.rotation), math.sin(target.rotation)
        p0 = Point2(c.x + a * ct, c.y + a * st)
        p1 = Point2(c.x - a * ct, c.y - a * st)
        return (f"M {p0.x:.8f} {-p0.y:.8f} "
                f"A {a:.8f} {b:.8f} {rot_deg:.8f} 1 0 {p1.x:.8f} {-p1.y:.8f} "
                f"A {a:.8f} {b:.8f} {rot_deg:.8f} 1 0 {p0.x:.8f} {-p0.y:.8f} Z")
    # Generic fallback: polygonal boundary sampled radially from the anchor.
    pts = []
    for i in range(128):
        ang = 2.0 * math.pi * i / 128
        lo, hi = 0.0, target.bounding_radius * 1.01
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            z = Point2(target.anchor.x + mid * math.cos(ang),
                       target.anchor.y + mid * math.sin(ang))
            if target.h(z) <= 0.0:
                lo = mid
            else:
                hi = mid
        pts.append(Point2(target.anchor.x + lo * math.cos(ang),
                          target.anchor.y + lo * math.sin(ang)))
    return _svg_path(pts, closed=True)


def _svg_document(body: list[str], xmin: float, ymin: float, xmax: float,
                  ymax: float) -> str:
    pad = 0.05 * max(xmax - xmin, ymax - ymin, 1e-9)
    view = (f"{xmin - pad:.8f} {-(ymax + pad):.8f} "
            f"{(xmax - xmin) + 2 * pad:.8f} {(ymax - ymin) + 2 * pad:.8f}")
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" '
            f'width="640" height="640">')
    return "\n".join([head, *body, "</svg>", ""])


@main.command("barrier")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--rays", "ray_count", default=256, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--svg", "svg_path", default=None, type=click.Path())
def cmd_barrier(scenario_path: str, ray_count: int, out_path: str, svg_path: str | None):
    """Trace the barrier curve and write it as CSV (and optionally SVG)."""
    scenario = _load(scenario_path)
    if ray_count < 16:
        _fail(f"ray count must be at least 16, got {ray_count}", EXIT_SCHEMA)
    try:
        curve = trace_barrier_curve(scenario.pursuer, scenario.target, scenario.ratio,
                                    ray_count)
    except BracketingFailure as exc:
        done = exc.ray_index if exc.ray_index is not None else 0
        click.echo(f"traced {done} of {ray_count} rays before failure", err=True)
        _fail(str(exc), EXIT_TRACING)
    except DegenerateState as exc:
        _fail(str(exc), EXIT_DEGENERATE)

    anchor = scenario.target.anchor
    rows = ["theta_rad,x,y,barrier_residual"]
    for i in range(curve.ray_count):
        z = curve.points[i]
        theta = 2.0 * math.pi * i / curve.ray_count
        residual = barrier_value(GameState(scenario.pursuer, z), scenario.target,
                                 scenario.ratio)
        rows.append(",".join([_fmt(theta), _fmt(z.x), _fmt(z.y), _fmt(residual)]))
    Path(out_path).write_text("\n".join(rows) + "\n")
    click.echo(f"wrote {curve.ray_count} barrier points to {out_path}")

    if svg_path:
        xs = [p.x for p in curve.points]
        ys = [p.y for p in curve.points]
        body = [
            f'<path d="{_svg_target_path(scenario.target)}" fill="#f5d76e" stroke="#333" stroke-width="0.004"/>',
            f'<path d="{_svg_path(curve.points[:-1], closed=True)}" fill="none" stroke="#c0392b" stroke-width="0.004"/>',
            f'<circle cx="{scenario.pursuer.x:.8f}" cy="{-scenario.pursuer.y:.8f}" r="0.012" fill="#2980b9"/>',
        ]
        Path(svg_path).write_text(_svg_document(
            body, min(xs + [anchor.x]), min(ys + [anchor.y]),
            max(xs + [anchor.x]), max(ys + [anchor.y])))


@main.command("solve")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--verify", "do_verify", is_flag=True, default=False,
              help="Cross-check escape solutions against the grid oracle.")
@click.option("--allow-best-effort", is_flag=True, default=False,
              help="Emit the best iterate instead of failing on non-convergence.")
def cmd_solve(scenario_path: str, out_path: str | None, do_verify: bool,
              allow_best_effort: bool):
    """Solve the game of degree for the scenario state."""
    scenario = _load(scenario_path)
    try:
        decision = classify(scenario.state, scenario.target, scenario.ratio)
    except DegenerateState as exc:
        _fail(str(exc), EXIT_DEGENERATE)
    report: dict = {
        "space": decision.space.value,
        "barrier_value": decision.barrier_value,
    }
    try:
        if decision.space is GameSpace.CAPTURE:
            sol = capture_strategies(scenario.state, scenario.target, scenario.ratio)
            report.update({
                "capture_point": _point_json(sol.capture_point),
                "u_pursuer": _point_json(sol.u_pursuer),
                "u_evader": _point_json(sol.u_evader),
                "value": sol.value,
                "theta": sol.theta,
                "phi": sol.phi,
            })
        else:
            try:
                sol = solve_escape_point(scenario.state, scenario.target, scenario.ratio,
                                         scenario.solver)
            except NonConvergence as exc:
                if not allow_best_effort or exc.best is None:
                    raise
                sol = exc.best
            if do_verify:
                sol = certify_with_oracle(scenario.state, scenario.target, scenario.ratio,
                                          sol)
            report.update({
                "escape_point": _point_json(sol.escape_point),
                "u_pursuer": _point_json(sol.u_pursuer),
                "u_evader": _point_json(sol.u_evader),
                "value": sol.value,
                "psi": sol.psi,
                "varphi": sol.varphi,
                "solver_iterations": sol.solver_iterations,
                "converged": sol.converged,
                "degenerate": sol.degenerate,
            })
            if do_verify:
                report["certified_by_oracle"] = sol.certified_by_oracle
    except DegenerateState as exc:
        _fail(str(exc), EXIT_DEGENERATE)
    except NonConvergence as exc:
        _fail(str(exc), EXIT_SOLVER)
    _emit_json(report, out_path)


@main.command("simulate")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Trajectory CSV path.")
@click.option("--outcome-out", "outcome_path", default=None, type=click.Path())
@click.option("--svg", "svg_path", default=None, type=click.Path())
def cmd_simulate(scenario_path: str, out_path: str, outcome_path: str | None,
                 svg_path: str | None):
    """Run the closed-loop game and write trajectory, outcome and optional SVG."""
    scenario = _load(scenario_path)
    try:
        record = run(scenario.state, scenario.target, scenario.ratio, scenario.sim)
    except DegenerateState as exc:
        _fail(str(exc), EXIT_DEGENERATE)
    except SolverFailure as exc:
        _fail(str(exc), EXIT_SOLVER)

    rows = ["t,xP,yP,xE,yE,uPx,uPy,uEx,uEy"]
    n_controls = len(record.controls)
    for k, t in enumerate(record.times):
        up, ue = record.controls[min(k, n_controls - 1)] if n_controls else \
            (Point2(0.0, 0.0), Point2(0.0, 0.0))
        p = record.pursuer_path[k]
        e = record.evader_path[k]
        rows.append(",".join(_fmt(v) for v in
                             (t, p.x, p.y, e.x, e.y, up.x, up.y, ue.x, ue.y)))
    Path(out_path).write_text("\n".join(rows) + "\n")

    outcome = record.outcome
    data: dict = {
        "classification": record.initial_classification.space.value,
        "barrier_value": record.initial_classification.barrier_value,
        "predicted_value": record.predicted_value,
    }
    if isinstance(outcome, Captured):
        data.update({"outcome": "captured", "time": outcome.time,
                     "point": _point_json(outcome.point),
                     "payoff": scenario.target.distance(outcome.point)})
    elif isinstance(outcome, Escaped):
        data.update({"outcome": "escaped", "time": outcome.time,
                     "point": _point_json(outcome.point),
                     "separation": outcome.separation,
                     "payoff": outcome.separation})
    else:
        data.update({"outcome": "timeout", "time": outcome.time})
    _emit_json(data, outcome_path)

    if svg_path:
        disk = apollonius_disk(scenario.state, scenario.ratio)
        try:
            curve = trace_barrier_curve(scenario.pursuer, scenario.target,
                                        scenario.ratio, 128)
            barrier_elem = (f'<path d="{_svg_path(curve.points[:-1], closed=True)}" '
                            'fill="none" stroke="#c0392b" stroke-width="0.004"/>')
        except BracketingFailure:
            barrier_elem = ""
        body = [
            f'<path d="{_svg_target_path(scenario.target)}" fill="#f5d76e" stroke="#333" stroke-width="0.004"/>',
            barrier_elem,
            f'<circle cx="{disk.center.x:.8f}" cy="{-disk.center.y:.8f}" r="{disk.radius:.8f}" fill="none" stroke="#555" stroke-dasharray="0.02 0.02" stroke-width="0.004"/>',
            f'<path d="{_svg_path(record.pursuer_path, closed=False)}" fill="none" stroke="#2980b9" stroke-width="0.006"/>',
            f'<path d="{_svg_path(record.evader_path, closed=False)}" fill="none" stroke="#e67e22" stroke-width="0.006"/>',
        ]
        xs = [p.x for p in record.pursuer_path + record.evader_path]
        ys = [p.y for p in record.pursuer_path + record.evader_path]
        xs.append(scenario.target.anchor.x - scenario.target.bounding_radius)
        xs.append(scenario.target.anchor.x + scenario.target.bounding_radius)
        ys.append(scenario.target.anchor.y - scenario.target.bounding_radius)
        ys.append(scenario.target.anchor.y + scenario.target.bounding_radius)
        Path(svg_path).write_text(_svg_document(
            [b for b in body if b], min(xs), min(ys), max(xs), max(ys)))


@main.command("verify")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--samples", default=1000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path())
def cmd_verify(scenario_path: str, samples: int, seed: int, out_path: str | None):
    """Randomized verification sweep; nonzero exit on any threshold violation."""
    scenario = _load(scenario_path)
    if samples < 1:
        _fail(f"samples must be positive, got {samples}", EXIT_SCHEMA)
    if scenario.seed is not None:
        seed = scenario.seed
    box = default_box(scenario.target, scenario.pursuer)
    report = run_sweep(scenario.target, scenario.ratio, samples, seed, box=box,
                       solver=dataclasses.replace(scenario.solver, multi_start_count=4))
    _emit_json(report.to_dict(), out_path)
    if not report.passed:
        _fail("verification thresholds violated: " + ", ".join(report.violations),
              EXIT_VERIFICATION)


if __name__ == "__main__":  # pragma: no cover
    main()
