"""Capture game of degree: optimal capture point, strategies, value, HJI check.

In the capture space both players head straight for the point of the
Apollonius circle closest to the target; the value is the distance from that
point to the target and equals the barrier value.
"""

from __future__ import annotations

import math

from dataclasses import dataclass

from .apollonius import GameState, SpeedRatio, apollonius_disk
from .errors import WrongSubspace
from .geometry import ConvexTarget, Point2, dist, unit
from .kind import barrier_value

Grad4 = tuple[float, float, float, float]


@dataclass(frozen=True, slots=True)
class CaptureSolution:
    """Saddle-point solution of the capture subgame at one state.

    ``theta`` is the bearing of the capture point seen from the disk center,
    ``phi`` the bearing of the evader seen from the pursuer.
    """

    capture_point: Point2
    u_pursuer: Point2
    u_evader: Point2
    value: float
    theta: float
    phi: float


def _require_capture(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> float:
    value = barrier_value(state, target, ratio)
    if value <= 0.0:
        raise WrongSubspace(
            f"capture-game operation on an escape-space state (barrier value {value:.3e})")
    return value


def capture_point(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> Point2:
    """Point of the Apollonius circle closest to the target along C -> projection."""
    _require_capture(state, target, ratio)
    disk = apollonius_disk(state, ratio)
    proj = target.project(disk.center)
    direction = unit(proj - disk.center)
    return Point2(disk.center.x + disk.radius * direction.x,
                  disk.center.y + disk.radius * direction.y)


def capture_strategies(state: GameState, target: ConvexTarget,
                       ratio: SpeedRatio) -> CaptureSolution:
    """Unit headings for both players (each aims at the capture point), with value."""
    value = _require_capture(state, target, ratio)
    disk = apollonius_disk(state, ratio)
    proj = target.project(disk.center)
    direction = unit(proj - disk.center)
    x_star = Point2(disk.center.x + disk.radius * direction.x,
                    disk.center.y + disk.radius * direction.y)
    theta = math.atan2(proj.y - disk.center.y, proj.x - disk.center.x)
    phi = math.atan2(state.evader.y - state.pursuer.y, state.evader.x - state.pursuer.x)
    return CaptureSolution(
        capture_point=x_star,
        u_pursuer=unit(x_star - state.pursuer),
        u_evader=unit(x_star - state.evader),
        value=value,
        theta=theta,
        phi=phi,
    )


def value_capture(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> float:
    """Distance of the capture point from the target; equals the barrier value."""
    return _require_capture(state, target, ratio)


def grad_value_capture(state: GameState, target: ConvexTarget,
                       ratio: SpeedRatio) -> Grad4:
    """Closed-form value gradient, ordered (pursuerx, pursuery, evaderx, evadery)."""
    sol = capture_strategies(state, target, ratio)
    g = ratio.gamma
    f = 1.0 - g * g
    ct, st = math.cos(sol.theta), math.sin(sol.theta)
    cp, sp = math.cos(sol.phi), math.sin(sol.phi)
    return (
        (g * g * ct + g * cp) / f,
        (g * g * st + g * sp) / f,
        (-ct - g * cp) / f,
        (-st - g * sp) / f,
    )


def hji_residual_capture(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                         u_pursuer: Point2 | None = None,
                         u_evader: Point2 | None = None) -> float:
    """Directional derivative of the capture value along the closed-loop flow.

    Zero at the saddle-point strategy pair.  Passing a perturbed control for
    one player probes the saddle structure: an evader deviation makes the
    residual positive (the value grows along the flow), a pursuer deviation
    makes it negative.
    """
    sol = capture_strategies(state, target, ratio)
    grad = grad_value_capture(state, target, ratio)
    up = u_pursuer if u_pursuer is not None else sol.u_pursuer
    ue = u_evader if u_evader is not None else sol.u_evader
    vp = ratio.v_pursuer
    ve = ratio.v_evader
    return (grad[0] * vp * up.x + grad[1] * vp * up.y
            + grad[2] * ve * ue.x + grad[3] * ve * ue.y)


def capture_time(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> float:
    """Time to capture under optimal play: pursuer distance to the capture point."""
    x_star = capture_point(state, target, ratio)
    return dist(x_star, state.pursuer) / ratio.v_pursuer
