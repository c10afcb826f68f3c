"""Game of kind: barrier evaluation, capture/escape classification, curve tracing.

The barrier value of a state is dist(target, C) - R, where C and R are the
Apollonius disk center and radius.  Positive values mean the pursuer can keep
the evader's dominant region clear of the target (capture space); the zero
level set is the barrier surface and belongs to the escape space.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .apollonius import GameState, SpeedRatio, apollonius_disk
from .errors import BracketingFailure, DegenerateState
from .geometry import ConvexTarget, Point2, dist

BARRIER_CURVE_TOL = 1e-8
MIN_RAY_COUNT = 16


class GameSpace(enum.Enum):
    CAPTURE = "capture"
    ESCAPE = "escape"


@dataclass(frozen=True, slots=True)
class Classification:
    """Subspace assignment for a state, with the barrier value that decided it.

    ``pursuer_inside_target`` flags configurations where the pursuer starts
    inside the target set; the barrier value is still well defined there but
    the game's premise (guarding the set from outside) is degenerate, so the
    flag is surfaced in reports rather than silently ignored.
    """

    space: GameSpace
    barrier_value: float
    pursuer_inside_target: bool = False


@dataclass(frozen=True)
class BarrierCurve:
    """Closed polyline of barrier-curve points traced around the target.

    ``points`` holds ray_count + 1 entries with the first point repeated at
    the end; every stored point z satisfies |B((pursuer, z))| <= 1e-8.
    """

    pursuer: Point2
    gamma: float
    points: list[Point2] = field(repr=False)
    ray_count: int


def barrier_value(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> float:
    """dist(target, C) - R; negative when the disk center lies in the target."""
    disk = apollonius_disk(state, ratio)
    return target.distance(disk.center) - disk.radius


def classify(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> Classification:
    """Capture space iff the barrier value is strictly positive."""
    value = barrier_value(state, target, ratio)
    space = GameSpace.CAPTURE if value > 0.0 else GameSpace.ESCAPE
    return Classification(
        space=space,
        barrier_value=value,
        pursuer_inside_target=target.contains(state.pursuer),
    )


def _barrier_on_ray(pursuer: Point2, target: ConvexTarget, ratio: SpeedRatio,
                    anchor: Point2, ux: float, uy: float, s: float) -> float:
    evader = Point2(anchor.x + s * ux, anchor.y + s * uy)
    if dist(evader, pursuer) < 1e-12:
        # Nudge past the pursuer rather than constructing a degenerate state.
        s *= 1.0 + 1e-9
        evader = Point2(anchor.x + s * ux, anchor.y + s * uy)
    return barrier_value(GameState(pursuer, evader), target, ratio)


def trace_barrier_curve(pursuer: Point2, target: ConvexTarget, ratio: SpeedRatio,
                        ray_count: int = 256,
                        search_radius: float | None = None) -> BarrierCurve:
    """Trace the fixed-pursuer barrier curve by radial bisection.

    Casts ``ray_count`` rays from the target anchor; on each ray the barrier
    value goes from negative (evader on the target) to positive (evader far
    away), and the first sign change is bisected down to |B| <= 1e-8.  A ray
    with no sign change inside the search radius (default ten times the
    target-plus-pursuer extent) raises BracketingFailure: the curve is not
    star shaped about the anchor for this configuration, or lies beyond the
    radius.
    """
    if ray_count < MIN_RAY_COUNT:
        raise ValueError(f"ray_count must be at least {MIN_RAY_COUNT}, got {ray_count}")
    anchor = target.anchor
    s_max = search_radius if search_radius is not None else \
        10.0 * (target.bounding_radius + dist(pursuer, anchor))
    if s_max <= 0.0:
        raise ValueError("search_radius must be positive")
    scan_steps = 128
    points: list[Point2] = []
    for i in range(ray_count):
        ang = 2.0 * math.pi * i / ray_count
        ux, uy = math.cos(ang), math.sin(ang)

        def b_at(s: float) -> float:
            return _barrier_on_ray(pursuer, target, ratio, anchor, ux, uy, s)

        s_lo = 1e-9 * max(1.0, s_max)
        b_lo = b_at(s_lo)
        if b_lo > 0.0:
            raise BracketingFailure(
                f"barrier already positive at the anchor on ray {i}", ray_index=i, angle=ang)
        s_hi = None
        prev_s, prev_b = s_lo, b_lo
        for k in range(1, scan_steps + 1):
            s = s_max * k / scan_steps
            b = b_at(s)
            if b > 0.0:
                s_lo, b_lo, s_hi = prev_s, prev_b, s
                break
            prev_s, prev_b = s, b
        if s_hi is None:
            raise BracketingFailure(
                f"no sign change within search radius {s_max:.3g} on ray {i}",
                ray_index=i, angle=ang)
        s_mid = 0.5 * (s_lo + s_hi)
        for _ in range(200):
            b_mid = b_at(s_mid)
            if abs(b_mid) <= 0.5 * BARRIER_CURVE_TOL:
                break
            if b_mid > 0.0:
                s_hi = s_mid
            else:
                s_lo = s_mid
            s_mid = 0.5 * (s_lo + s_hi)
        else:
            raise BracketingFailure(
                f"bisection failed to reach |B| <= {BARRIER_CURVE_TOL:g} on ray {i}",
                ray_index=i, angle=ang)
        points.append(Point2(anchor.x + s_mid * ux, anchor.y + s_mid * uy))
    points.append(points[0])
    return BarrierCurve(pursuer=pursuer, gamma=ratio.gamma, points=points, ray_count=ray_count)


def circular_barrier_quartic(z: Point2, pursuer: Point2, ratio: SpeedRatio,
                             r: float) -> float:
    """Radical-free quartic residual for the circular-target barrier curve.

    For a circular target of radius r at the origin the barrier relation
    |C| - r - R = 0 can be cleared of square roots by squaring twice.  With
    a = x - g^2 x_P, b = y - g^2 y_P, c = x - x_P, d = y - y_P, s = a^2+b^2,
    v = r (1-g^2) and w = g sqrt(c^2+d^2) this yields

        (s - v^2 - w^2)^2 - 4 v^2 w^2 = 0.

    The polynomial factors as the product of (|C| -/+ r -/+ R) terms scaled
    by (1-g^2), so its zero set is the barrier curve together with the
    internal-tangency branch |C| = |r - R|, and it is strictly positive
    wherever the barrier value is strictly positive.
    """
    g = ratio.gamma
    a = z.x - g * g * pursuer.x
    b = z.y - g * g * pursuer.y
    c = z.x - pursuer.x
    d = z.y - pursuer.y
    s = a * a + b * b
    v2 = (r * (1.0 - g * g)) ** 2
    w2 = g * g * (c * c + d * d)
    t = s - v2 - w2
    return t * t - 4.0 * v2 * w2


def circular_barrier_value(z: Point2, pursuer: Point2, ratio: SpeedRatio, r: float) -> float:
    """Unsimplified circular barrier value |C| - r - R (ground truth for the quartic)."""
    g = ratio.gamma
    f = 1.0 - g * g
    cx = (z.x - g * g * pursuer.x) / f
    cy = (z.y - g * g * pursuer.y) / f
    big_r = g / f * math.hypot(z.x - pursuer.x, z.y - pursuer.y)
    return math.hypot(cx, cy) - r - big_r


def validate_quartic_zero_set(points: list[Point2], pursuer: Point2, ratio: SpeedRatio,
                              r: float, quartic=circular_barrier_quartic) -> float:
    """Max |quartic| over candidate barrier points; small iff the form is valid."""
    worst = 0.0
    for z in points:
        worst = max(worst, abs(quartic(z, pursuer, ratio, r)))
    return worst
