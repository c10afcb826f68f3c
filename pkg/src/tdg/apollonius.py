"""Apollonius disk construction: the evader's dominant region for a joint state.

For speed ratio 0 < gamma < 1 the set of points the evader reaches no later
than the pursuer is a closed disk.  Its boundary is the locus of simultaneous
arrival under straight-line play at top speed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateState
from .geometry import Point2, dist

# Below this player separation the disk radius vanishes and bearings become
# indeterminate; the game is treated as already terminated.
SEPARATION_EPS = 1e-12


@dataclass(frozen=True, slots=True)
class GameState:
    """Joint planar positions of the pursuer and the evader."""

    pursuer: Point2
    evader: Point2

    def __post_init__(self):
        if dist(self.pursuer, self.evader) < SEPARATION_EPS:
            raise DegenerateState(
                f"players coincide: separation below {SEPARATION_EPS:g}"
            )

    @property
    def separation(self) -> float:
        return dist(self.pursuer, self.evader)


@dataclass(frozen=True, slots=True)
class SpeedRatio:
    """Evader-to-pursuer speed ratio; optionally carries the pursuer speed."""

    gamma: float
    v_pursuer: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not (self.v_pursuer > 0.0 and math.isfinite(self.v_pursuer)):
            raise ValueError(f"pursuer speed must be positive, got {self.v_pursuer}")

    @property
    def v_evader(self) -> float:
        return self.gamma * self.v_pursuer


class Dominance(enum.Enum):
    EVADER_DOMINANT = "evader"
    PURSUER_DOMINANT = "pursuer"


@dataclass(frozen=True, slots=True)
class ApolloniusDisk:
    """Center and radius of the evader's dominant region."""

    center: Point2
    radius: float

    def contains(self, z: Point2) -> bool:
        """Boundary counts as inside (simultaneous arrival favors the evader)."""
        return dist(z, self.center) <= self.radius

    def project(self, z: Point2) -> Point2:
        d = dist(z, self.center)
        if d <= self.radius:
            return z
        s = self.radius / d
        return Point2(self.center.x + s * (z.x - self.center.x),
                      self.center.y + s * (z.y - self.center.y))


def apollonius_disk(state: GameState, ratio: SpeedRatio) -> ApolloniusDisk:
    """Dominant-region disk for the given state and speed ratio.

    center = (x_E - gamma^2 x_P) / (1 - gamma^2),
    radius = gamma / (1 - gamma^2) * |x_E - x_P|.
    """
    sep = state.separation
    if sep < SEPARATION_EPS:
        raise DegenerateState("cannot build the disk for coincident players")
    g = ratio.gamma
    f = 1.0 - g * g
    cx = (state.evader.x - g * g * state.pursuer.x) / f
    cy = (state.evader.y - g * g * state.pursuer.y) / f
    return ApolloniusDisk(center=Point2(cx, cy), radius=g / f * sep)


def membership(disk: ApolloniusDisk, z: Point2) -> Dominance:
    """Which player reaches z first under straight-line top-speed play."""
    if disk.contains(z):
        return Dominance.EVADER_DOMINANT
    return Dominance.PURSUER_DOMINANT


def verify_meeting_point(state: GameState, ratio: SpeedRatio, z: Point2) -> float:
    """Signed equal-arrival residual |z - x_E| - gamma * |z - x_P|.

    Vanishes exactly on the disk boundary: both players, moving straight at
    top speed, reach z at the same instant.
    """
    return dist(z, state.evader) - ratio.gamma * dist(z, state.pursuer)
