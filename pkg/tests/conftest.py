"""Shared fixtures: the reference scenario and reusable target shapes."""

from __future__ import annotations

import pytest

from tdg import Circle, Ellipse, GameState, ImplicitSmooth, Point2, SpeedRatio


@pytest.fixture(scope="session")
def disk_target() -> Circle:
    # Circular target of radius 0.2 at the origin; pursuer anchored at
    # (0.5, 0.4) with unit speed and a 0.4 speed ratio throughout the
    # reference scenario.
    return Circle(Point2(0.0, 0.0), 0.2)


@pytest.fixture(scope="session")
def ratio04() -> SpeedRatio:
    return SpeedRatio(gamma=0.4, v_pursuer=1.0)


@pytest.fixture(scope="session")
def reference_pursuer() -> Point2:
    return Point2(0.5, 0.4)


@pytest.fixture(scope="session")
def capture_state(reference_pursuer) -> GameState:
    # Evader outside the barrier curve: barrier value +1.0986 (capture space).
    return GameState(reference_pursuer, Point2(1.2, 1.0))


@pytest.fixture(scope="session")
def escape_state(reference_pursuer) -> GameState:
    # Evader inside the barrier curve: barrier value -0.1672 (escape space).
    return GameState(reference_pursuer, Point2(-0.3, 0.0))


@pytest.fixture(scope="session")
def tilted_ellipse() -> Ellipse:
    return Ellipse(Point2(0.3, -0.2), (0.4, 0.2), rotation=0.7)


@pytest.fixture(scope="session")
def quartic_bowl() -> ImplicitSmooth:
    # Smooth convex non-conic set: h = x^4 + y^4 - 0.3^4.
    r4 = 0.3 ** 4
    return ImplicitSmooth(
        h_fn=lambda z: z.x ** 4 + z.y ** 4 - r4,
        grad_h_fn=lambda z: Point2(4.0 * z.x ** 3, 4.0 * z.y ** 3),
        interior_point=Point2(0.0, 0.0),
        radius_bound=0.36,
    )
