"""Apollonius disk construction and its equal-arrival-time identities."""

from __future__ import annotations

import math

import numpy as np
import pytest

from tdg import (ApolloniusDisk, DegenerateState, Dominance, GameState, Point2,
                 SpeedRatio, apollonius_disk, membership, verify_meeting_point)
from tdg.geometry import dist


class TestDiskConstruction:
    def test_axis_case_exact(self):
        # Equal-arrival points on the x axis solve |x-1| = 0.5|x|: x = 2/3 and
        # x = 2, so the circle has center 4/3 and radius 2/3.
        disk = apollonius_disk(GameState(Point2(0, 0), Point2(1, 0)), SpeedRatio(0.5))
        assert disk.center.x == pytest.approx(4.0 / 3.0, abs=1e-15)
        assert disk.center.y == pytest.approx(0.0, abs=1e-15)
        assert disk.radius == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_reference_state(self):
        # Direct evaluation: center (1.12, 0.936)/0.84, radius 0.4/0.84*|(0.7,0.6)|.
        disk = apollonius_disk(GameState(Point2(0.5, 0.4), Point2(1.2, 1.0)),
                               SpeedRatio(0.4))
        assert disk.center.x == pytest.approx(1.3333333333333333, abs=1e-12)
        assert disk.center.y == pytest.approx(1.1142857142857143, abs=1e-12)
        assert disk.radius == pytest.approx(0.4390259265377565, abs=1e-12)

    def test_vanishing_separation_limit(self):
        # radius -> 0 and center -> evader as the players converge.
        for eps in (1e-3, 1e-6, 1e-9):
            disk = apollonius_disk(GameState(Point2(0, 0), Point2(eps, 0)),
                                   SpeedRatio(0.4))
            assert disk.radius <= eps
            assert dist(disk.center, Point2(eps, 0)) <= eps

    def test_rejects_coincident_players(self):
        with pytest.raises(DegenerateState):
            GameState(Point2(0.3, 0.3), Point2(0.3, 0.3 + 1e-13))

    def test_speed_ratio_validation(self):
        with pytest.raises(ValueError):
            SpeedRatio(1.2)
        with pytest.raises(ValueError):
            SpeedRatio(0.0)
        with pytest.raises(ValueError):
            SpeedRatio(0.5, v_pursuer=-1.0)
        assert SpeedRatio(0.4, v_pursuer=2.0).v_evader == pytest.approx(0.8)


class TestMembership:
    # Exactly representable center and radius so the boundary case is crisp.
    disk = ApolloniusDisk(Point2(1.25, 0.0), 0.75)

    def test_center(self):
        assert membership(self.disk, Point2(1.25, 0.0)) is Dominance.EVADER_DOMINANT

    def test_boundary_belongs_to_evader(self):
        assert membership(self.disk, Point2(2.0, 0.0)) is Dominance.EVADER_DOMINANT

    def test_exterior(self):
        assert membership(self.disk, Point2(3.0, 0.0)) is Dominance.PURSUER_DOMINANT


class TestMeetingPointResidual:
    state = GameState(Point2(0, 0), Point2(1, 0))
    ratio = SpeedRatio(0.5)

    def test_known_boundary_point(self):
        # |z - E| = 1 and gamma |z - P| = 1 at z = (2, 0).
        assert verify_meeting_point(self.state, self.ratio, Point2(2, 0)) == \
            pytest.approx(0.0, abs=1e-15)

    def test_boundary_parametrization(self):
        disk = apollonius_disk(self.state, self.ratio)
        for k in range(64):
            ang = 2.0 * math.pi * k / 64
            z = Point2(disk.center.x + disk.radius * math.cos(ang),
                       disk.center.y + disk.radius * math.sin(ang))
            assert abs(verify_meeting_point(self.state, self.ratio, z)) <= 1e-10

    def test_at_evader(self):
        # |E - E| - gamma |E - P| = -0.5.
        assert verify_meeting_point(self.state, self.ratio, self.state.evader) == \
            pytest.approx(-0.5, abs=1e-15)


class TestFactIdentities:
    def test_random_states_and_ratios(self):
        rng = np.random.default_rng(42)
        for _ in range(2000):
            state = GameState(Point2(*rng.uniform(-5, 5, 2)), Point2(*rng.uniform(-5, 5, 2)))
            ratio = SpeedRatio(float(rng.uniform(0.05, 0.95)))
            disk = apollonius_disk(state, ratio)
            g = ratio.gamma
            d_e = dist(disk.center, state.evader)
            d_p = dist(disk.center, state.pursuer)
            scale = 1e-10 * (1.0 + disk.radius)
            assert abs(d_e - g * disk.radius) <= scale
            assert abs(d_p - disk.radius / g) <= scale
            assert abs(d_e - g * g * d_p) <= scale
            # Evader strictly inside, pursuer strictly outside.
            assert d_e < disk.radius
            assert d_p > disk.radius

    def test_boundary_residual_scales_with_state(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            state = GameState(Point2(*rng.uniform(-50, 50, 2)),
                              Point2(*rng.uniform(-50, 50, 2)))
            ratio = SpeedRatio(float(rng.uniform(0.1, 0.9)))
            disk = apollonius_disk(state, ratio)
            size = 1.0 + max(abs(state.pursuer.x), abs(state.pursuer.y),
                             abs(state.evader.x), abs(state.evader.y))
            for k in range(16):
                ang = 2.0 * math.pi * k / 16
                z = Point2(disk.center.x + disk.radius * math.cos(ang),
                           disk.center.y + disk.radius * math.sin(ang))
                assert abs(verify_meeting_point(state, ratio, z)) <= 1e-10 * size
