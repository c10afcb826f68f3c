"""Game of kind: barrier values, classification, curve tracing, quartic cross-check."""

from __future__ import annotations

import math

import numpy as np
import pytest

from tdg import (BracketingFailure, GameSpace, GameState, Point2, SpeedRatio,
                 barrier_value, circular_barrier_quartic, circular_barrier_value,
                 classify, trace_barrier_curve, validate_quartic_zero_set)
from tdg.geometry import Circle, dist


def barrier_oracle_circle(pursuer, evader, gamma, r):
    """Direct evaluation of the circular barrier: |C| - r - R."""
    f = 1.0 - gamma * gamma
    cx = (evader[0] - gamma * gamma * pursuer[0]) / f
    cy = (evader[1] - gamma * gamma * pursuer[1]) / f
    big_r = gamma / f * math.hypot(evader[0] - pursuer[0], evader[1] - pursuer[1])
    return math.hypot(cx, cy) - r - big_r


def quartic_rejected_transcription(z: Point2, pursuer: Point2, gamma: float,
                                   r: float) -> float:
    """Candidate closed form that failed zero-set validation (kept for the record).

    Compared against the radical-elimination quartic on traced barrier points,
    this variant leaves residuals of order 1e-2 and is therefore not used
    anywhere in the library.
    """
    a = z.x - gamma * gamma * pursuer.x
    b = z.y - gamma * gamma * pursuer.y
    c = z.x - pursuer.x
    d = z.y - pursuer.y
    s = a * a + b * b
    q = c * c + d * d
    k = r * r * (1.0 - gamma * gamma) ** 2
    return s * s - k * (2.0 * s - r * r) - gamma * gamma * q * (
        2.0 * s + 4.0 * k + 2.0 * r * r * gamma * gamma * (1.0 - gamma * gamma) ** 2
        + gamma * gamma)


class TestBarrierValue:
    def test_capture_side_reference(self, capture_state, disk_target, ratio04):
        # Oracle: |C| - r - R with C = (1.3333333, 1.1142857), R = 0.4390259.
        expected = barrier_oracle_circle((0.5, 0.4), (1.2, 1.0), 0.4, 0.2)
        assert expected == pytest.approx(1.098619155416266, abs=1e-12)
        assert barrier_value(capture_state, disk_target, ratio04) == \
            pytest.approx(expected, abs=1e-12)

    def test_center_inside_target(self, disk_target, ratio04, reference_pursuer):
        # Evader at the origin: C = (-0.0952381, -0.0761905), |C| = 0.12196 < r,
        # so the distance term vanishes and the value is -R = -0.3049107.
        state = GameState(reference_pursuer, Point2(0.0, 0.0))
        value = barrier_value(state, disk_target, ratio04)
        assert value == pytest.approx(-0.3049106779729928, abs=1e-12)

    def test_zero_on_traced_curve(self, disk_target, ratio04, reference_pursuer):
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio04, 32)
        for z in curve.points:
            state = GameState(reference_pursuer, z)
            assert abs(barrier_value(state, disk_target, ratio04)) <= 1e-8


class TestClassify:
    def test_capture_reference(self, capture_state, disk_target, ratio04):
        decision = classify(capture_state, disk_target, ratio04)
        assert decision.space is GameSpace.CAPTURE
        assert decision.barrier_value > 0.0

    def test_escape_reference(self, disk_target, ratio04, reference_pursuer):
        decision = classify(GameState(reference_pursuer, Point2(0.0, 0.0)),
                            disk_target, ratio04)
        assert decision.space is GameSpace.ESCAPE

    def test_evader_on_target_is_escape(self, disk_target, ratio04, reference_pursuer):
        decision = classify(GameState(reference_pursuer, Point2(0.1, 0.0)),
                            disk_target, ratio04)
        assert decision.space is GameSpace.ESCAPE

    def test_pursuer_inside_target_flagged(self, disk_target, ratio04):
        decision = classify(GameState(Point2(0.05, 0.0), Point2(0.6, 0.0)),
                            disk_target, ratio04)
        assert decision.pursuer_inside_target

    def test_boundary_tie_goes_to_escape(self, disk_target, ratio04,
                                         reference_pursuer):
        # Push an evader position onto the traced curve; B there is within
        # 1e-8 of zero, so nudging it slightly negative must flip to escape
        # while the exact zero side is escape by the non-strict rule.
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio04, 16)
        z = curve.points[3]
        state = GameState(reference_pursuer, z)
        value = barrier_value(state, disk_target, ratio04)
        decision = classify(state, disk_target, ratio04)
        assert (decision.space is GameSpace.CAPTURE) == (value > 0.0)


class TestTraceBarrierCurve:
    def test_reference_curve(self, disk_target, ratio04, reference_pursuer):
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio04, 256)
        assert len(curve.points) == 257
        assert curve.points[0] == curve.points[-1]
        for z in curve.points[:-1]:
            assert abs(barrier_value(GameState(reference_pursuer, z),
                                     disk_target, ratio04)) <= 1e-8
            # Curve encircles the target: every point lies outside it.
            assert dist(z, disk_target.center) > disk_target.radius

    def test_curve_is_simple(self, disk_target, ratio04, reference_pursuer):
        # Star-shaped about the anchor: radii single-valued per ray and all
        # consecutive polar angles strictly increasing.
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio04, 64)
        angles = [math.atan2(p.y, p.x) for p in curve.points[:-1]]
        unwrapped = [angles[0]]
        for a in angles[1:]:
            while a <= unwrapped[-1]:
                a += 2.0 * math.pi
            unwrapped.append(a)
        assert unwrapped[-1] - unwrapped[0] < 2.0 * math.pi

    def test_small_gamma_hugs_target(self, disk_target, reference_pursuer):
        ratio = SpeedRatio(1e-3)
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio, 32)
        for z in curve.points:
            assert abs(dist(z, disk_target.center) - disk_target.radius) < 1e-2

    def test_pursuer_at_centroid_gives_circle(self, disk_target):
        ratio = SpeedRatio(0.4)
        curve = trace_barrier_curve(Point2(0.0, 0.0), disk_target, ratio, 32)
        radii = [dist(z, disk_target.center) for z in curve.points[:-1]]
        assert max(radii) - min(radii) < 1e-8

    def test_ray_count_minimum(self, disk_target, ratio04, reference_pursuer):
        with pytest.raises(ValueError):
            trace_barrier_curve(reference_pursuer, disk_target, ratio04, 8)

    def test_bracketing_failure_reported(self, disk_target, ratio04,
                                         reference_pursuer):
        # A search radius strictly inside the curve cannot bracket it; the
        # tracer must report the failing ray rather than guess.
        with pytest.raises(BracketingFailure) as err:
            trace_barrier_curve(reference_pursuer, disk_target, ratio04, 16,
                                search_radius=0.25)
        assert err.value.ray_index is not None


class TestCircularQuartic:
    def test_validated_form_vanishes_on_curve(self, disk_target, ratio04,
                                              reference_pursuer):
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio04, 256)
        worst = validate_quartic_zero_set(curve.points[:-1], reference_pursuer,
                                          ratio04, disk_target.radius)
        assert worst <= 1e-6

    def test_rejected_transcription_fails_on_curve(self, disk_target, ratio04,
                                                   reference_pursuer):
        # The rejected candidate is demonstrably not the barrier zero set.
        curve = trace_barrier_curve(reference_pursuer, disk_target, ratio04, 64)
        worst = max(abs(quartic_rejected_transcription(z, reference_pursuer, 0.4,
                                                       disk_target.radius))
                    for z in curve.points[:-1])
        assert worst > 1e-3

    def test_sign_consistency_outside_barrier(self, disk_target, ratio04,
                                              reference_pursuer):
        rng = np.random.default_rng(23)
        checked = 0
        while checked < 2000:
            z = Point2(float(rng.uniform(-4, 4)), float(rng.uniform(-4, 4)))
            b = circular_barrier_value(z, reference_pursuer, ratio04,
                                       disk_target.radius)
            if b > 1e-12:
                assert circular_barrier_quartic(z, reference_pursuer, ratio04,
                                                disk_target.radius) > 0.0
                checked += 1

    def test_matches_unsimplified_form(self, disk_target, ratio04, capture_state):
        # The quartic factors as the product of (|C| -/+ r -/+ R) terms scaled
        # by (1 - gamma^2); verify the factorization numerically.
        rng = np.random.default_rng(3)
        g = ratio04.gamma
        r = disk_target.radius
        pursuer = capture_state.pursuer
        for _ in range(500):
            z = Point2(float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)))
            f = 1.0 - g * g
            cx = (z.x - g * g * pursuer.x) / f
            cy = (z.y - g * g * pursuer.y) / f
            nc = math.hypot(cx, cy)
            big_r = g / f * math.hypot(z.x - pursuer.x, z.y - pursuer.y)
            factored = (f ** 4) * ((nc - r - big_r) * (nc - r + big_r)
                                   * (nc + r - big_r) * (nc + r + big_r))
            quartic = circular_barrier_quartic(z, pursuer, ratio04, r)
            assert quartic == pytest.approx(factored, rel=1e-9, abs=1e-12)

    def test_small_gamma_reduces_to_circle_equation(self, disk_target,
                                                    reference_pursuer):
        # As gamma -> 0 the quartic degenerates to ((x^2 + y^2) - r^2)^2.
        ratio = SpeedRatio(1e-8)
        r = disk_target.radius
        rng = np.random.default_rng(9)
        for _ in range(100):
            z = Point2(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)))
            expected = ((z.x ** 2 + z.y ** 2) - r * r) ** 2
            got = circular_barrier_quartic(z, reference_pursuer, ratio, r)
            assert got == pytest.approx(expected, rel=1e-6, abs=1e-12)


class TestRayMonotonicity:
    def test_no_flip_back_to_escape(self, disk_target, ratio04, reference_pursuer):
        # Walk the evader radially outward on rays through the target center;
        # once in the capture space she stays there.
        for k in range(12):
            ang = 2.0 * math.pi * k / 12
            seen_capture = False
            for s in np.linspace(0.05, 6.0, 240):
                z = Point2(s * math.cos(ang), s * math.sin(ang))
                decision = classify(GameState(reference_pursuer, z),
                                    disk_target, ratio04)
                if decision.space is GameSpace.CAPTURE:
                    seen_capture = True
                elif seen_capture:
                    pytest.fail(f"classification flipped back to escape at s={s}")
