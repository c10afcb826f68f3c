"""Target-set geometry: membership, projection, distance, and their invariants."""

from __future__ import annotations

import math

import numpy as np
import pytest

from tdg import Circle, Ellipse, ImplicitSmooth, Point2, contains, distance, project
from tdg.geometry import dist, norm, unit


def ellipse_projection_oracle(ell: Ellipse, z: Point2) -> Point2:
    """Independent projection via the scalar root of the axis-aligned equations."""
    ct, st = math.cos(ell.rotation), math.sin(ell.rotation)
    dx, dy = z.x - ell.center.x, z.y - ell.center.y
    u, v = ct * dx + st * dy, -st * dx + ct * dy
    a, b = ell.semi_axes
    if (u / a) ** 2 + (v / b) ** 2 <= 1.0:
        return z
    lo = -min(a, b) ** 2 + 1e-14
    hi = max(a, b) * math.hypot(u, v) + max(a, b) ** 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = (a * u / (a * a + mid)) ** 2 + (b * v / (b * b + mid)) ** 2 - 1.0
        if f > 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    pu, pv = a * a * u / (a * a + t), b * b * v / (b * b + t)
    return Point2(ell.center.x + ct * pu - st * pv, ell.center.y + st * pu + ct * pv)


class TestContains:
    def test_circle_center(self, disk_target):
        assert contains(disk_target, Point2(0.0, 0.0))

    def test_circle_outside(self, disk_target):
        # |(0.5, 0.4)| = 0.6403 > 0.2
        assert not contains(disk_target, Point2(0.5, 0.4))

    def test_circle_boundary_counts_as_inside(self, disk_target):
        assert contains(disk_target, Point2(0.2, 0.0))


class TestProject:
    def test_circle_radial(self, disk_target):
        p = project(disk_target, Point2(1.0, 0.0))
        assert p.x == pytest.approx(0.2, abs=1e-15)
        assert p.y == pytest.approx(0.0, abs=1e-15)

    def test_circle_interior_fixed(self, disk_target):
        z = Point2(0.1, 0.0)
        assert project(disk_target, z) == z

    def test_ellipse_major_axis(self):
        ell = Ellipse(Point2(0.0, 0.0), (0.4, 0.2), rotation=0.0)
        p = project(ell, Point2(1.0, 0.0))
        assert p.x == pytest.approx(0.4, abs=1e-10)
        assert p.y == pytest.approx(0.0, abs=1e-10)

    def test_ellipse_matches_scalar_oracle(self, tilted_ellipse):
        rng = np.random.default_rng(11)
        for _ in range(300):
            z = Point2(float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)))
            ours = project(tilted_ellipse, z)
            oracle = ellipse_projection_oracle(tilted_ellipse, z)
            assert dist(ours, oracle) < 1e-9

    def test_implicit_projection_on_boundary(self, quartic_bowl):
        p = project(quartic_bowl, Point2(1.0, 0.8))
        assert abs(quartic_bowl.h(p)) < 1e-12


class TestDistance:
    def test_circle_on_ray(self, disk_target):
        assert distance(disk_target, Point2(1.0, 0.0)) == pytest.approx(0.8, abs=1e-14)

    def test_circle_interior_zero(self, disk_target):
        assert distance(disk_target, Point2(0.0, 0.0)) == 0.0

    def test_ellipse_minor_axis(self):
        ell = Ellipse(Point2(0.0, 0.0), (0.4, 0.2), rotation=0.0)
        assert distance(ell, Point2(0.0, 1.0)) == pytest.approx(0.8, abs=1e-10)

    def test_distance_zero_iff_contained(self, tilted_ellipse):
        rng = np.random.default_rng(5)
        for _ in range(500):
            z = Point2(float(rng.uniform(-1.5, 1.5)), float(rng.uniform(-1.5, 1.5)))
            assert (distance(tilted_ellipse, z) == 0.0) == contains(tilted_ellipse, z)


class TestProjectionInvariants:
    @pytest.mark.parametrize("shape", ["circle", "ellipse", "implicit"])
    def test_idempotence_nonexpansive_orthogonal(self, shape, disk_target,
                                                 tilted_ellipse, quartic_bowl):
        target = {"circle": disk_target, "ellipse": tilted_ellipse,
                  "implicit": quartic_bowl}[shape]
        rng = np.random.default_rng(hash(shape) % 2 ** 31)
        pts = [Point2(float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)))
               for _ in range(400)]
        for z in pts:
            p = project(target, z)
            assert dist(project(target, p), p) <= 1e-12
            if not contains(target, z):
                g = target.grad_h(p)
                d = z - p
                sine = abs(d.x * g.y - d.y * g.x) / (norm(d) * norm(g))
                assert sine <= 1e-8
        for a, b in zip(pts[::2], pts[1::2]):
            pa, pb = project(target, a), project(target, b)
            assert dist(pa, pb) <= dist(a, b) + 1e-12


class TestImplicitSmoothContract:
    def test_rejects_exterior_anchor(self):
        with pytest.raises(ValueError):
            ImplicitSmooth(h_fn=lambda z: z.x ** 2 + z.y ** 2 - 0.04,
                           grad_h_fn=lambda z: Point2(2 * z.x, 2 * z.y),
                           interior_point=Point2(1.0, 0.0), radius_bound=0.3)

    def test_rejects_nonconvex_sublevel_set(self):
        # Annulus-like h: sublevel set fails midpoint convexity.
        def h(z):
            r2 = z.x ** 2 + z.y ** 2
            return (r2 - 0.04) * (0.09 - r2)

        with pytest.raises(ValueError):
            ImplicitSmooth(h_fn=h,
                           grad_h_fn=lambda z: Point2(0.0, 0.0),
                           interior_point=Point2(0.25, 0.0), radius_bound=0.4)


class TestPoint2:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Point2(math.nan, 0.0)
        with pytest.raises(ValueError):
            Point2(0.0, math.inf)

    def test_vector_algebra(self):
        a = Point2(3.0, 4.0)
        assert norm(a) == 5.0
        assert unit(a) == Point2(0.6, 0.8)
        assert (a - Point2(1.0, 1.0)) == Point2(2.0, 3.0)
        assert 2.0 * a == Point2(6.0, 8.0)


class TestEntryTime:
    def test_circle_straight_entry(self, disk_target):
        # From (-0.5, 0) moving +x at speed 0.4: boundary at x = -0.2, t = 0.75.
        t = disk_target.boundary_entry_time(Point2(-0.5, 0.0), Point2(0.4, 0.0), 2.0)
        assert t == pytest.approx(0.75, abs=1e-12)

    def test_circle_miss(self, disk_target):
        t = disk_target.boundary_entry_time(Point2(-0.5, 0.3), Point2(0.4, 0.0), 5.0)
        assert t is None

    def test_circle_beyond_horizon(self, disk_target):
        t = disk_target.boundary_entry_time(Point2(-0.5, 0.0), Point2(0.4, 0.0), 0.5)
        assert t is None

    def test_ellipse_straight_entry(self):
        ell = Ellipse(Point2(0.0, 0.0), (0.4, 0.2), rotation=0.0)
        t = ell.boundary_entry_time(Point2(-1.0, 0.0), Point2(1.0, 0.0), 2.0)
        assert t == pytest.approx(0.6, abs=1e-12)

    def test_generic_grazing_entry(self, quartic_bowl):
        # Path dips into the set between samples; generic search must find it.
        start = Point2(-1.0, 0.29)
        velocity = Point2(1.0, 0.0)
        t = quartic_bowl.boundary_entry_time(start, velocity, 2.0)
        assert t is not None
        z = Point2(start.x + t * velocity.x, start.y + t * velocity.y)
        assert quartic_bowl.h(z) <= 1e-9
        before = Point2(start.x + (t - 1e-6) * velocity.x, start.y)
        assert quartic_bowl.h(before) > 0.0
