"""Planar vector algebra and compact convex target sets.

A target set is the sublevel set {z : h(z) <= 0} of a smooth convex function.
Circles project analytically; ellipses and caller-supplied implicit sets
project through a damped Newton iteration on the projection KKT system,
seeded from the ray-boundary intersection toward an interior anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvergence

# Iteration budget and residual tolerances for the numeric projector.  Newton
# aims for the target tolerance (which keeps re-projection fixed points well
# inside the 1e-12 idempotence bound) and only fails below the accept bound.
PROJECTION_TOL = 1e-10
PROJECTION_TARGET_TOL = 1e-13
PROJECTION_MAX_ITER = 200


@dataclass(frozen=True, slots=True)
class Point2:
    """A point (or free vector) in the game plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Point2":
        return Point2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def dot(a: Point2, b: Point2) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Point2, b: Point2) -> float:
    return a.x * b.y - a.y * b.x


def norm(a: Point2) -> float:
    return math.hypot(a.x, a.y)


def dist(a: Point2, b: Point2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def unit(a: Point2) -> Point2:
    n = norm(a)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return Point2(a.x / n, a.y / n)


class ConvexTarget:
    """A compact convex target set {z : h(z) <= 0} with a smooth boundary.

    Subclasses provide ``h``, ``grad_h``, an interior ``anchor`` point and a
    ``bounding_radius`` (every target point lies within that radius of the
    anchor).  ``project``/``distance`` are exact for circles and solved
    numerically otherwise.
    """

    def h(self, z: Point2) -> float:
        raise NotImplementedError

    def grad_h(self, z: Point2) -> Point2:
        raise NotImplementedError

    def hess_h(self, z: Point2) -> tuple[float, float, float]:
        """Hessian of h at z as (hxx, hxy, hyy); default central differences."""
        step = 1e-6 * (1.0 + norm(z))
        gxp = self.grad_h(Point2(z.x + step, z.y))
        gxm = self.grad_h(Point2(z.x - step, z.y))
        gyp = self.grad_h(Point2(z.x, z.y + step))
        gym = self.grad_h(Point2(z.x, z.y - step))
        hxx = (gxp.x - gxm.x) / (2.0 * step)
        hyy = (gyp.y - gym.y) / (2.0 * step)
        hxy = 0.5 * ((gyp.x - gym.x) / (2.0 * step) + (gxp.y - gxm.y) / (2.0 * step))
        return hxx, hxy, hyy

    def contains(self, z: Point2) -> bool:
        """True iff z belongs to the target (boundary included)."""
        return self.h(z) <= 0.0

    def project(self, z: Point2) -> Point2:
        """Euclidean-closest target point to z; z itself when contained."""
        if self.contains(z):
            return z
        return _project_newton_kkt(self, z)

    def distance(self, z: Point2) -> float:
        """Distance from z to the target; zero iff contained."""
        if self.contains(z):
            return 0.0
        return dist(z, self.project(z))

    def h_batch(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized h over coordinate arrays; generic fallback loops."""
        flat_x = np.asarray(xs, dtype=float).ravel()
        flat_y = np.asarray(ys, dtype=float).ravel()
        out = np.empty(flat_x.shape, dtype=float)
        for i in range(flat_x.size):
            out[i] = self.h(Point2(float(flat_x[i]), float(flat_y[i])))
        return out.reshape(np.shape(xs))

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) enclosing the target."""
        r = self.bounding_radius
        return (self.anchor.x - r, self.anchor.y - r, self.anchor.x + r, self.anchor.y + r)

    def boundary_entry_time(self, p0: Point2, velocity: Point2, horizon: float) -> float | None:
        """Earliest t in (0, horizon] with h(p0 + t*velocity) <= 0, else None.

        h is convex along the segment, so a vanished interior minimum is the
        only way entry can hide between samples; the generic path locates the
        minimum by golden-section and bisects back to the first crossing.
        """
        if self.h(p0) <= 0.0:
            return 0.0
        return _generic_entry_time(self, p0, velocity, horizon)

    def boundary_seed(self, z: Point2) -> Point2:
        """Boundary point on the segment [anchor, z]; Newton seed for projection."""
        return _boundary_on_segment(self, self.anchor, z)


@dataclass(frozen=True)
class Circle(ConvexTarget):
    """Disk of radius ``radius`` centered at ``center``; h(z) = |z-c|^2 - r^2."""

    center: Point2
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError("circle radius must be positive")

    @property
    def anchor(self) -> Point2:
        return self.center

    @property
    def bounding_radius(self) -> float:
        return self.radius

    def h(self, z: Point2) -> float:
        dx = z.x - self.center.x
        dy = z.y - self.center.y
        return dx * dx + dy * dy - self.radius * self.radius

    def grad_h(self, z: Point2) -> Point2:
        return Point2(2.0 * (z.x - self.center.x), 2.0 * (z.y - self.center.y))

    def hess_h(self, z: Point2) -> tuple[float, float, float]:
        return 2.0, 0.0, 2.0

    def contains(self, z: Point2) -> bool:
        return dist(z, self.center) <= self.radius

    def project(self, z: Point2) -> Point2:
        d = dist(z, self.center)
        if d <= self.radius:
            return z
        s = self.radius / d
        return Point2(self.center.x + s * (z.x - self.center.x),
                      self.center.y + s * (z.y - self.center.y))

    def distance(self, z: Point2) -> float:
        return max(0.0, dist(z, self.center) - self.radius)

    def h_batch(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        dx = np.asarray(xs, dtype=float) - self.center.x
        dy = np.asarray(ys, dtype=float) - self.center.y
        return dx * dx + dy * dy - self.radius * self.radius

    def boundary_entry_time(self, p0: Point2, velocity: Point2, horizon: float) -> float | None:
        # |p0 + t v - c|^2 = r^2 is quadratic in t; take the first root in range.
        rx = p0.x - self.center.x
        ry = p0.y - self.center.y
        if rx * rx + ry * ry <= self.radius * self.radius:
            return 0.0
        a = velocity.x * velocity.x + velocity.y * velocity.y
        b = 2.0 * (rx * velocity.x + ry * velocity.y)
        c = rx * rx + ry * ry - self.radius * self.radius
        return _first_quadratic_root(a, b, c, horizon)


@dataclass(frozen=True)
class Ellipse(ConvexTarget):
    """Filled ellipse with semi-axes (a, b), rotated by ``rotation`` radians."""

    center: Point2
    semi_axes: tuple[float, float]
    rotation: float = 0.0

    def __post_init__(self):
        a, b = self.semi_axes
        if not (a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b)):
            raise ValueError("ellipse semi-axes must be positive")
        if not math.isfinite(self.rotation):
            raise ValueError("ellipse rotation must be finite")
        object.__setattr__(self, "_ct", math.cos(self.rotation))
        object.__setattr__(self, "_st", math.sin(self.rotation))

    @property
    def anchor(self) -> Point2:
        return self.center

    @property
    def bounding_radius(self) -> float:
        return max(self.semi_axes)

    def _to_local(self, z: Point2) -> tuple[float, float]:
        ct = self._ct
        st = self._st
        dx = z.x - self.center.x
        dy = z.y - self.center.y
        return ct * dx + st * dy, -st * dx + ct * dy

    def h(self, z: Point2) -> float:
        a, b = self.semi_axes
        u, v = self._to_local(z)
        return (u / a) ** 2 + (v / b) ** 2 - 1.0

    def grad_h(self, z: Point2) -> Point2:
        a, b = self.semi_axes
        u, v = self._to_local(z)
        gu = 2.0 * u / (a * a)
        gv = 2.0 * v / (b * b)
        ct = self._ct
        st = self._st
        return Point2(ct * gu - st * gv, st * gu + ct * gv)

    def hess_h(self, z: Point2) -> tuple[float, float, float]:
        a, b = self.semi_axes
        ct = self._ct
        st = self._st
        ka = 2.0 / (a * a)
        kb = 2.0 / (b * b)
        hxx = ka * ct * ct + kb * st * st
        hyy = ka * st * st + kb * ct * ct
        hxy = (ka - kb) * ct * st
        return hxx, hxy, hyy

    def h_batch(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        a, b = self.semi_axes
        ct = self._ct
        st = self._st
        dx = np.asarray(xs, dtype=float) - self.center.x
        dy = np.asarray(ys, dtype=float) - self.center.y
        u = ct * dx + st * dy
        v = -st * dx + ct * dy
        return (u / a) ** 2 + (v / b) ** 2 - 1.0

    def bounding_box(self) -> tuple[float, float, float, float]:
        a, b = self.semi_axes
        ct = self._ct
        st = self._st
        wx = math.hypot(a * ct, b * st)
        wy = math.hypot(a * st, b * ct)
        return (self.center.x - wx, self.center.y - wy, self.center.x + wx, self.center.y + wy)

    def boundary_seed(self, z: Point2) -> Point2:
        # h(c + s(z-c)) = s^2 (h(z)+1) - 1, so the ray-boundary point is exact.
        s = 1.0 / math.sqrt(self.h(z) + 1.0)
        return Point2(self.center.x + s * (z.x - self.center.x),
                      self.center.y + s * (z.y - self.center.y))

    def boundary_entry_time(self, p0: Point2, velocity: Point2, horizon: float) -> float | None:
        # h is quadratic along any line, so entry reduces to a quadratic root.
        h0 = self.h(p0)
        if h0 <= 0.0:
            return 0.0
        g = self.grad_h(p0)
        hxx, hxy, hyy = self.hess_h(p0)
        vx, vy = velocity.x, velocity.y
        a = 0.5 * (hxx * vx * vx + 2.0 * hxy * vx * vy + hyy * vy * vy)
        b = g.x * vx + g.y * vy
        return _first_quadratic_root(a, b, h0, horizon)


@dataclass(frozen=True)
class ImplicitSmooth(ConvexTarget):
    """Target given by caller-supplied smooth convex h and its gradient.

    The caller also supplies one strictly interior point and a radius around
    it that bounds the set.  Convexity and boundedness are the caller's
    contract; construction spot-checks midpoint convexity on sampled interior
    pairs and rejects anchors that are not strictly interior.
    """

    h_fn: Callable[[Point2], float]
    grad_h_fn: Callable[[Point2], Point2]
    interior_point: Point2
    radius_bound: float

    def __post_init__(self):
        if not (self.radius_bound > 0.0 and math.isfinite(self.radius_bound)):
            raise ValueError("bounding radius must be positive")
        if not self.h_fn(self.interior_point) < 0.0:
            raise ValueError("interior_point must satisfy h < 0")
        self._spot_check_convexity()

    def _spot_check_convexity(self, samples: int = 48, tol: float = 1e-9):
        rng = np.random.default_rng(20230517)
        pts = []
        for _ in range(samples * 4):
            if len(pts) >= samples:
                break
            ang = rng.uniform(0.0, 2.0 * math.pi)
            rad = self.radius_bound * math.sqrt(rng.uniform(0.0, 1.0))
            z = Point2(self.interior_point.x + rad * math.cos(ang),
                       self.interior_point.y + rad * math.sin(ang))
            if self.h_fn(z) <= 0.0:
                pts.append(z)
        for i in range(0, len(pts) - 1, 2):
            a, b = pts[i], pts[i + 1]
            mid = Point2(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
            if self.h_fn(mid) > tol:
                raise ValueError("sublevel set failed the midpoint-convexity spot check")

    @property
    def anchor(self) -> Point2:
        return self.interior_point

    @property
    def bounding_radius(self) -> float:
        return self.radius_bound

    def h(self, z: Point2) -> float:
        return self.h_fn(z)

    def grad_h(self, z: Point2) -> Point2:
        return self.grad_h_fn(z)


def _first_quadratic_root(a: float, b: float, c: float, horizon: float) -> float | None:
    """Smallest t in (0, horizon] with a t^2 + b t + c <= 0, given c > 0."""
    if abs(a) < 1e-300:
        if b >= 0.0:
            return None
        t = -c / b
        return t if 0.0 < t <= horizon else None
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    # Numerically stable pair of roots.
    if b >= 0.0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    roots = sorted(r for r in (q / a, c / q if q != 0.0 else math.inf) if math.isfinite(r))
    for t in roots:
        if 0.0 < t <= horizon:
            return t
    return None


def _generic_entry_time(target: ConvexTarget, p0: Point2, velocity: Point2,
                        horizon: float) -> float | None:
    def h_at(t: float) -> float:
        return target.h(Point2(p0.x + t * velocity.x, p0.y + t * velocity.y))

    h_end = h_at(horizon)
    if h_end > 0.0:
        # Convex along the segment: a crossing requires an interior minimum <= 0.
        lo, hi = 0.0, horizon
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        c = hi - inv_phi * (hi - lo)
        d = lo + inv_phi * (hi - lo)
        fc, fd = h_at(c), h_at(d)
        for _ in range(80):
            if hi - lo < 1e-12 * max(1.0, horizon):
                break
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - inv_phi * (hi - lo)
                fc = h_at(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + inv_phi * (hi - lo)
                fd = h_at(d)
        t_min = 0.5 * (lo + hi)
        if h_at(t_min) > 0.0:
            return None
        bracket_hi = t_min
    else:
        bracket_hi = horizon
    lo, hi = 0.0, bracket_hi
    for _ in range(200):
        if hi - lo <= 1e-9:
            break
        mid = 0.5 * (lo + hi)
        if h_at(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def _project_newton_kkt(target: ConvexTarget, z: Point2) -> Point2:
    """Project an exterior point by damped Newton on the KKT system.

    Unknowns (p, mu) solve p - z + mu * grad_h(p) = 0, h(p) = 0.  Seeded from
    the boundary point on the segment [anchor, z]; a stall triggers one
    re-seed from a perturbed bisection point before giving up.
    """
    budget = PROJECTION_MAX_ITER
    seed = target.boundary_seed(z)
    attempts = [seed]
    scale = 1.0 + dist(z, target.anchor)
    tol = PROJECTION_TARGET_TOL * scale
    accept_tol = PROJECTION_TOL * scale

    best_p = seed
    best_res = math.inf
    for attempt, p in enumerate(attempts):
        g = target.grad_h(p)
        gn = norm(g)
        if gn == 0.0:
            raise NonConvergence("grad_h vanished on the target boundary", best=p)
        mu = dist(z, p) / gn
        res = _kkt_residual(target, z, p, mu)
        stalled = False
        while budget > 0:
            if res <= tol:
                return p
            budget -= 1
            step = _kkt_newton_step(target, z, p, mu)
            if step is None:
                stalled = True
                break
            dpx, dpy, dmu = step
            t = 1.0
            improved = False
            for _ in range(25):
                p_new = Point2(p.x + t * dpx, p.y + t * dpy)
                mu_new = mu + t * dmu
                res_new = _kkt_residual(target, z, p_new, mu_new)
                if res_new < res * (1.0 - 1e-4 * t) or res_new <= tol:
                    p, mu, res = p_new, mu_new, res_new
                    improved = True
                    break
                t *= 0.5
            if not improved:
                stalled = True
                break
        if res < best_res:
            best_res, best_p = res, p
        if res <= accept_tol:
            return p
        if stalled and attempt == 0 and budget > 0:
            # Re-seed once from a slightly rotated interior ray.
            d = z - target.anchor
            off = Point2(target.anchor.x - 0.05 * d.y, target.anchor.y + 0.05 * d.x)
            if target.h(off) < 0.0:
                attempts.append(_boundary_on_segment(target, off, z))
            else:
                attempts.append(_boundary_on_segment(target, target.anchor, z))
    raise NonConvergence(
        f"projection KKT residual {best_res:.3e} above {accept_tol:.1e} "
        f"after {PROJECTION_MAX_ITER} iterations",
        best=best_p,
    )


def _kkt_residual(target: ConvexTarget, z: Point2, p: Point2, mu: float) -> float:
    g = target.grad_h(p)
    r1 = p.x - z.x + mu * g.x
    r2 = p.y - z.y + mu * g.y
    r3 = target.h(p)
    return max(abs(r1), abs(r2), abs(r3))


def _kkt_newton_step(target: ConvexTarget, z: Point2, p: Point2,
                     mu: float) -> tuple[float, float, float] | None:
    g = target.grad_h(p)
    hxx, hxy, hyy = target.hess_h(p)
    # J = [[I + mu H, g], [g^T, 0]]
    a11 = 1.0 + mu * hxx
    a12 = mu * hxy
    a22 = 1.0 + mu * hyy
    f1 = -(p.x - z.x + mu * g.x)
    f2 = -(p.y - z.y + mu * g.y)
    f3 = -target.h(p)
    m = [[a11, a12, g.x, f1],
         [a12, a22, g.y, f2],
         [g.x, g.y, 0.0, f3]]
    return _solve3(m)


def _solve3(m: list[list[float]]) -> tuple[float, float, float] | None:
    """Gaussian elimination with partial pivoting on a 3x4 augmented matrix."""
    for col in range(3):
        piv = max(range(col, 3), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) < 1e-300:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1.0 / m[col][col]
        for r in range(3):
            if r == col:
                continue
            factor = m[r][col] * inv
            if factor != 0.0:
                for c in range(col, 4):
                    m[r][c] -= factor * m[col][c]
    return (m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2])


def _boundary_on_segment(target: ConvexTarget, inside: Point2, outside: Point2) -> Point2:
    """Bisect [inside, outside] for the boundary crossing (h(inside)<0<h(outside))."""
    lo, hi = 0.0, 1.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        p = Point2(inside.x + mid * (outside.x - inside.x),
                   inside.y + mid * (outside.y - inside.y))
        if target.h(p) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    mid = 0.5 * (lo + hi)
    return Point2(inside.x + mid * (outside.x - inside.x),
                  inside.y + mid * (outside.y - inside.y))


def contains(target: ConvexTarget, z: Point2) -> bool:
    """Functional alias for ``target.contains(z)``."""
    return target.contains(z)


def project(target: ConvexTarget, z: Point2) -> Point2:
    """Functional alias for ``target.project(z)``."""
    return target.project(z)


def distance(target: ConvexTarget, z: Point2) -> float:
    """Functional alias for ``target.distance(z)``."""
    return target.distance(z)
