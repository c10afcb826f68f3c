"""Escape game of degree: optimal escape point via difference-of-convex iteration.

The evader's best entry point maximizes her final separation  |z - x_P| -
(1/gamma) |z - x_E|  over the intersection of the target set with her
dominant-region disk.  The sign-flipped objective is a difference of convex
functions, minimized here with the convex-concave procedure: linearize the
concave term, solve each convex subproblem by projected subgradient descent
with Dykstra-corrected alternating projections, multi-start from boundary
seeds, then sharpen the winner with a Newton polish on the active target
boundary.  A brute-force grid oracle provides an independent check.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .apollonius import ApolloniusDisk, GameState, SpeedRatio, apollonius_disk
from .errors import DegeneratePoint, DegenerateState, Infeasible, NonConvergence
from .geometry import ConvexTarget, Point2, dist
from .kind import barrier_value

Grad4 = tuple[float, float, float, float]

# Inner-loop iteration ceiling for one convex subproblem (projected subgradient).
INNER_ITERATION_CAP = 5000
# Constraint slack accepted on returned escape points.
FEASIBILITY_TOL = 1e-9
# Barrier values this close to zero make the feasible set a single point.
SINGLETON_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class DcSolverConfig:
    """Tunables for the convex-concave escape-point solver."""

    max_outer_iterations: int = 100
    objective_tolerance: float = 1e-10
    subproblem_tolerance: float = 1e-11
    multi_start_count: int = 8

    def __post_init__(self):
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be positive")
        if self.objective_tolerance <= 0.0 or self.subproblem_tolerance <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.multi_start_count < 0:
            raise ValueError("multi_start_count must be nonnegative")


@dataclass(frozen=True)
class EscapeSolution:
    """Saddle-point solution of the escape subgame at one state.

    ``psi`` / ``varphi`` are the bearings of the escape point seen from the
    pursuer / evader.  ``degenerate`` marks the immediate-escape case where
    the escape point coincides with the evader and ``varphi`` falls back to
    the pursuer bearing by convention.  ``objective_history`` records the
    minimized objective across outer iterations of the winning start.
    """

    escape_point: Point2
    u_pursuer: Point2
    u_evader: Point2
    value: float
    psi: float
    varphi: float
    solver_iterations: int
    certified_by_oracle: bool = False
    degenerate: bool = False
    converged: bool = True
    objective_history: tuple[float, ...] = ()


def escape_feasible(state: GameState, target: ConvexTarget, ratio: SpeedRatio) -> bool:
    """True iff the evader can reach the target uncaptured (barrier value <= 0)."""
    return barrier_value(state, target, ratio) <= 0.0


def _objective(z: Point2, state: GameState, gamma: float) -> float:
    """Minimized form of the escape objective; the game value is its negation."""
    return dist(z, state.evader) / gamma - dist(z, state.pursuer)


def _disk_project(disk: ApolloniusDisk, z: Point2) -> Point2:
    d = dist(z, disk.center)
    if d <= disk.radius:
        return z
    s = disk.radius / d
    return Point2(disk.center.x + s * (z.x - disk.center.x),
                  disk.center.y + s * (z.y - disk.center.y))


def _dykstra_project(target: ConvexTarget, disk: ApolloniusDisk, z: Point2,
                     max_cycles: int = 100, tol: float = 1e-13) -> Point2:
    """Dykstra's alternating projections onto target-set/disk intersection."""
    x = z
    px = py = qx = qy = 0.0
    scale = 1.0 + max(disk.radius, target.bounding_radius)
    for _ in range(max_cycles):
        y = target.project(Point2(x.x + px, x.y + py))
        px, py = x.x + px - y.x, x.y + py - y.y
        x_new = _disk_project(disk, Point2(y.x + qx, y.y + qy))
        qx, qy = y.x + qx - x_new.x, y.y + qy - x_new.y
        if dist(y, x_new) <= tol * scale:
            return x_new
        x = x_new
    return x


def _feasible(target: ConvexTarget, disk: ApolloniusDisk, z: Point2,
              slack: float = FEASIBILITY_TOL) -> bool:
    if dist(z, disk.center) > disk.radius + slack:
        return False
    return target.h(z) <= slack * max(1.0, abs(target.h(target.anchor)))


def _subproblem_descent(z0: Point2, lin_x: float, lin_y: float, state: GameState,
                        gamma: float, target: ConvexTarget, disk: ApolloniusDisk,
                        config: DcSolverConfig) -> Point2:
    """Minimize (1/gamma)|z - x_E| - g.z over the feasible lens from z0.

    Normalized projected subgradient steps with geometric decay, run as a
    coarse sweep followed by a fine sweep from the incumbent; light Dykstra
    correction per step, full correction on returned candidates.
    """
    evader = state.evader
    span = min(target.bounding_radius, disk.radius)

    def phi(z: Point2) -> float:
        return dist(z, evader) / gamma - (lin_x * z.x + lin_y * z.y)

    best = z0
    best_val = phi(z0)
    iterations = 0
    for step0, count in ((0.7 * span, 40), (0.028 * span, 25)):
        z = best
        stale_val = best_val
        step = step0
        for _ in range(count):
            if iterations >= INNER_ITERATION_CAP:
                break
            iterations += 1
            de = dist(z, evader)
            if de < 1e-13:
                dx, dy = -lin_x, -lin_y
            else:
                dx = (z.x - evader.x) / (gamma * de) - lin_x
                dy = (z.y - evader.y) / (gamma * de) - lin_y
            dn = math.hypot(dx, dy)
            if dn < 1e-15:
                break
            z = _dykstra_project(target, disk,
                                 Point2(z.x - step * dx / dn, z.y - step * dy / dn),
                                 max_cycles=3)
            val = phi(z)
            if val < best_val:
                best, best_val = z, val
            step *= 0.65
        if stale_val - best_val < config.subproblem_tolerance * (1.0 + abs(best_val)):
            break
    certified = _dykstra_project(target, disk, best)
    return certified if phi(certified) <= phi(best) or not _feasible(target, disk, best) \
        else best


def _ccp_from_seed(seed: Point2, state: GameState, gamma: float, target: ConvexTarget,
                   disk: ApolloniusDisk,
                   config: DcSolverConfig) -> tuple[Point2, float, int, bool, list[float]]:
    """Convex-concave iteration from one feasible seed.

    Returns (point, objective, outer_iterations, converged, history)."""
    z = seed
    f_prev = _objective(z, state, gamma)
    history = [f_prev]
    converged = False
    outer = 0
    for outer in range(1, config.max_outer_iterations + 1):
        dp = dist(z, state.pursuer)
        if dp < 1e-13:
            lin_x = lin_y = 0.0  # any unit vector subgradient works; zero is valid
        else:
            lin_x = (z.x - state.pursuer.x) / dp
            lin_y = (z.y - state.pursuer.y) / dp
        z_next = _subproblem_descent(z, lin_x, lin_y, state, gamma, target, disk, config)
        f_next = _objective(z_next, state, gamma)
        if f_next > f_prev:
            # The majorizer guarantees descent; keep the incumbent on float noise.
            z_next, f_next = z, f_prev
        history.append(f_next)
        if f_prev - f_next < config.objective_tolerance:
            z, f_prev = z_next, f_next
            converged = True
            break
        z, f_prev = z_next, f_next
    return z, f_prev, outer, converged, history


def _polish_on_boundary(z0: Point2, state: GameState, gamma: float,
                        target: ConvexTarget, disk: ApolloniusDisk) -> Point2 | None:
    """Newton refinement of a boundary optimum: grad F + lambda grad h = 0, h = 0.

    Returns None when the iteration leaves the basin, violates a constraint,
    produces a negative multiplier, or fails to reach tolerance.
    """
    if target.h(z0) < -1e-7 * max(1.0, abs(target.h(target.anchor))):
        return None  # interior candidate: the boundary system does not apply
    zx, zy = z0.x, z0.y
    lam = None
    tol = 1e-12 * (1.0 + 1.0 / gamma)
    travel_cap = 0.5 * (target.bounding_radius + disk.radius)

    def pieces(x: float, y: float):
        dex = x - state.evader.x
        dey = y - state.evader.y
        dpx = x - state.pursuer.x
        dpy = y - state.pursuer.y
        de = math.hypot(dex, dey)
        dp = math.hypot(dpx, dpy)
        if de < 1e-9 or dp < 1e-9:
            return None
        gx = dex / (gamma * de) - dpx / dp
        gy = dey / (gamma * de) - dpy / dp
        # Hessian of F = (1/gamma)|z-E| - |z-P|
        ee = 1.0 / (gamma * de)
        pp = 1.0 / dp
        fxx = ee * (1.0 - (dex / de) ** 2) - pp * (1.0 - (dpx / dp) ** 2)
        fyy = ee * (1.0 - (dey / de) ** 2) - pp * (1.0 - (dpy / dp) ** 2)
        fxy = ee * (-(dex / de) * (dey / de)) - pp * (-(dpx / dp) * (dpy / dp))
        return gx, gy, fxx, fxy, fyy

    for _ in range(30):
        parts = pieces(zx, zy)
        if parts is None:
            return None
        gx, gy, fxx, fxy, fyy = parts
        p = Point2(zx, zy)
        hg = target.grad_h(p)
        hxx, hxy, hyy = target.hess_h(p)
        hval = target.h(p)
        if lam is None:
            hg2 = hg.x * hg.x + hg.y * hg.y
            if hg2 < 1e-300:
                return None
            lam = -(gx * hg.x + gy * hg.y) / hg2
        r1 = gx + lam * hg.x
        r2 = gy + lam * hg.y
        res = max(abs(r1), abs(r2), abs(hval))
        if res <= tol:
            break
        a11 = fxx + lam * hxx
        a12 = fxy + lam * hxy
        a22 = fyy + lam * hyy
        step = _solve3x3(a11, a12, a22, hg.x, hg.y, -r1, -r2, -hval)
        if step is None:
            return None
        dzx, dzy, dlam = step
        t = 1.0
        moved = False
        for _ in range(20):
            nx, ny, nl = zx + t * dzx, zy + t * dzy, lam + t * dlam
            parts_n = pieces(nx, ny)
            if parts_n is not None:
                ngx, ngy = parts_n[0], parts_n[1]
                np_pt = Point2(nx, ny)
                nhg = target.grad_h(np_pt)
                nres = max(abs(ngx + nl * nhg.x), abs(ngy + nl * nhg.y),
                           abs(target.h(np_pt)))
                if nres < res:
                    zx, zy, lam = nx, ny, nl
                    moved = True
                    break
            t *= 0.5
        if not moved:
            return None
    else:
        return None
    z = Point2(zx, zy)
    if lam < -1e-9 or dist(z, z0) > travel_cap:
        return None
    if dist(z, disk.center) > disk.radius + FEASIBILITY_TOL:
        return None
    if target.h(z) > 1e-10 * max(1.0, abs(target.h(target.anchor))):
        return None
    return z


def _solve3x3(a11, a12, a22, b1, b2, r1, r2, r3):
    """Solve [[a11,a12,b1],[a12,a22,b2],[b1,b2,0]] x = r by elimination."""
    m = [[a11, a12, b1, r1], [a12, a22, b2, r2], [b1, b2, 0.0, r3]]
    for col in range(3):
        piv = max(range(col, 3), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) < 1e-300:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1.0 / m[col][col]
        for r in range(3):
            if r != col and m[r][col] != 0.0:
                f = m[r][col] * inv
                for c in range(col, 4):
                    m[r][c] -= f * m[col][c]
    return (m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2])


def _candidate_seeds(state: GameState, target: ConvexTarget, disk: ApolloniusDisk,
                     config: DcSolverConfig, proj_center: Point2) -> list[Point2]:
    seeds = [proj_center]
    m = config.multi_start_count
    for i in range(m):
        ang = 2.0 * math.pi * (i + 0.5) / max(m, 1)
        q = Point2(disk.center.x + disk.radius * math.cos(ang),
                   disk.center.y + disk.radius * math.sin(ang))
        s = _dykstra_project(target, disk, q)
        if all(dist(s, existing) > 1e-9 for existing in seeds):
            seeds.append(s)
    return seeds


def _angle_about(anchor: Point2, z: Point2) -> float:
    ang = math.atan2(z.y - anchor.y, z.x - anchor.x)
    return ang + 2.0 * math.pi if ang < 0.0 else ang


def _build_solution(state: GameState, gamma: float, x_dagger: Point2,
                    iterations: int, converged: bool,
                    history: tuple[float, ...]) -> EscapeSolution:
    dp = dist(x_dagger, state.pursuer)
    de = dist(x_dagger, state.evader)
    if dp < 1e-12:
        raise DegenerateState("escape point coincides with the pursuer")
    psi = math.atan2(x_dagger.y - state.pursuer.y, x_dagger.x - state.pursuer.x)
    u_p = Point2((x_dagger.x - state.pursuer.x) / dp, (x_dagger.y - state.pursuer.y) / dp)
    degenerate = de < 1e-12
    if degenerate:
        varphi = psi
        u_e = u_p
    else:
        varphi = math.atan2(x_dagger.y - state.evader.y, x_dagger.x - state.evader.x)
        u_e = Point2((x_dagger.x - state.evader.x) / de, (x_dagger.y - state.evader.y) / de)
    return EscapeSolution(
        escape_point=x_dagger,
        u_pursuer=u_p,
        u_evader=u_e,
        value=dp - de / gamma,
        psi=psi,
        varphi=varphi,
        solver_iterations=iterations,
        degenerate=degenerate,
        converged=converged,
        objective_history=history,
    )


def solve_escape_point(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                       config: DcSolverConfig | None = None,
                       warm_start: Point2 | None = None) -> EscapeSolution:
    """Optimal escape point, headings and value for an escape-space state.

    Raises Infeasible on capture-space states.  When the outer loop exhausts
    its budget the best iterate is still returned, flagged ``converged=False``
    (never a silent wrong answer).  ``warm_start`` enables the fast feedback
    path: the previous escape point is re-polished at the new state and only
    falls back to the full multi-start when polishing fails.
    """
    if config is None:
        config = DcSolverConfig()
    gamma = ratio.gamma
    disk = apollonius_disk(state, ratio)
    proj_center = target.project(disk.center)
    bval = dist(proj_center, disk.center) - disk.radius
    if bval > 0.0:
        raise Infeasible(f"state is in the capture space (barrier value {bval:.3e})")

    if target.contains(state.evader):
        # Immediate escape: the evader already stands on the target.
        return _build_solution(state, gamma, state.evader, 0, True, ())

    if bval >= -SINGLETON_TOL:
        # Tangency: the feasible set is the single projection point.
        return _build_solution(state, gamma, proj_center, 0, True,
                               (_objective(proj_center, state, gamma),))

    if warm_start is not None:
        warm = _dykstra_project(target, disk, warm_start)
        candidates = []
        polished = _polish_on_boundary(warm, state, gamma, target, disk)
        if polished is not None:
            candidates.append(polished)
        alt = _polish_on_boundary(proj_center, state, gamma, target, disk)
        if alt is not None:
            candidates.append(alt)
        if candidates:
            best = min(candidates, key=lambda z: _objective(z, state, gamma))
            return _build_solution(state, gamma, best, 1, True,
                                   (_objective(best, state, gamma),))
        # fall through to the full solve

    seeds = _candidate_seeds(state, target, disk, config, proj_center)
    results = []
    for seed in seeds:
        z, f_val, outer, converged, history = _ccp_from_seed(
            seed, state, gamma, target, disk, config)
        polished = _polish_on_boundary(z, state, gamma, target, disk)
        if polished is not None:
            f_pol = _objective(polished, state, gamma)
            if f_pol <= f_val + 1e-12:
                z, f_val = polished, f_pol
                history = history + [f_pol]
        results.append((f_val, z, outer, converged, tuple(history)))

    best_f = min(r[0] for r in results)
    contenders = [r for r in results if r[0] <= best_f + 1e-12]
    # Deterministic tie-break: smallest polar angle about the target anchor.
    contenders.sort(key=lambda r: _angle_about(target.anchor, r[1]))
    f_val, z, outer, converged, history = contenders[0]
    solution = _build_solution(state, gamma, z, outer, converged, history)
    if not converged:
        raise NonConvergence(
            f"convex-concave loop hit {config.max_outer_iterations} outer iterations",
            best=dataclasses.replace(solution, converged=False))
    return solution


def brute_force_escape_point(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                             grid_resolution: int = 801) -> Point2:
    """Independent escape-point oracle: dense grid plus local pattern search.

    Evaluates the escape objective on a grid over the feasible region's
    bounding box (intersection of the target and disk boxes, a superset of
    the true box), keeps feasible lattice points, seeds with the disk-center
    projection so near-tangent states resolve, then polishes the best
    candidate with twenty compass pattern-search iterations.
    """
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be at least 2")
    gamma = ratio.gamma
    disk = apollonius_disk(state, ratio)
    proj_center = target.project(disk.center)
    if dist(proj_center, disk.center) - disk.radius > 0.0:
        raise Infeasible("state is in the capture space")

    txmin, tymin, txmax, tymax = target.bounding_box()
    xmin = max(txmin, disk.center.x - disk.radius)
    xmax = min(txmax, disk.center.x + disk.radius)
    ymin = max(tymin, disk.center.y - disk.radius)
    ymax = min(tymax, disk.center.y + disk.radius)

    best = proj_center
    best_val = _objective(proj_center, state, gamma)
    if xmax > xmin and ymax > ymin:
        xs = np.linspace(xmin, xmax, grid_resolution)
        ys = np.linspace(ymin, ymax, grid_resolution)
        gx, gy = np.meshgrid(xs, ys)
        in_disk = (gx - disk.center.x) ** 2 + (gy - disk.center.y) ** 2 <= disk.radius ** 2
        feasible = in_disk & (target.h_batch(gx, gy) <= 0.0)
        if feasible.any():
            obj = (np.hypot(gx - state.evader.x, gy - state.evader.y) / gamma
                   - np.hypot(gx - state.pursuer.x, gy - state.pursuer.y))
            obj = np.where(feasible, obj, np.inf)
            idx = int(np.argmin(obj))
            val = float(obj.flat[idx])
            if val < best_val:
                best = Point2(float(gx.flat[idx]), float(gy.flat[idx]))
                best_val = val

    box_diam = math.hypot(max(xmax - xmin, 0.0), max(ymax - ymin, 0.0))
    step = box_diam / grid_resolution if box_diam > 0.0 else target.bounding_radius / grid_resolution
    # One pattern-search iteration = poll the compass until no move improves
    # at the current step, then contract the step.  Moves landing outside the
    # feasible lens are projected back onto it (within float slack), otherwise
    # the search would stall hugging a curved active boundary.
    h_slack = 1e-12 * max(1.0, abs(target.h(target.anchor)))
    for _ in range(20):
        for _ in range(400):
            diag = step / math.sqrt(2.0)
            trial_best = best_val
            trial_pt = best
            for ddx, ddy in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step),
                             (diag, diag), (diag, -diag), (-diag, diag), (-diag, -diag)):
                cand = Point2(best.x + ddx, best.y + ddy)
                if target.h(cand) > 0.0 or dist(cand, disk.center) > disk.radius:
                    cand = _dykstra_project(target, disk, cand, max_cycles=60)
                    if (target.h(cand) > h_slack
                            or dist(cand, disk.center) > disk.radius + 1e-12):
                        continue
                val = _objective(cand, state, gamma)
                if val < trial_best:
                    trial_best, trial_pt = val, cand
            if trial_best >= best_val:
                break
            best, best_val = trial_pt, trial_best
        step *= 0.5
    return best


def certify_with_oracle(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                        solution: EscapeSolution, grid_resolution: int = 801,
                        objective_tol: float = 1e-6) -> EscapeSolution:
    """Return the solution flagged certified iff the grid oracle cannot beat it."""
    oracle_pt = brute_force_escape_point(state, target, ratio, grid_resolution)
    gamma = ratio.gamma
    ours = _objective(solution.escape_point, state, gamma)
    theirs = _objective(oracle_pt, state, gamma)
    return dataclasses.replace(solution, certified_by_oracle=ours <= theirs + objective_tol)


def value_escape(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                 config: DcSolverConfig | None = None,
                 solution: EscapeSolution | None = None) -> float:
    """Final separation under closed-loop optimal play."""
    if solution is None:
        solution = solve_escape_point(state, target, ratio, config)
    return solution.value


def _require_strict_escape(state: GameState, target: ConvexTarget, ratio: SpeedRatio):
    bval = barrier_value(state, target, ratio)
    if bval >= 0.0:
        raise Infeasible(
            f"strictly negative barrier value required, got {bval:.3e}")


def grad_value_escape(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                      config: DcSolverConfig | None = None,
                      solution: EscapeSolution | None = None) -> Grad4:
    """Closed-form value gradient, ordered (pursuerx, pursuery, evaderx, evadery)."""
    _require_strict_escape(state, target, ratio)
    if solution is None:
        solution = solve_escape_point(state, target, ratio, config)
    if solution.degenerate:
        raise DegeneratePoint("escape point equals the evader; bearing indeterminate")
    inv_g = 1.0 / ratio.gamma
    return (
        -math.cos(solution.psi),
        -math.sin(solution.psi),
        inv_g * math.cos(solution.varphi),
        inv_g * math.sin(solution.varphi),
    )


def hji_residual_escape(state: GameState, target: ConvexTarget, ratio: SpeedRatio,
                        config: DcSolverConfig | None = None,
                        u_pursuer: Point2 | None = None,
                        u_evader: Point2 | None = None,
                        solution: EscapeSolution | None = None) -> float:
    """Directional derivative of the escape value along the closed-loop flow.

    Zero at the saddle point; a pursuer deviation drives it positive (his
    guaranteed payoff deteriorates), an evader deviation negative.
    """
    _require_strict_escape(state, target, ratio)
    if solution is None:
        solution = solve_escape_point(state, target, ratio, config)
    if solution.degenerate:
        raise DegeneratePoint("escape point equals the evader; bearing indeterminate")
    grad = grad_value_escape(state, target, ratio, config, solution=solution)
    up = u_pursuer if u_pursuer is not None else solution.u_pursuer
    ue = u_evader if u_evader is not None else solution.u_evader
    vp = ratio.v_pursuer
    ve = ratio.v_evader
    return (grad[0] * vp * up.x + grad[1] * vp * up.y
            + grad[2] * ve * ue.x + grad[3] * ve * ue.y)
