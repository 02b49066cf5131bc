"""Independent ground-truth machinery for testing the fitting pipeline.

Everything in this module is deliberately simple: dense grid searches with
golden-section refinement, an analytic planted-instance generator, and a
small LP for convex-hull membership.  None of it shares code paths with the
greedy reduction or the ellipsoid fit, which is what makes it usable as an
oracle in the test suite and the command line "widths" mode.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .linalg import Subspace
from .pointset import PointSet, lp_norm

__all__ = [
    "PlantedInstance",
    "exact_p2_width",
    "brute_force_width",
    "brute_force_affine_width",
    "best_line_in_span",
    "make_planted",
    "convex_hull_distance",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def exact_p2_width(ps, n):
    """Best achievable l_2 fitting error of any n-dimensional subspace.

    Equals the euclidean tail of the singular values of the point matrix,
    sqrt(sum of squared singular values beyond the n-th).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    s = np.linalg.svd(ps.points, compute_uv=False)
    return float(np.sqrt(np.sum(s[n:] ** 2)))


def _golden_min(f, lo, hi, iters=80):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (fc, c) if fc <= fd else (fd, d)


def _refine_2d(f, start, step, rounds=3):
    # coordinate-wise golden-section refinement around a grid winner
    x = np.array(start, dtype=float)
    best = f(x)
    for _ in range(rounds):
        for axis in range(2):
            def g(t, axis=axis):
                y = x.copy()
                y[axis] = t
                return f(y)

            val, t = _golden_min(g, x[axis] - step, x[axis] + step)
            if val < best:
                best = val
                x[axis] = t
    return best


def _sphere_grid(resolution):
    theta = np.linspace(0.0, math.pi, resolution)
    phi = np.linspace(0.0, math.pi, resolution)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return tt.ravel(), pp.ravel()


def _direction(theta, phi):
    st = np.sin(phi)
    return np.stack(
        [st * np.cos(theta), st * np.sin(theta), np.cos(phi) * np.ones_like(theta)]
    )


def _line_widths(directions, pts, p):
    # directions: (N, K) unit columns; pts: (N, M)
    proj = directions.T @ pts
    sq = np.sum(pts * pts, axis=0)
    resid = np.sqrt(np.maximum(sq[None, :] - proj * proj, 0.0))
    return _lp_rows(resid, p)


def _lp_rows(resid, p):
    if math.isinf(p):
        return np.max(resid, axis=1)
    peak = np.max(resid, axis=1)
    safe = np.where(peak == 0.0, 1.0, peak)
    out = safe * np.sum((resid / safe[:, None]) ** p, axis=1) ** (1.0 / p)
    return np.where(peak == 0.0, 0.0, out)


def brute_force_width(ps, n, p, resolution=181):
    """Best n-dimensional linear fit of a symmetric set by exhaustive search.

    Only meant for tiny instances: ambient dimension at most 3 and n in
    {1, 2}.  The set must be symmetric, which is what justifies searching
    linear subspaces only (an optimal centered fit exists).  Grid search
    over directions followed by golden-section refinement; the result is
    reliable to about 1e-4 relative at the default resolution.

    Accepts any p >= 2 including infinity (this is oracle machinery, so the
    l_2 case is allowed here).
    """
    if ps.ambient_dim > 3:
        raise ValueError("brute force width only supports ambient dimension <= 3")
    if n not in (1, 2):
        raise ValueError("brute force width only supports n in {1, 2}")
    if not math.isinf(p) and p < 2.0:
        raise ValueError("p must be at least 2")
    if not ps.is_symmetric:
        raise ValueError("brute force width needs a symmetric point set")
    pts = ps.points
    dim = ps.ambient_dim
    if n >= dim:
        return 0.0

    if dim == 2:
        # lines through the origin in the plane
        theta = np.linspace(0.0, math.pi, resolution)
        dirs = np.stack([np.cos(theta), np.sin(theta)])
        widths = _line_widths(dirs, pts, p)
        k = int(np.argmin(widths))
        step = theta[1] - theta[0]

        def f(t):
            d = np.array([[math.cos(t)], [math.sin(t)]])
            return float(_line_widths(d, pts, p)[0])

        val, _ = _golden_min(f, theta[k] - step, theta[k] + step)
        return min(float(widths[k]), val)

    theta, phi = _sphere_grid(resolution)
    dirs = _direction(theta, phi)
    if n == 1:
        widths = _line_widths(dirs, pts, p)

        def f(x):
            d = _direction(np.array([x[0]]), np.array([x[1]]))
            return float(_line_widths(d, pts, p)[0])

    else:
        # a plane through the origin in R^3 is its unit normal
        resid = np.abs(dirs.T @ pts)
        widths = _lp_rows(resid, p)

        def f(x):
            d = _direction(np.array([x[0]]), np.array([x[1]]))
            return float(_lp_rows(np.abs(d.T @ pts), p)[0])

    k = int(np.argmin(widths))
    step = math.pi / (resolution - 1)
    refined = _refine_2d(f, (theta[k], phi[k]), step)
    return min(float(widths[k]), refined)


def _mec_radius(pts):
    """Radius of the minimal enclosing circle of 2-d points (Welzl)."""

    def circle_two(a, b):
        c = 0.5 * (a + b)
        return c, float(np.linalg.norm(a - c))

    def circle_three(a, b, c):
        # circumcircle; degenerate triples fall back to the widest pair
        d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-14:
            best = None
            for u, v in ((a, b), (a, c), (b, c)):
                cen, r = circle_two(u, v)
                if best is None or r > best[1]:
                    best = (cen, r)
            return best
        ax2, bx2, cx2 = (a @ a), (b @ b), (c @ c)
        ux = (ax2 * (b[1] - c[1]) + bx2 * (c[1] - a[1]) + cx2 * (a[1] - b[1])) / d
        uy = (ax2 * (c[0] - b[0]) + bx2 * (a[0] - c[0]) + cx2 * (b[0] - a[0])) / d
        cen = np.array([ux, uy])
        return cen, float(np.linalg.norm(a - cen))

    def inside(circle, q):
        cen, r = circle
        return np.linalg.norm(q - cen) <= r + 1e-12

    points = [pts[:, j] for j in range(pts.shape[1])]
    rng = np.random.default_rng(0)
    rng.shuffle(points)
    circle = (points[0], 0.0) if points else (np.zeros(2), 0.0)
    for i, q in enumerate(points):
        if inside(circle, q):
            continue
        circle = (q, 0.0)
        for j in range(i):
            pj = points[j]
            if inside(circle, pj):
                continue
            circle = circle_two(q, pj)
            for t in range(j):
                pt = points[t]
                if inside(circle, pt):
                    continue
                circle = circle_three(q, pj, pt)
    return circle[1]


def _complement_basis(u):
    # two unit vectors spanning the plane orthogonal to u in R^3
    pick = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    w1 = pick - (pick @ u) * u
    w1 /= np.linalg.norm(w1)
    w2 = np.cross(u, w1)
    return np.stack([w1, w2])


def brute_force_affine_width(points, n, resolution=61):
    """Worst-case (max-norm) width over affine subspaces, tiny cases only.

    Unlike :func:`brute_force_width` the set does not need to be symmetric:
    for every candidate direction the best offset is computed in closed
    form.  A hyperplane fit uses the midrange of the normal projections; a
    line fit in R^3 uses the minimal enclosing circle of the points
    projected onto the orthogonal plane.  Infinity norm only.
    """
    pts = np.asarray(points, dtype=float)
    dim = pts.shape[0]
    if dim > 3:
        raise ValueError("affine brute force only supports ambient dimension <= 3")
    if n >= dim:
        return 0.0

    if dim - n == 1:
        # hyperplane: direction is the unit normal, offset is the midrange
        if dim == 2:
            theta = np.linspace(0.0, math.pi, resolution)
            normals = np.stack([np.cos(theta), np.sin(theta)])
            proj = normals.T @ pts
            widths = 0.5 * (np.max(proj, axis=1) - np.min(proj, axis=1))
            k = int(np.argmin(widths))
            step = theta[1] - theta[0]

            def f(t):
                nr = np.array([math.cos(t), math.sin(t)])
                r = nr @ pts
                return 0.5 * float(np.max(r) - np.min(r))

            val, _ = _golden_min(f, theta[k] - step, theta[k] + step)
            return min(float(widths[k]), val)
        theta, phi = _sphere_grid(resolution)
        normals = _direction(theta, phi)
        proj = normals.T @ pts
        widths = 0.5 * (np.max(proj, axis=1) - np.min(proj, axis=1))
        k = int(np.argmin(widths))

        def f(x):
            nr = _direction(np.array([x[0]]), np.array([x[1]]))[:, 0]
            r = nr @ pts
            return 0.5 * float(np.max(r) - np.min(r))

        step = math.pi / (resolution - 1)
        refined = _refine_2d(f, (theta[k], phi[k]), step)
        return min(float(widths[k]), refined)

    # line in R^3: for each direction, the best offset is the center of the
    # minimal enclosing circle of the projections onto the orthogonal plane
    theta, phi = _sphere_grid(resolution)

    def line_obj(x):
        u = _direction(np.array([x[0]]), np.array([x[1]]))[:, 0]
        plane = _complement_basis(u)
        return _mec_radius(plane @ pts)

    best_val = math.inf
    best_xy = (0.0, 0.0)
    for t, ph in zip(theta, phi):
        val = line_obj((t, ph))
        if val < best_val:
            best_val = val
            best_xy = (t, ph)
    step = math.pi / (resolution - 1)
    refined = _refine_2d(line_obj, best_xy, step)
    return min(best_val, refined)


def best_line_in_span(ps, span, p, resolution=181):
    """Best one-dimensional linear fit restricted to a given span.

    Searches lines inside ``span`` (dimension at most 3) while measuring
    residuals in the full ambient space, so the out-of-span component of
    every point is charged to the fit.  Used to evaluate how good a
    reduced subspace is for symmetric sets.
    """
    basis = span.basis
    m = span.dim
    pts = ps.points
    if m == 0:
        raise ValueError("span is trivial")
    if m == 1:
        return float(_line_widths(basis, pts, p)[0])
    if m == 2:
        theta = np.linspace(0.0, math.pi, resolution)
        dirs = basis @ np.stack([np.cos(theta), np.sin(theta)])
        widths = _line_widths(dirs, pts, p)
        k = int(np.argmin(widths))
        step = theta[1] - theta[0]

        def f(t):
            d = basis @ np.array([[math.cos(t)], [math.sin(t)]])
            return float(_line_widths(d, pts, p)[0])

        val, _ = _golden_min(f, theta[k] - step, theta[k] + step)
        return min(float(widths[k]), val)
    if m == 3:
        theta, phi = _sphere_grid(resolution)
        dirs = basis @ _direction(theta, phi)
        widths = _line_widths(dirs, pts, p)
        k = int(np.argmin(widths))

        def f(x):
            d = basis @ _direction(np.array([x[0]]), np.array([x[1]]))
            return float(_line_widths(d, pts, p)[0])

        step = math.pi / (resolution - 1)
        refined = _refine_2d(f, (theta[k], phi[k]), step)
        return min(float(widths[k]), refined)
    raise ValueError("span search supports dimension <= 3")


@dataclass(frozen=True)
class PlantedInstance:
    """A symmetric point set with a known best-fit subspace.

    Every point sits within ``noise_level`` of ``true_subspace``, which
    pins the achievable widths: the worst-case width is at most
    ``noise_level`` and the l_p width at most ``noise_level`` times the
    number of nonzero points to the power 1/p.
    """

    points: PointSet
    true_subspace: Subspace
    noise_level: float


def make_planted(ambient_dim, count, n, noise, seed):
    """Generate a symmetric point set clustered around a random subspace.

    Parameters
    ----------
    ambient_dim : int
    count : int
        Requested number of points; the output holds the origin plus
        count // 2 generated points and their negations, so the set is
        symmetric by construction and its centroid is exactly zero.
    n : int
        Dimension of the hidden subspace.
    noise : float
        Orthogonal displacement magnitudes are uniform in [0, noise].
    seed : int
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    if not 1 <= n < ambient_dim:
        raise ValueError("need 1 <= n < ambient_dim")
    rng = np.random.default_rng(seed)
    basis = np.linalg.qr(rng.standard_normal((ambient_dim, n)))[0]
    half = count // 2
    coeffs = rng.standard_normal((n, half))
    inside = basis @ coeffs
    g = rng.standard_normal((ambient_dim, half))
    g -= basis @ (basis.T @ g)
    norms = np.linalg.norm(g, axis=0)
    norms[norms == 0.0] = 1.0
    mags = rng.uniform(0.0, noise, half)
    pts_half = inside + g * (mags / norms)
    points = np.concatenate(
        [np.zeros((ambient_dim, 1)), pts_half, -pts_half], axis=1
    )
    ps = PointSet(points, is_symmetric=True, mean=np.zeros(ambient_dim))
    return PlantedInstance(ps, Subspace(basis), float(noise))


def convex_hull_distance(hull_points, x):
    """Infinity-norm distance from x to the convex hull of the columns.

    Solves the LP  min t  s.t.  |P lam - x|_inf <= t, sum(lam) = 1,
    lam >= 0.  A value of (numerically) zero certifies membership.
    """
    pts = np.asarray(hull_points, dtype=float)
    x = np.asarray(x, dtype=float)
    dim, m = pts.shape
    ones = np.ones((1, m))
    c = np.zeros(m + 1)
    c[-1] = 1.0
    a_ub = np.block(
        [[pts, -np.ones((dim, 1))], [-pts, -np.ones((dim, 1))]]
    )
    b_ub = np.concatenate([x, -x])
    a_eq = np.concatenate([ones, np.zeros((1, 1))], axis=1)
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=np.array([1.0]),
        bounds=[(0.0, None)] * m + [(0.0, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"hull membership LP failed: {res.message}")
    return float(res.fun)
