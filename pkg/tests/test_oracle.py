import math

import numpy as np
import pytest
from scipy.optimize import minimize

from sspn.linalg import Subspace
from sspn.oracle import (
    best_line_in_span,
    brute_force_affine_width,
    brute_force_width,
    convex_hull_distance,
    exact_p2_width,
    make_planted,
    _mec_radius,
)
from sspn.pointset import PointSet, symmetrize


def cross_polytope_points():
    return PointSet(
        np.array(
            [[1.0, -1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0, 0.0]]
        ),
        is_symmetric=True,
    )


def test_exact_p2_width_rank_deficient():
    rng = np.random.default_rng(2)
    basis = np.linalg.qr(rng.standard_normal((5, 2)))[0]
    ps = PointSet(basis @ rng.standard_normal((2, 9)))
    assert exact_p2_width(ps, 2) <= 1e-12
    assert exact_p2_width(ps, 5) == 0.0


def test_exact_p2_width_axis_points():
    pts = np.array(
        [
            [3.0, -3.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 2.0, -2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0],
        ]
    )
    ps = PointSet(pts, is_symmetric=True)
    assert np.isclose(exact_p2_width(ps, 1), math.sqrt(10.0))
    assert np.isclose(exact_p2_width(ps, 2), math.sqrt(2.0))


def test_exact_p2_width_vs_random_subspaces():
    # the closed form can never exceed any sampled subspace's error, and a
    # locally refined search should land on it
    rng = np.random.default_rng(14)
    ps = PointSet(rng.standard_normal((6, 12)))
    n = 2
    exact = exact_p2_width(ps, n)
    pts = ps.points
    total = np.sum(pts * pts)

    def p2_error(raw):
        q = np.linalg.qr(raw.reshape(6, n))[0]
        return math.sqrt(max(total - np.sum((q.T @ pts) ** 2), 0.0))

    best_raw = None
    best_val = math.inf
    for _ in range(10_000):
        raw = rng.standard_normal(6 * n)
        val = p2_error(raw)
        if val < best_val:
            best_val = val
            best_raw = raw
        assert exact <= val + 1e-12
    res = minimize(p2_error, best_raw, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
    assert abs(exact - res.fun) <= 1e-6


def test_brute_force_width_cross_polytope():
    # all four unit points are sqrt(2)/2 from the diagonal line, and no
    # line does better: the objective is max(|sin t|, |cos t|)
    ps = cross_polytope_points()
    w = brute_force_width(ps, 1, math.inf)
    assert np.isclose(w, math.sqrt(2.0) / 2.0, atol=1e-8)
    # sanity: an axis-aligned line is strictly worse (distance 1)
    axis = Subspace(np.array([[1.0], [0.0]]))
    assert best_line_in_span(ps, axis, math.inf) > w


def test_brute_force_width_collinear():
    direction = np.array([2.0, 1.0]) / math.sqrt(5.0)
    pts = np.concatenate(
        [np.zeros((2, 1))]
        + [t * direction[:, None] for t in (1.0, -1.0, 2.5, -2.5)],
        axis=1,
    )
    ps = PointSet(pts, is_symmetric=True)
    # residuals come from sqrt of a squared difference, so exact zeros
    # surface as square roots of cancellation noise
    assert brute_force_width(ps, 1, math.inf) <= 1e-6


def test_brute_force_width_large_p_limit():
    # norm equivalence pins the finite-p width between the max-norm width
    # and count^(1/p) times it; the gap closes as p grows
    rng = np.random.default_rng(6)
    ps = symmetrize(PointSet(rng.standard_normal((2, 7))))
    w_inf = brute_force_width(ps, 1, math.inf)
    for p in (1000.0, 10_000.0):
        w_p = brute_force_width(ps, 1, p)
        assert w_p >= w_inf - 1e-9
        assert w_p <= w_inf * ps.count ** (1.0 / p) + 1e-9
    assert abs(brute_force_width(ps, 1, 10_000.0) - w_inf) <= 1e-3 * max(1.0, w_inf)
    # with a single dominant pair the minimax optimum ties only two
    # residuals and the p = 1000 width already agrees to 1e-3
    dominant = PointSet(
        np.array([[0.0, 3.0, -3.0, 0.3, -0.3], [0.0, 1.0, -1.0, -0.25, 0.25]]),
        is_symmetric=True,
    )
    wd_inf = brute_force_width(dominant, 1, math.inf)
    wd_1000 = brute_force_width(dominant, 1, 1000.0)
    assert abs(wd_inf - wd_1000) <= 1e-3 * max(1.0, wd_inf)


def test_brute_force_width_matches_p2_closed_form():
    rng = np.random.default_rng(16)
    for seed in range(5):
        ps = symmetrize(PointSet(rng.standard_normal((2, 6))))
        grid = brute_force_width(ps, 1, 2.0)
        exact = exact_p2_width(ps, 1)
        assert abs(grid - exact) <= 1e-4 * max(1.0, exact)


def test_brute_force_width_3d_plane():
    # points hugging the z = 0 plane: the best plane fit recovers the slab
    pts = np.array(
        [
            [1.0, -1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, -1.0, 0.0],
            [0.1, -0.1, -0.05, 0.05, 0.0],
        ]
    )
    ps = PointSet(pts, is_symmetric=True)
    w = brute_force_width(ps, 2, math.inf)
    assert w <= 0.11
    assert w >= 0.0


def test_brute_force_width_validation():
    ps = cross_polytope_points()
    with pytest.raises(ValueError):
        brute_force_width(PointSet(np.ones((4, 2))), 1, math.inf)
    with pytest.raises(ValueError):
        brute_force_width(ps, 3, math.inf)
    with pytest.raises(ValueError):
        brute_force_width(PointSet(np.ones((2, 2))), 1, math.inf)


def test_mec_radius_known_circle():
    rng = np.random.default_rng(3)
    angles = rng.uniform(0.0, 2.0 * math.pi, 25)
    center = np.array([0.7, -1.2])
    pts = center[:, None] + 2.0 * np.stack([np.cos(angles), np.sin(angles)])
    assert abs(_mec_radius(pts) - 2.0) <= 1e-9
    # adding interior points changes nothing
    inner = center[:, None] + rng.uniform(-1.0, 1.0, size=(2, 30))
    assert abs(_mec_radius(np.concatenate([pts, inner], axis=1)) - 2.0) <= 1e-9


def test_affine_width_translation_invariant():
    rng = np.random.default_rng(9)
    pts = rng.standard_normal((3, 10))
    shift = rng.standard_normal(3)[:, None]
    for n in (1, 2):
        w0 = brute_force_affine_width(pts, n)
        w1 = brute_force_affine_width(pts + shift, n)
        assert abs(w0 - w1) <= 1e-9


def test_affine_width_agrees_with_linear_on_symmetric_sets():
    rng = np.random.default_rng(27)
    ps = symmetrize(PointSet(rng.standard_normal((2, 6))))
    w_affine = brute_force_affine_width(ps.points, 1, resolution=121)
    w_linear = brute_force_width(ps, 1, math.inf)
    assert w_affine <= w_linear + 1e-6
    assert w_linear <= w_affine + 1e-3 * max(1.0, w_linear)


def test_best_line_in_span_full_space_matches_oracle():
    rng = np.random.default_rng(18)
    ps = symmetrize(PointSet(rng.standard_normal((3, 8))))
    full = Subspace(np.eye(3))
    restricted = best_line_in_span(ps, full, math.inf, resolution=121)
    free = brute_force_width(ps, 1, math.inf, resolution=121)
    assert abs(restricted - free) <= 1e-3 * max(1.0, free)


def test_best_line_in_span_one_dim():
    ps = cross_polytope_points()
    axis = Subspace(np.array([[1.0], [0.0]]))
    assert np.isclose(best_line_in_span(ps, axis, math.inf), 1.0)


def test_make_planted_invariants():
    inst = make_planted(8, 20, 3, 0.1, seed=5)
    ps = inst.points
    assert ps.is_symmetric
    assert np.all(ps.mean == 0.0)
    assert ps.count == 2 * (20 // 2) + 1
    resid = np.linalg.norm(
        ps.points - inst.true_subspace.project(ps.points), axis=0
    )
    assert np.max(resid) <= 0.1 + 1e-12
    assert np.max(resid) > 0.0
    # negation closure
    for j in range(ps.count):
        diffs = np.linalg.norm(ps.points + ps.points[:, j][:, None], axis=0)
        assert np.min(diffs) <= 1e-12


def test_make_planted_zero_noise_and_determinism():
    inst = make_planted(6, 11, 2, 0.0, seed=1)
    assert exact_p2_width(inst.points, 2) <= 1e-10
    again = make_planted(6, 11, 2, 0.0, seed=1)
    assert inst.points.points.tobytes() == again.points.points.tobytes()
    other = make_planted(6, 11, 2, 0.0, seed=2)
    assert inst.points.points.tobytes() != other.points.points.tobytes()


def test_convex_hull_distance_square():
    square = np.array(
        [[1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]]
    )
    assert convex_hull_distance(square, np.array([0.3, -0.2])) <= 1e-9
    assert convex_hull_distance(square, np.array([1.5, 0.0])) >= 0.4


def test_convex_hull_distance_boundary():
    tri = np.array([[0.0, 2.0, 0.0], [0.0, 0.0, 2.0]])
    assert convex_hull_distance(tri, np.array([1.0, 1.0])) <= 1e-9
