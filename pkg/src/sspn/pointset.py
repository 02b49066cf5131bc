"""Point sets, affine subspaces, and projection-error measurements.

A point set is an N x M matrix whose columns are the points.  Fitting
quality is always measured through the vector of per-point projection
distances; taking its l_p norm (p > 2, including infinity) gives the
fitting error that the rest of the package tries to control.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import Subspace, svd

__all__ = [
    "PointSet",
    "AffineSubspace",
    "symmetrize",
    "reduce_to_span",
    "project",
    "distance_p",
    "residual_ordering",
    "lp_norm",
]

DEDUP_TOL = 1e-9
RANK_TOL = 1e-10


@dataclass(frozen=True)
class PointSet:
    """Finite point set in R^N, one point per column.

    Parameters
    ----------
    points : ndarray, shape (N, M)
    is_symmetric : bool
        True when the set is known to be symmetric about the origin and to
        contain the zero point (the output of :func:`symmetrize`).
    mean : ndarray or None
        Centroid of the original set, recorded by :func:`symmetrize` so a
        fit of the centered set can be translated back.
    """

    points: np.ndarray
    is_symmetric: bool = False
    mean: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array (one column per point)")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("point set must have at least one row and one column")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)
        if self.mean is not None:
            object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))

    @property
    def ambient_dim(self):
        return self.points.shape[0]

    @property
    def count(self):
        return self.points.shape[1]

    def nonzero_mask(self):
        """Boolean mask of columns that are not the zero point."""
        return np.any(self.points != 0.0, axis=0)


@dataclass(frozen=True)
class AffineSubspace:
    """Affine subspace written as span(basis) + offset with offset
    orthogonal to the span, so the decomposition is unique."""

    basis: Subspace
    offset: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offset, dtype=float)
        if off.shape != (self.basis.ambient_dim,):
            raise ValueError("offset shape does not match the basis")
        object.__setattr__(self, "offset", off)
        if self.basis.dim > 0:
            overlap = np.max(np.abs(self.basis.coords(off)))
            if overlap > 1e-10 * max(1.0, float(np.linalg.norm(off))):
                raise ValueError("offset must be orthogonal to the basis")

    @classmethod
    def linear(cls, subspace):
        return cls(subspace, np.zeros(subspace.ambient_dim))

    @classmethod
    def through_point(cls, subspace, point):
        """Affine subspace parallel to ``subspace`` passing through ``point``
        (the offset is the component of the point orthogonal to the span)."""
        point = np.asarray(point, dtype=float)
        return cls(subspace, point - subspace.project(point))

    @property
    def ambient_dim(self):
        return self.basis.ambient_dim

    @property
    def dim(self):
        return self.basis.dim

    def project(self, x):
        """Closest points on the subspace, columnwise."""
        proj = self.basis.project(x)
        if np.any(self.offset != 0.0):
            proj = proj + self.offset.reshape(-1, *([1] * (np.ndim(x) - 1)))
        return proj


def _as_affine(a):
    if isinstance(a, AffineSubspace):
        return a
    if isinstance(a, Subspace):
        return AffineSubspace.linear(a)
    raise TypeError("expected a Subspace or AffineSubspace")


def symmetrize(ps, tol=DEDUP_TOL):
    """Center a point set and close it under negation.

    Produces {0} united with (P - mean) and -(P - mean), merging duplicate
    columns that agree within ``tol`` (absolute, euclidean).  The zero
    column is listed first so near-zero points merge into the exact zero.

    Parameters
    ----------
    ps : PointSet
    tol : float
        Duplicate-merge tolerance.

    Returns
    -------
    PointSet
        Symmetric set with ``is_symmetric`` set and ``mean`` recording the
        centroid of the input.
    """
    pts = ps.points
    mean = pts.mean(axis=1)
    centered = pts - mean[:, None]
    cand = np.concatenate(
        [np.zeros((pts.shape[0], 1)), centered, -centered], axis=1
    )
    kept = _dedup_columns(cand, tol)
    return PointSet(cand[:, kept], is_symmetric=True, mean=mean)


def _dedup_columns(cand, tol):
    # Greedy first-kept dedup at absolute euclidean tolerance.  Squared
    # distances from the Gram identity carry cancellation noise around
    # eps * scale^2, far above tol^2, so they only serve as a prefilter;
    # flagged pairs are rechecked with an exact column difference.
    k = cand.shape[1]
    sq = np.sum(cand * cand, axis=0)
    gram = cand.T @ cand
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    scale2 = float(np.max(sq)) if k else 0.0
    loose = max(4.0 * tol * tol, 1e-12 * scale2)
    keep = []
    for j in range(k):
        dup = False
        if keep:
            near = np.flatnonzero(d2[j, keep] <= loose)
            for t in near:
                i = keep[t]
                if np.linalg.norm(cand[:, j] - cand[:, i]) <= tol:
                    dup = True
                    break
        if not dup:
            keep.append(j)
    return keep


def reduce_to_span(ps):
    """Rewrite a point set in coordinates of its own span.

    Returns
    -------
    (PointSet, Subspace)
        The points expressed in an orthonormal basis of their numerical
        span (rank threshold RANK_TOL relative to the top singular value)
        and that basis, so ``basis.basis @ new.points`` recovers the input.
        Symmetry survives the change of coordinates; the recorded mean does
        not and is dropped.
    """
    res = svd(ps.points)
    if res.s[0] == 0.0:
        raise ValueError("cannot span-reduce an identically zero point set")
    rank = int(np.sum(res.s > RANK_TOL * res.s[0]))
    basis = Subspace(res.u[:, :rank])
    reduced = PointSet(
        basis.coords(ps.points), is_symmetric=ps.is_symmetric, mean=None
    )
    return reduced, basis


def project(ps, a):
    """Project every point onto an affine (or linear) subspace.

    Returns
    -------
    (PointSet, ndarray)
        The projected points and the vector of euclidean distances from
        each point to the subspace.
    """
    a = _as_affine(a)
    if a.ambient_dim != ps.ambient_dim:
        raise ValueError("subspace and point set live in different dimensions")
    proj = a.project(ps.points)
    residuals = np.linalg.norm(ps.points - proj, axis=0)
    return PointSet(proj), residuals


def lp_norm(values, p):
    """l_p norm of a vector for p >= 1, including p = math.inf.

    Scaled by the largest magnitude before exponentiation, so large p does
    not overflow: lp_norm(r, 1000) is finite whenever r is.
    """
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(v))
    peak = float(np.max(v))
    if peak == 0.0:
        return 0.0
    return peak * float(np.sum((v / peak) ** p)) ** (1.0 / p)


def _check_p(p):
    if not math.isinf(p) and not p > 2.0:
        raise ValueError("p must be greater than 2 (or infinity)")


def distance_p(ps, a, p):
    """Fitting error of a subspace: the l_p norm of the projection
    distances, for p in (2, infinity].

    Infinity gives the worst-case distance; finite p interpolates between
    that and the aggregate square error.  Values of p at or below 2 are
    rejected here (the l_2 case is exposed separately where it is needed).
    """
    _check_p(p)
    _, residuals = project(ps, a)
    return lp_norm(residuals, p)


def residual_ordering(ps, s):
    """Order the nonzero points by distance to a linear subspace.

    Parameters
    ----------
    ps : PointSet
    s : Subspace (or AffineSubspace with zero offset)

    Returns
    -------
    ndarray
        Column indices of the nonzero points sorted by nondecreasing
        residual, ties broken by ascending index.  Zero columns (the
        symmetrization origin) are excluded.
    """
    a = _as_affine(s)
    if np.any(a.offset != 0.0):
        raise ValueError("residual ordering is defined against a linear subspace")
    _, residuals = project(ps, a)
    idx = np.flatnonzero(ps.nonzero_mask())
    order = np.argsort(residuals[idx], kind="stable")
    return idx[order]
