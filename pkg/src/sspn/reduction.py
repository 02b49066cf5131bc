"""Greedy least-squares reduction of a symmetric point set.

Each round fits the current points with a rank-n least-squares subspace,
keeps the well-fit fraction (all but roughly a 1/xi share, the points with
the smallest residuals), and recurses on what is left plus the origin.
Because every removed batch is well fit by its round's subspace, the union
of the round subspaces approximates every point of the original set, while
the point count decays geometrically so the union stays low dimensional:
at most n rounds per factor-xi shrink, so n * ceil(log_xi M) overall.

The per-round subset carries a strong order-statistics guarantee: after
sorting residuals, the m-th smallest squared residual of an M-point
symmetric set is at most M^(1-2/p) / (M - m + 1) times the squared best
achievable l_p fitting error.  ``check_residual_bound`` verifies exactly
that inequality and is used throughout the test suite.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import Subspace, orthonormalize, randomized_range, svd
from .pointset import (
    PointSet,
    lp_norm,
    project,
    residual_ordering,
)

__all__ = [
    "ReductionOptions",
    "RoundLog",
    "FitReport",
    "ResidualBoundReport",
    "best_rank_n_subspace",
    "select_well_fit_subset",
    "check_residual_bound",
    "alpha_estimate",
    "greedy_reduce",
    "ceil_log",
]

RANK_TOL = 1e-10
# a round whose worst residual is this small (relative to the point scale)
# has fit everything; recursing further cannot improve the union
EXACT_FIT_TOL = 1e-10
ALPHA_DENOM_TOL = 1e-12

LOWRANK_MODES = ("svd", "randomized")


@dataclass(frozen=True)
class ReductionOptions:
    """Knobs for :func:`greedy_reduce`.

    xi : float, > 1
        Shrink factor; each round removes about a 1/xi share of the points.
        The subset guarantees additionally need xi <= M/2 for finite p.
    p : float in (2, inf]
        Norm used for reported errors and the stop ratio.
    lowrank_mode : "svd" or "randomized"
        Exact truncated SVD per round, or a seeded sketch of width
        max(2n, 7).
    seed : int
        Drives the randomized sketches; ignored in svd mode.
    early_stop_alpha : float or None
        When set, stop as soon as the round's worst-to-boundary residual
        ratio drops below it (2 is the customary choice); None runs every
        round.
    deflate : bool
        Project the leftovers orthogonally to the round's subspace before
        recursing, so later rounds only see what is still unexplained.
    max_rounds : int or None
        Cap on rounds; None means ceil(log_xi M).
    """

    xi: float = 2.0
    p: float = math.inf
    lowrank_mode: str = "svd"
    seed: int = 0
    early_stop_alpha: float | None = None
    deflate: bool = False
    max_rounds: int | None = None

    def __post_init__(self):
        if not self.xi > 1.0:
            raise ValueError("xi must be greater than 1")
        if not math.isinf(self.p) and not self.p > 2.0:
            raise ValueError("p must be greater than 2 (or infinity)")
        if self.lowrank_mode not in LOWRANK_MODES:
            raise ValueError(f"lowrank_mode must be one of {LOWRANK_MODES}")
        if self.early_stop_alpha is not None and not self.early_stop_alpha > 1.0:
            raise ValueError("early_stop_alpha must exceed 1")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass(frozen=True)
class RoundLog:
    """What one reduction round did."""

    index: int
    subspace: Subspace
    subset_size: int
    worst_kept_residual: float
    alpha: float
    remaining_count: int
    deflated: bool


@dataclass(frozen=True)
class FitReport:
    """Outcome of :func:`greedy_reduce` on the input set."""

    subspace: Subspace
    rounds: list = field(default_factory=list)
    residuals: np.ndarray = None
    error: float = math.nan
    p: float = math.inf

    @property
    def dim(self):
        return self.subspace.dim


@dataclass(frozen=True)
class ResidualBoundReport:
    """Per-rank margins of the sorted-residual bound."""

    passed: bool
    residuals_sq: np.ndarray
    bounds: np.ndarray

    @property
    def margins(self):
        return self.bounds - self.residuals_sq


def ceil_log(m, xi):
    """Smallest r with xi^r >= m, computed without float log edge cases."""
    if m <= 1:
        return 0
    r = 0
    v = 1.0
    while v < m * (1.0 - 1e-10):
        v *= xi
        r += 1
        if r > 10_000:
            raise ValueError("xi too close to 1 for this point count")
    return r


def best_rank_n_subspace(ps, n, mode="svd", seed=0):
    """Best least-squares subspace of the nonzero points.

    In "svd" mode this is the span of the top-n left singular vectors
    (truncated at the numerical rank, so an exactly rank-r set with r < n
    yields an r-dimensional answer).  In "randomized" mode it is a seeded
    sketch of width max(2n, 7), which costs less on wide matrices at the
    price of a slightly larger subspace.
    """
    if not ps.is_symmetric:
        raise ValueError("the reduction operates on symmetric point sets")
    if n < 1:
        raise ValueError("n must be at least 1")
    if mode not in LOWRANK_MODES:
        raise ValueError(f"mode must be one of {LOWRANK_MODES}")
    x = ps.points[:, ps.nonzero_mask()]
    if x.shape[1] == 0:
        return Subspace(np.zeros((ps.ambient_dim, 0)))
    if mode == "randomized":
        return randomized_range(x, n, seed)
    res = svd(x)
    if res.s[0] == 0.0:
        return Subspace(np.zeros((ps.ambient_dim, 0)))
    rank = int(np.sum(res.s > RANK_TOL * res.s[0]))
    return Subspace(res.u[:, : min(n, rank)])


def _zero_normalized_key(col):
    # +0.0 and -0.0 have different bytes; adding 0.0 canonicalizes
    return (col + 0.0).tobytes()


def select_well_fit_subset(ps, s, xi):
    """Keep the best-fit share of a symmetric set, plus the origin.

    Orders the nonzero points by residual against ``s`` and keeps the first
    M - floor(M / xi) of them (equivalently ceil((1 - 1/xi) M)), then adds
    the negation partner of any kept point whose partner fell outside the
    cut, so the subset stays symmetric, and finally the zero point.

    Returns
    -------
    (PointSet, ndarray)
        The subset and the kept column indices into ``ps.points``.
    """
    if not ps.is_symmetric:
        raise ValueError("subset selection needs a symmetric point set")
    if not xi > 1.0:
        raise ValueError("xi must be greater than 1")
    pts = ps.points
    order = residual_ordering(ps, s)
    m = len(order)
    zero_cols = np.flatnonzero(~ps.nonzero_mask())
    if m == 0:
        idx = zero_cols if len(zero_cols) else np.array([0])
        return PointSet(pts[:, idx], is_symmetric=True), idx
    keep_n = m - int(math.floor(m / xi + 1e-9))
    kept = list(order[:keep_n])
    kept_keys = {_zero_normalized_key(pts[:, j]) for j in kept}
    column_index = {}
    for j in range(pts.shape[1]):
        column_index.setdefault(_zero_normalized_key(pts[:, j]), j)
    for j in list(kept):
        want = _zero_normalized_key(-pts[:, j])
        if want in kept_keys:
            continue
        partner = column_index.get(want)
        if partner is None:
            # tolerance fallback for sets not built by this package
            diffs = np.linalg.norm(pts + pts[:, j][:, None], axis=0)
            cand = int(np.argmin(diffs))
            partner = cand if diffs[cand] <= 1e-9 else None
        if partner is not None:
            kept.append(partner)
            kept_keys.add(_zero_normalized_key(pts[:, partner]))
    final = np.array(sorted(set(kept) | set(zero_cols.tolist())), dtype=int)
    return PointSet(pts[:, final], is_symmetric=True), final


def check_residual_bound(ps, s, p, d_ref):
    """Verify the order-statistics bound on sorted squared residuals.

    For the nonzero points ordered by nondecreasing residual, checks

        residual_m^2 <= M^(1 - 2/p) / (M - m + 1) * d_ref^2

    for every rank m (with the exponent read as 1 at p = infinity), within
    a 1e-9 relative slack.  ``d_ref`` must upper-bound the best achievable
    l_p fitting error for the inequality to be meaningful.
    """
    if not math.isinf(p) and not p > 2.0:
        raise ValueError("p must be greater than 2 (or infinity)")
    order = residual_ordering(ps, s)
    _, residuals = project(ps, s)
    r = residuals[order]
    m = len(order)
    if m == 0:
        return ResidualBoundReport(True, np.zeros(0), np.zeros(0))
    exponent = 1.0 if math.isinf(p) else 1.0 - 2.0 / p
    ranks = np.arange(1, m + 1)
    bounds = (m ** exponent) / (m - ranks + 1) * d_ref ** 2
    lhs = r * r
    ok = lhs <= bounds * (1.0 + 1e-9) + 1e-300
    return ResidualBoundReport(bool(np.all(ok)), lhs, bounds)


def alpha_estimate(ps, subset, s, p):
    """Worst-to-boundary residual ratio, the data-driven optimality gauge.

    The ratio of the full set's l_p fitting error against ``s`` to the kept
    subset's.  Values near 1 mean even the worst points are fit almost as
    well as the kept ones, so further rounds cannot help much; the true
    best error is sandwiched within a sqrt(xi) factor scaled by this ratio.
    Returns inf when the subset error is numerically zero, and exactly 1
    when subset and set coincide.
    """
    if not math.isinf(p) and not p > 2.0:
        raise ValueError("p must be greater than 2 (or infinity)")
    _, res_all = project(ps, s)
    _, res_sub = project(subset, s)
    num = lp_norm(res_all, p)
    den = lp_norm(res_sub, p)
    if den < ALPHA_DENOM_TOL:
        return math.inf
    return float(num / den)


def _scale(pts):
    return float(np.max(np.linalg.norm(pts, axis=0))) if pts.size else 0.0


def greedy_reduce(ps, n, options=None):
    """Round-by-round reduction of a symmetric set to a union subspace.

    Parameters
    ----------
    ps : PointSet
        Symmetric (output of symmetrize or constructed symmetric).  Best
        used after reduce_to_span so the ambient dimension is the span.
    n : int
        Per-round fit dimension.
    options : ReductionOptions

    Returns
    -------
    FitReport
        Union subspace (orthonormalized concatenation of the round bases),
        per-round logs, residuals of the input points against the union,
        and their l_p norm.
    """
    opts = options if options is not None else ReductionOptions()
    if not ps.is_symmetric:
        raise ValueError("greedy_reduce needs a symmetric point set")
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(opts.seed)
    m0 = int(np.sum(ps.nonzero_mask()))
    cap = opts.max_rounds
    if cap is None:
        cap = max(1, ceil_log(max(m0, 1), opts.xi))

    current = ps
    logs = []
    bases = []
    ambient = ps.ambient_dim
    for round_idx in range(1, cap + 1):
        nz = current.nonzero_mask()
        live = int(np.sum(nz))
        if live == 0:
            break
        s_i = best_rank_n_subspace(current, n, opts.lowrank_mode, rng)
        _, residuals = project(current, s_i)
        worst = float(np.max(residuals[nz]))
        if worst <= EXACT_FIT_TOL * max(1.0, _scale(current.points)):
            # everything left is already inside the round subspace
            bases.append(s_i.basis)
            logs.append(
                RoundLog(round_idx, s_i, current.count, worst, 1.0, 0, opts.deflate)
            )
            break
        subset, kept_idx = select_well_fit_subset(current, s_i, opts.xi)
        alpha = alpha_estimate(current, subset, s_i, opts.p)
        _, sub_res = project(subset, s_i)
        worst_kept = float(np.max(sub_res)) if sub_res.size else 0.0
        keep_mask = np.zeros(current.count, dtype=bool)
        keep_mask[kept_idx] = True
        rest = current.points[:, ~keep_mask]
        rest = rest[:, np.any(rest != 0.0, axis=0)]
        if opts.deflate and rest.shape[1]:
            rest = rest - s_i.project(rest)
        bases.append(s_i.basis)
        logs.append(
            RoundLog(
                round_idx,
                s_i,
                subset.count,
                worst_kept,
                alpha,
                rest.shape[1],
                opts.deflate,
            )
        )
        if rest.shape[1] == 0:
            break
        current = PointSet(
            np.concatenate([np.zeros((ambient, 1)), rest], axis=1),
            is_symmetric=True,
        )
        if opts.early_stop_alpha is not None and alpha < opts.early_stop_alpha:
            break

    if bases:
        union = orthonormalize(np.concatenate(bases, axis=1))
    else:
        union = Subspace(np.zeros((ambient, 0)))
    _, final_res = project(ps, union)
    return FitReport(
        subspace=union,
        rounds=logs,
        residuals=final_res,
        error=lp_norm(final_res, opts.p),
        p=opts.p,
    )
