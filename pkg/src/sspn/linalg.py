"""Dense linear algebra kernels used by the fitting pipeline.

Everything here operates on float64 numpy arrays and is deterministic: the
SVD and eigendecomposition apply a fixed sign convention to their vectors,
and the randomized range finder draws from a seeded PCG64 generator.  That
determinism is what makes byte-identical output reports possible.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Subspace",
    "SvdResult",
    "svd",
    "randomized_range",
    "orthonormalize",
    "sym_eig",
]

# Columns whose norm falls below DROP_TOL times the largest input column
# norm after Gram-Schmidt projection are treated as linearly dependent.
DROP_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of R^N held as an orthonormal basis.

    Parameters
    ----------
    basis : ndarray, shape (N, k)
        Orthonormal columns.  k = 0 encodes the trivial subspace {0}.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array")
        object.__setattr__(self, "basis", b)
        if b.shape[1] > 0:
            gram = b.T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-8:
                raise ValueError("basis columns are not orthonormal")

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def coords(self, x):
        """Coefficients of the orthogonal projection, B^T x."""
        return self.basis.T @ x

    def project(self, x):
        """Orthogonal projection B B^T x (same shape as x)."""
        if self.dim == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.basis @ (self.basis.T @ x)


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD a = u @ diag(s) @ v.T with s sorted nonincreasing."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def _fix_signs(u, v=None):
    # Deterministic sign choice: flip each column of u so that its first
    # nonzero entry is positive.  Entries below 1e-12 of the column peak
    # count as zero, so roundoff noise cannot decide the sign.
    u = np.array(u)
    if v is not None:
        v = np.array(v)
    for j in range(u.shape[1]):
        col = u[:, j]
        peak = np.max(np.abs(col))
        if peak == 0.0:
            continue
        lead = int(np.argmax(np.abs(col) > 1e-12 * peak))
        if col[lead] < 0.0:
            u[:, j] = -u[:, j]
            if v is not None:
                v[:, j] = -v[:, j]
    return u, v


def svd(a):
    """Thin singular value decomposition with a fixed sign convention.

    Parameters
    ----------
    a : ndarray, shape (N, M)
        Any real matrix with finite entries.

    Returns
    -------
    SvdResult
        u (N, k), s (k,), v (M, k) with k = min(N, M), singular values
        sorted nonincreasing, and the first nonzero component of every
        left singular vector made positive (the matching right vector is
        flipped with it, so u @ diag(s) @ v.T still reconstructs a).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    u, v = _fix_signs(u, vh.T)
    return SvdResult(u=u, s=s, v=v)


def randomized_range(a, target_rank, seed, power_iters=2):
    """Approximate the dominant column span of a matrix by sketching.

    Draws a Gaussian test matrix from a seeded PCG64 generator, applies
    ``power_iters`` rounds of subspace iteration for spectral sharpening,
    and orthonormalizes the result.

    Parameters
    ----------
    a : ndarray, shape (N, M)
    target_rank : int
        Rank the caller ultimately wants.  The sketch is oversampled to
        max(2 * target_rank, 7) columns, capped at min(N, M).
    seed : int or numpy Generator or SeedSequence
        Source of randomness.  The same seed on the same matrix yields an
        identical basis.
    power_iters : int
        Rounds of subspace iteration (default 2).

    Returns
    -------
    Subspace
        Orthonormal basis with at most max(2 * target_rank, 7) columns.
        Rank-deficient sketches lose their dependent columns, so an exactly
        rank-r matrix comes back with a basis of dimension at most r.
    """
    a = np.asarray(a, dtype=float)
    if target_rank < 1:
        raise ValueError("target_rank must be at least 1")
    n, m = a.shape
    width = min(max(2 * int(target_rank), 7), min(n, m))
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((m, width))
    q = orthonormalize(a @ omega)
    for _ in range(power_iters):
        if q.dim == 0:
            break
        q = orthonormalize(a @ (a.T @ q.basis))
    return q


def orthonormalize(cols):
    """Gram-Schmidt orthonormalization with dependent-column dropping.

    Runs modified Gram-Schmidt with a second projection pass per column
    (reorthogonalization), dropping any column whose residual norm falls
    below DROP_TOL times the largest input column norm.

    Parameters
    ----------
    cols : ndarray, shape (N, k)

    Returns
    -------
    Subspace
        Basis of the numerical column span.  All-zero input gives the
        zero-dimensional subspace.
    """
    a = np.asarray(cols, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    n = a.shape[0]
    if a.shape[1] == 0:
        return Subspace(np.zeros((n, 0)))
    ref = np.max(np.linalg.norm(a, axis=0))
    if ref == 0.0:
        return Subspace(np.zeros((n, 0)))
    kept = []
    for j in range(a.shape[1]):
        v = a[:, j].copy()
        for q in kept:
            v -= (q @ v) * q
        for q in kept:
            v -= (q @ v) * q
        nrm = np.linalg.norm(v)
        if nrm > DROP_TOL * ref:
            kept.append(v / nrm)
    basis = np.column_stack(kept) if kept else np.zeros((n, 0))
    return Subspace(basis)


def sym_eig(q):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Parameters
    ----------
    q : ndarray, shape (d, d)
        Symmetric up to 1e-10 (relative to the largest entry magnitude).

    Returns
    -------
    (ndarray, ndarray)
        Eigenvalues sorted nonincreasing and the matching eigenvector
        columns, signs fixed as in :func:`svd`.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(q))))
    if np.max(np.abs(q - q.T)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    w, vec = np.linalg.eigh(q)
    order = np.argsort(w)[::-1]
    w = w[order]
    vec = vec[:, order]
    vec, _ = _fix_signs(vec)
    return w, vec
