"""Greedy least-squares subspace fitting for finite point sets.

The package approximates a point set by a low-dimensional affine subspace
while controlling the worst-case (max-norm) projection error, not just the
average one.  The main entry points are :func:`greedy_reduce`, which builds
a union of least-squares subspaces round by round, and :func:`infinity_fit`,
which refines that union to an n-dimensional fit through the minimum-volume
enclosing ellipsoid of the reduced points.
"""

from .linalg import Subspace, SvdResult, svd, randomized_range, orthonormalize, sym_eig

__all__ = [
    "Subspace",
    "SvdResult",
    "svd",
    "randomized_range",
    "orthonormalize",
    "sym_eig",
]

__version__ = "0.1.0"
