"""Numerical toolkit for oscillating warped-product metrics.

Builds finite-volume metrics dt^2 + j(t)^2 sigma on R x S^{n-1} whose
warping function oscillates fast enough that transition functions keep a
uniformly positive second-order Sobolev norm, and certifies the relevant
integral bounds, inequalities and variational minima at desk scale.
"""

from .backend import BACKEND, HAVE_KERNEL
from .warping import (
    FlatProfile,
    WarpingParams,
    WarpingProfile,
    build_profile,
    triangle_psi,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_KERNEL",
    "FlatProfile",
    "WarpingParams",
    "WarpingProfile",
    "build_profile",
    "triangle_psi",
    "__version__",
]
