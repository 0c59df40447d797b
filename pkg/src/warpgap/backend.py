"""Selects the profile-evaluation backend at import time.

The compiled kernel is preferred when it imported cleanly; setting the
environment variable ``WARPGAP_PURE=1`` forces the numpy fallback (useful
for benchmarking and for debugging the point rule).
"""

from __future__ import annotations

import os

import numpy as np

from . import _profile_numpy

_FORCE_PURE = os.environ.get("WARPGAP_PURE", "") == "1"

try:  # pragma: no cover - exercised via the parity tests
    if _FORCE_PURE:
        raise ImportError
    from . import _profile_kernel  # type: ignore[attr-defined]

    HAVE_KERNEL = True
except ImportError:
    _profile_kernel = None
    HAVE_KERNEL = False

BACKEND = "cython" if HAVE_KERNEL else "numpy"


def eval_profile(t, two_plus, alpha, eta_exp, bridge):
    """Dispatch (j, j', j'') evaluation to the active backend."""
    if HAVE_KERNEL:
        t = np.ascontiguousarray(t, dtype=float)
        shape = t.shape
        flat = t.ravel()
        j = np.empty_like(flat)
        jp = np.empty_like(flat)
        jpp = np.empty_like(flat)
        _profile_kernel.eval_profile(
            flat, float(two_plus), float(alpha), float(eta_exp),
            np.ascontiguousarray(bridge, dtype=float), j, jp, jpp,
        )
        return j.reshape(shape), jp.reshape(shape), jpp.reshape(shape)
    return _profile_numpy.eval_profile(t, two_plus, alpha, eta_exp, bridge)


def eval_profile_pure(t, two_plus, alpha, eta_exp, bridge):
    """Always use the numpy implementation (parity checks, benchmarks)."""
    return _profile_numpy.eval_profile(t, two_plus, alpha, eta_exp, bridge)
