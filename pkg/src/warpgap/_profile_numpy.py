"""Vectorized numpy backend for warping-profile evaluation.

This module is the reference implementation of the piecewise profile
j(t) = psi(t) * |t|**(-alpha) for |t| >= 1 (even bridge polynomial inside
[-1, 1]), where psi is a unit-period triangle wave in the stretched
coordinate s = |t|**two_plus whose corners at integer s = m are rounded by
a C^2 quartic inside the window |s - m| < delta_m.  The compiled kernel in
``_profile_kernel`` implements the same point rule; parity between the two
is enforced by tests.
"""

from __future__ import annotations

import numpy as np

__all__ = ["corner_delta", "eval_profile", "psi_of_s"]


def corner_delta(m, two_plus: float, eta_exp: float):
    """Half-width (in s) of the rounding window at corner s = m.

    Largest delta <= 1/4 such that [m - delta, m + delta] maps inside the
    t-interval [t_m - eta_m, t_m + eta_m] under s = t**two_plus.
    """
    m = np.asarray(m, dtype=float)
    t_m = m ** (1.0 / two_plus)
    eta = m ** (-eta_exp)
    right = (t_m + eta) ** two_plus - m
    lo = t_m - eta
    left = np.where(lo > 0.0, m - np.maximum(lo, 0.0) ** two_plus, np.inf)
    return np.minimum(0.25, np.minimum(right, left))


def _smooth_abs(x, delta):
    """C^2 rounding of |x| on |x| <= delta: value, d/dx, d2/dx2."""
    d3 = delta**3
    h = -(x**4) / (8.0 * d3) + 3.0 * x**2 / (4.0 * delta) + 3.0 * delta / 8.0
    hp = -(x**3) / (2.0 * d3) + 3.0 * x / (2.0 * delta)
    hpp = -3.0 * x**2 / (2.0 * d3) + 3.0 / (2.0 * delta)
    return h, hp, hpp


def psi_of_s(s, two_plus: float, eta_exp: float, smooth: bool = True):
    """Triangle-wave factor and its first two s-derivatives at s >= 1."""
    s = np.asarray(s, dtype=float)
    fl = np.floor(s)
    frac = s - fl
    odd = np.mod(fl, 2.0) >= 1.0
    psi = np.where(odd, 2.0 - frac, 1.0 + frac)
    dpsi = np.where(odd, -1.0, 1.0)
    ddpsi = np.zeros_like(s)

    if smooth:
        m = np.rint(s)
        x = s - m
        valid = m >= 1.0
        delta = np.where(valid, corner_delta(np.maximum(m, 1.0), two_plus, eta_exp), 0.0)
        win = valid & (np.abs(x) < delta)
        if np.any(win):
            h, hp, hpp = _smooth_abs(x[win], delta[win])
            m_odd = np.mod(m[win], 2.0) >= 1.0
            sgn = np.where(m_odd, -1.0, 1.0)
            base = np.where(m_odd, 2.0, 1.0)
            psi = psi.copy()
            dpsi = dpsi.copy()
            ddpsi = ddpsi.copy()
            psi[win] = base + sgn * h
            dpsi[win] = sgn * hp
            ddpsi[win] = sgn * hpp
    return psi, dpsi, ddpsi


def _bridge_eval(u, coeffs):
    """Even polynomial sum c_k u**(2k): value and first two derivatives."""
    p = np.zeros_like(u)
    dp = np.zeros_like(u)
    ddp = np.zeros_like(u)
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        e = 2 * k
        p += c * u**e
        if e >= 1:
            dp += c * e * u ** (e - 1)
        if e >= 2:
            ddp += c * e * (e - 1) * u ** (e - 2)
    return p, dp, ddp


def eval_profile(t, two_plus: float, alpha: float, eta_exp: float, bridge):
    """Evaluate (j, j', j'') at the points ``t`` (any shape).

    ``bridge`` holds the even-polynomial coefficients used on [-1, 1].
    Even symmetry is built in: j is even, j' odd, j'' even.
    """
    t = np.asarray(t, dtype=float)
    u = np.abs(t)
    j = np.empty_like(u)
    jp = np.empty_like(u)
    jpp = np.empty_like(u)

    inner = u <= 1.0
    if np.any(inner):
        p, dp, ddp = _bridge_eval(u[inner], bridge)
        j[inner] = p
        jp[inner] = dp
        jpp[inner] = ddp

    outer = ~inner
    if np.any(outer):
        uo = u[outer]
        s = uo**two_plus
        psi, dpsi, ddpsi = psi_of_s(s, two_plus, eta_exp)
        su1 = two_plus * uo ** (two_plus - 1.0)
        su2 = two_plus * (two_plus - 1.0) * uo ** (two_plus - 2.0)
        ua = uo ** (-alpha)
        j[outer] = psi * ua
        jp[outer] = ua * (dpsi * su1 - alpha * psi / uo)
        jpp[outer] = ua * (
            ddpsi * su1**2
            + dpsi * su2
            - 2.0 * alpha * dpsi * su1 / uo
            + alpha * (alpha + 1.0) * psi / uo**2
        )

    jp = np.where(t < 0.0, -jp, jp)
    return j, jp, jpp
