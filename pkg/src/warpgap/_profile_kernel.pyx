# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled point rule for warping-profile evaluation.

Mirrors ``_profile_numpy.eval_profile`` exactly; parity is enforced by the
test suite.  One pass fills j, j' and j'' for a flat float64 array.
"""

from libc.math cimport floor, pow, fabs, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _corner_delta(double m, double two_plus, double eta_exp) nogil:
    cdef double t_m = pow(m, 1.0 / two_plus)
    cdef double eta = pow(m, -eta_exp)
    cdef double right = pow(t_m + eta, two_plus) - m
    cdef double lo = t_m - eta
    cdef double left = INFINITY
    if lo > 0.0:
        left = m - pow(lo, two_plus)
    cdef double d = 0.25
    if right < d:
        d = right
    if left < d:
        d = left
    return d


def eval_profile(double[::1] t, double two_plus, double alpha, double eta_exp,
                 double[::1] bridge,
                 double[::1] out_j, double[::1] out_jp, double[::1] out_jpp):
    cdef Py_ssize_t npts = t.shape[0]
    cdef Py_ssize_t ncoef = bridge.shape[0]
    cdef Py_ssize_t i, k
    cdef double ti, u, s, fl, frac, psi, dpsi, ddpsi
    cdef double m, x, delta, d3, h, hp, hpp, base, sgn
    cdef double su1, su2, ua, p, dp, ddp, ue, c
    cdef int e

    with nogil:
        for i in range(npts):
            ti = t[i]
            u = fabs(ti)
            if u <= 1.0:
                p = 0.0
                dp = 0.0
                ddp = 0.0
                for k in range(ncoef - 1, -1, -1):
                    c = bridge[k]
                    e = 2 * <int>k
                    ue = pow(u, e)
                    p += c * ue
                    if e >= 1:
                        dp += c * e * pow(u, e - 1)
                    if e >= 2:
                        ddp += c * e * (e - 1) * pow(u, e - 2)
                out_j[i] = p
                out_jp[i] = -dp if ti < 0.0 else dp
                out_jpp[i] = ddp
                continue

            s = pow(u, two_plus)
            fl = floor(s)
            frac = s - fl
            if fl - 2.0 * floor(fl / 2.0) >= 1.0:   # odd floor
                psi = 2.0 - frac
                dpsi = -1.0
            else:
                psi = 1.0 + frac
                dpsi = 1.0
            ddpsi = 0.0

            m = floor(s + 0.5)
            if m >= 1.0:
                x = s - m
                delta = _corner_delta(m, two_plus, eta_exp)
                if fabs(x) < delta:
                    d3 = delta * delta * delta
                    h = -(x * x * x * x) / (8.0 * d3) + 3.0 * x * x / (4.0 * delta) \
                        + 3.0 * delta / 8.0
                    hp = -(x * x * x) / (2.0 * d3) + 3.0 * x / (2.0 * delta)
                    hpp = -3.0 * x * x / (2.0 * d3) + 3.0 / (2.0 * delta)
                    if m - 2.0 * floor(m / 2.0) >= 1.0:  # odd corner: top
                        base = 2.0
                        sgn = -1.0
                    else:
                        base = 1.0
                        sgn = 1.0
                    psi = base + sgn * h
                    dpsi = sgn * hp
                    ddpsi = sgn * hpp

            su1 = two_plus * pow(u, two_plus - 1.0)
            su2 = two_plus * (two_plus - 1.0) * pow(u, two_plus - 2.0)
            ua = pow(u, -alpha)
            out_j[i] = psi * ua
            hp = ua * (dpsi * su1 - alpha * psi / u)
            out_jp[i] = -hp if ti < 0.0 else hp
            out_jpp[i] = ua * (ddpsi * su1 * su1 + dpsi * su2
                               - 2.0 * alpha * dpsi * su1 / u
                               + alpha * (alpha + 1.0) * psi / (u * u))
