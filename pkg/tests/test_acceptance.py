"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one summary
line per criterion.
"""

import math
import time

import numpy as np
import pytest

from warpgap import FlatProfile, WarpingParams, build_profile
from warpgap.functionals import (
    audit_inequality_chain,
    frak_J,
    rearrangement_check,
    sphere_volume,
)
from warpgap.geometry import (
    RadialFunction,
    SurfaceFunction,
    curvature_profile,
    gradient_sq_full,
    hessian_sq_full,
    lambda_growth,
    laplacian_full,
    radial_hessian_sq,
    radial_laplacian,
    stokes_defect,
    symmetrize,
)
from warpgap.variational import (
    MinimizationProblem,
    analytic_first_order_min,
    certify_gap,
    minimize_quadratic,
)

T_LIST = (5.0, 10.0, 20.0, 40.0)
H = 1e-3


def _report(name, ok, detail):
    print(f"\n[{name}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def certificates():
    certs = {}
    for n in (2, 3):
        prof = build_profile(WarpingParams(n, 0.1))
        certs[n] = (prof, certify_gap(prof, T_LIST, H))
    return certs


def test_criterion_1_gap_certificate(certificates):
    t0 = time.time()
    lines = []
    ok = True
    for n in (2, 3):
        prof, cert = certificates[n]
        finite_j = cert.J is not None and math.isfinite(cert.J)
        lower = cert.lower_bound
        ok &= finite_j and lower > 0.0
        ok &= lower == pytest.approx(sphere_volume(n) / cert.J, rel=1e-12)
        qws = [r["min_QW"] for r in cert.rows]
        qhs = [r["min_QH"] for r in cert.rows]
        ratios = [r["ratio"] for r in cert.rows]
        ok &= all(q >= lower * (1.0 - 1e-3) for q in qws)
        ok &= all(a >= b - 1e-9 * a for a, b in zip(qhs, qhs[1:]))
        ok &= ratios[-1] < 1.0
        # stability of the primary minimum under one grid halving
        _, qw_half = minimize_quadratic(
            MinimizationProblem(prof, T_LIST[-1], H / 2.0, "w22")
        )
        tail = qws[-1] - minimize_quadratic(
            MinimizationProblem(prof, T_LIST[-1], H, "w22")
        )[1]
        drift = abs((qw_half + tail) - qws[-1]) / qws[-1]
        ok &= drift < 0.01
        trend = " -> ".join(f"{r:.4f}" for r in ratios)
        lines.append(
            f"n={n}: J={cert.J:.2f} L={lower:.5f} QW(40)={qws[-1]:.3f} "
            f"drift(h/2)={drift:.2e} ratio trend {trend}"
        )
    _report(
        "criterion-1 gap certificate",
        ok,
        "; ".join(lines) + f" ({time.time() - t0:.1f}s)",
    )


def test_criterion_2_flat_control():
    t0 = time.time()
    flat = FlatProfile(n=2)
    res = frak_J(flat, None)
    cert = certify_gap(flat, (5.0, 10.0), 1e-2)
    ok = (
        math.isinf(res.value)
        and not res.converged
        and cert.lower_bound == 0.0
        and not cert.passed
        and cert.flat_control
    )
    _report(
        "criterion-2 flat control",
        ok,
        f"J diverges, lower bound 0, certificate not passable "
        f"({time.time() - t0:.1f}s)",
    )


def test_criterion_3_first_order_oracle():
    t0 = time.time()
    rng = np.random.default_rng(42)
    flat = FlatProfile(n=2)
    worst = 0.0
    for _ in range(50):
        a, b, c = rng.uniform(-1.0, 1.0, 3)

        def w(t):
            t = np.asarray(t, dtype=float)
            return np.exp(a * np.sin(np.pi * t) + 0.5 * b * t**2 + c)

        _, val = minimize_quadratic(
            MinimizationProblem(flat, 0.5, 1e-3, "first_order", weight=w)
        )
        exact = analytic_first_order_min(w, -0.5, 0.5, tol=1e-13)
        worst = max(worst, abs(val - exact) / exact)
    # one halving demonstrates the second-order rate
    a, b, c = 0.8, -0.5, 0.2
    w = lambda t: np.exp(a * np.sin(np.pi * np.asarray(t)) + 0.5 * b * np.asarray(t) ** 2 + c)
    exact = analytic_first_order_min(w, -0.5, 0.5, tol=1e-14)
    errs = [
        abs(minimize_quadratic(
            MinimizationProblem(flat, 0.5, h, "first_order", weight=w)
        )[1] - exact)
        for h in (4e-3, 2e-3)
    ]
    rate = errs[0] / max(errs[1], 1e-18)
    ok = worst < 1e-6 and rate > 3.0
    _report(
        "criterion-3 first-order oracle",
        ok,
        f"worst relative error {worst:.2e} over 50 weights; "
        f"error ratio under halving {rate:.2f} ({time.time() - t0:.1f}s)",
    )


def test_criterion_4_inequality_audit():
    t0 = time.time()
    details = []
    ok = True
    for n in (2, 3):
        prof = build_profile(WarpingParams(n, 0.1))
        rep = audit_inequality_chain(prof, m_max=100_000, T=1000.0)
        ok &= rep.passed
        psi = prof.psi(np.linspace(1.0, 1e3, 1_000_000))
        ok &= psi.min() >= 1.0 - 1e-9 and psi.max() <= 2.0 + 1e-9
        details.append(f"n={n}: {len(rep.items)} checks pass")
    _report(
        "criterion-4 inequality audit",
        ok,
        "; ".join(details) + f" ({time.time() - t0:.1f}s)",
    )


def _band_limited(rng, T=5.0, h_t=0.02, n_theta=64, k_max=6):
    tg = np.arange(-T, T + h_t / 2.0, h_t)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    vals = np.zeros((len(tg), n_theta))
    for l in range(4):
        a_t = np.cos((l + 1) * np.pi * tg / T) if l % 2 == 0 else np.sin((l + 1) * np.pi * tg / T)
        vals += rng.normal(scale=0.5) * a_t[:, None]
        for k in range(1, k_max + 1):
            cc, ss = rng.normal(scale=0.3, size=2) / k
            vals += a_t[:, None] * (cc * np.cos(k * th) + ss * np.sin(k * th))[None, :]
    return SurfaceFunction(T, h_t, vals)


def test_criterion_5_rearrangement_and_jensen():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    prof = build_profile(WarpingParams(2, 0.1))
    worst_margin = math.inf
    worst_jensen = -math.inf
    worst_stokes = 0.0
    worst_commute = 0.0
    for _ in range(100):
        F = _band_limited(rng)
        item = rearrangement_check(F, prof)
        worst_margin = min(worst_margin, item.margin)

        hat = symmetrize(F)
        j = prof.eval(F.t_grid, 0)
        dth = 2.0 * np.pi / F.values.shape[1]

        def full_sq(slab):
            w = j * (slab**2).sum(axis=1) * dth
            return F.h_t * (np.sum(w) - 0.5 * (w[0] + w[-1]))

        def rad_sq(vec):
            w = 2.0 * np.pi * j * vec**2
            return F.h_t * (np.sum(w) - 0.5 * (w[0] + w[-1]))

        for full_field, hat_field in (
            (F.values, hat.values),
            (F.dt(), hat.d1()),
            (F.dtt(), hat.d2()),
        ):
            worst_jensen = max(
                worst_jensen, rad_sq(hat_field) - full_sq(full_field)
            )

        for i_slice in (0, 250, 499):
            worst_stokes = max(worst_stokes, abs(stokes_defect(F, i_slice)))

        lap = laplacian_full(F, prof)
        commuted = symmetrize(SurfaceFunction(F.T, F.h_t, lap)).values
        direct = radial_laplacian(hat, prof)
        worst_commute = max(worst_commute, float(np.abs(commuted - direct).max()))

    ok = (
        worst_margin >= -1e-8
        and worst_jensen <= 1e-10
        and worst_stokes <= 1e-10
        and worst_commute <= 1e-8  # far inside the O(h_t^2) budget
    )
    _report(
        "criterion-5 rearrangement/Jensen suites",
        ok,
        f"min rearrangement margin {worst_margin:.3e}, max Jensen violation "
        f"{worst_jensen:.1e}, max Stokes defect {worst_stokes:.1e}, "
        f"max commute defect {worst_commute:.1e} over 100 seeded surfaces "
        f"({time.time() - t0:.1f}s)",
    )


def test_criterion_6_operator_cross_check():
    t0 = time.time()
    flat = FlatProfile(n=2)
    T, h_t, n_th = 2.0, 0.05, 64
    tg = np.arange(-T, T + h_t / 2.0, h_t)
    th = 2.0 * np.pi * np.arange(n_th) / n_th
    TT, TH = np.meshgrid(tg, th, indexing="ij")
    a, b, c = 0.21, -0.13, 0.17
    F = SurfaceFunction(T, h_t, (a + b * TT + c * TT**2) * np.sin(3.0 * TH))
    Ft = (b + 2.0 * c * TT) * np.sin(3.0 * TH)
    Ftt = 2.0 * c * np.sin(3.0 * TH)
    Fh = 3.0 * (a + b * TT + c * TT**2) * np.cos(3.0 * TH)
    Fth = 3.0 * (b + 2.0 * c * TT) * np.cos(3.0 * TH)
    Fhh = -9.0 * (a + b * TT + c * TT**2) * np.sin(3.0 * TH)
    d_grad = np.abs(gradient_sq_full(F, flat) - (Ft**2 + Fh**2)).max()
    d_hess = np.abs(hessian_sq_full(F, flat) - (Ftt**2 + 2 * Fth**2 + Fhh**2)).max()
    d_lap = np.abs(laplacian_full(F, flat) - (Ftt + Fhh)).max()
    ok = max(d_grad, d_hess, d_lap) < 1e-10

    rng = np.random.default_rng(7)
    worst_trace = -math.inf

    class _Wavy:
        is_flat = False
        epsilon = 0.1

        def __init__(self, n):
            self.n = n

        def eval_all(self, t):
            t = np.asarray(t, dtype=float)
            return (
                1.5 + 0.4 * np.sin(3.0 * t),
                1.2 * np.cos(3.0 * t),
                -3.6 * np.sin(3.0 * t),
            )

    for n in (2, 3, 5):
        prof_n = _Wavy(n)
        for _ in range(100):
            vals = rng.normal(size=81).cumsum() * 0.05
            phi = RadialFunction(2.0, 0.05, vals, clamped=False)
            lap = radial_laplacian(phi, prof_n)
            hess = radial_hessian_sq(phi, prof_n)
            gap = lap**2 - n * hess
            worst_trace = max(worst_trace, float(gap.max()))
    ok &= worst_trace <= 1e-10
    _report(
        "criterion-6 operator cross-check",
        ok,
        f"flat closed-form defects grad {d_grad:.1e} hess {d_hess:.1e} "
        f"lap {d_lap:.1e}; worst trace-inequality excess {worst_trace:.1e} "
        f"({time.time() - t0:.1f}s)",
    )


def test_criterion_7_series_module():
    t0 = time.time()
    from warpgap.series import glued_series_norms, imported_bounds

    ok = True
    rep2 = glued_series_norms(imported_bounds(2.0))
    lp = rep2.item("lp")
    ok &= lp.classification == "convergent"
    ok &= math.exp(lp.closed_form_log) == pytest.approx(
        math.e / (math.e - 1.0), rel=1e-13
    )
    ok &= rep2.item("laplacian_lp").classification == "convergent"
    ok &= rep2.item("hessian_lp").classification == "divergent"
    for p in (2.0, 3.0, 4.0):
        rep = glued_series_norms(imported_bounds(p))
        for norm in ("lp", "laplacian_lp"):
            it = rep.item(norm)
            ok &= bool(it.sharp_le_stated)
            ok &= it.sharp_closed_form_log <= it.closed_form_log + 1e-12
    _report(
        "criterion-7 series module",
        ok,
        f"L^p sum = e/(e-1) = {math.e / (math.e - 1):.4f}; Laplacian sum "
        f"convergent; Hessian sum divergent (no overflow); sharp <= stated "
        f"for p in {{2,3,4}} ({time.time() - t0:.1f}s)",
    )


def test_criterion_8_curvature_demonstration():
    t0 = time.time()
    prof = build_profile(WarpingParams(2, 0.1))
    ts = np.unique(
        np.concatenate([np.linspace(0.5, 200.0, 40_001), prof.corners_in(1.0, 200.0)])
    )
    cp = curvature_profile(prof, ts)
    max_k = float(np.abs(cp.K_rad).max())
    lam_sq = np.array([lambda_growth(t, 1) for t in ts]) ** 2
    scan = ts >= math.e
    exceed = scan & (np.abs(cp.Ric_rr) > lam_sq)
    below = scan & (cp.Ric_rr < -lam_sq)
    ok = max_k > 1e3 and bool(exceed.any()) and bool(below.any())
    first_t = float(ts[exceed][0]) if exceed.any() else math.nan
    _report(
        "criterion-8 curvature demonstration",
        ok,
        f"max |K_rad| = {max_k:.3e} on [0, 200]; |Ric| exceeds the squared "
        f"growth gauge from t = {first_t:.3f} (and dips below its negative) "
        f"({time.time() - t0:.1f}s)",
    )
