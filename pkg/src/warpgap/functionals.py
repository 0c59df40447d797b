"""Sobolev-norm evaluators and the certified integral bounds.

The central quantity is the reciprocal-weight integral

    J = integral over R of [j^(n-1) + (n-1) j^(n-3) (j')^2]^(-1) dt,

whose finiteness forces every 0-to-1 radial transition to pay at least
omega_n / J in squared W^{2,2} norm (Cauchy-Schwarz on the unit integral
of the transition's derivative).  J over the full line is certified as a
quadrature value on [-t_c, t_c] plus closed-form tail bounds: a power
envelope on the oscillation-dominated set B and a summable series bound
over the corner patches.

Norms follow the squared-sum convention ||u||^2 = sum of the squared
parts, each carrying the explicit omega_n sphere-volume factor so that
radial 1-D integrals equal the manifold integrals exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    RadialFunction,
    SurfaceFunction,
    gradient_sq_full,
    hardy_weight,
    hessian_sq_full,
    radial_hessian_sq,
    radial_laplacian,
    symmetrize,
)
from .numerics import QuadratureResult, TailEnvelope, integrate, integrate_tail
from .warping import verify_derivative_bound

__all__ = [
    "NormReport",
    "AuditItem",
    "AuditReport",
    "sphere_volume",
    "w22_radial_norm_sq",
    "h22_radial_norm_sq",
    "w22_surface_norm_sq",
    "frak_J",
    "gap_lower_bound",
    "manifold_volume",
    "rearrangement_check",
    "holder_compare",
    "audit_inequality_chain",
]


def sphere_volume(n: int) -> float:
    """Volume of the unit (n-1)-sphere: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _trapz(vals: np.ndarray, h: float) -> float:
    return float(h * (np.sum(vals) - 0.5 * (vals[0] + vals[-1])))


@dataclass(frozen=True)
class NormReport:
    """Itemized squared-norm contributions (all >= 0)."""

    l2: float
    gradient: float
    hessian: float | None = None
    laplacian: float | None = None

    @property
    def total(self) -> float:
        parts = [self.l2, self.gradient, self.hessian, self.laplacian]
        return float(sum(p for p in parts if p is not None))


def _radial_weights(phi: RadialFunction, profile):
    t = phi.grid
    j, jp, _ = profile.eval_all(t)
    rho = j ** (profile.n - 1)
    return t, j, jp, rho


def w22_radial_norm_sq(phi: RadialFunction, profile) -> NormReport:
    """omega_n * integral of j^(n-1) [phi''^2 + (1 + (n-1)(j'/j)^2) phi'^2 + phi^2]."""
    _, _, _, rho = _radial_weights(phi, profile)
    om = sphere_volume(profile.n)
    hess = radial_hessian_sq(phi, profile)
    grad = phi.d1() ** 2
    return NormReport(
        l2=om * _trapz(rho * phi.values**2, phi.h),
        gradient=om * _trapz(rho * grad, phi.h),
        hessian=om * _trapz(rho * hess, phi.h),
    )


def h22_radial_norm_sq(phi: RadialFunction, profile) -> NormReport:
    """Laplacian-flavoured counterpart: parts phi^2, phi'^2 and (Lap phi)^2."""
    _, _, _, rho = _radial_weights(phi, profile)
    om = sphere_volume(profile.n)
    lap = radial_laplacian(phi, profile)
    return NormReport(
        l2=om * _trapz(rho * phi.values**2, phi.h),
        gradient=om * _trapz(rho * phi.d1() ** 2, phi.h),
        laplacian=om * _trapz(rho * lap**2, phi.h),
    )


def w22_surface_norm_sq(F: SurfaceFunction, profile, mode: str = "spectral") -> NormReport:
    """Full W^{2,2} squared norm on R x S^1 (n = 2 only)."""
    if profile.n != 2:
        raise ValueError("surface norms are instantiated for n = 2 only")
    j, _, _ = profile.eval_all(F.t_grid)
    rho = j  # j^(n-1) with n = 2
    dth = 2.0 * np.pi / F.values.shape[1]

    def _mixed(slab: np.ndarray) -> float:
        return _trapz(rho * slab.sum(axis=1) * dth, F.h_t)

    return NormReport(
        l2=_mixed(F.values**2),
        gradient=_mixed(gradient_sq_full(F, profile, mode=mode)),
        hessian=_mixed(hessian_sq_full(F, profile, mode=mode)),
    )


def _patch_series_constants(profile):
    n, eps = profile.n, profile.epsilon
    q = (8.0 + 3.0 * eps * n) / (8.0 + 2.0 * eps * n)
    c = 2.0 ** (2.0 + eps * (n - 1))
    return q, c


def _patch_series_tail(profile, m_start: int) -> float:
    """Upper bound for the patch-sum series from index m_start on."""
    q, c = _patch_series_constants(profile)
    if q <= 1.0:
        return math.inf
    return c * (m_start ** (-q) + m_start ** (1.0 - q) / (q - 1.0))


def frak_J(profile, T: float | None = None, tol: float = 1e-8,
           cut: float | None = None) -> QuadratureResult:
    """Certified integral of the reciprocal transition weight.

    Finite ``T``: the integral over [-T, T].  ``T=None``: the full-line
    value, reported with an upward bias (quadrature on [-t_c, t_c] plus
    the full tail bounds), so that omega_n / value is a safe positive
    lower bound for the transition energies downstream.
    """

    def recip(t):
        return 1.0 / hardy_weight(profile, t)

    if T is not None:
        if profile.is_flat:
            return QuadratureResult(2.0 * T, 0.0, 0, True)
        bps = np.concatenate(([1.0], profile.quad_breakpoints(1.0, T)))
        half = integrate(recip, 0.0, T, tol / 2.0, breakpoints=bps)
        return QuadratureResult(
            2.0 * half.value, 2.0 * half.error_bound, half.subdivisions, half.converged
        )

    if profile.is_flat:
        return QuadratureResult(math.inf, math.inf, 0, False)

    t_c = cut if cut is not None else max(30.0, 2.0 * profile.t0)
    env_c, env_a = profile.reciprocal_weight_envelope()
    envelope = TailEnvelope(C=env_c, alpha=env_a, t_c=t_c)
    envelope.check_dominance(recip, restrict=profile.in_B)
    tail_b = integrate_tail(envelope)

    m_start = max(2, int(math.floor((t_c - 1.0) ** profile.two_plus)))
    tail_a = _patch_series_tail(profile, m_start)

    bps = np.concatenate(([1.0], profile.quad_breakpoints(1.0, t_c)))
    half = integrate(recip, 0.0, t_c, tol / 2.0, breakpoints=bps)
    tails = tail_b + tail_a
    return QuadratureResult(
        value=2.0 * (half.value + tails),
        error_bound=2.0 * (half.error_bound + tails),
        subdivisions=half.subdivisions,
        converged=bool(half.converged and math.isfinite(tails)),
    )


def gap_lower_bound(profile) -> float:
    """omega_n / J over the full line; 0 when no finite J is certified."""
    res = frak_J(profile, None)
    if not math.isfinite(res.value):
        return 0.0
    return sphere_volume(profile.n) / res.value


def manifold_volume(profile, tol: float = 1e-8, cut: float | None = None) -> QuadratureResult:
    """Certified total volume omega_n * integral of j^(n-1)."""
    om = sphere_volume(profile.n)
    if profile.is_flat:
        return QuadratureResult(math.inf, math.inf, 0, False)

    def density(t):
        j, _, _ = profile.eval_all(t)
        return j ** (profile.n - 1)

    t_c = cut if cut is not None else 50.0
    env_c, env_a = profile.volume_envelope()
    envelope = TailEnvelope(C=env_c, alpha=env_a, t_c=t_c)
    envelope.check_dominance(density)
    tail = integrate_tail(envelope)
    bps = np.concatenate(([1.0], profile.quad_breakpoints(1.0, t_c)))
    half = integrate(density, 0.0, t_c, tol / 2.0, breakpoints=bps)
    return QuadratureResult(
        value=om * 2.0 * (half.value + tail),
        error_bound=om * 2.0 * (half.error_bound + tail),
        subdivisions=half.subdivisions,
        converged=half.converged,
    )


@dataclass(frozen=True)
class AuditItem:
    check: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def to_dict(self):
        return {
            "check": self.check,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
        }


@dataclass
class AuditReport:
    items: list[AuditItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def add(self, item: AuditItem):
        self.items.append(item)

    def to_json(self) -> str:
        doc = {"pass": self.passed, "items": [it.to_dict() for it in self.items]}
        return json.dumps(doc, indent=2, sort_keys=True)


def _ge_item(check: str, lhs: float, rhs: float, rel_tol: float = 1e-8) -> AuditItem:
    slack = rel_tol * max(abs(lhs), abs(rhs), 1e-300)
    return AuditItem(check, lhs, rhs, lhs - rhs, bool(lhs >= rhs - slack))


def _le_item(check: str, lhs: float, rhs: float, rel_tol: float = 1e-8) -> AuditItem:
    slack = rel_tol * max(abs(lhs), abs(rhs), 1e-300)
    return AuditItem(check, lhs, rhs, rhs - lhs, bool(lhs <= rhs + slack))


def rearrangement_check(F: SurfaceFunction, profile, rel_tol: float = 1e-8) -> AuditItem:
    """Full norm of F dominates the weighted energy of its circle average."""
    lhs = w22_surface_norm_sq(F, profile).total
    hat = symmetrize(F)
    w = hardy_weight(profile, hat.grid)
    rhs = sphere_volume(profile.n) * _trapz(w * hat.d1() ** 2, hat.h)
    return _ge_item("rearrangement", lhs, rhs, rel_tol)


def holder_compare(phi: RadialFunction, profile, p: float) -> AuditItem:
    """||u||_2 <= vol^((p-2)/(2p)) ||u||_p for the derivative-level densities."""
    if p < 2.0:
        raise ValueError("p must be >= 2")
    _, _, _, rho = _radial_weights(phi, profile)
    om = sphere_volume(profile.n)
    vol = om * _trapz(rho, phi.h)
    levels = [
        np.abs(phi.values),
        np.abs(phi.d1()),
        np.sqrt(radial_hessian_sq(phi, profile)),
    ]
    worst = 0.0
    for u in levels:
        l2 = math.sqrt(om * _trapz(rho * u**2, phi.h))
        lp = (om * _trapz(rho * u**p, phi.h)) ** (1.0 / p)
        bound = vol ** ((p - 2.0) / (2.0 * p)) * lp
        if bound > 0:
            worst = max(worst, l2 / bound)
        elif l2 > 0:
            worst = math.inf
    return _le_item("holder_p%g" % p, worst, 1.0, 1e-10)


def audit_inequality_chain(profile, m_max: int = 100_000, T: float = 1000.0,
                           samples: int = 100_000) -> AuditReport:
    """Run every link of the finiteness certificate for J, in order."""
    report = AuditReport()
    n, eps = profile.n, profile.epsilon

    # Decay envelope of the volume density.
    ts = np.geomspace(1.0 + 1e-9, T, samples)
    j = profile.eval(ts, 0)
    lhs = float(np.max(j ** (n - 1) * ts ** (1.0 + eps * (n - 1))))
    report.add(_le_item("volume_envelope", lhs, 2.0 ** (n - 1)))

    # Oscillation lower bound for |j'| on B above t0.
    drep = verify_derivative_bound(profile, profile.t0, T, samples)
    report.add(_ge_item("derivative_lower_bound", drep.min_ratio, 1.0, 1e-12))

    # Wave stays inside [1, 2] (10^6-point scan).
    scan = np.linspace(1.0, min(T, 1e3), 1_000_000)
    psi = profile.psi(scan)
    report.add(_ge_item("psi_lower", float(psi.min()), 1.0, 1e-9))
    report.add(_le_item("psi_upper", float(psi.max()), 2.0, 1e-9))

    # Patch-sum bound: first index separately (it is an exact equality),
    # then the termwise comparison for 2 <= m <= m_max.
    q, c_s = _patch_series_constants(profile)
    m = np.arange(1, m_max + 1, dtype=float)
    t_m = m ** (1.0 / profile.two_plus)
    eta_m = m ** (-(3.0 + n * eps) / 2.0)
    term = 2.0 * eta_m * (t_m + eta_m) ** (1.0 + eps * (n - 1))
    bound = c_s * m ** (-q)
    report.add(_le_item("patch_term_m1", float(term[0]), float(bound[0])))
    ratios = term[1:] / bound[1:]
    report.add(_le_item("patch_termwise_max_ratio", float(ratios.max()), 1.0))

    # The comparison series has exponent q > 1 (equivalent to eps*n > 0)
    # and a finite sum.
    report.add(AuditItem("series_exponent_gt_1", q, 1.0, q - 1.0, bool(eps * n > 0.0)))
    series_value = c_s * float(np.sum(m ** (-q))) + _patch_series_tail(profile, m_max + 1)
    report.add(
        AuditItem("patch_series_finite", series_value, math.inf,
                  math.inf, bool(math.isfinite(series_value)))
    )

    # Certified finiteness of the full-line reciprocal-weight integral.
    res = frak_J(profile, None)
    report.add(
        AuditItem("frak_J_finite", res.value, math.inf, math.inf,
                  bool(res.converged and math.isfinite(res.value)))
    )
    return report
