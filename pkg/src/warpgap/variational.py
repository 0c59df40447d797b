"""Minimization of the transition energies over radial competitors.

Both quadratic functionals are discretized on a uniform grid with the
boundary transition phi(-T) = 0, phi(T) = 1 and clamped ends (phi' = 0
through ghost nodes), so extending a minimizer by constants is always
admissible.  Second derivatives use the nodal three-point stencil;
standalone first-order terms use the two-point difference centred at
cell midpoints.  (A purely nodal-central first-difference form decouples
the even and odd sublattices and underestimates first-order energies by
a factor of two, so the staggered form is the correct discrete analogue;
it reproduces (integral of 1/w)^(-1) to second order exactly.)

The resulting symmetric positive-definite pentadiagonal systems are
solved by a banded Cholesky factorization with a certified residual.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .functionals import frak_J, gap_lower_bound, manifold_volume, sphere_volume
from .geometry import RadialFunction, hardy_weight
from .numerics import BandedSystem, NonSPDError, integrate, solve_banded

__all__ = [
    "MinimizationProblem",
    "GapCertificate",
    "minimize_quadratic",
    "analytic_first_order_min",
    "certify_gap",
    "export_minimizer_csv",
]

FUNCTIONALS = ("w22", "h22", "first_order")


@dataclass(frozen=True)
class MinimizationProblem:
    """A quadratic transition-energy minimization on [-T, T]."""

    profile: object
    T: float
    h: float
    functional: str = "w22"
    weight: object = None  # callable t -> w(t); first_order only
    bc: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.functional not in FUNCTIONALS:
            raise ValueError(f"functional must be one of {FUNCTIONALS}")
        n = round(2.0 * self.T / self.h)
        if not math.isclose(n * self.h, 2.0 * self.T, rel_tol=1e-9) or n < 4:
            raise ValueError("h must divide 2T with at least 4 cells")

    @property
    def n_cells(self) -> int:
        return round(2.0 * self.T / self.h)

    @property
    def nodes(self) -> np.ndarray:
        return -self.T + self.h * np.arange(self.n_cells + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.nodes[:-1] + 0.5 * self.h


def _difference_operators(n_nodes: int, h: float):
    """(D2, D1n, D1m) sparse stencils with clamped-end ghost handling."""
    h2 = h * h
    main = np.full(n_nodes, -2.0 / h2)
    off = np.full(n_nodes - 1, 1.0 / h2)
    d2 = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    d2[0, 1] = 2.0 / h2
    d2[-1, -2] = 2.0 / h2

    up = np.full(n_nodes - 1, 1.0 / (2.0 * h))
    d1 = sp.diags([-up, up], [-1, 1], format="lil")
    d1[0, 1] = 0.0
    d1[-1, -2] = 0.0

    d1m = sp.diags(
        [np.full(n_nodes - 1, -1.0 / h), np.full(n_nodes - 1, 1.0 / h)],
        [0, 1],
        shape=(n_nodes - 1, n_nodes),
        format="csr",
    )
    return d2.tocsr(), d1.tocsr(), d1m


def _problem_weights(problem: MinimizationProblem):
    """(nodal rho*tau, midpoint gradient weight*h, nodal Lap coefficient)."""
    prof = problem.profile
    om = sphere_volume(prof.n)
    t = problem.nodes
    tm = problem.midpoints
    tau = np.full(len(t), problem.h)
    tau[0] = tau[-1] = 0.5 * problem.h

    if problem.functional == "first_order":
        if problem.weight is not None:
            w_mid = np.asarray(problem.weight(tm), dtype=float)
        else:
            w_mid = om * hardy_weight(prof, tm)
        return None, w_mid * problem.h, None

    j, jp, _ = prof.eval_all(t)
    rho_tau = om * j ** (prof.n - 1) * tau
    if problem.functional == "w22":
        grad_mid = om * hardy_weight(prof, tm) * problem.h
        return rho_tau, grad_mid, None
    # h22: gradient weight is the bare volume density; the Laplacian term
    # carries the first-order coefficient (n-1) j'/j.
    jm, _, _ = prof.eval_all(tm)
    grad_mid = om * jm ** (prof.n - 1) * problem.h
    coeff = (prof.n - 1) * jp / j
    return rho_tau, grad_mid, coeff


def _assemble(problem: MinimizationProblem):
    n_nodes = problem.n_cells + 1
    d2, d1, d1m = _difference_operators(n_nodes, problem.h)
    rho_tau, grad_mid, coeff = _problem_weights(problem)

    a = d1m.T @ sp.diags(grad_mid) @ d1m
    if problem.functional == "w22":
        a = a + d2.T @ sp.diags(rho_tau) @ d2 + sp.diags(rho_tau)
    elif problem.functional == "h22":
        lap = d2 + sp.diags(coeff) @ d1
        a = a + lap.T @ sp.diags(rho_tau) @ lap + sp.diags(rho_tau)
    return a.tocsc()


def _energy(problem: MinimizationProblem, values: np.ndarray) -> float:
    """Evaluate the discrete functional on a full node vector."""
    phi = RadialFunction(problem.T, problem.h, values, clamped=True)
    _, grad_mid, coeff = _problem_weights(problem)
    dmid = np.diff(values) / problem.h
    total = float(np.sum(grad_mid * dmid**2))
    if problem.functional == "first_order":
        return total
    rho_tau, _, _ = _problem_weights(problem)
    d2 = phi.d2()
    if problem.functional == "w22":
        total += float(np.sum(rho_tau * d2**2))
    else:
        lap = d2 + coeff * phi.d1()
        total += float(np.sum(rho_tau * lap**2))
    total += float(np.sum(rho_tau * values**2))
    return total


def _to_banded(a_int: sp.csc_matrix) -> np.ndarray:
    nd = a_int.shape[0]
    u = 2
    bands = np.zeros((u + 1, nd))
    for k in range(u + 1):
        bands[u - k, k:] = a_int.diagonal(k)
    return bands


def minimize_quadratic(problem: MinimizationProblem) -> tuple[RadialFunction, float]:
    """Solve the discrete Euler-Lagrange system; returns (minimizer, value).

    Raises NonSPDError when the assembled form is not positive definite
    (all weights are nonnegative, so that would signal a sign error).
    """
    a = _assemble(problem)
    n_nodes = problem.n_cells + 1
    b0, b1 = problem.bc
    boundary = np.zeros(n_nodes)
    boundary[0] = b0
    boundary[-1] = b1
    rhs = -(a @ boundary)[1:-1]
    a_int = a[1:-1, 1:-1]
    system = BandedSystem(bandwidth=2, bands=_to_banded(a_int.tocsc()), rhs=rhs)
    x = solve_banded(system)
    values = boundary.copy()
    values[1:-1] = x
    phi = RadialFunction(problem.T, problem.h, values, clamped=True)
    return phi, _energy(problem, values)


def analytic_first_order_min(weight_or_profile, a: float, b: float,
                             tol: float = 1e-12, breakpoints=None) -> float:
    """(integral of 1/w over [a, b])^(-1): the exact first-order infimum.

    ``weight_or_profile`` is either a callable t -> w(t) or a profile, in
    which case w = omega_n * (transition weight) and the known corner
    locations seed the quadrature.
    """
    if callable(weight_or_profile):
        recip = lambda t: 1.0 / np.asarray(weight_or_profile(t), dtype=float)
    else:
        prof = weight_or_profile
        om = sphere_volume(prof.n)
        recip = lambda t: 1.0 / (om * hardy_weight(prof, t))
        if breakpoints is None:
            breakpoints = prof.quad_breakpoints(a, b)
    res = integrate(recip, a, b, tol, breakpoints=breakpoints)
    return 1.0 / res.value


def _tail_l2_mass(profile, T: float) -> float:
    """Envelope bound for omega_n * integral_T^inf j^(n-1): the cost of
    staying at the constant value 1 beyond the right end of the window."""
    if profile.is_flat or not profile.finite_volume:
        return math.inf
    c, a = profile.volume_envelope()
    om = sphere_volume(profile.n)
    return om * c * T ** (-a) / a


@dataclass
class GapCertificate:
    """Machine-checkable record of the transition-energy dichotomy."""

    n: int
    epsilon: float
    J: float | None
    lower_bound: float
    volume: float | None
    rows: list[dict] = field(default_factory=list)
    pass_lower_bound: bool = False
    pass_monotone: bool = False
    pass_ratio: bool = False
    flat_control: bool = False
    h_resolution_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.pass_lower_bound and self.pass_monotone and self.pass_ratio

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "epsilon": self.epsilon,
            "J": self.J,
            "lower_bound": self.lower_bound,
            "volume": self.volume,
            "rows": self.rows,
            "pass": self.passed,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def certify_gap(profile, T_list, h: float, strict_resolution: bool = False) -> GapCertificate:
    """Minimize both transition energies over a ladder of windows.

    Reported minima include the closed-form right-tail L^2 mass so they
    approximate infima over the whole space rather than window
    artifacts.  The certificate passes when every first minimum clears
    the Cauchy-Schwarz floor, both sequences are nonincreasing, and the
    Laplacian-flavoured energy at the widest window undercuts the full
    one.
    """
    T_list = sorted(float(T) for T in T_list)
    flat = bool(profile.is_flat)

    if flat:
        j_val, vol, lower = None, None, 0.0
    else:
        jres = frak_J(profile, None)
        j_val = jres.value if math.isfinite(jres.value) else None
        lower = gap_lower_bound(profile)
        vres = manifold_volume(profile)
        vol = vres.value if math.isfinite(vres.value) else None

    h_ok = True
    if not flat:
        eta_min = _finest_patch_half_width(profile, T_list[-1])
        h_ok = h <= eta_min / 10.0
        if strict_resolution and not h_ok:
            raise ValueError(
                f"h={h:g} does not resolve the finest patch half-width {eta_min:g}"
            )

    rows = []
    for T in T_list:
        tail = 0.0 if flat else _tail_l2_mass(profile, T)
        _, qw = minimize_quadratic(MinimizationProblem(profile, T, h, "w22"))
        _, qh = minimize_quadratic(MinimizationProblem(profile, T, h, "h22"))
        min_qw = qw + tail
        min_qh = qh + tail
        rows.append(
            {"T": T, "h": h, "min_QW": min_qw, "min_QH": min_qh,
             "ratio": min_qh / min_qw}
        )

    qws = [r["min_QW"] for r in rows]
    qhs = [r["min_QH"] for r in rows]
    slack = 1e-9 * max(qws)
    cert = GapCertificate(
        n=profile.n,
        epsilon=profile.epsilon,
        J=j_val,
        lower_bound=lower,
        volume=vol,
        rows=rows,
        pass_lower_bound=(not flat)
        and all(q >= lower * (1.0 - 1e-3) - slack for q in qws)
        and lower > 0.0,
        pass_monotone=all(a >= b - slack for a, b in zip(qws, qws[1:]))
        and all(a >= b - slack for a, b in zip(qhs, qhs[1:])),
        pass_ratio=rows[-1]["ratio"] < 1.0,
        flat_control=flat,
        h_resolution_ok=h_ok,
    )
    return cert


def _finest_patch_half_width(profile, T: float) -> float:
    """Smallest merged patch half-width among patches meeting [-T, T]."""
    t_m = profile.patch_t
    eta = profile.patch_eta
    mask = t_m - eta <= T
    if not np.any(mask):
        return math.inf
    starts = profile.merged_starts
    ends = profile.merged_ends
    groups = np.unique(profile.patch_group[mask])
    return float(np.min((ends[groups] - starts[groups]) / 2.0))


def export_minimizer_csv(phi: RadialFunction, path) -> None:
    """Write `t,phi` rows with 17 significant digits."""
    t = phi.grid
    with open(path, "w", newline="\n") as fh:
        fh.write("t,phi\n")
        for k in range(len(t)):
            fh.write(f"{t[k]:.17g},{phi.values[k]:.17g}\n")
