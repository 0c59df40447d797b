"""Construction of the oscillating warping function.

The profile is j(t) = psi(t) * |t|**(-1/(n-1) - epsilon) for |t| >= 1,
extended evenly, with an even C^2-matching polynomial bridge on [-1, 1].
psi oscillates between 1 and 2 as a triangle wave in the stretched
coordinate s = |t|**two_plus with two_plus = 2 + epsilon*n/2.  The wave's
corners sit at s = m (equivalently t_m = m**(1/two_plus)); each corner is
rounded inside a window chosen small enough that the modification stays
inside the patch [t_m - eta_m, t_m + eta_m] with eta_m = m**(-(3+n eps)/2).

The decay makes j**(n-1) integrable (finite total volume) while the
oscillation keeps |j'| bounded below outside the patches, which is what
drives the density-gap certificates downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from ._profile_numpy import corner_delta

__all__ = [
    "WarpingParams",
    "SingularPatch",
    "WarpingProfile",
    "FlatProfile",
    "ProfileConstructionError",
    "EmptySampleError",
    "DerivativeBoundReport",
    "triangle_psi",
    "build_profile",
    "export_profile_csv",
]

BRIDGE_FLOOR = 1e-3


class ProfileConstructionError(RuntimeError):
    """The requested parameters do not yield a usable profile."""


class EmptySampleError(ValueError):
    """A sampling request hit an empty admissible set."""


@dataclass(frozen=True)
class WarpingParams:
    """Dimension, oscillation strength and patch-tracking depth."""

    n: int
    epsilon: float
    m_max: int = 10_000

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension n must be >= 2")
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError("epsilon must lie in (0, 1]")
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")

    @property
    def two_plus(self) -> float:
        return 2.0 + self.epsilon * self.n / 2.0

    @property
    def alpha(self) -> float:
        """Decay exponent of the envelope |t|**(-alpha)."""
        return 1.0 / (self.n - 1) + self.epsilon

    @property
    def eta_exp(self) -> float:
        return (3.0 + self.n * self.epsilon) / 2.0

    @property
    def t0(self) -> float:
        """Threshold above which the derivative lower bound is claimed."""
        return (2.0 / (self.n - 1) + 2.0 * self.epsilon) ** (1.0 / self.two_plus)

    @property
    def deriv_exponent(self) -> float:
        """Exponent beta in the claimed bound |j'(t)| >= t**beta on B."""
        n = self.n
        return (n - 2.0) / (n - 1.0) + self.epsilon * (n - 2.0) / 2.0


@dataclass(frozen=True)
class SingularPatch:
    m: int
    t_m: float
    eta_m: float
    merged_extent: tuple[float, float]
    delta_m: float  # corner-rounding half-width in the stretched coordinate


def triangle_psi(t: float, two_plus: float) -> float:
    """Raw (unsmoothed) triangle wave at t >= 1, valued in [1, 2]."""
    if t < 1.0:
        raise ValueError("triangle_psi requires t >= 1")
    s = t**two_plus
    fl = math.floor(s)
    if fl % 2 == 0:
        return s - fl + 1.0
    return -s + fl + 2.0


def _merge_intervals(starts: np.ndarray, ends: np.ndarray):
    """Merge sorted, possibly overlapping intervals (vectorized)."""
    if len(starts) == 0:
        return np.empty(0), np.empty(0), np.empty(0, dtype=int)
    run_end = np.maximum.accumulate(ends)
    new_group = np.ones(len(starts), dtype=bool)
    new_group[1:] = starts[1:] > run_end[:-1]
    group = np.cumsum(new_group) - 1
    g_start = starts[new_group]
    g_end = np.maximum.reduceat(ends, np.flatnonzero(new_group))
    return g_start, g_end, group


@dataclass(frozen=True)
class WarpingProfile:
    """Immutable profile; all evaluations are pure and thread-safe."""

    params: WarpingParams
    bridge: np.ndarray
    patch_t: np.ndarray = field(repr=False)
    patch_eta: np.ndarray = field(repr=False)
    merged_starts: np.ndarray = field(repr=False)
    merged_ends: np.ndarray = field(repr=False)
    patch_group: np.ndarray = field(repr=False)

    is_flat = False

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def two_plus(self) -> float:
        return self.params.two_plus

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def t0(self) -> float:
        return self.params.t0

    @property
    def coverage_t(self) -> float:
        """Largest |t| whose patch bookkeeping is tracked in the table."""
        return float(self.patch_t[-1])

    @property
    def patches(self) -> list[SingularPatch]:
        deltas = corner_delta(
            np.arange(1, len(self.patch_t) + 1, dtype=float),
            self.two_plus,
            self.params.eta_exp,
        )
        out = []
        for i in range(len(self.patch_t)):
            g = self.patch_group[i]
            out.append(
                SingularPatch(
                    m=i + 1,
                    t_m=float(self.patch_t[i]),
                    eta_m=float(self.patch_eta[i]),
                    merged_extent=(float(self.merged_starts[g]), float(self.merged_ends[g])),
                    delta_m=float(deltas[i]),
                )
            )
        return out

    def eval_all(self, t):
        """(j, j', j'') at ``t`` via the active backend."""
        return backend.eval_profile(
            t, self.two_plus, self.alpha, self.params.eta_exp, self.bridge
        )

    def eval(self, t, order: int = 0):
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        return self.eval_all(t)[order]

    def psi(self, t):
        """j(t) * |t|**alpha; equals the smoothed wave for |t| >= 1."""
        t = np.asarray(t, dtype=float)
        j = self.eval(t, 0)
        return j * np.abs(t) ** self.alpha

    def in_B(self, t):
        """True where t lies in B = [1, inf) minus the patch union.

        The membership test is table-free: only corners within a bounded
        s-window of each query can own a patch containing it.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t).astype(float)
        res = tq >= 1.0
        if np.any(res):
            ts = tq[res]
            s = ts**self.two_plus
            width = int(math.ceil(self.two_plus * 2.0 ** (self.two_plus - 1.0))) + 1
            offs = np.arange(-width, width + 1)
            cand = np.floor(s)[:, None] + offs[None, :]
            cand = np.maximum(cand, 1.0)
            t_c = cand ** (1.0 / self.two_plus)
            eta_c = cand ** (-self.params.eta_exp)
            hit = np.abs(ts[:, None] - t_c) <= eta_c
            res[np.flatnonzero(res)] = ~hit.any(axis=1)
        return bool(res[0]) if scalar else res

    def corners_in(self, lo: float, hi: float, max_count: int = 5_000_000):
        """Corner locations t_m inside [lo, hi]."""
        if hi <= max(lo, 1.0):
            return np.empty(0)
        m_lo = max(1, int(math.ceil(max(lo, 1.0) ** self.two_plus)))
        m_hi = int(math.floor(hi**self.two_plus))
        if m_hi < m_lo:
            return np.empty(0)
        if m_hi - m_lo + 1 > max_count:
            raise ValueError("too many corners requested; reduce the range")
        m = np.arange(m_lo, m_hi + 1, dtype=float)
        return m ** (1.0 / self.two_plus)

    def _half_line_breakpoints(self, lo: float, hi: float, max_count: int):
        if hi <= max(lo, 1.0):
            return np.empty(0)
        m_lo = max(1, int(math.ceil(max(lo, 1.0) ** self.two_plus - 1.0)))
        m_hi = int(math.floor(hi**self.two_plus + 1.0))
        if (m_hi - m_lo + 1) * 3 > max_count:
            raise ValueError("too many breakpoints requested; reduce the range")
        m = np.arange(m_lo, m_hi + 1, dtype=float)
        delta = corner_delta(m, self.two_plus, self.params.eta_exp)
        s_pts = np.concatenate([m, m - delta, m + delta])
        s_pts = s_pts[s_pts >= 1.0]
        t_pts = s_pts ** (1.0 / self.two_plus)
        return t_pts[(t_pts > lo) & (t_pts < hi)]

    def quad_breakpoints(self, lo: float, hi: float, max_count: int = 5_000_000):
        """Corners plus rounding-window edges inside [lo, hi] (either sign).

        Quadrature panels must break at the window edges: the reciprocal
        weight spikes inside the windows, whose width shrinks much faster
        than the corner spacing, and a spike hidden between the nodes of
        a wide panel would otherwise be dropped silently.
        """
        pts = [self._half_line_breakpoints(lo, hi, max_count)]
        if lo < -1.0:
            pts.append(-self._half_line_breakpoints(max(-hi, 1e-300), -lo, max_count))
        pts.append(np.array([-1.0, 1.0]))  # bridge seams
        out = np.concatenate(pts)
        return np.unique(out[(out > lo) & (out < hi)])

    # Envelope data consumed by the integral certificates -----------------

    @property
    def finite_volume(self) -> bool:
        return True

    def volume_envelope(self):
        """(C, a) with j**(n-1) <= C * |t|**(-1-a) for |t| > 1."""
        return 2.0 ** (self.n - 1), self.epsilon * (self.n - 1)

    def reciprocal_weight_envelope(self):
        """(C, a) dominating 1/weight on B for t >= t0."""
        c = max(1.0, 2.0 ** (3 - self.n)) / (self.n - 1)
        return c, self.epsilon


@dataclass(frozen=True)
class FlatProfile:
    """Control profile j == 1 (infinite-volume round cylinder)."""

    n: int = 2
    epsilon: float = 0.0

    is_flat = True

    @property
    def t0(self) -> float:
        return 1.0

    @property
    def finite_volume(self) -> bool:
        return False

    def eval_all(self, t):
        t = np.asarray(t, dtype=float)
        return np.ones_like(t), np.zeros_like(t), np.zeros_like(t)

    def eval(self, t, order: int = 0):
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        return self.eval_all(t)[order]

    def psi(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def in_B(self, t):
        t = np.asarray(t, dtype=float)
        res = t >= 1.0
        return bool(res) if res.ndim == 0 else res

    def corners_in(self, lo, hi, max_count: int = 0):
        return np.empty(0)

    def quad_breakpoints(self, lo, hi, max_count: int = 0):
        return np.empty(0)


def _outer_state_at_one(params: WarpingParams):
    """(j, j', j'') at t = 1+ from the warped piece's closed forms."""
    two_plus = params.two_plus
    alpha = params.alpha
    delta1 = float(corner_delta(1.0, two_plus, params.eta_exp))
    # s = 1 sits at the (odd) corner m = 1, i.e. mid-window: x = 0.
    h0 = 3.0 * delta1 / 8.0
    psi = 2.0 - h0
    dpsi = 0.0
    ddpsi = -3.0 / (2.0 * delta1)
    su1 = two_plus
    su2 = two_plus * (two_plus - 1.0)
    j = psi
    jp = dpsi * su1 - alpha * psi
    jpp = ddpsi * su1**2 + dpsi * su2 - 2.0 * alpha * dpsi * su1 + alpha * (alpha + 1.0) * psi
    return j, jp, jpp


def _bridge_coeffs(params: WarpingParams) -> np.ndarray:
    """Even polynomial on [-1, 1] matching (j, j', j'') at t = 1.

    The minimal-degree (quartic) match is used when it stays above the
    positivity floor; otherwise the constant term is raised and the match
    recomputed with one extra even degree of freedom.
    """
    j1, jp1, jpp1 = _outer_state_at_one(params)

    c4 = (jpp1 - jp1) / 8.0
    c2 = (jp1 - 4.0 * c4) / 2.0
    c0 = j1 - c2 - c4
    coeffs = np.array([c0, c2, c4])
    if _even_poly_min(coeffs) > BRIDGE_FLOOR:
        return coeffs

    c0_try = max(2.0 * BRIDGE_FLOOR, j1 / 2.0)
    for _ in range(60):
        rhs = np.array([j1 - c0_try, jp1, jpp1])
        mat = np.array([[1.0, 1.0, 1.0], [2.0, 4.0, 6.0], [2.0, 12.0, 30.0]])
        c2_, c4_, c6_ = np.linalg.solve(mat, rhs)
        coeffs = np.array([c0_try, c2_, c4_, c6_])
        if _even_poly_min(coeffs) > BRIDGE_FLOOR:
            return coeffs
        c0_try *= 1.5
    raise ProfileConstructionError("could not build a positive bridge polynomial")


def _even_poly_min(coeffs: np.ndarray) -> float:
    u = np.linspace(0.0, 1.0, 20_001)
    p = np.zeros_like(u)
    for k, c in enumerate(coeffs):
        p += c * u ** (2 * k)
    return float(p.min())


def build_profile(params: WarpingParams) -> WarpingProfile:
    """Assemble the patch table, merged extents and bridge for ``params``."""
    m = np.arange(1, params.m_max + 1, dtype=float)
    t_m = m ** (1.0 / params.two_plus)
    eta_m = m ** (-params.eta_exp)
    starts = np.maximum(1.0, t_m - eta_m)
    ends = t_m + eta_m
    g_start, g_end, group = _merge_intervals(starts, ends)

    # A single merged extent is normal for a short table (the first few
    # patches always overlap); it only signals trouble when a long table
    # still has no admissible gap anywhere.
    if params.m_max >= 100 and len(g_start) == 1 and g_start[0] <= 1.0 \
            and g_end[0] >= t_m[-1]:
        raise ProfileConstructionError(
            "patch merging swallowed the whole tracked range; "
            "epsilon is too large for this m_max"
        )

    profile = WarpingProfile(
        params=params,
        bridge=_bridge_coeffs(params),
        patch_t=t_m,
        patch_eta=eta_m,
        merged_starts=g_start,
        merged_ends=g_end,
        patch_group=group,
    )
    return profile


@dataclass(frozen=True)
class DerivativeBoundReport:
    t_lo: float
    t_hi: float
    samples: int
    n_admissible: int
    min_ratio: float
    argmin_t: float
    passed: bool


def verify_derivative_bound(
    profile: WarpingProfile, t_lo: float, t_hi: float, samples: int = 100_000
) -> DerivativeBoundReport:
    """Sampled check of |j'(t)| >= t**beta on B for t >= t0."""
    if t_lo < profile.t0:
        raise ValueError(f"t_lo must be >= t0 = {profile.t0:.6g}")
    if t_hi <= t_lo:
        raise ValueError("t_hi must exceed t_lo")
    ts = np.linspace(t_lo, t_hi, samples)
    mask = profile.in_B(ts)
    if not np.any(mask):
        raise EmptySampleError("the requested interval lies entirely inside patches")
    ts = ts[mask]
    jp = profile.eval(ts, 1)
    ratio = np.abs(jp) * ts ** (-profile.params.deriv_exponent)
    k = int(np.argmin(ratio))
    return DerivativeBoundReport(
        t_lo=t_lo,
        t_hi=t_hi,
        samples=samples,
        n_admissible=int(mask.sum()),
        min_ratio=float(ratio[k]),
        argmin_t=float(ts[k]),
        passed=bool(ratio[k] >= 1.0),
    )


def export_profile_csv(profile, ts, path) -> None:
    """Write `t,j,jp,jpp,psi,in_B` rows with 17 significant digits."""
    ts = np.asarray(ts, dtype=float)
    j, jp, jpp = profile.eval_all(ts)
    psi = profile.psi(ts)
    inb = profile.in_B(ts)
    with open(path, "w", newline="\n") as fh:
        fh.write("t,j,jp,jpp,psi,in_B\n")
        for k in range(len(ts)):
            fh.write(
                f"{ts[k]:.17g},{j[k]:.17g},{jp[k]:.17g},{jpp[k]:.17g},"
                f"{psi[k]:.17g},{int(inb[k])}\n"
            )
