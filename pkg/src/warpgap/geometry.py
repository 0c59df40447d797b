"""Differential operators of the warped metric dt^2 + j(t)^2 sigma.

Radial (functions of t only) operators work in any dimension n >= 2; the
full non-radial operators are instantiated on R x S^1 (n = 2), where the
circle admits exact spectral differentiation.  In the orthonormal frame
{d/dt, j^-1 d/dtheta} the Hessian components of F are

    H_tt = F_tt
    H_tθ = (F_tθ - (j'/j) F_θ) / j
    H_θθ = (F_θθ + j j' F_t) / j^2

and |Hess F|^2 = H_tt^2 + 2 H_tθ^2 + H_θθ^2.  The sign of the j j' F_t
term is fixed by the Christoffel symbol Γ^t_θθ = -j j' and is validated
by the trace identity tr(Hess) = Laplacian in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import periodic_integrate

__all__ = [
    "RadialFunction",
    "SurfaceFunction",
    "CurvatureProfile",
    "hardy_weight",
    "radial_hessian_sq",
    "radial_laplacian",
    "hessian_sq_full",
    "gradient_sq_full",
    "laplacian_full",
    "symmetrize",
    "stokes_defect",
    "curvature_profile",
    "lambda_growth",
    "export_curvature_csv",
]


@dataclass(frozen=True)
class RadialFunction:
    """Grid samples of a function of t alone on [-T, T]."""

    T: float
    h: float
    values: np.ndarray
    clamped: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        n = len(v) - 1
        if not math.isclose(n * self.h, 2.0 * self.T, rel_tol=1e-9):
            raise ValueError("grid must satisfy N*h = 2T")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")

    @property
    def grid(self) -> np.ndarray:
        return -self.T + self.h * np.arange(len(self.values))

    @property
    def bc_left(self) -> float:
        return float(self.values[0])

    @property
    def bc_right(self) -> float:
        return float(self.values[-1])

    def d1(self) -> np.ndarray:
        """Central first derivative; clamped ends use ghost reflection."""
        v = self.values
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * self.h)
        if self.clamped:
            out[0] = 0.0
            out[-1] = 0.0
        else:
            out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * self.h)
            out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * self.h)
        return out

    def d2(self) -> np.ndarray:
        v = self.values
        out = np.empty_like(v)
        h2 = self.h**2
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
        if self.clamped:
            out[0] = 2.0 * (v[1] - v[0]) / h2
            out[-1] = 2.0 * (v[-2] - v[-1]) / h2
        else:
            out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
            out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h2
        return out


@dataclass(frozen=True)
class SurfaceFunction:
    """Tensor grid on [-T, T] x S^1, theta row j at 2*pi*j/Ntheta."""

    T: float
    h_t: float
    values: np.ndarray  # shape (Nt + 1, Ntheta)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[1] < 4:
            raise ValueError("need a (Nt+1, Ntheta>=4) grid")
        if not math.isclose((v.shape[0] - 1) * self.h_t, 2.0 * self.T, rel_tol=1e-9):
            raise ValueError("t-grid must satisfy Nt*h_t = 2T")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")

    @property
    def t_grid(self) -> np.ndarray:
        return -self.T + self.h_t * np.arange(self.values.shape[0])

    @property
    def theta_grid(self) -> np.ndarray:
        n = self.values.shape[1]
        return 2.0 * np.pi * np.arange(n) / n

    def dt(self) -> np.ndarray:
        v = self.values
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * self.h_t)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * self.h_t)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * self.h_t)
        return out

    def dtt(self) -> np.ndarray:
        v = self.values
        h2 = self.h_t**2
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h2
        return out


def _dtheta(values: np.ndarray, order: int, mode: str) -> np.ndarray:
    n = values.shape[-1]
    if mode == "spectral":
        freq = np.fft.rfftfreq(n, d=1.0 / n)  # 0, 1, ..., n//2
        spec = np.fft.rfft(values, axis=-1)
        if order == 1:
            mult = 1j * freq
            if n % 2 == 0:
                mult[-1] = 0.0  # drop the unmatched Nyquist mode
        elif order == 2:
            mult = -(freq**2)
        else:
            raise ValueError("order must be 1 or 2")
        return np.fft.irfft(spec * mult, n=n, axis=-1)
    if mode == "fd":
        h = 2.0 * np.pi / n
        if order == 1:
            return (np.roll(values, -1, axis=-1) - np.roll(values, 1, axis=-1)) / (2.0 * h)
        if order == 2:
            return (
                np.roll(values, -1, axis=-1)
                - 2.0 * values
                + np.roll(values, 1, axis=-1)
            ) / h**2
        raise ValueError("order must be 1 or 2")
    raise ValueError("mode must be 'spectral' or 'fd'")


def hardy_weight(profile, t):
    """j^(n-1) + (n-1) j^(n-3) (j')^2 -- the transition-cost weight."""
    j, jp, _ = profile.eval_all(t)
    n = profile.n
    return j ** (n - 1) + (n - 1) * j ** (n - 3) * jp**2


def _radial_frame(phi: RadialFunction, profile):
    t = phi.grid
    j, jp, _ = profile.eval_all(t)
    return phi.d1(), phi.d2(), j, jp


def radial_hessian_sq(phi: RadialFunction, profile, node=None):
    """|Hess phi|^2 = (phi'')^2 + (n-1) (j'/j)^2 (phi')^2 for radial phi."""
    d1, d2, j, jp = _radial_frame(phi, profile)
    out = d2**2 + (profile.n - 1) * (jp / j) ** 2 * d1**2
    return out if node is None else float(out[node])


def radial_laplacian(phi: RadialFunction, profile, node=None):
    """Laplace-Beltrami of a radial function: phi'' + (n-1)(j'/j) phi'."""
    d1, d2, j, jp = _radial_frame(phi, profile)
    out = d2 + (profile.n - 1) * (jp / j) * d1
    return out if node is None else float(out[node])


def _surface_frame(F: SurfaceFunction, profile):
    t = F.t_grid
    j, jp, _ = profile.eval_all(t)
    return j[:, None], jp[:, None]


def hessian_sq_full(F: SurfaceFunction, profile, node=None, mode: str = "spectral"):
    """Squared Hessian norm on R x S^1 in the orthonormal frame."""
    j, jp = _surface_frame(F, profile)
    Ft = F.dt()
    Ftt = F.dtt()
    Fth = _dtheta(Ft, 1, mode)
    Fh = _dtheta(F.values, 1, mode)
    Fhh = _dtheta(F.values, 2, mode)
    H_tt = Ftt
    H_th = (Fth - (jp / j) * Fh) / j
    H_hh = (Fhh + j * jp * Ft) / j**2
    out = H_tt**2 + 2.0 * H_th**2 + H_hh**2
    return out if node is None else float(out[node])


def gradient_sq_full(F: SurfaceFunction, profile, node=None, mode: str = "spectral"):
    """|grad F|^2 = (F_t)^2 + j^-2 (F_theta)^2."""
    j, _ = _surface_frame(F, profile)
    Ft = F.dt()
    Fh = _dtheta(F.values, 1, mode)
    out = Ft**2 + (Fh / j) ** 2
    return out if node is None else float(out[node])


def laplacian_full(F: SurfaceFunction, profile, node=None, mode: str = "spectral"):
    j, jp = _surface_frame(F, profile)
    out = F.dtt() + (profile.n - 1) * (jp / j) * F.dt() + _dtheta(F.values, 2, mode) / j**2
    return out if node is None else float(out[node])


def symmetrize(F: SurfaceFunction) -> RadialFunction:
    """Fiberwise average over the circle (the 'hat' operation)."""
    vals = F.values.mean(axis=1)
    return RadialFunction(T=F.T, h=F.h_t, values=vals, clamped=False)


def stokes_defect(F: SurfaceFunction, i_slice: int, mode: str = "spectral") -> float:
    """Circle integral of sigma(grad dF/dt, grad F) + (Lap_sigma F) dF/dt.

    Vanishes identically for smooth F; the returned magnitude measures
    the discretization defect of the chosen theta-derivative mode.
    """
    u = F.dt()[i_slice]
    row = F.values[i_slice]
    integrand = _dtheta(u, 1, mode) * _dtheta(row, 1, mode) + _dtheta(row, 2, mode) * u
    return float(periodic_integrate(integrand))


@dataclass(frozen=True)
class CurvatureProfile:
    t: np.ndarray
    K_rad: np.ndarray
    K_tan: np.ndarray
    Ric_rr: np.ndarray


def curvature_profile(profile, ts) -> CurvatureProfile:
    """Sectional/Ricci curvature samples of the warped metric.

    K_rad applies to planes containing d/dt; K_tan to tangential planes
    (meaningful for n >= 3); Ric_rr is the radial Ricci curvature.
    """
    ts = np.asarray(ts, dtype=float)
    j, jp, jpp = profile.eval_all(ts)
    k_rad = -jpp / j
    k_tan = (1.0 - jp**2) / j**2
    ric = (profile.n - 1) * k_rad
    return CurvatureProfile(t=ts, K_rad=k_rad, K_tan=k_tan, Ric_rr=ric)


def lambda_growth(r: float, K: int) -> float:
    """r times the product of the first K iterated logarithms of r.

    Each factor is clamped below at 1 so the gauge stays defined (and in
    the same growth class) at moderate radii.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    out = float(r)
    x = float(r)
    for _ in range(K):
        x = math.log(x) if x > 1.0 else 0.0
        out *= max(x, 1.0)
    return out


def export_curvature_csv(profile, ts, path) -> None:
    """Write `t,K_rad,K_tan,Ric_rr` rows with 17 significant digits."""
    cp = curvature_profile(profile, ts)
    with open(path, "w", newline="\n") as fh:
        fh.write("t,K_rad,K_tan,Ric_rr\n")
        for k in range(len(cp.t)):
            fh.write(
                f"{cp.t[k]:.17g},{cp.K_rad[k]:.17g},{cp.K_tan[k]:.17g},{cp.Ric_rr[k]:.17g}\n"
            )
