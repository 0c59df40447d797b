"""Disjoint-support series arithmetic for the glued counterexample.

A family u_k supported on pairwise disjoint intervals is glued into
F = sum_k e^(rate*k) u_k; disjointness turns p-th power norms of F into
plain sums of per-term bounds, so each norm of F is classified from the
series sum_k exp(rate*k + bound_log(k)).

Bound descriptors are symbolic sums c * k^d.  Classification is purely
structural (dominant power and coefficient sign), so super-geometric
exponents like k^1000 never touch floating point and cannot overflow.
The multiplicative constant in the imported bounds is carried as a
symbol and never instantiated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = [
    "LogBound",
    "TermBoundSpec",
    "SeriesClassification",
    "SeriesReport",
    "classify_exp_series",
    "glued_series_norms",
    "imported_bounds",
]

CONVERGENT = "convergent"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LogBound:
    """Log-magnitude bound as a sum of c * k**d monomials (d >= 0)."""

    terms: tuple[tuple[float, float], ...]

    @classmethod
    def affine(cls, slope: float, intercept: float = 0.0) -> "LogBound":
        return cls(terms=((slope, 1.0), (intercept, 0.0)))

    @classmethod
    def power(cls, coeff: float, exponent: float) -> "LogBound":
        return cls(terms=((coeff, exponent),))

    def combined(self, extra_slope: float) -> list[tuple[float, float]]:
        """Monomials of extra_slope*k + self, merged by exponent."""
        acc: dict[float, float] = {}
        for c, d in list(self.terms) + [(extra_slope, 1.0)]:
            acc[d] = acc.get(d, 0.0) + c
        return sorted(((c, d) for d, c in acc.items()), key=lambda t: -t[1])

    def is_affine(self) -> bool:
        return all(d in (0.0, 1.0) or c == 0.0 for c, d in self.terms)


@dataclass(frozen=True)
class TermBoundSpec:
    """Per-term norm bounds for the glued family, in log magnitudes."""

    rate: float
    p: float
    lp_log: LogBound
    laplacian_log: LogBound
    hessian_log: LogBound
    constant_symbol: str = "C"

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError("p must be >= 1")


def imported_bounds(p: float) -> TermBoundSpec:
    """The imported per-term bounds: L^p ~ e^{2k}, Laplacian ~ e^{-2(p-1)k},
    Hessian >= e^{k^1000}, glued with coefficients e^{-3k}."""
    return TermBoundSpec(
        rate=-3.0,
        p=p,
        lp_log=LogBound.affine(2.0),
        laplacian_log=LogBound.affine(-2.0 * (p - 1.0)),
        hessian_log=LogBound.power(1.0, 1000.0),
    )


def classify_exp_series(rate: float, bound: LogBound):
    """Classify sum_k exp(rate*k + bound(k)), k from 0.

    Returns (classification, closed_form_log).  The closed form (log of
    the constant-free sum) exists exactly in the geometric case.
    """
    monos = [(c, d) for c, d in bound.combined(rate) if c != 0.0]
    top = max((d for c, d in monos), default=0.0)

    if top > 1.0:
        lead = sum(c for c, d in monos if d == top)
        if lead > 0.0:
            return DIVERGENT, None  # terms unbounded
        if lead < 0.0:
            return CONVERGENT, None  # ratio limit 0
        top = max((d for c, d in monos if d < top), default=0.0)

    if top == 1.0 or not monos:
        slope = sum(c for c, d in monos if d == 1.0)
        intercept = sum(c for c, d in monos if d == 0.0)
        others = [d for c, d in monos if d not in (0.0, 1.0)]
        if not others:
            if slope < 0.0:
                # geometric: sum exp(intercept + slope*k) = e^b / (1 - e^a)
                return CONVERGENT, intercept - math.log1p(-math.exp(slope))
            return DIVERGENT, None  # terms do not vanish
        if slope < 0.0:
            return CONVERGENT, None  # ratio limit e^slope < 1
        if slope > 0.0:
            return DIVERGENT, None
        # slope balances out; the fractional powers decide the ratio limit.
        top = max(others)

    # Dominant power in (0, 1): the ratio test limit is exactly 1.
    lead = sum(c for c, d in monos if d == top)
    if lead > 0.0:
        return DIVERGENT, None  # terms unbounded
    return INCONCLUSIVE, None


@dataclass(frozen=True)
class SeriesClassification:
    norm: str
    classification: str
    closed_form_log: float | None
    sharp_classification: str | None = None
    sharp_closed_form_log: float | None = None
    sharp_le_stated: bool | None = None

    def to_dict(self):
        return {
            "norm": self.norm,
            "classification": self.classification,
            "closed_form_log_or_null": self.closed_form_log,
        }


@dataclass
class SeriesReport:
    p: float
    constant_symbol: str
    items: list[SeriesClassification] = field(default_factory=list)

    def item(self, norm: str) -> SeriesClassification:
        for it in self.items:
            if it.norm == norm:
                return it
        raise KeyError(norm)

    def to_json(self) -> str:
        doc = {
            "p": self.p,
            "constant_symbol": self.constant_symbol,
            "items": [it.to_dict() for it in self.items],
            "sharp_check": {
                it.norm: {
                    "classification": it.sharp_classification,
                    "closed_form_log_or_null": it.sharp_closed_form_log,
                    "le_stated_bound": it.sharp_le_stated,
                }
                for it in self.items
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def glued_series_norms(spec: TermBoundSpec) -> SeriesReport:
    """Classify the L^p, Laplacian and Hessian sums of the glued series.

    Each norm is classified with the stated coefficient rate (as the
    source bounds are written) and additionally with the sharp
    disjoint-support rate p*rate; for p >= 1 the sharp sum can only be
    smaller, and the report records that comparison.
    """
    report = SeriesReport(p=spec.p, constant_symbol=spec.constant_symbol)
    for norm, bound in (
        ("lp", spec.lp_log),
        ("laplacian_lp", spec.laplacian_log),
        ("hessian_lp", spec.hessian_log),
    ):
        cls, log_val = classify_exp_series(spec.rate, bound)
        sharp_cls, sharp_log = classify_exp_series(spec.rate * spec.p, bound)
        le = None
        if log_val is not None and sharp_log is not None:
            le = bool(sharp_log <= log_val + 1e-12)
        elif cls == CONVERGENT and sharp_cls == CONVERGENT:
            le = True
        report.items.append(
            SeriesClassification(
                norm=norm,
                classification=cls,
                closed_form_log=log_val,
                sharp_classification=sharp_cls,
                sharp_closed_form_log=sharp_log,
                sharp_le_stated=le,
            )
        )
    return report
