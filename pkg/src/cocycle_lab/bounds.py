"""Closed-form lower bounds for the Lyapunov exponent and their ingredients.

* Herman:   L >= ln|a2|  (or ln|a1| when a2 = 0).
* Main:     L >= ln|a1| - 10 sqrt(|a2/a1|)  when |a1| > 1, |a2| < |a1|/100.

The second bound is assembled from an imaginary shift eps0 with
exp(4 pi eps0) = sqrt(|a1/a2|), the distance from E to the ellipse traced by
the degree-one part of the shifted potential, an entrywise product floor,
Jensen's formula for the degree-one log integral and a remainder estimate.
Every piece is exposed here so it can be checked on its own.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .cocycle import ModelParams
from .errors import BoundViolationError, HypothesisError, PreconditionError, RatioTooSmallError

TWO_PI = 2.0 * math.pi
LEMMA32_CONSTANT = 19.0 / 60.0
MIN_RATIO = 100.0


def herman_bound(p: ModelParams) -> float | None:
    if p.a2 != 0.0:
        return math.log(abs(p.a2))
    if p.a1 != 0.0:
        return math.log(abs(p.a1))
    return None


def theorem_applicable(p: ModelParams) -> bool:
    a1, a2 = abs(p.a1), abs(p.a2)
    return a1 > 1.0 and 0.0 < a2 < a1 / MIN_RATIO


def theorem_bound(p: ModelParams) -> float | None:
    """ln|a1| - 10 sqrt(|a2/a1|), or None outside the theorem's hypotheses."""
    if not theorem_applicable(p):
        return None
    a1, a2 = abs(p.a1), abs(p.a2)
    return math.log(a1) - 10.0 * math.sqrt(a2 / a1)


def epsilon0(p: ModelParams) -> float:
    """Shift with exp(4 pi eps0) = sqrt(|a1/a2|); needs |a1/a2| >= 100."""
    if p.a1 == 0.0 or p.a2 == 0.0:
        raise PreconditionError("eps0 needs a1 != 0 and a2 != 0")
    ratio = abs(p.a1 / p.a2)
    if ratio < MIN_RATIO:
        raise RatioTooSmallError(f"|a1/a2| = {ratio:.6g} < {MIN_RATIO:g}")
    return math.log(ratio) / (4.0 * TWO_PI)


@dataclass(frozen=True)
class EllipseSpec:
    """Ellipse x^2/a^2 + y^2/b^2 = 1 traced by E - (degree-one part) at shift delta."""

    a_axis: float
    b_axis: float
    delta: float

    @classmethod
    def at(cls, a1: float, delta: float) -> "EllipseSpec":
        a1 = abs(a1)
        t = TWO_PI * delta
        return cls(2.0 * a1 * math.cosh(t), 2.0 * a1 * math.sinh(t), float(delta))

    @property
    def focal_sq(self) -> float:
        """a^2 - b^2, which equals 4 a1^2."""
        return (self.a_axis - self.b_axis) * (self.a_axis + self.b_axis)


def ellipse_distance(p: ModelParams, delta: float, E: float | None = None) -> float:
    """inf_x |E - a1 e^{-2pi delta} e^{2pi i x} - a1 e^{2pi delta} e^{-2pi i x}|.

    Equals the distance from (E, 0) to the ellipse with semi-axes
    a = 2|a1| cosh(2pi delta), b = 2|a1| sinh(2pi delta). For |E| up to
    (a^2 - b^2)/a the nearest point is off-axis; beyond it, the vertex.
    """
    if p.a1 == 0.0:
        raise PreconditionError("ellipse distance needs a1 != 0")
    if not delta > 0:
        raise PreconditionError(f"delta must be > 0, got {delta}")
    E = p.E if E is None else float(E)
    ell = EllipseSpec.at(p.a1, delta)
    c2 = 4.0 * p.a1 * p.a1
    aE = abs(E)
    if aE * ell.a_axis <= c2:
        return ell.b_axis * math.sqrt(max(0.0, 1.0 - E * E / c2))
    return abs(aE - ell.a_axis)


class SupDistance(NamedTuple):
    delta: float
    distance: float


def lemma32_sup(p: ModelParams, E: float | None = None) -> SupDistance:
    """Larger of the ellipse distances at eps0 and 2*eps0.

    Always at least (19/60) |a1| exp(4 pi eps0); a shortfall raises
    BoundViolationError.
    """
    e0 = epsilon0(p)
    if p.a1 == 0.0:
        raise PreconditionError("a1 must be nonzero")
    d1 = ellipse_distance(p, e0, E)
    d2 = ellipse_distance(p, 2.0 * e0, E)
    best = SupDistance(e0, d1) if d1 >= d2 else SupDistance(2.0 * e0, d2)
    floor = LEMMA32_CONSTANT * abs(p.a1) * math.sqrt(abs(p.a1 / p.a2))
    if best.distance < floor - 1e-9 * max(1.0, floor):
        raise BoundViolationError(f"sup distance {best.distance!r} < {floor!r}")
    return best


def potential_floor(p: ModelParams, delta: float, E: float | None = None) -> float:
    """Lower bound for inf_x |E - v(x + i delta)|: ellipse distance minus the a2 terms."""
    t = 2.0 * TWO_PI * delta
    return ellipse_distance(p, delta, E) - abs(p.a2) * (math.exp(t) + math.exp(-t))


def jensen_roots(a1: float, delta: float, E: float) -> tuple[complex, complex]:
    """Roots of a1 e^{-2pi delta} z^2 - E z + a1 e^{2pi delta}, computed stably."""
    a = abs(a1) * math.exp(-TWO_PI * delta)
    c = abs(a1) * math.exp(TWO_PI * delta)
    disc = E * E - 4.0 * a * c
    if disc < 0.0:
        r = cmath.sqrt(disc)
        return (E + r) / (2.0 * a), (E - r) / (2.0 * a)
    q = 0.5 * (E + math.copysign(math.sqrt(disc), E if E != 0.0 else 1.0))
    return complex(q / a), complex(c / q)


def jensen_integral(p: ModelParams, delta: float, E: float | None = None) -> float:
    """Exact integral of ln|E - a1 e^{2pi delta} e^{-2pi i x} - a1 e^{-2pi delta} e^{2pi i x}| dx.

    Jensen's formula: ln|leading coefficient| + sum over roots of ln max(1, |z|).
    """
    if p.a1 == 0.0:
        raise PreconditionError("Jensen integral needs a1 != 0")
    if not delta > 0:
        raise PreconditionError(f"delta must be > 0, got {delta}")
    E = p.E if E is None else float(E)
    z1, z2 = jensen_roots(p.a1, delta, E)
    prod = abs(z1) * abs(z2)
    target = math.exp(2.0 * TWO_PI * delta)
    if abs(prod - target) > 1e-9 * target:
        raise BoundViolationError(f"root product {prod!r} != exp(4 pi delta) = {target!r}")
    value = (math.log(abs(p.a1)) - TWO_PI * delta
             + max(0.0, math.log(abs(z1))) + max(0.0, math.log(abs(z2))))
    floor = TWO_PI * delta + math.log(abs(p.a1))
    if value < floor - 1e-9 * max(1.0, abs(floor)):
        raise BoundViolationError(f"Jensen value {value!r} < {floor!r}")
    return value


def _check_shift(p: ModelParams, delta: float) -> float:
    e0 = epsilon0(p)
    if not (math.isclose(delta, e0, rel_tol=1e-9) or math.isclose(delta, 2.0 * e0, rel_tol=1e-9)):
        raise PreconditionError(f"delta must be eps0 or 2*eps0 (eps0 = {e0!r}), got {delta!r}")
    return e0


def term_II_bound(p: ModelParams, delta: float) -> float:
    """ln(1 - (60/19)(|a2| e^{4pi delta} + |a2| e^{-4pi delta} + 1) / (|a1| e^{4pi eps0})).

    Lower bound for the remainder integral; at least -10 sqrt(|a2/a1|).
    """
    if not abs(p.a1) > 1.0:
        raise HypothesisError(f"|a1| = {abs(p.a1)} must exceed 1")
    e0 = _check_shift(p, delta)
    a1, a2 = abs(p.a1), abs(p.a2)
    t = 2.0 * TWO_PI * delta
    arg = 1.0 - (a2 * math.exp(t) + a2 * math.exp(-t) + 1.0) / (
        LEMMA32_CONSTANT * a1 * math.exp(2.0 * TWO_PI * e0))
    if not arg > 0.0:
        raise HypothesisError(f"log argument {arg!r} <= 0; hypotheses fail upstream")
    value = math.log(arg)
    floor = -10.0 * math.sqrt(a2 / a1)
    if value < floor - 1e-9:
        raise BoundViolationError(f"remainder bound {value!r} < {floor!r}")
    return value


@dataclass(frozen=True)
class ContradictionVerdict:
    """Whether (eps0, L(eps0)) and (2eps0, L(2eps0)) are kept off the asymptote."""

    ratio: float
    log_ratio: float
    case1_lhs: float
    case2_lhs: float

    @property
    def case1_margin(self) -> float:
        return self.log_ratio - self.case1_lhs

    @property
    def case2_margin(self) -> float:
        return self.log_ratio - self.case2_lhs

    @property
    def excluded(self) -> bool:
        return self.case1_margin > 0.0 and self.case2_margin > 0.0


def contradiction_check(p: ModelParams) -> ContradictionVerdict:
    """Compare (40/3) sqrt(|a2/a1|) and 20 sqrt(|a2/a1|) against ln|a1/a2|."""
    if p.a1 == 0.0 or p.a2 == 0.0:
        raise PreconditionError("needs a1 != 0 and a2 != 0")
    r = abs(p.a1 / p.a2)
    root = math.sqrt(1.0 / r)
    return ContradictionVerdict(r, math.log(r), 40.0 / 3.0 * root, 20.0 * root)


@dataclass(frozen=True)
class BoundReport:
    herman_bound: float | None
    theorem_bound: float | None
    epsilon0: float | None
    chosen_delta: float | None
    sup_distance: float | None
    measured_le: float | None = None
    std_error: float | None = None
    margins: dict = field(default_factory=dict)

    def satisfied(self, sigmas: float = 3.0, slack: float = 0.02) -> bool:
        """Every margin clears -(sigmas * stdError + slack)."""
        if self.measured_le is None:
            return True
        allowance = sigmas * (self.std_error or 0.0) + slack
        return all(m + allowance >= 0.0 for m in self.margins.values())

    def as_dict(self) -> dict:
        return {
            "hermanBound": self.herman_bound,
            "theoremBound": self.theorem_bound,
            "epsilon0": self.epsilon0,
            "chosenDelta": self.chosen_delta,
            "supDistance": self.sup_distance,
            "measuredLE": self.measured_le,
            "stdError": self.std_error,
            "margins": dict(self.margins),
        }


def bound_report(p: ModelParams, measured=None) -> BoundReport:
    """All bounds that apply at ``p``; ``measured`` is an LEEstimate or None."""
    herman = herman_bound(p)
    thm = theorem_bound(p)
    try:
        e0 = epsilon0(p)
    except PreconditionError:
        e0 = None
    delta = dist = None
    if e0 is not None:
        delta, dist = lemma32_sup(p)
    margins = {}
    le = se = None
    if measured is not None:
        le, se = measured.value, measured.std_error
        if herman is not None:
            margins["herman"] = le - herman
        if thm is not None:
            margins["theorem"] = le - thm
    return BoundReport(herman, thm, e0, delta, dist, le, se, margins)
