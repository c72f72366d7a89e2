"""Exception types raised when an estimate's hypotheses fail."""

from __future__ import annotations


class PreconditionError(ValueError):
    """An argument lies outside the domain of the operation."""


class HypothesisError(PreconditionError):
    """The hypothesis of a lemma or theorem does not hold for the inputs."""


class RatioTooSmallError(HypothesisError):
    """|a1/a2| < 100, so exp(4*pi*eps0) >= 10 fails and eps0 is not admissible."""


class OrbitBelowTwoError(HypothesisError):
    """An orbit point has |v_j| <= 2, so the product lower bound does not apply."""

    def __init__(self, j: int, value: float):
        super().__init__(f"|v_{j}| = {value:.6g} <= 2 along the orbit")
        self.j = j
        self.value = value


class NearSingularError(PreconditionError):
    """The log integrand vanishes (numerically) somewhere on the circle."""


class BoundViolationError(AssertionError):
    """A proven inequality failed numerically beyond rounding tolerance."""
