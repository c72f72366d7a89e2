"""Generalized Harper cocycle: parameters, transfer matrices, rescaled products.

The model is the quasi-periodic Schrodinger operator

    (Hu)_n = u_{n+1} + u_{n-1} + 2 a1 cos 2pi(x + n alpha) u_n
                               + 2 a2 cos 4pi(x + n alpha) u_n

whose transfer matrix at phase x is A(x) = [[E - v(x), -1], [1, 0]] with
v(x) = 2 a1 cos 2pi x + 2 a2 cos 4pi x.  Everything here also accepts an
imaginary shift eps, i.e. evaluates at x + i eps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import HypothesisError, PreconditionError

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ModelParams:
    """Couplings a1, a2, energy E and frequency alpha of the cocycle.

    Signs are kept as given. Bound computations use |a1|, |a2|.
    """

    a1: float
    a2: float
    E: float
    alpha: float = GOLDEN_MEAN

    def __post_init__(self):
        for name in ("a1", "a2", "E", "alpha"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise PreconditionError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not 0.0 < self.alpha < 1.0:
            raise PreconditionError(f"alpha must lie in (0, 1), got {self.alpha}")

    def with_energy(self, E: float) -> "ModelParams":
        return ModelParams(self.a1, self.a2, E, self.alpha)


@dataclass(frozen=True)
class PhasePoint:
    """Complex phase x + i*eps with x reduced to [0, 1)."""

    x: float
    eps: float = 0.0

    def __post_init__(self):
        x = float(self.x) % 1.0
        # -1e-17 % 1.0 rounds to 1.0
        if x >= 1.0:
            x = 0.0
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "eps", float(self.eps))


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex matrix; unit determinant when built by ``transfer_matrix``."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def from_array(cls, a) -> "TransferMatrix":
        a = np.asarray(a, dtype=complex)
        return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def frobenius_norm(self) -> float:
        return math.sqrt(abs(self.m11) ** 2 + abs(self.m12) ** 2
                         + abs(self.m21) ** 2 + abs(self.m22) ** 2)

    def operator_norm(self) -> float:
        return operator_norm_2x2(self.m11, self.m12, self.m21, self.m22)

    def scaled(self, c: float) -> "TransferMatrix":
        return TransferMatrix(self.m11 * c, self.m12 * c, self.m21 * c, self.m22 * c)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )


def operator_norm_2x2(m11, m12, m21, m22) -> float:
    """Largest singular value of [[m11, m12], [m21, m22]].

    sigma_max^2 = (F + sqrt(G)) / 2 with F the squared Frobenius norm and
    G = (|r1|^2 - |r2|^2)^2 + 4|<r1, r2>|^2 over the rows, which equals
    F^2 - 4|det|^2 without its cancellation. Works on scalars and numpy
    arrays alike.
    """
    r1 = abs(m11) ** 2 + abs(m12) ** 2
    r2 = abs(m21) ** 2 + abs(m22) ** 2
    ip = abs(m11 * np.conj(m21) + m12 * np.conj(m22))
    G = (r1 - r2) ** 2 + 4.0 * ip * ip
    return np.sqrt(0.5 * (r1 + r2 + np.sqrt(G)))


@dataclass(frozen=True)
class RescaledProduct:
    """A_n held as exp(log_norm) * direction with ||direction||_F = 1."""

    log_norm: float
    direction: TransferMatrix
    steps: int

    def log_frobenius_norm(self) -> float:
        return self.log_norm + math.log(self.direction.frobenius_norm())

    def log_operator_norm(self) -> float:
        return self.log_norm + math.log(self.direction.operator_norm())

    def matrix(self) -> TransferMatrix:
        """The product itself; overflows for long orbits."""
        return self.direction.scaled(math.exp(self.log_norm))


def potential_value(p: ModelParams, z: PhasePoint) -> complex:
    """Top-left entry E - 2a1 cos 2pi(x+i eps) - 2a2 cos 4pi(x+i eps)."""
    two_pi = 2.0 * math.pi
    w = cmath.exp(1j * two_pi * z.x)
    wc = w.conjugate()
    g1 = math.exp(two_pi * z.eps)
    g2 = g1 * g1
    v = (p.E
         - p.a1 * (g1 * wc + w / g1)
         - p.a2 * (g2 * wc * wc + w * w / g2))
    if z.eps == 0.0:
        return complex(v.real, 0.0)
    return v


def transfer_matrix(p: ModelParams, z: PhasePoint) -> TransferMatrix:
    return TransferMatrix(potential_value(p, z), -1 + 0j, 1 + 0j, 0j)


def product_log_norm(p: ModelParams, z: PhasePoint, n: int) -> RescaledProduct:
    """A_n(x + i eps) = A(x + (n-1)alpha) ... A(x), renormalised every step.

    n = 0 gives the identity (stored as I/sqrt2 with log_norm = ln sqrt2).
    """
    n = int(n)
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    s, m11, m12, m21, m22 = _kernels.product_single(
        p.a1, p.a2, p.E, p.alpha, z.x, z.eps, n)
    return RescaledProduct(float(s), TransferMatrix(m11, m12, m21, m22), n)


def orbit_potentials(p: ModelParams, z: PhasePoint, n: int) -> np.ndarray:
    """v_j = potential_value at x + j*alpha + i*eps for j = 0..n-1."""
    j = np.arange(n, dtype=float)
    x = np.mod(z.x + j * p.alpha, 1.0)
    w = np.exp(2j * np.pi * x)
    g1 = math.exp(2.0 * math.pi * z.eps)
    g2 = g1 * g1
    return p.E - p.a1 * (g1 * w.conj() + w / g1) - p.a2 * (g2 * w.conj() ** 2 + w * w / g2)


def lemma31_lower_bound(vs: Iterable[float]) -> float:
    """prod(|v_j| - 1), the norm floor for products of [[v_j, -1], [1, 0]].

    Requires |v_j| > 2 for every j.
    """
    vs = [abs(complex(v)) for v in vs]
    for j, a in enumerate(vs):
        if not a > 2.0:
            raise HypothesisError(f"|v_{j}| = {a} <= 2")
    return math.exp(math.fsum(math.log(a - 1.0) for a in vs))


def log_lemma31_lower_bound(vs: Iterable[complex]) -> float:
    """ln of ``lemma31_lower_bound``; stays finite for long orbits."""
    a = np.abs(np.asarray(list(vs), dtype=complex))
    bad = np.flatnonzero(~(a > 2.0))
    if bad.size:
        raise HypothesisError(f"|v_{bad[0]}| = {a[bad[0]]} <= 2")
    return math.fsum(np.log(a - 1.0))
