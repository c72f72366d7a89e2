"""Lyapunov exponents of the (complexified) cocycle and their eps-profiles.

``le_estimate`` averages (1/n) ln||A_n(x_k + i eps)|| over a uniform phase
grid x_k = offset + k/K.  ``le_profile`` samples eps -> L(eps) on [0, eps_max],
refines gaps whose slope is not an integer multiple of 2pi, and reads off the
accelerations and the piecewise-linear regime (labels Fig1 to Fig4).
"""

from __future__ import annotations

import enum
import functools
import math
import os
from dataclasses import dataclass, replace

import numba
import numpy as np

from . import _kernels
from .cocycle import ModelParams
from .errors import PreconditionError
from .tolerances import (
    DEFAULT_GRID_STEPS,
    DEFAULT_N,
    DEFAULT_PHASES,
    DEFAULT_TOLERANCES,
    MAX_REFINE_DEPTH,
    Tolerances,
)

TWO_PI = 2.0 * math.pi
WORKERS_ENV = "COCYCLE_LAB_WORKERS"


class Regime(str, enum.Enum):
    FIG1 = "Fig1"
    FIG2 = "Fig2"
    FIG3 = "Fig3"
    FIG4 = "Fig4"
    # resolved profile outside the four pictures: zero exponent, a2 = 0,
    # or a grid that stops before the asymptote
    UNCLASSIFIED = "Unclassified"
    UNRESOLVED = "Unresolved"


class Membership(str, enum.Enum):
    IN_SPECTRUM = "InSpectrum"
    NOT_IN_SPECTRUM = "NotInSpectrum"
    ZERO_LE = "ZeroLE"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class LEEstimate:
    value: float
    n: int
    phases: int
    std_error: float
    eps: float = 0.0
    norm: str = "operator"


def set_workers(workers: int | None = None) -> int:
    """Size the numba thread pool; falls back to $COCYCLE_LAB_WORKERS."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else numba.config.NUMBA_NUM_THREADS
    workers = max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(workers)
    return workers


@functools.lru_cache(maxsize=4)
def _table(alpha: float, n: int):
    C, S = _kernels.rotation_table(alpha, n)
    C.flags.writeable = False
    S.flags.writeable = False
    return C, S


def _potential_bound(p: ModelParams, eps: float) -> float:
    return (abs(p.E) + 2.0 * abs(p.a1) * math.cosh(TWO_PI * eps)
            + 2.0 * abs(p.a2) * math.cosh(2.0 * TWO_PI * eps))


def phase_values(p: ModelParams, eps: float = 0.0, n: int = DEFAULT_N,
                 K: int = DEFAULT_PHASES, phase_offset: float = 0.0) -> np.ndarray:
    """Per-phase (1/n) ln||A_n(x_k + i eps)|| (operator norm), k = 0..K-1."""
    n, K = int(n), int(K)
    if n < 1 or K < 1:
        raise PreconditionError(f"need n >= 1 and K >= 1, got n={n}, K={K}")
    xs = np.mod(phase_offset + np.arange(K) / K, 1.0)
    C, S = _table(p.alpha, n)
    block = _kernels.block_length(_potential_bound(p, eps))
    sums = _kernels.lane_log_sums(p.a1, p.a2, p.E, float(eps), C, S,
                                  np.cos(TWO_PI * xs), np.sin(TWO_PI * xs), n, block)
    return sums / n


def le_estimate(p: ModelParams, eps: float = 0.0, n: int = DEFAULT_N,
                K: int = DEFAULT_PHASES, phase_offset: float = 0.0) -> LEEstimate:
    """Finite-volume Lyapunov exponent L(eps) with its standard error."""
    vals = phase_values(p, eps, n, K, phase_offset)
    value = math.fsum(vals) / len(vals)
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return LEEstimate(value, int(n), int(K), se, float(eps))


def default_eps_max(p: ModelParams) -> float:
    """Profile range long enough to reach the 4pi-slope asymptote.

    The asymptote starts near ln|a1/a2| / (2pi) = 4*eps0 when a1 dominates,
    so 6*eps0 leaves a margin; 1.0 otherwise.
    """
    if p.a1 != 0.0 and p.a2 != 0.0 and abs(p.a1) > abs(p.a2):
        return max(1.0, 6.0 * math.log(abs(p.a1 / p.a2)) / (4.0 * TWO_PI))
    return 1.0


def default_h(p: ModelParams) -> float:
    if p.a2 != 0.0 and abs(p.a1 / p.a2) >= 100.0:
        return math.log(abs(p.a1 / p.a2)) / (4.0 * TWO_PI) / 16.0
    return 0.01


@dataclass(frozen=True)
class Segment:
    """Maximal run of gaps sharing one integer acceleration."""

    acceleration: int
    eps_lo: float
    eps_hi: float
    # value of the fitted line at eps = 0
    intercept: float


@dataclass(frozen=True)
class LEProfile:
    params: ModelParams
    eps: np.ndarray
    estimates: tuple
    slopes: np.ndarray
    accelerations: np.ndarray
    status: tuple
    regime: Regime = Regime.UNRESOLVED

    @property
    def le_values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    @property
    def std_errors(self) -> np.ndarray:
        return np.array([e.std_error for e in self.estimates])

    @property
    def resolved(self) -> np.ndarray:
        return np.array([s == "resolved" for s in self.status], dtype=bool)

    @property
    def is_unresolved(self) -> bool:
        return "unresolved" in self.status

    def residuals(self) -> np.ndarray:
        return np.abs(self.slopes - np.rint(self.slopes))

    def segments(self) -> list[Segment]:
        eps, L = self.eps, self.le_values
        out: list[Segment] = []
        i = 0
        while i < len(self.status):
            if self.status[i] != "resolved":
                i += 1
                continue
            k = int(self.accelerations[i])
            j = i
            while j + 1 < len(self.status) and self.status[j + 1] == "resolved" \
                    and self.accelerations[j + 1] == k:
                j += 1
            nodes = slice(i, j + 2)
            icpt = float(np.mean(L[nodes] - TWO_PI * k * eps[nodes]))
            out.append(Segment(k, float(eps[i]), float(eps[j + 1]), icpt))
            i = j + 1
        return out

    def pattern(self) -> list[int]:
        pat: list[int] = []
        for seg in self.segments():
            if not pat or pat[-1] != seg.acceleration:
                pat.append(seg.acceleration)
        return pat


def _gap_status(slopes: np.ndarray, tol: Tolerances) -> tuple:
    nearest = np.rint(slopes)
    ok = (np.abs(slopes - nearest) < tol.slope) & (nearest >= 0) & (nearest <= 2)
    status = ["resolved" if o else "unresolved" for o in ok]
    i = 0
    while i < len(status):
        if status[i] == "resolved":
            i += 1
            continue
        j = i
        while j + 1 < len(status) and status[j + 1] != "resolved":
            j += 1
        # a run bracketed by two different integer slopes is a breakpoint
        if i > 0 and j + 1 < len(status):
            lo, hi = nearest[i - 1], nearest[j + 1]
            run = slopes[i:j + 1]
            if lo < hi and np.all(run > lo - tol.slope) and np.all(run < hi + tol.slope):
                for t in range(i, j + 1):
                    status[t] = "kink"
        i = j + 1
    return tuple(status)


def build_profile(p: ModelParams, eps, estimates, tol: Tolerances = DEFAULT_TOLERANCES
                  ) -> LEProfile:
    """Assemble slopes, accelerations and regime from node estimates."""
    eps = np.asarray(eps, dtype=float)
    order = np.argsort(eps)
    eps = eps[order]
    estimates = tuple(estimates[i] for i in order)
    L = np.array([e.value for e in estimates])
    slopes = np.diff(L) / (TWO_PI * np.diff(eps))
    prof = LEProfile(p, eps, estimates, slopes, np.rint(slopes).astype(int),
                     _gap_status(slopes, tol))
    return replace(prof, regime=classify_profile(prof, tol))


def profile_from_values(p: ModelParams, eps, values, std_error: float = 0.0,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> LEProfile:
    """Profile from given L(eps) values (synthetic graphs, replayed data)."""
    ests = [LEEstimate(float(v), 0, 0, std_error, float(e)) for e, v in zip(eps, values)]
    return build_profile(p, eps, ests, tol)


def le_profile(p: ModelParams, eps_max: float | None = None,
               grid_steps: int = DEFAULT_GRID_STEPS, n: int = DEFAULT_N,
               K: int = DEFAULT_PHASES, phase_offset: float = 0.0,
               tol: Tolerances = DEFAULT_TOLERANCES,
               max_depth: int = MAX_REFINE_DEPTH) -> LEProfile:
    """Sample L(eps) on a uniform grid, bisecting non-integer gaps."""
    if eps_max is None:
        eps_max = default_eps_max(p)
    if not eps_max > 0:
        raise PreconditionError(f"eps_max must be > 0, got {eps_max}")
    if grid_steps < 8:
        raise PreconditionError(f"grid_steps must be >= 8, got {grid_steps}")

    cache: dict[float, LEEstimate] = {}

    def at(e: float) -> LEEstimate:
        if e not in cache:
            cache[e] = le_estimate(p, e, n, K, phase_offset)
        return cache[e]

    grid = [float(e) for e in np.linspace(0.0, eps_max, grid_steps + 1)]
    stack = [(grid[i], grid[i + 1], 0) for i in range(grid_steps)]
    while stack:
        lo, hi, depth = stack.pop()
        s = (at(hi).value - at(lo).value) / (TWO_PI * (hi - lo))
        k = round(s)
        if (abs(s - k) < tol.refine and 0 <= k <= 2) or depth >= max_depth:
            continue
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, depth + 1))
        stack.append((mid, hi, depth + 1))
    eps = sorted(cache)
    return build_profile(p, eps, [cache[e] for e in eps], tol)


def classify_profile(profile: LEProfile, tol: Tolerances = DEFAULT_TOLERANCES) -> Regime:
    """Match the profile against the four piecewise-linear pictures.

    Fig1: slope 2 from eps = 0 with intercept ln|a2|.
    Fig2: slope 1 then 2, the slope-1 line through (0, L(0)).
    Fig3: flat, slope 1, slope 2.   Fig4: flat, slope 2.
    """
    if profile.is_unresolved:
        return Regime.UNRESOLVED
    segs = profile.segments()
    if not segs:
        return Regime.UNRESOLVED
    pat = profile.pattern()
    if pat != sorted(pat):
        return Regime.UNRESOLVED
    first = profile.estimates[0]
    L0 = first.value
    if L0 < tol.sigmas * first.std_error + tol.zero_le:
        return Regime.UNCLASSIFIED
    a2 = profile.params.a2
    if a2 == 0.0 or pat[-1] != 2:
        return Regime.UNCLASSIFIED
    ln_a2 = math.log(abs(a2))
    if abs(segs[-1].intercept - ln_a2) > tol.intercept:
        return Regime.UNCLASSIFIED
    if pat == [2]:
        return Regime.FIG1 if abs(L0 - ln_a2) <= tol.intercept else Regime.UNCLASSIFIED
    if pat == [1, 2]:
        return Regime.FIG2 if abs(segs[0].intercept - L0) <= tol.intercept else Regime.UNCLASSIFIED
    if pat == [0, 1, 2]:
        return Regime.FIG3
    if pat == [0, 2]:
        return Regime.FIG4
    return Regime.UNCLASSIFIED


def spectrum_membership(profile: LEProfile, tol: Tolerances = DEFAULT_TOLERANCES
                        ) -> Membership:
    """Spectrum verdict from the profile.

    Zero exponent implies membership. With L > 0, E is in the spectrum exactly
    for Fig1/Fig2, i.e. when the acceleration at eps = 0+ is positive; that
    characterisation is also used for resolved profiles outside the four
    pictures.
    """
    regime = profile.regime
    if regime is Regime.UNRESOLVED:
        return Membership.UNRESOLVED
    first = profile.estimates[0]
    if first.value < tol.sigmas * first.std_error + tol.zero_le:
        return Membership.ZERO_LE
    if regime in (Regime.FIG1, Regime.FIG2):
        return Membership.IN_SPECTRUM
    if regime in (Regime.FIG3, Regime.FIG4):
        return Membership.NOT_IN_SPECTRUM
    segs = profile.segments()
    if not segs or segs[0].eps_lo != profile.eps[0]:
        return Membership.UNRESOLVED
    return Membership.IN_SPECTRUM if segs[0].acceleration >= 1 else Membership.NOT_IN_SPECTRUM


@dataclass(frozen=True)
class AccelerationReport:
    raw: float
    nearest: int
    residual: float
    h: float

    @property
    def quantized(self) -> bool:
        return self.residual < DEFAULT_TOLERANCES.slope


def acceleration_at(p: ModelParams, eps: float = 0.0, h: float | None = None,
                    n: int = DEFAULT_N, K: int = DEFAULT_PHASES,
                    phase_offset: float = 0.0) -> AccelerationReport:
    """Right difference (L(eps+h) - L(eps)) / (2 pi h) and its nearest integer.

    A residual >= 0.1 means h straddles a breakpoint or n, K are too small.
    """
    if h is None:
        h = default_h(p)
    if not h > 0 or eps < 0:
        raise PreconditionError(f"need h > 0 and eps >= 0, got h={h}, eps={eps}")
    lo = le_estimate(p, eps, n, K, phase_offset)
    hi = le_estimate(p, eps + h, n, K, phase_offset)
    raw = (hi.value - lo.value) / (TWO_PI * h)
    k = int(round(raw))
    return AccelerationReport(raw, k, abs(raw - k), h)


def asymptote_residual(p: ModelParams, eps: float, n: int = DEFAULT_N,
                       K: int = DEFAULT_PHASES) -> float:
    """L(eps) - (4 pi eps + ln|a2|); tends to 0 for large eps, >= 0 up to noise."""
    if p.a2 == 0.0:
        raise PreconditionError("a2 = 0: the 4pi-slope asymptote is undefined")
    return le_estimate(p, eps, n, K).value - (2.0 * TWO_PI * eps + math.log(abs(p.a2)))


def asymptote_onset(profile: LEProfile, tol: Tolerances = DEFAULT_TOLERANCES) -> float | None:
    """First node from which every later node sits on the asymptote."""
    a2 = profile.params.a2
    if a2 == 0.0:
        return None
    res = np.abs(profile.le_values - (2.0 * TWO_PI * profile.eps + math.log(abs(a2))))
    on = res < tol.asymptote
    if not on[-1]:
        return None
    i = len(on) - 1
    while i > 0 and on[i - 1]:
        i -= 1
    return float(profile.eps[i])


def convexity_excess(profile: LEProfile) -> np.ndarray:
    """L(mid) minus the chord through its neighbours, per interior node."""
    e, L = profile.eps, profile.le_values
    w = (e[2:] - e[1:-1]) / (e[2:] - e[:-2])
    chord = w * L[:-2] + (1.0 - w) * L[2:]
    return L[1:-1] - chord
