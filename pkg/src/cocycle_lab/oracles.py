"""Brute-force checks that run independently of the closed forms.

Nothing in here calls ``ellipse_distance`` or ``jensen_integral`` on the path
being checked; the suite runners compare the two routes and record the worst
margin over a deterministic sample plan (Philox streams keyed by seed).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, bounds
from .cocycle import (
    GOLDEN_MEAN,
    ModelParams,
    PhasePoint,
    operator_norm_2x2,
    orbit_potentials,
    product_log_norm,
)
from .engine import le_profile
from .errors import BoundViolationError, NearSingularError, OrbitBelowTwoError, PreconditionError
from .tolerances import DEFAULT_N, DEFAULT_PHASES, DEFAULT_TOLERANCES, Tolerances

TWO_PI = 2.0 * math.pi
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class OracleReport:
    name: str
    trials: int
    worst_case_margin: float
    worst_case_input: dict
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_case_margin >= -self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "worstCaseMargin": self.worst_case_margin,
            "worstCaseInput": self.worst_case_input,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }


def rng(seed: int) -> np.random.Generator:
    """Counter-based generator; the same seed reproduces the same plan."""
    return np.random.Generator(np.random.Philox(int(seed)))


# ---------------------------------------------------------------------------
# minimum modulus on the circle
# ---------------------------------------------------------------------------

def _modulus(a1: float, delta: float, E: float, x=None, w=None):
    if w is None:
        w = np.exp(2j * np.pi * np.asarray(x))
    return np.abs(E - a1 * math.exp(-TWO_PI * delta) * w - a1 * math.exp(TWO_PI * delta) * np.conj(w))


@functools.lru_cache(maxsize=4)
def _circle(grid_size: int, shift: float) -> np.ndarray:
    w = np.exp(2j * np.pi * ((np.arange(grid_size) + shift) / grid_size))
    w.flags.writeable = False
    return w


@functools.lru_cache(maxsize=2)
def _circle_parts(grid_size: int) -> tuple[np.ndarray, np.ndarray]:
    t = TWO_PI * np.arange(grid_size) / grid_size
    return np.cos(t), np.sin(t)


def _golden_min(f, lo: float, hi: float, iters: int = 80) -> float:
    g = _INV_PHI
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    return min(fc, fd)


def grid_min_modulus(p: ModelParams, delta: float, E: float | None = None,
                     grid_size: int = 10**6) -> float:
    """min over x = k/N of |E - a1 e^{-2pi delta} e^{2pi i x} - a1 e^{2pi delta} e^{-2pi i x}|,
    then golden-section refinement in the cells next to the winner."""
    if grid_size < 1000:
        raise PreconditionError(f"grid_size must be >= 1000, got {grid_size}")
    E = p.E if E is None else float(E)
    # real part E - (a1 e^{-t} + a1 e^{t}) cos, imaginary part (a1 e^{t} - a1 e^{-t}) sin
    lo_, hi_ = p.a1 * math.exp(-TWO_PI * delta), p.a1 * math.exp(TWO_PI * delta)
    C, S = _circle_parts(grid_size)
    k, q = _kernels.min_sq_modulus(E, lo_ + hi_, hi_ - lo_, C, S)
    h = 1.0 / grid_size
    A, B = lo_ + hi_, hi_ - lo_
    f = lambda t: math.hypot(E - A * math.cos(TWO_PI * t), B * math.sin(TWO_PI * t))
    refined = _golden_min(f, k * h - h, k * h + h)
    return min(math.sqrt(q), refined)


def quadrature_log_integral(p: ModelParams, delta: float, nodes: int = 10**5,
                            E: float | None = None) -> float:
    """Midpoint rule for the integral over [0, 1) of ln|E - a1 e^{2pi delta} e^{-2pi i x}
    - a1 e^{-2pi delta} e^{2pi i x}| (the a2 terms dropped)."""
    if nodes < 1000:
        raise PreconditionError(f"nodes must be >= 1000, got {nodes}")
    E = p.E if E is None else float(E)
    if grid_min_modulus(p, delta, E, nodes) < 1e-8:
        raise NearSingularError(f"integrand vanishes on the circle (delta={delta}, E={E})")
    return math.fsum(np.log(_modulus(p.a1, delta, E, w=_circle(nodes, 0.5)))) / nodes


# ---------------------------------------------------------------------------
# products of [[v, -1], [1, 0]]
# ---------------------------------------------------------------------------

def lemma31_exhaustive(trials: int = 10**5, n_max: int = 20, v_range=(2.01, 50.0),
                       seed: int = 0, tolerance: float = 1e-12) -> OracleReport:
    """Random products B_n ... B_1 with |v_j| in v_range and random signs.

    Checks, in log form and on every prefix k,
      ||P_n||_op >= prod(|v_j| - 1),  |b11^k| >= prod_{j<=k}(|v_j| - 1),
      |b21^k| <= |b11^k|.
    Entries are kept as mantissa * 2**exponent (exact power-of-two rescaling).
    """
    lo, hi = float(v_range[0]), float(v_range[1])
    if not lo > 2.0:
        raise PreconditionError("v_range must lie above 2 in absolute value")
    g = rng(seed)
    n = g.integers(1, n_max + 1, size=trials)
    v = g.uniform(lo, hi, size=(trials, n_max)) * np.where(g.random((trials, n_max)) < 0.5, -1.0, 1.0)

    b11 = np.ones(trials)
    b12 = np.zeros(trials)
    b21 = np.zeros(trials)
    b22 = np.ones(trials)
    expo = np.zeros(trials, dtype=np.int64)
    log_floor = np.zeros(trials)
    prefix11 = np.full(trials, np.inf)
    prefix21 = np.full(trials, np.inf)
    ln2 = math.log(2.0)
    for j in range(n_max):
        act = j < n
        vj = v[:, j]
        n11 = vj * b11 - b21
        n12 = vj * b12 - b22
        b21 = np.where(act, b11, b21)
        b22 = np.where(act, b12, b22)
        b11 = np.where(act, n11, b11)
        b12 = np.where(act, n12, b12)
        big = np.maximum(np.maximum(np.abs(b11), np.abs(b12)), np.maximum(np.abs(b21), np.abs(b22)))
        e = np.frexp(big)[1]
        b11, b12, b21, b22 = (np.ldexp(b, -e) for b in (b11, b12, b21, b22))
        expo += e
        log_floor = np.where(act, log_floor + np.log(np.abs(vj) - 1.0), log_floor)
        with np.errstate(divide="ignore"):
            m11 = np.log(np.abs(b11)) + expo * ln2 - log_floor
            m21 = np.log(np.abs(b11)) - np.log(np.abs(b21))
        prefix11 = np.where(act, np.minimum(prefix11, m11), prefix11)
        prefix21 = np.where(act, np.minimum(prefix21, m21), prefix21)

    op = np.log(operator_norm_2x2(b11, b12, b21, b22)) + expo * ln2 - log_floor
    margins = np.minimum(op, np.minimum(prefix11, prefix21))
    w = int(np.argmin(margins))
    return OracleReport(
        name="lemma31",
        trials=int(trials),
        worst_case_margin=float(margins[w]),
        worst_case_input={"v": v[w, : n[w]].tolist()},
        tolerance=tolerance,
        details={
            "worstNormMargin": float(op.min()),
            "worstPrefixEntryMargin": float(prefix11.min()),
            "worstPrefixRowMargin": float(prefix21.min()),
            "nMax": int(n_max),
            "vRange": [lo, hi],
            "seed": int(seed),
        },
    )


def entrywise_product_floor(p: ModelParams, eps: float, x: float, n: int) -> tuple[float, float]:
    """(ln||A_n(x + i eps)||_op, sum_j ln(|v_j| - 1)) along the orbit.

    Every orbit point must have |v_j| > 2; the first failure raises
    OrbitBelowTwoError with its index.
    """
    vs = orbit_potentials(p, PhasePoint(x, eps), n)
    a = np.abs(vs)
    bad = np.flatnonzero(~(a > 2.0))
    if bad.size:
        raise OrbitBelowTwoError(int(bad[0]), float(a[bad[0]]))
    rhs = math.fsum(np.log(a - 1.0))
    lhs = product_log_norm(p, PhasePoint(x, eps), n).log_operator_norm()
    if lhs < rhs - 1e-9 * max(1.0, abs(rhs)):
        raise BoundViolationError(f"ln||A_n|| = {lhs!r} < {rhs!r}")
    return lhs, rhs


# ---------------------------------------------------------------------------
# suite runners
# ---------------------------------------------------------------------------

def _random_ellipse_inputs(g: np.random.Generator, samples: int):
    a1 = np.exp(g.uniform(math.log(0.1), math.log(100.0), samples)) * np.where(g.random(samples) < 0.5, -1, 1)
    delta = g.uniform(0.01, 1.0, samples)
    a_axis = 2.0 * np.abs(a1) * np.cosh(TWO_PI * delta)
    E = g.uniform(-1.5, 1.5, samples) * a_axis
    return a1, delta, E


def ellipse_suite(samples: int = 1000, grid_size: int = 10**6, seed: int = 1,
                  tolerance: float = 1e-6) -> OracleReport:
    """Closed-form ellipse distance against the grid minimum.

    Margin per sample is -(grid - closed) / (1 + closed); the grid value may
    not undershoot the closed form beyond rounding.
    """
    g = rng(seed)
    a1s, deltas, Es = _random_ellipse_inputs(g, samples)
    worst, worst_in, undershoot = math.inf, {}, math.inf
    for a1, d, E in zip(a1s, deltas, Es):
        p = ModelParams(float(a1), 0.0, float(E))
        closed = bounds.ellipse_distance(p, float(d))
        grid = grid_min_modulus(p, float(d), grid_size=grid_size)
        gap = (grid - closed) / (1.0 + closed)
        undershoot = min(undershoot, gap)
        margin = -abs(gap)
        if margin < worst:
            worst, worst_in = margin, {"a1": float(a1), "delta": float(d), "E": float(E),
                                       "closed": closed, "grid": grid}
    return OracleReport("ellipse", samples, worst, worst_in, tolerance,
                        {"minSignedGap": undershoot, "gridSize": grid_size, "seed": seed})


def lemma32_plan(samples: int = 10_000, seed: int = 3, a1_range=(1.0 + 1e-9, 100.0),
                 ratio_range=(100.0, 1e6)):
    """Random (a1, a2, E): a1 and a1/a2 log-uniform, E uniform on +-3 a_{2 eps0}."""
    g = rng(seed)
    a1 = np.exp(g.uniform(math.log(a1_range[0]), math.log(a1_range[1]), samples))
    ratio = np.exp(g.uniform(math.log(ratio_range[0]), math.log(ratio_range[1]), samples))
    u = g.uniform(-3.0, 3.0, samples)
    for a, r, t in zip(a1, ratio, u):
        p = ModelParams(float(a), float(a / r), 0.0)
        a2e = bounds.EllipseSpec.at(p.a1, 2.0 * bounds.epsilon0(p)).a_axis
        yield p, float(t * a2e)


def lemma32_suite(samples: int = 10_000, seed: int = 3, grid_size: int | None = None,
                  tolerance: float = 1e-9, grid_tolerance: float = 1e-6) -> list[OracleReport]:
    """Sup-distance constant and the > 2 potential floor over the plan.

    Margins are relative: distance / ((19/60)|a1| e^{4pi eps0}) - 1, and
    potential_floor(chosen delta) - 2. With ``grid_size`` the closed-form
    distances at eps0 and 2 eps0 are also compared with the grid minimum,
    margin -|grid - closed| / (1 + closed).
    """
    sup_worst, sup_in = math.inf, {}
    floor_worst, floor_in = math.inf, {}
    grid_worst, grid_in = math.inf, {}
    count = 0
    for p, E in lemma32_plan(samples, seed):
        count += 1
        e0 = bounds.epsilon0(p)
        d1 = bounds.ellipse_distance(p, e0, E)
        d2 = bounds.ellipse_distance(p, 2.0 * e0, E)
        delta, dist = (e0, d1) if d1 >= d2 else (2.0 * e0, d2)
        target = bounds.LEMMA32_CONSTANT * abs(p.a1) * math.exp(2.0 * TWO_PI * e0)
        m = dist / target - 1.0
        if m < sup_worst:
            sup_worst, sup_in = m, {"a1": p.a1, "a2": p.a2, "E": E, "delta": delta}
        f = bounds.potential_floor(p, delta, E) - 2.0
        if f < floor_worst:
            floor_worst, floor_in = f, {"a1": p.a1, "a2": p.a2, "E": E, "delta": delta}
        if grid_size:
            for d, closed in ((e0, d1), (2.0 * e0, d2)):
                grid = grid_min_modulus(p, d, E, grid_size)
                gm = -abs(grid - closed) / (1.0 + closed)
                if gm < grid_worst:
                    grid_worst, grid_in = gm, {"a1": p.a1, "a2": p.a2, "E": E, "delta": d,
                                               "closed": closed, "grid": grid}
    reports = [
        OracleReport("lemma32", count, sup_worst, sup_in, tolerance, {"seed": seed}),
        OracleReport("potential_floor", count, floor_worst, floor_in, 0.0, {"seed": seed}),
    ]
    if grid_size:
        reports.append(OracleReport("lemma32_grid", count, grid_worst, grid_in, grid_tolerance,
                                    {"gridSize": grid_size, "seed": seed}))
    return reports


def jensen_suite(samples: int = 1000, nodes: int = 10**5, seed: int = 2,
                 tolerance: float = 1e-5, min_root_gap: float = 0.01) -> list[OracleReport]:
    """Exact-root Jensen value against midpoint quadrature on nonsingular inputs."""
    g = rng(seed)
    worst, worst_in = math.inf, {}
    floor_worst, floor_in = math.inf, {}
    taken = 0
    while taken < samples:
        a1, d, E = (float(t[0]) for t in _random_ellipse_inputs(g, 1))
        z1, z2 = bounds.jensen_roots(a1, d, E)
        if min(abs(abs(z1) - 1.0), abs(abs(z2) - 1.0)) <= min_root_gap:
            continue
        taken += 1
        p = ModelParams(a1, 0.0, E)
        exact = bounds.jensen_integral(p, d)
        quad = quadrature_log_integral(p, d, nodes)
        m = -abs(exact - quad)
        if m < worst:
            worst, worst_in = m, {"a1": a1, "delta": d, "E": E, "exact": exact, "quadrature": quad}
        f = exact - (TWO_PI * d + math.log(abs(a1)))
        if f < floor_worst:
            floor_worst, floor_in = f, {"a1": a1, "delta": d, "E": E}
    return [
        OracleReport("jensen", samples, worst, worst_in, tolerance, {"nodes": nodes, "seed": seed}),
        OracleReport("jensen_floor", samples, floor_worst, floor_in, 1e-9),
    ]


QUANTIZATION_PLAN = tuple(
    (a1, a2, E) for a1, a2 in ((2.0, 0.05), (0.5, 2.0), (3.0, 0.01)) for E in (0.0, 1.0, 2.5)
)


def quantization_suite(plan=QUANTIZATION_PLAN, n: int = DEFAULT_N, K: int = DEFAULT_PHASES,
                       alpha: float = GOLDEN_MEAN, tol: Tolerances = DEFAULT_TOLERANCES,
                       profiles: dict | None = None) -> OracleReport:
    """Every resolved gap's slope/2pi within tol.slope of an integer in {0, 1, 2}.

    Margin is tol.slope minus the worst residual; an unresolved profile
    counts as a failure. Computed profiles are stored in ``profiles`` when a
    dict is passed.
    """
    worst, worst_in = math.inf, {}
    for a1, a2, E in plan:
        p = ModelParams(a1, a2, E, alpha)
        prof = le_profile(p, n=n, K=K, tol=tol)
        if profiles is not None:
            profiles[(a1, a2, E)] = prof
        res = prof.residuals()[prof.resolved]
        in_range = np.all((prof.accelerations[prof.resolved] >= 0) & (prof.accelerations[prof.resolved] <= 2))
        m = tol.slope - (float(res.max()) if res.size else math.inf)
        if prof.is_unresolved or not in_range:
            m = -math.inf
        if m < worst:
            worst, worst_in = m, {"a1": a1, "a2": a2, "E": E, "regime": prof.regime.value,
                                  "pattern": prof.pattern()}
    return OracleReport("quantization", len(plan), worst, worst_in, 0.0, {"n": n, "phases": K})
