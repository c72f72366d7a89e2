"""Acceptance criteria, one test per criterion, at the stated tolerances.

Runs at full resolution (n = 1e5, K = 256) and takes several minutes.
A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math

import numpy as np
import pytest

from cocycle_lab import ModelParams, PhasePoint, le_estimate, transfer_matrix
from cocycle_lab import bounds as B
from cocycle_lab import oracles as O
from cocycle_lab.engine import convexity_excess
from cocycle_lab.tolerances import DEFAULT_TOLERANCES as TOL

N, K = 100_000, 256
TRIPLES = O.QUANTIZATION_PLAN


@pytest.fixture(scope="module")
def profiles():
    store: dict = {}
    report = O.quantization_suite(n=N, K=K, profiles=store)
    return report, store


def energies(a1, a2, count):
    span = 2 * abs(a1) + 2 * abs(a2) + 2.5
    return np.linspace(-span, span, count)


@pytest.mark.criterion(1, "main lower bound over the spectrum-containing interval")
def test_theorem_bound_reproduction(record_property):
    worst = math.inf
    worst_at = None
    cells = 0
    for a1 in (1.5, 2.0, 4.0, 10.0):
        for a2 in (a1 / 200, a1 / 1e4):
            p0 = ModelParams(a1, a2, 0.0)
            bound = B.theorem_bound(p0)
            assert bound == pytest.approx(math.log(a1) - 10 * math.sqrt(a2 / a1))
            for E in energies(a1, a2, 101):
                est = le_estimate(p0.with_energy(float(E)), 0.0, N, K)
                slack = est.value + TOL.sigmas * est.std_error + TOL.bound - bound
                cells += 1
                if slack < worst:
                    worst, worst_at = slack, (a1, a2, float(E))
    record_property("detail", f"{cells} cells, worst slack {worst:.4f} at {worst_at}")
    assert cells == 808
    assert worst >= 0.0


@pytest.mark.criterion(2, "Herman bound L >= ln a2")
def test_herman_bound(record_property):
    worst, worst_at = math.inf, None
    for a2 in (2.0, 3.0, 5.0):
        for a1 in (0.0, 0.5, 1.0):
            for E in energies(a1, a2, 21):
                est = le_estimate(ModelParams(a1, a2, float(E)), 0.0, N, K)
                slack = est.value + TOL.sigmas * est.std_error - (math.log(a2) - TOL.bound)
                if slack < worst:
                    worst, worst_at = slack, (a1, a2, float(E))
    record_property("detail", f"189 cells, worst slack {worst:.4f} at {worst_at}")
    assert worst >= 0.0


@pytest.mark.criterion(3, "acceleration quantized on resolved segments")
def test_quantization(profiles, record_property):
    report, store = profiles
    worst = 0.0
    for key, prof in store.items():
        assert not prof.is_unresolved, key
        res = prof.residuals()[prof.resolved]
        acc = prof.accelerations[prof.resolved]
        assert res.size > 0
        assert np.all(res < TOL.slope), key
        assert set(acc.tolist()) <= {0, 1, 2}, key
        worst = max(worst, float(res.max()))
    record_property("detail", f"9 profiles, max residual {worst:.4f}, "
                              f"regimes {sorted({p.regime.value for p in store.values()})}")
    assert report.passed and len(store) == 9


@pytest.mark.criterion(4, "large-eps asymptote 4 pi eps + ln|a2|")
def test_asymptote(record_property):
    worst = 0.0
    for a1, a2, E in TRIPLES:
        p = ModelParams(a1, a2, E)
        try:
            e0 = B.epsilon0(p)
        except B.RatioTooSmallError:
            e0 = 0.0
        eps = max(3 * e0, 1.5)
        est = le_estimate(p, eps, N, K)
        resid = abs(est.value - (4 * math.pi * eps + math.log(a2)))
        worst = max(worst, resid)
        assert resid < TOL.asymptote, (a1, a2, E, eps, resid)
    record_property("detail", f"max |residual| {worst:.2e}")


@pytest.mark.criterion(5, "sup-distance constant 19/60 and grid agreement")
def test_lemma32_constant(record_property):
    sup, floor, grid = O.lemma32_suite(samples=10_000, grid_size=10**6)
    record_property("detail", f"{sup.trials} samples, worst relative margin "
                              f"{sup.worst_case_margin:.4f}, grid gap {-grid.worst_case_margin:.1e}")
    assert sup.trials == 10_000
    assert sup.worst_case_margin >= 0.0
    assert grid.worst_case_margin >= -1e-6


@pytest.mark.criterion(6, "product norm floor and prefix invariants")
def test_lemma31(record_property):
    rep = O.lemma31_exhaustive(trials=100_000, n_max=20, v_range=(2.01, 50.0))
    d = rep.details
    record_property("detail", f"{rep.trials} trials, worst log margin {rep.worst_case_margin:.4f}")
    assert rep.trials == 100_000
    assert d["worstNormMargin"] >= 0.0
    assert d["worstPrefixEntryMargin"] >= 0.0
    assert d["worstPrefixRowMargin"] >= 0.0


@pytest.mark.criterion(7, "Jensen evaluation against quadrature")
def test_jensen(record_property):
    agree, floor = O.jensen_suite(samples=1000, nodes=10**5)
    record_property("detail", f"max |exact - quadrature| {-agree.worst_case_margin:.1e}")
    assert agree.trials == 1000
    assert agree.worst_case_margin > -1e-5
    assert floor.worst_case_margin >= -1e-9


@pytest.mark.criterion(8, "constant-cocycle oracle")
def test_constant_cocycle(record_property):
    hyper = le_estimate(ModelParams(0, 0, 3.0), 0.0, 10_000, K)
    rot = le_estimate(ModelParams(0, 0, 0.0), 0.0, 10_000, K)
    record_property("detail", f"E=3 error {abs(hyper.value - math.log((3 + math.sqrt(5)) / 2)):.1e}, "
                              f"E=0 value {rot.value:.1e}")
    assert hyper.value == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=1e-3)
    assert abs(rot.value) < 1e-9


@pytest.mark.criterion(9, "evenness, convexity, Fekete, unit determinant")
def test_engine_invariants(profiles, record_property):
    _, store = profiles
    worst_cvx = max(float(convexity_excess(p).max()) for p in store.values())
    assert worst_cvx <= TOL.convexity

    worst_even = worst_fekete = -math.inf
    for a1, a2, E in TRIPLES:
        p = ModelParams(a1, a2, E)
        for eps in (0.05, 0.3):
            plus, minus = le_estimate(p, eps, N, K), le_estimate(p, -eps, N, K)
            gap = abs(plus.value - minus.value) - 3 * (plus.std_error + minus.std_error)
            worst_even = max(worst_even, gap)
        short, long = le_estimate(p, 0.0, 10_000, K), le_estimate(p, 0.0, 20_000, K)
        worst_fekete = max(worst_fekete, long.value - short.value)
        assert long.value <= short.value + 3 * (short.std_error + long.std_error)
    assert worst_even <= 0.0
    assert worst_fekete <= 0.01

    g = O.rng(9)
    worst_det = 0.0
    for _ in range(10_000):
        a1, a2, E = g.uniform(-10, 10, 3)
        z = PhasePoint(g.random(), g.uniform(-1, 1))
        worst_det = max(worst_det, abs(transfer_matrix(ModelParams(a1, a2, E), z).det() - 1))
    assert worst_det <= 1e-12
    record_property("detail", f"convexity {worst_cvx:.1e}, evenness {worst_even:.1e}, "
                              f"Fekete {worst_fekete:.1e}, det {worst_det:.0e}")
