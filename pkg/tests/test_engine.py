import math

import numpy as np
import pytest

from cocycle_lab import (
    Membership,
    ModelParams,
    PhasePoint,
    Regime,
    acceleration_at,
    asymptote_residual,
    classify_profile,
    le_estimate,
    le_profile,
    product_log_norm,
    spectrum_membership,
)
from cocycle_lab.engine import (
    asymptote_onset,
    convexity_excess,
    default_eps_max,
    phase_values,
    profile_from_values,
    set_workers,
)
from cocycle_lab.errors import PreconditionError
from cocycle_lab.tolerances import Tolerances

TWO_PI = 2 * math.pi
SUPERCRITICAL = [ModelParams(2, 0.05, E) for E in (0.0, 1.0, 2.5)] + [
    ModelParams(3, 0.01, 0.0), ModelParams(0.5, 2.0, 1.0)]


def test_rotation_is_zero():
    for n, K in ((1, 1), (1000, 7), (10_000, 64)):
        assert abs(le_estimate(ModelParams(0, 0, 0), 0.0, n, K).value) < 1e-9


def test_constant_cocycle():
    est = le_estimate(ModelParams(0, 0, 3), 0.0, 10_000, 16)
    assert est.value == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=1e-3)
    assert est.norm == "operator"


def test_herman_example():
    est = le_estimate(ModelParams(2, 4, 0), 0.0, 100_000, 64)
    assert est.value >= math.log(4) - 0.02


def test_lanes_match_reference_product():
    p = ModelParams(2.0, 0.3, 0.7)
    for eps in (0.0, 0.15):
        vals = phase_values(p, eps, 5000, 8, 0.013)
        for k in (0, 3, 7):
            ref = product_log_norm(p, PhasePoint(0.013 + k / 8, eps), 5000).log_operator_norm()
            assert vals[k] * 5000 == pytest.approx(ref, abs=1e-8)


def test_preconditions():
    with pytest.raises(PreconditionError):
        le_estimate(ModelParams(1, 1, 0), 0.0, 0, 4)
    with pytest.raises(PreconditionError):
        le_profile(ModelParams(1, 1, 0), 1.0, 4)
    with pytest.raises(PreconditionError):
        acceleration_at(ModelParams(1, 1, 0), 0.0, h=0.0)
    with pytest.raises(PreconditionError):
        asymptote_residual(ModelParams(1, 0, 0), 1.0)


def test_deterministic_and_worker_independent():
    p = ModelParams(2, 0.05, 1.0)
    set_workers(1)
    a = le_estimate(p, 0.2, 20_000, 64)
    set_workers(None)
    b = le_estimate(p, 0.2, 20_000, 64)
    assert a == b


@pytest.mark.parametrize("p", SUPERCRITICAL, ids=str)
def test_evenness(p):
    for eps in (0.1, 0.4):
        plus = le_estimate(p, eps, 20_000, 64)
        minus = le_estimate(p, -eps, 20_000, 64)
        assert abs(plus.value - minus.value) <= 3 * (plus.std_error + minus.std_error) + 1e-12


@pytest.mark.parametrize("p", SUPERCRITICAL, ids=str)
def test_fekete_and_nonnegative(p):
    short = le_estimate(p, 0.0, 10_000, 128)
    long = le_estimate(p, 0.0, 20_000, 128)
    assert long.value <= short.value + 0.01
    assert long.value <= short.value + 3 * (short.std_error + long.std_error) + 1e-3
    assert long.value >= -5 * long.std_error


@pytest.mark.parametrize("p", SUPERCRITICAL, ids=str)
def test_phase_doubling(p):
    a = le_estimate(p, 0.0, 20_000, 256)
    b = le_estimate(p, 0.0, 20_000, 512)
    assert abs(a.value - b.value) < 2 * a.std_error


@pytest.mark.parametrize("a1,a2", [(0, 2), (0.5, 3), (1, 5), (2, 1.5)])
def test_herman_floor(a1, a2):
    for E in (-3.0, 0.0, 1.7):
        est = le_estimate(ModelParams(a1, a2, E), 0.0, 20_000, 64)
        assert est.value >= math.log(a2) - 0.02


def test_profile_pure_second_harmonic():
    prof = le_profile(ModelParams(0.1, 3, 0), 1.0, 12, 20_000, 64)
    assert prof.pattern() == [2]
    assert np.all(prof.accelerations == 2)
    resid = prof.le_values - (2 * TWO_PI * prof.eps + math.log(3))
    assert abs(resid[-1]) < 5e-3
    assert prof.regime is Regime.FIG1
    assert spectrum_membership(prof) is Membership.IN_SPECTRUM


def test_profile_constant_cocycle():
    prof = le_profile(ModelParams(0, 0, 3), 1.0, 8, 10_000, 4)
    assert np.all(prof.accelerations == 0)
    assert np.ptp(prof.le_values) < 1e-12
    assert prof.regime is Regime.UNCLASSIFIED
    assert spectrum_membership(prof) is Membership.NOT_IN_SPECTRUM


def test_profile_convex_and_monotone():
    prof = le_profile(ModelParams(2, 0.05, 1.0), None, 16, 20_000, 64)
    assert np.all(convexity_excess(prof) <= 0.01)
    pat = prof.pattern()
    assert pat == sorted(pat) and pat[-1] == 2
    assert prof.regime is Regime.FIG3
    assert asymptote_onset(prof) is not None


def test_default_eps_max_reaches_asymptote():
    p = ModelParams(2, 0.0002, 0)
    e0 = math.log(1e4) / (8 * math.pi)
    assert default_eps_max(p) == pytest.approx(6 * e0)
    assert default_eps_max(ModelParams(0.5, 2, 0)) == 1.0


def test_acceleration_reports():
    far = acceleration_at(ModelParams(1, 2, 0), 2.0, 0.05, 10_000, 16)
    assert far.nearest == 2 and far.quantized
    flat = acceleration_at(ModelParams(0, 0, 1.0), 0.3, 0.05, 10_000, 4)
    assert flat.nearest == 0 and flat.residual < 1e-9
    p = ModelParams(2, 0.0002, 0)
    low = acceleration_at(p, 0.0, None, 50_000, 128)
    assert low.h == pytest.approx(math.log(1e4) / (8 * math.pi) / 16)
    assert low.nearest == 1 and low.quantized


def test_asymptote_residual_examples():
    assert abs(asymptote_residual(ModelParams(1, 2, 0), 2.0, 20_000, 64)) < 5e-3
    assert asymptote_residual(ModelParams(0, 2, 0), 1.0, 20_000, 64) >= -5e-3
    est = le_estimate(ModelParams(1, 2, 0), 0.0, 20_000, 64)
    assert asymptote_residual(ModelParams(1, 2, 0), 0.0, 20_000, 64) >= -3 * est.std_error




def synth(slopes, L0, a2=None):
    """Piecewise-linear convex profile with the given per-gap accelerations."""
    eps = np.arange(len(slopes) + 1) * 0.25
    L = np.concatenate([[0.0], np.cumsum(TWO_PI * np.asarray(slopes) * 0.25)]) + L0
    if a2 is None:
        a2 = math.exp(L[-1] - 2 * TWO_PI * eps[-1])
    return profile_from_values(ModelParams(1.0, a2, 0.0), eps, L, 1e-5)


def test_classify_examples():
    assert synth([1, 1, 2, 2], 0.6).regime is Regime.FIG2
    assert synth([0, 0, 1, 2], 0.6).regime is Regime.FIG3
    assert synth([0, 2], 0.6).regime is Regime.FIG4
    assert synth([2, 2], 0.6, a2=math.exp(0.6)).regime is Regime.FIG1
    assert classify_profile(synth([2, 2], 0.6, a2=math.exp(0.6))) is Regime.FIG1


def test_classify_rejects_wrong_intercept():
    assert synth([2, 2], 0.6, a2=math.exp(0.9)).regime is Regime.UNCLASSIFIED
    assert synth([1, 2], 0.6, a2=3.0).regime is Regime.UNCLASSIFIED


def test_unresolved_and_kinks():
    eps = np.arange(5) * 0.25
    bad = profile_from_values(ModelParams(1, 1, 0), eps, np.cumsum([0.0, 0.5, 0.5, 0.5, 0.5]) * TWO_PI * 0.25)
    assert bad.regime is Regime.UNRESOLVED
    assert spectrum_membership(bad) is Membership.UNRESOLVED
    # a gap with slope 1.4 between slope 0 and slope 2 straddles a breakpoint
    L = 0.6 + TWO_PI * 0.25 * np.cumsum([0.0, 0.0, 1.4, 2.0, 2.0])
    kinked = profile_from_values(ModelParams(1, 1, 0), eps, L)
    assert kinked.status == ("resolved", "kink", "resolved", "resolved")
    assert not kinked.is_unresolved and kinked.pattern() == [0, 2]


def test_unresolved_threshold_is_configurable():
    eps = np.arange(4) * 0.25
    L = np.array([0.5, 0.5, 0.5 + TWO_PI * 0.25 * 1.12, 0.5 + TWO_PI * 0.25 * 2.12])
    strict = profile_from_values(ModelParams(1, 1, 0), eps, L)
    loose = profile_from_values(ModelParams(1, 1, 0), eps, L, tol=Tolerances(slope=0.15))
    assert strict.status[1] != "resolved"
    assert loose.status[1] == "resolved"


def test_membership_examples():
    assert spectrum_membership(synth([1, 1, 2, 2], 0.6)) is Membership.IN_SPECTRUM
    assert spectrum_membership(synth([0, 2], 0.6)) is Membership.NOT_IN_SPECTRUM
    zero = synth([0, 1, 2], 0.0)
    assert spectrum_membership(zero) is Membership.ZERO_LE
    assert zero.regime is Regime.UNCLASSIFIED


def test_segments_and_residuals():
    prof = synth([0, 0, 1, 2], 0.6)
    segs = prof.segments()
    assert [s.acceleration for s in segs] == [0, 1, 2]
    assert segs[0].intercept == pytest.approx(0.6)
    assert np.all(prof.residuals() < 1e-12)
