import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycle_lab import (
    GOLDEN_MEAN,
    ModelParams,
    PhasePoint,
    TransferMatrix,
    lemma31_lower_bound,
    potential_value,
    product_log_norm,
    transfer_matrix,
)
from cocycle_lab.cocycle import log_lemma31_lower_bound, orbit_potentials
from cocycle_lab.errors import HypothesisError, PreconditionError

coef = st.floats(-5.0, 5.0, allow_nan=False)
phase = st.floats(0.0, 1.0, allow_nan=False, exclude_max=True)
shift = st.floats(-0.5, 0.5, allow_nan=False)


def direct_product(p, z, n):
    M = np.eye(2, dtype=complex)
    for j in range(n):
        M = transfer_matrix(p, PhasePoint(z.x + j * p.alpha, z.eps)).as_array() @ M
    return M


def test_params_validation():
    with pytest.raises(PreconditionError):
        ModelParams(math.nan, 0.0, 0.0)
    with pytest.raises(PreconditionError):
        ModelParams(1.0, 0.0, 0.0, alpha=1.0)
    p = ModelParams(1, 2, 3)
    assert p.alpha == GOLDEN_MEAN and isinstance(p.a1, float)
    assert p.with_energy(4.0).E == 4.0


def test_phase_reduced_mod_one():
    assert PhasePoint(1.25).x == pytest.approx(0.25)
    assert PhasePoint(-0.25).x == pytest.approx(0.75)
    assert PhasePoint(-1e-17).x == 0.0


def test_potential_real_and_complex_forms():
    p = ModelParams(1.3, -0.7, 0.4)
    for x in (0.0, 0.1, 0.37):
        v = potential_value(p, PhasePoint(x))
        want = 0.4 - 2.6 * math.cos(2 * math.pi * x) + 1.4 * math.cos(4 * math.pi * x)
        assert v.imag == 0.0
        assert v.real == pytest.approx(want, abs=1e-12)
        z = complex(x, 0.2)
        want_c = 0.4 - 2.6 * np.cos(2 * np.pi * z) + 1.4 * np.cos(4 * np.pi * z)
        assert abs(potential_value(p, PhasePoint(x, 0.2)) - want_c) < 1e-12


def test_unit_determinant_random():
    g = np.random.default_rng(7)
    for _ in range(10_000):
        a1, a2, E = g.uniform(-10, 10, 3)
        z = PhasePoint(g.random(), g.uniform(-1, 1))
        d = transfer_matrix(ModelParams(a1, a2, E), z).det()
        assert abs(d - 1.0) <= 1e-12


def test_identity_product():
    r = product_log_norm(ModelParams(1, 1, 1), PhasePoint(0.3), 0)
    assert r.steps == 0
    assert r.log_frobenius_norm() == pytest.approx(math.log(math.sqrt(2.0)))
    assert np.allclose(r.matrix().as_array(), np.eye(2))


def test_single_factor_and_rotation():
    p = ModelParams(0.8, 0.3, 1.1)
    z = PhasePoint(0.21, 0.05)
    r = product_log_norm(p, z, 1)
    assert r.log_norm == pytest.approx(math.log(transfer_matrix(p, z).frobenius_norm()), abs=1e-14)
    rot = product_log_norm(ModelParams(0, 0, 0), PhasePoint(0.9), 4)
    assert rot.log_norm == pytest.approx(math.log(math.sqrt(2.0)), abs=1e-14)
    assert rot.log_operator_norm() == pytest.approx(0.0, abs=1e-14)


def test_constant_matrix_growth():
    A = np.array([[3.0, -1.0], [1.0, 0.0]])
    r = product_log_norm(ModelParams(0, 0, 3), PhasePoint(0.0), 10)
    exact = math.log(np.linalg.norm(np.linalg.matrix_power(A, 10), "fro"))
    assert r.log_norm == pytest.approx(exact, rel=1e-13)
    # the eigenprojection adds ln||P||/n ~ 0.294/n on top of ln(spectral radius)
    r30 = product_log_norm(ModelParams(0, 0, 3), PhasePoint(0.0), 30)
    assert r30.log_norm / 30 == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=0.02)


@settings(max_examples=60, deadline=None)
@given(coef, coef, coef, phase, shift, st.integers(1, 30))
def test_matches_direct_product(a1, a2, E, x, eps, n):
    p = ModelParams(a1, a2, E)
    z = PhasePoint(x, eps)
    r = product_log_norm(p, z, n)
    M = direct_product(p, z, n)
    assert abs(r.direction.frobenius_norm() - 1.0) < 1e-12
    want = math.log(np.linalg.norm(M, "fro"))
    assert r.log_frobenius_norm() == pytest.approx(want, abs=1e-9, rel=1e-12)
    assert r.log_operator_norm() == pytest.approx(math.log(np.linalg.norm(M, 2)), abs=1e-9, rel=1e-12)


def test_real_entries_at_zero_shift():
    r = product_log_norm(ModelParams(1.5, 0.2, 0.3), PhasePoint(0.4), 25)
    assert np.all(r.direction.as_array().imag == 0.0)


@settings(max_examples=60, deadline=None)
@given(coef, coef, coef, phase, shift, st.integers(0, 16), st.integers(0, 16))
def test_submultiplicative(a1, a2, E, x, eps, m, n):
    p = ModelParams(a1, a2, E)
    whole = product_log_norm(p, PhasePoint(x, eps), m + n).log_operator_norm()
    head = product_log_norm(p, PhasePoint(x + n * p.alpha, eps), m).log_operator_norm()
    tail = product_log_norm(p, PhasePoint(x, eps), n).log_operator_norm()
    assert whole <= head + tail + 1e-9


def test_long_orbit_no_overflow():
    r = product_log_norm(ModelParams(50.0, 20.0, 3.0), PhasePoint(0.1, 0.5), 100_000)
    assert math.isfinite(r.log_norm) and r.log_norm > 1e5


def test_matrix_algebra():
    A = TransferMatrix(1 + 1j, 2, 3, 4 - 1j)
    B = TransferMatrix.identity()
    assert (A @ B) == A
    assert A.operator_norm() == pytest.approx(np.linalg.norm(A.as_array(), 2))
    assert A.frobenius_norm() == pytest.approx(np.linalg.norm(A.as_array()))


def test_lemma31_lower_bound_examples():
    assert lemma31_lower_bound([3.0, -4.0]) == pytest.approx(6.0)
    assert lemma31_lower_bound([]) == 1.0
    with pytest.raises(HypothesisError):
        lemma31_lower_bound([3.0, 2.0])
    assert log_lemma31_lower_bound([3.0, 5.0]) == pytest.approx(math.log(8.0))


def test_lemma31_on_orbit_products():
    g = np.random.default_rng(11)
    for _ in range(2000):
        n = int(g.integers(1, 21))
        vs = g.uniform(2.01, 50.0, n) * np.where(g.random(n) < 0.5, -1, 1)
        M = np.eye(2)
        for v in vs:
            M = np.array([[v, -1.0], [1.0, 0.0]]) @ M
        assert math.log(np.linalg.norm(M, 2)) >= math.log(lemma31_lower_bound(vs)) - 1e-9


def test_orbit_potentials_match_scalar():
    p = ModelParams(2.0, 0.3, 0.5)
    z = PhasePoint(0.17, 0.1)
    vs = orbit_potentials(p, z, 20)
    for j in (0, 7, 19):
        assert abs(vs[j] - potential_value(p, PhasePoint(z.x + j * p.alpha, z.eps))) < 1e-11
