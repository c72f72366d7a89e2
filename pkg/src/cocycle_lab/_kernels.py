"""Numba kernels for long transfer-matrix products.

Two code paths exist on purpose. ``product_single`` multiplies one orbit and
takes the logarithm of the Frobenius norm after every factor (Neumaier sum);
it is the reference. ``lane_log_sums`` runs many phases side by side, still
renormalising every step, but multiplies the per-step scale factors into a
block product and takes one logarithm per block. Block length is chosen so
the block product cannot leave the double range.
"""

from __future__ import annotations

import math
import os

import numba
import numpy as np
from numba import njit, prange

# Skip the TBB layer (often too old in distro builds and noisy when it is).
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

# Lanes per parallel chunk; inner loops over a chunk vectorise.
CHUNK = 16
# ln of the largest block product allowed before taking a logarithm.
_BLOCK_LOG_BUDGET = 600.0
_MAX_BLOCK = 64


def block_length(v_max: float) -> int:
    """Steps per logarithm given a bound ``v_max >= |v(x + i eps)|``.

    Each normalised step multiplies the Frobenius norm by a factor f with
    |ln f| <= ln sqrt(v_max**2 + 2), so a block of B steps stays within
    exp(+-B * ln(v_max**2 + 2)) for the squared norms.
    """
    per_step = math.log(v_max * v_max + 2.0)
    return int(max(1, min(_MAX_BLOCK, _BLOCK_LOG_BUDGET // per_step)))


def rotation_table(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of 2*pi*frac(j*alpha) for j < n."""
    j = np.arange(n, dtype=np.float64)
    theta = 2.0 * np.pi * np.mod(j * alpha, 1.0)
    return np.cos(theta), np.sin(theta)


@njit(cache=True)
def _neumaier(s, comp, t):
    y = s + t
    if abs(s) >= abs(t):
        comp += (s - y) + t
    else:
        comp += (t - y) + s
    return y, comp


@njit(cache=True)
def product_single(a1, a2, E, alpha, x, eps, n):
    """Rescaled A_n(x + i eps): returns (log_norm, m11, m12, m21, m22).

    The returned matrix has unit Frobenius norm (identity / sqrt(2) for n = 0)
    and A_n = exp(log_norm) * M.
    """
    c1 = math.exp(2.0 * math.pi * eps)
    c1i = 1.0 / c1
    c2 = c1 * c1
    c2i = c1i * c1i
    # start from the identity held as (ln sqrt2, I / sqrt2)
    r = 1.0 / math.sqrt(2.0)
    m11 = complex(r, 0.0)
    m12 = 0j
    m21 = 0j
    m22 = complex(r, 0.0)
    s = 0.5 * math.log(2.0)
    comp = 0.0
    for j in range(n):
        ph = x + j * alpha
        ph -= math.floor(ph)
        th = 2.0 * math.pi * ph
        c = math.cos(th)
        sn = math.sin(th)
        c2t = 2.0 * c * c - 1.0
        s2t = 2.0 * sn * c
        vr = E - a1 * (c1 + c1i) * c - a2 * (c2 + c2i) * c2t
        vi = a1 * (c1 - c1i) * sn + a2 * (c2 - c2i) * s2t
        v = complex(vr, vi)
        n11 = v * m11 - m21
        n12 = v * m12 - m22
        m21 = m11
        m22 = m12
        m11 = n11
        m12 = n12
        f = (m11.real * m11.real + m11.imag * m11.imag
             + m12.real * m12.real + m12.imag * m12.imag
             + m21.real * m21.real + m21.imag * m21.imag
             + m22.real * m22.real + m22.imag * m22.imag)
        inv = 1.0 / math.sqrt(f)
        m11 *= inv
        m12 *= inv
        m21 *= inv
        m22 *= inv
        s, comp = _neumaier(s, comp, 0.5 * math.log(f))
    return s + comp, m11, m12, m21, m22


@njit(cache=True)
def log_top_singular(gap_sq):
    """ln sigma_1 of a unit-Frobenius 2x2 matrix.

    ``gap_sq`` = (sigma_1**2 - sigma_2**2)**2 = (|r1|^2 - |r2|^2)^2 + 4|<r1, r2>|^2
    for rows r1, r2; a sum of squares, so no cancellation near sigma_1 = sigma_2.
    """
    return 0.5 * math.log(0.5 * (1.0 + math.sqrt(gap_sq)))


@njit(cache=True)
def _real_chunk(a1, a2, E, C, S, cx, sx, n, block, out):
    K = cx.shape[0]
    m11 = np.ones(K)
    m12 = np.zeros(K)
    m21 = np.zeros(K)
    m22 = np.ones(K)
    pf = np.ones(K)
    s = np.zeros(K)
    comp = np.zeros(K)
    A1 = 2.0 * a1
    A2 = 2.0 * a2
    for j in range(n):
        Cj = C[j]
        Sj = S[j]
        for k in range(K):
            c = Cj * cx[k] - Sj * sx[k]
            v = E - A1 * c - A2 * (2.0 * c * c - 1.0)
            n11 = v * m11[k] - m21[k]
            n12 = v * m12[k] - m22[k]
            o11 = m11[k]
            o12 = m12[k]
            f = n11 * n11 + n12 * n12 + o11 * o11 + o12 * o12
            inv = 1.0 / math.sqrt(f)
            m11[k] = n11 * inv
            m12[k] = n12 * inv
            m21[k] = o11 * inv
            m22[k] = o12 * inv
            pf[k] *= f
        if (j + 1) % block == 0 or j == n - 1:
            for k in range(K):
                # Kahan step; terms are halves of logs of squared norms
                t = 0.5 * math.log(pf[k]) - comp[k]
                tt = s[k] + t
                comp[k] = (tt - s[k]) - t
                s[k] = tt
                pf[k] = 1.0
    for k in range(K):
        dr = m11[k] * m11[k] + m12[k] * m12[k] - m21[k] * m21[k] - m22[k] * m22[k]
        ip = m11[k] * m21[k] + m12[k] * m22[k]
        out[k] = s[k] - comp[k] + log_top_singular(dr * dr + 4.0 * ip * ip)


@njit(cache=True)
def _complex_chunk(a1, a2, E, eps, C, S, cx, sx, n, block, out):
    K = cx.shape[0]
    m11r = np.ones(K)
    m11i = np.zeros(K)
    m12r = np.zeros(K)
    m12i = np.zeros(K)
    m21r = np.zeros(K)
    m21i = np.zeros(K)
    m22r = np.ones(K)
    m22i = np.zeros(K)
    pf = np.ones(K)
    s = np.zeros(K)
    comp = np.zeros(K)
    c1 = math.exp(2.0 * math.pi * eps)
    c1i = 1.0 / c1
    c2 = c1 * c1
    c2i = c1i * c1i
    P1 = a1 * (c1 + c1i)
    Q1 = a1 * (c1 - c1i)
    P2 = a2 * (c2 + c2i)
    Q2 = a2 * (c2 - c2i)
    for j in range(n):
        Cj = C[j]
        Sj = S[j]
        for k in range(K):
            c = Cj * cx[k] - Sj * sx[k]
            sn = Sj * cx[k] + Cj * sx[k]
            vr = E - P1 * c - P2 * (2.0 * c * c - 1.0)
            vi = Q1 * sn + Q2 * (2.0 * sn * c)
            n11r = vr * m11r[k] - vi * m11i[k] - m21r[k]
            n11i = vr * m11i[k] + vi * m11r[k] - m21i[k]
            n12r = vr * m12r[k] - vi * m12i[k] - m22r[k]
            n12i = vr * m12i[k] + vi * m12r[k] - m22i[k]
            o11r = m11r[k]
            o11i = m11i[k]
            o12r = m12r[k]
            o12i = m12i[k]
            f = (n11r * n11r + n11i * n11i + n12r * n12r + n12i * n12i
                 + o11r * o11r + o11i * o11i + o12r * o12r + o12i * o12i)
            inv = 1.0 / math.sqrt(f)
            m11r[k] = n11r * inv
            m11i[k] = n11i * inv
            m12r[k] = n12r * inv
            m12i[k] = n12i * inv
            m21r[k] = o11r * inv
            m21i[k] = o11i * inv
            m22r[k] = o12r * inv
            m22i[k] = o12i * inv
            pf[k] *= f
        if (j + 1) % block == 0 or j == n - 1:
            for k in range(K):
                t = 0.5 * math.log(pf[k]) - comp[k]
                tt = s[k] + t
                comp[k] = (tt - s[k]) - t
                s[k] = tt
                pf[k] = 1.0
    for k in range(K):
        dn = (m11r[k] * m11r[k] + m11i[k] * m11i[k] + m12r[k] * m12r[k] + m12i[k] * m12i[k]
              - m21r[k] * m21r[k] - m21i[k] * m21i[k] - m22r[k] * m22r[k] - m22i[k] * m22i[k])
        # <r1, r2> = m11 conj(m21) + m12 conj(m22)
        ipr = m11r[k] * m21r[k] + m11i[k] * m21i[k] + m12r[k] * m22r[k] + m12i[k] * m22i[k]
        ipi = m11i[k] * m21r[k] - m11r[k] * m21i[k] + m12i[k] * m22r[k] - m12r[k] * m22i[k]
        out[k] = s[k] - comp[k] + log_top_singular(dn * dn + 4.0 * (ipr * ipr + ipi * ipi))


@njit(cache=True, parallel=True)
def lane_log_sums(a1, a2, E, eps, C, S, cx, sx, n, block):
    """ln ||A_n(x_k + i eps)|| for every lane k (operator norm).

    Renormalisation uses the Frobenius norm; the top singular value of the
    final unit-Frobenius direction converts the sum to the operator norm.

    Lanes are split into fixed chunks; each lane's arithmetic is independent
    of the chunking, so the output does not depend on the thread count.
    """
    K = cx.shape[0]
    out = np.empty(K)
    nchunks = (K + CHUNK - 1) // CHUNK
    for ci in prange(nchunks):
        lo = ci * CHUNK
        hi = min(K, lo + CHUNK)
        if eps == 0.0:
            _real_chunk(a1, a2, E, C, S, cx[lo:hi], sx[lo:hi], n, block, out[lo:hi])
        else:
            _complex_chunk(a1, a2, E, eps, C, S, cx[lo:hi], sx[lo:hi], n, block, out[lo:hi])
    return out


@njit(cache=True)
def min_sq_modulus(E, A, B, C, S):
    """argmin and min over k of (E - A C[k])**2 + (B S[k])**2."""
    best = np.inf
    arg = 0
    for k in range(C.shape[0]):
        re = E - A * C[k]
        im = B * S[k]
        q = re * re + im * im
        if q < best:
            best = q
            arg = k
    return arg, best
