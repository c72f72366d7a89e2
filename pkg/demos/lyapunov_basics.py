"""Lyapunov exponents of the two-harmonic cocycle: first contact.

Run: python demos/lyapunov_basics.py
"""
import math

from cocycle_lab import ModelParams, le_estimate, product_log_norm, PhasePoint

# Constant potential, E = 3: the transfer matrix is the same at every step,
# so the exponent is the log of its spectral radius.
p = ModelParams(0.0, 0.0, 3.0)
est = le_estimate(p, n=10_000, K=16)
print("E=3, no potential:", est.value, "vs", math.log((3 + math.sqrt(5)) / 2))

# E = 0 is a pure rotation; nothing grows.
print("E=0, no potential:", le_estimate(ModelParams(0, 0, 0), n=10_000, K=16).value)

# A single orbit, held as exp(log_norm) * unit matrix so it never overflows
r = product_log_norm(ModelParams(2.0, 0.05, 0.7), PhasePoint(0.1), 200_000)
print("one orbit, n=2e5: (1/n) ln||A_n|| =", r.log_operator_norm() / r.steps)

# With a dominant second harmonic the exponent sits above ln|a2| at every energy
for E in (-4.0, 0.0, 2.0, 6.0):
    est = le_estimate(ModelParams(1.0, 3.0, E), n=20_000, K=64)
    print(f"a1=1 a2=3 E={E:+.1f}  L={est.value:.4f} +- {est.std_error:.1e}  ln3={math.log(3):.4f}")

# Phase count: doubling K barely moves the average
p = ModelParams(2.0, 0.05, 1.0)
for K in (64, 128, 256, 512):
    est = le_estimate(p, n=20_000, K=K)
    print(f"K={K:4d}  L={est.value:.6f}  stdError={est.std_error:.1e}")
