"""Closed forms next to their brute-force twins.

Run: python demos/oracle_checks.py
"""
import math

from cocycle_lab import ModelParams
from cocycle_lab import bounds, oracles

p = ModelParams(3.0, 0.0, 0.0)
for delta in (0.05, 0.2, 0.6):
    for E in (0.0, 4.0, 12.0):
        closed = bounds.ellipse_distance(p, delta, E)
        grid = oracles.grid_min_modulus(p, delta, E)
        print(f"delta={delta:<4}  E={E:<5} distance {closed:.10f}  grid {grid:.10f}")

# Jensen's formula against the midpoint rule
for E in (0.0, 5.0, 40.0):
    exact = bounds.jensen_integral(p, 0.2, E)
    quad = oracles.quadrature_log_integral(p, 0.2, 10**5, E)
    print(f"E={E:<5}  jensen {exact:.12f}  quadrature {quad:.12f}  floor {2 * math.pi * 0.2 + math.log(3):.6f}")

# suites, smaller than the acceptance run
print(oracles.lemma31_exhaustive(trials=20_000).as_dict())
for rep in oracles.lemma32_suite(samples=500, grid_size=10**5):
    print(rep.name, rep.passed, rep.worst_case_margin)
