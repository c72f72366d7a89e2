"""Measured exponent against the closed-form lower bounds across energies.

Run: python demos/lower_bound_scan.py
"""
import numpy as np

from cocycle_lab import ModelParams, le_estimate
from cocycle_lab import bounds

a1, a2 = 2.0, 0.0002
p = ModelParams(a1, a2, 0.0)
rep = bounds.bound_report(p)
print("theorem bound:", rep.theorem_bound, " eps0:", rep.epsilon0)

span = 2 * a1 + 2 * a2 + 2.5
worst = np.inf
for E in np.linspace(-span, span, 41):
    est = le_estimate(p.with_energy(E), n=20_000, K=64)
    margin = est.value - rep.theorem_bound
    worst = min(worst, margin)
    bar = "#" * int(40 * est.value / 2.0)
    print(f"E={E:+6.2f}  L={est.value:.4f}  margin={margin:+.4f}  {bar}")
print("smallest margin:", worst)

# The bound is tight in the middle of the spectrum: there L is ln a1 to 4 digits
print("L at E=0:", le_estimate(p, n=100_000, K=256).value, " ln a1:", np.log(a1))

# the building blocks
e0 = bounds.epsilon0(p)
delta, dist = bounds.lemma32_sup(p)
print("chosen shift", delta, "distance", dist, "floor", bounds.potential_floor(p, delta))
print("Jensen term", bounds.jensen_integral(p, delta), " remainder", bounds.term_II_bound(p, delta))
print(bounds.contradiction_check(p))
