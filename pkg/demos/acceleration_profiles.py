"""eps -> L(eps) profiles, accelerations and the four regimes.

Run: python demos/acceleration_profiles.py
"""
import math

from cocycle_lab import ModelParams, le_profile, spectrum_membership
from cocycle_lab.engine import asymptote_onset, convexity_excess

cases = [
    (0.5, 2.0, 0.0),   # second harmonic from the start
    (3.0, 0.01, 0.0),  # slope 1 then 2
    (2.0, 0.05, 1.0),  # flat, 1, 2
    (0.5, 2.0, 2.5),   # flat, then 2
]

for a1, a2, E in cases:
    p = ModelParams(a1, a2, E)
    prof = le_profile(p, n=20_000, K=64)
    print(f"\na1={a1} a2={a2} E={E}: {prof.regime.value}, {spectrum_membership(prof).value}")
    for seg in prof.segments():
        print(f"  omega={seg.acceleration}  eps in [{seg.eps_lo:.3f}, {seg.eps_hi:.3f}]"
              f"  line through {seg.intercept:+.4f}")
    print(f"  L(0)={prof.estimates[0].value:.4f}  ln|a2|={math.log(a2):+.4f}"
          f"  onset~{asymptote_onset(prof)}  max convexity excess {convexity_excess(prof).max():.1e}")
