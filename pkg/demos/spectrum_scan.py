"""Spectrum membership from the eps-profile, scanned over energies.

Run: python demos/spectrum_scan.py
"""
import numpy as np

from cocycle_lab import ModelParams, le_profile, spectrum_membership

a1, a2 = 0.5, 2.0
rows = []
for E in np.linspace(-6.0, 6.0, 25):
    prof = le_profile(ModelParams(a1, a2, E), eps_max=1.0, grid_steps=12, n=10_000, K=32)
    rows.append((E, prof.estimates[0].value, prof.regime.value, spectrum_membership(prof).value))

for E, L0, regime, member in rows:
    mark = "|" if member == "InSpectrum" else " "
    print(f"E={E:+5.1f}  L={L0:.4f}  {regime:<12} {member:<14} {mark}")

inside = [E for E, _, _, m in rows if m == "InSpectrum"]
print("energies flagged in the spectrum:", len(inside), "of", len(rows))
