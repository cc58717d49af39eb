"""Spectrum of the two-fluxonium device and drive-controlled ZZ.

Run with ``python3 demos/01_spectrum_and_zz.py``. Takes a few seconds.
"""

import numpy as np

from fluxstark import (CoupledSpec, FluxoniumSpec, assemble_and_label, diagonalize,
                       doublet_splitting, rabi_frequency, static_zz, transition_frequency)
from fluxstark.stark import setting_from_spectrum, solve_cancellation_amplitude, zz_map

# %% Single qubits at the half-flux sweet spot
qubit_a = FluxoniumSpec(e_c=1.051, e_l=0.753, e_j=5.263)
qubit_b = FluxoniumSpec(e_c=1.069, e_l=0.771, e_j=3.870)
for name, q in (("A", qubit_a), ("B", qubit_b)):
    eig = diagonalize(q)
    print(f"qubit {name}: f01 = {transition_frequency(eig, 0, 1):.4f} GHz, "
          f"f12 = {transition_frequency(eig, 1, 2):.4f} GHz")

# %% Coupled product states and the static interaction
spectrum = assemble_and_label(CoupledSpec(qubit_a, qubit_b, j_c=0.248))
print(f"static ZZ = {static_zz(spectrum) * 1e6:.1f} kHz")
print(f"|10>-|20> / |11>-|21> splitting = {doublet_splitting(spectrum) * 1e3:.3f} MHz")

# Drive strength on each doublet line per unit qubit-A drive amplitude
eps_ratio = 1.3
for lower, upper in (((1, 0), (2, 0)), ((1, 1), (2, 1))):
    om = rabi_frequency(spectrum, 1.0, eps_ratio, lower, upper)
    print(f"Rabi frequency {lower}->{upper}: {om:.5f} GHz per unit amplitude")

# %% Blue-detuned drive cancels the static ZZ
f_d = 4.65
om = solve_cancellation_amplitude(setting_from_spectrum(spectrum, f_d, 0.03, eps_ratio))
print(f"at f_d = {f_d} GHz the total ZZ vanishes for Omega_11-21 = {om * 1e3:.2f} MHz")

# Total ZZ along the drive frequency at fixed amplitude
rows = zz_map(spectrum, np.linspace(4.55, 5.10, 12), [0.052], eps_ratio)
for f, _, xi in rows:
    print(f"  f_d = {f:.3f} GHz  ZZ = {xi * 1e6:+9.1f} kHz")
