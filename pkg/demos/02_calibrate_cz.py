"""Calibrate a controlled-Z pulse and estimate its decoherence-limited error.

Run with ``python3 demos/02_calibrate_cz.py``. About half a minute.
"""

import numpy as np

from fluxstark import CoupledSpec, FluxoniumSpec, PulseProgram, assemble_and_label
from fluxstark.calibration import CalibrationProblem, calibrate_cp_gate, experimental_timing
from fluxstark.dynamics import RWAModel
from fluxstark.dynamics.lindblad import TABLE_I_AVERAGE, build_collapse_operators
from fluxstark.metrics import incoherent_gate_error

spectrum = assemble_and_label(CoupledSpec(FluxoniumSpec(1.051, 0.753, 5.263),
                                          FluxoniumSpec(1.069, 0.771, 3.870), 0.248))
model = RWAModel.from_spectrum(spectrum, eps_ratio=1.3)

# %% Rotating-frame search, then refinement in the lab frame
phi = np.pi
t_rise, t_flat = experimental_timing(phi, model)
start = PulseProgram(f_d=4.545, t_rise=t_rise, t_flat=t_flat, amplitude=0.05)
result = calibrate_cp_gate(CalibrationProblem(phi, start), model, system=spectrum)
print("converged:", result.success)
print("pulse:", result.pulse)
rep = result.verification
print(f"lab frame: 1-F = {rep.infidelity:.2e}, leakage = {rep.leakage:.2e}, "
      f"phase error = {rep.phase_error:.2e}")

# %% Incoherent error with the measured coherence times
ops = build_collapse_operators(TABLE_I_AVERAGE, model.labels)
err = incoherent_gate_error(model, result.rwa_pulse, ops, phi)
print(f"gate error from T1/T2 = {err:.2e}")
