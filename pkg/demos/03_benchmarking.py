"""Randomized and cross-entropy benchmarking on simple noise models.

Run with ``python3 demos/03_benchmarking.py``. A few seconds.
"""

import numpy as np

from fluxstark.benchmarking import DepolarizingBackend, clifford_table, simulate_rb, simulate_xeb

# %% Single-qubit Clifford group built from X/Y pulses and virtual Z
table = clifford_table()
print(f"{len(table)} Cliffords, {np.mean([g.physical_pulse_count for g in table]):.4f} "
      "physical pulses on average")

# %% Simultaneous RB with a known depolarizing error per Clifford
lengths = [1, 10, 25, 50, 100, 200]
recs = simulate_rb(DepolarizingBackend(r_a=2e-3, r_b=3e-3), lengths, n_random=30, seed=1,
                   qubits=("A", "B"))
for q, rec in recs.items():
    print(f"RB qubit {q}: p = {rec.fit.p:.5f}, error per Clifford = {rec.errors['r']:.2e}")

# %% XEB recovers an injected per-cycle Pauli error
rec = simulate_xeb(DepolarizingBackend(r_cycle_pauli=0.01, phi=np.pi), np.pi,
                   [1, 3, 6, 10, 15, 22, 30, 45, 60], n_random=200, seed=3)
e = rec.errors
print(f"XEB: injected 1.00e-02, recovered {e['r_cycle_pauli']:.2e} +- {e['r_cycle_pauli_err']:.1e}")
