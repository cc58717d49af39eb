"""Randomized and cross-entropy benchmarking, decay fits and readout errors."""

from .backends import DepolarizingBackend, LindbladBackend, corrected_cp_superoperator
from .clifford import CliffordGate, clifford_table
from .conversions import cp_pauli_error, cycle_error, gate_error, pauli_error
from .fitting import BenchmarkRecord, DecayFit, fit_exponential_decay
from .rb import simulate_rb
from .readout import ReadoutParams, calibrate_readout, error_matrix, readout_correct
from .xeb import simulate_xeb

__all__ = [
    "BenchmarkRecord", "CliffordGate", "DecayFit", "DepolarizingBackend", "LindbladBackend",
    "ReadoutParams", "calibrate_readout", "clifford_table", "corrected_cp_superoperator",
    "cp_pauli_error", "cycle_error", "error_matrix", "fit_exponential_decay", "gate_error",
    "pauli_error", "readout_correct", "simulate_rb", "simulate_xeb",
]
