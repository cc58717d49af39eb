"""Conversions between decay constants, average gate errors and Pauli errors.

N is the Hilbert-space dimension (2 for one qubit, 4 for two).
"""


def cycle_error(p, n=4):
    """Average error per cycle, (N - 1)/N (1 - p)."""
    return (n - 1) / n * (1.0 - p)


def decay_from_error(r, n=4):
    return 1.0 - n / (n - 1) * r


def pauli_error(r, n=4):
    """Pauli error (N + 1)/N r from an average gate error."""
    return (n + 1) / n * r


def gate_error(r_pauli, n=4):
    """Average gate error N/(N + 1) r^P from a Pauli error."""
    return n / (n + 1) * r_pauli


def cp_pauli_error(r_cycle_pauli, r_pauli_a, r_pauli_b):
    """Pauli error of the two-qubit gate from a cycle of (A, B, gate).

    Solves (1 - r_cycle) = (1 - r_A)(1 - r_B)(1 - r_CP) for r_CP.
    """
    return 1.0 - (1.0 - r_cycle_pauli) / ((1.0 - r_pauli_a) * (1.0 - r_pauli_b))
