"""Single-qubit randomized benchmarking, individual or simultaneous."""

import numpy as np

from .backends import ground_population
from .clifford import recovery_index
from .conversions import cycle_error, pauli_error
from .fitting import BenchmarkRecord, fit_exponential_decay

N_CLIFFORDS = 24


def _check_lengths(lengths, n_random):
    lengths = np.asarray(lengths, dtype=int)
    if lengths.ndim != 1 or len(lengths) == 0 or np.any(np.diff(lengths) <= 0) or lengths[0] < 1:
        raise ValueError("lengths must be positive and strictly ascending")
    if n_random < 1:
        raise ValueError("n_random must be at least 1")
    return lengths


def sequence_streams(seed, n):
    """Independent generators for ``n`` sequences derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def simulate_rb(backend, lengths, n_random=51, seed=0, qubits=("A",), shots=None):
    """Survival probabilities of random Clifford sequences plus recovery.

    Parameters
    ----------
    backend : DepolarizingBackend or LindbladBackend
    lengths : sequence of int
        Numbers of random Cliffords before the recovery gate.
    qubits : tuple
        ``("A",)`` or ``("B",)`` for individual RB, ``("A", "B")`` for
        simultaneous RB.
    shots : int, optional
        Binomial sampling of each survival probability; exact when None.

    Returns
    -------
    dict
        ``BenchmarkRecord`` per benchmarked qubit; ``errors`` holds the
        average gate error r = (1 - p)/2 and the Pauli error 3r/2.
    """
    lengths = _check_lengths(lengths, n_random)
    if not qubits or any(q not in ("A", "B") for q in qubits):
        raise ValueError("qubits must be drawn from 'A' and 'B'")
    labels = backend.labels
    rho0 = np.zeros((len(labels), len(labels)), dtype=complex)
    rho0[labels.index((0, 0)), labels.index((0, 0))] = 1.0
    surv = {q: np.zeros((n_random, len(lengths))) for q in qubits}
    for s, rng in enumerate(sequence_streams(seed, n_random)):
        seq = {q: rng.integers(N_CLIFFORDS, size=lengths[-1]) for q in qubits}
        rho = rho0
        done = 0
        for j, m in enumerate(lengths):
            for i in range(done, m):
                rho = backend.layer(rho, *(int(seq[q][i]) if q in qubits else None
                                           for q in ("A", "B")))
            done = m
            rec = [recovery_index(seq[q][:m]) if q in qubits else None for q in ("A", "B")]
            final = backend.layer(rho, *rec)
            for q in qubits:
                pg = min(max(ground_population(final, labels, q), 0.0), 1.0)
                if shots:
                    pg = rng.binomial(shots, pg) / shots
                surv[q][s, j] = pg
    out = {}
    for q in qubits:
        mean = surv[q].mean(axis=0)
        fit = fit_exponential_decay(lengths, mean, baseline=0.5)
        r = cycle_error(fit.p, 2)
        errors = {"r": r, "r_err": fit.p_err / 2, "r_pauli": pauli_error(r, 2)}
        meta = {"qubit": q, "simultaneous": len(qubits) > 1, "n_random": n_random,
                "seed": seed, "shots": shots}
        out[q] = BenchmarkRecord(lengths, mean, surv[q], fit, errors, meta)
    return out
