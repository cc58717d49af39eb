"""Cross-entropy benchmarking of a two-qubit gate.

Each cycle is one random single-qubit Clifford per qubit followed by the
gate. The sequence fidelity at each length is

    F = sum_s [H(p_init, p_exp) - H(p_meas, p_exp)] / sum_s [H(p_init, p_exp) - H(p_exp, p_exp)]

with H(p, q) = -sum p log q, p_exp the ideal output distribution of
sequence s, p_init the distribution of the initialization state and p_meas
the sampled noisy distribution.

Clifford cycles give highly structured output distributions, so the
sequence-to-sequence spread dominates the uncertainty. Standard errors are
therefore bootstrapped over sequences; the covariance estimate of the fit
alone is reported as ``p_err_fit``.
"""

import numpy as np

from ..errors import FitError
from ..metrics import cp_unitary
from .backends import EXCITED_INIT, computational_distribution, embed_single, initial_state
from .clifford import clifford_table
from .conversions import cp_pauli_error, cycle_error, gate_error, pauli_error
from .fitting import BenchmarkRecord, fit_exponential_decay
from .rb import N_CLIFFORDS, _check_lengths, sequence_streams

COMP = ((0, 0), (0, 1), (1, 0), (1, 1))
PROB_FLOOR = 1e-12
N_BOOTSTRAP = 200


def cross_entropy(p, q):
    return float(-np.sum(p * np.log(np.clip(q, PROB_FLOOR, None))))


def xeb_terms(p_init, p_meas, p_exp):
    """Numerator and denominator of one sequence's cross-entropy fidelity."""
    h_init = cross_entropy(p_init, p_exp)
    return h_init - cross_entropy(p_meas, p_exp), h_init - cross_entropy(p_exp, p_exp)


def bootstrap_decay_error(lengths, num, den, rng, n_boot=N_BOOTSTRAP):
    """Standard deviation of the fitted p over sequence resamples."""
    n = num.shape[0]
    ps = []
    for _ in range(n_boot):
        pick = rng.integers(n, size=n)
        d = den[pick].sum(axis=0)
        if np.any(np.abs(d) < 1e-12):
            continue
        try:
            ps.append(fit_exponential_decay(lengths, num[pick].sum(axis=0) / d, baseline=0.0).p)
        except FitError:
            continue
    if len(ps) < 10:
        raise FitError("bootstrap failed: too few successful resample fits")
    return float(np.std(ps, ddof=1))


def simulate_xeb(backend, phi, lengths, n_random=50, seed=0, shots=4096, r_pauli_a=0.0,
                 r_pauli_b=0.0, excited=EXCITED_INIT, n_bootstrap=N_BOOTSTRAP):
    """Simulate XEB and extract the two-qubit gate error.

    Parameters
    ----------
    backend : DepolarizingBackend or LindbladBackend
        Noisy register; its ``gate`` implements U_CP(phi).
    phi : float
        Phase of the ideal gate used for the expected distributions.
    lengths : sequence of int
        Cycle counts (prefixes of each random sequence).
    shots : int or None
        Multinomial samples per distribution; exact distributions when None.
    r_pauli_a, r_pauli_b : float
        Single-qubit Pauli errors from simultaneous RB.
    n_bootstrap : int
        Sequence resamples for the standard error of p; 0 keeps the fit
        covariance estimate.

    Returns
    -------
    BenchmarkRecord
        ``errors`` holds r_cycle, r_cycle_pauli, r_cp_pauli and r_cp.
    """
    lengths = _check_lengths(lengths, n_random)
    labels = backend.labels
    table = [g.unitary() for g in clifford_table()]
    lift = {q: [embed_single(u, q, COMP) for u in table] for q in "AB"}
    ucp = cp_unitary(phi)
    rho_noisy0 = initial_state(labels, excited)
    rho_ideal0 = initial_state(COMP, excited)
    p_init = computational_distribution(rho_ideal0, COMP)
    num = np.zeros((n_random, len(lengths)))
    den = np.zeros((n_random, len(lengths)))
    for s, rng in enumerate(sequence_streams(seed, n_random)):
        ks = rng.integers(N_CLIFFORDS, size=(lengths[-1], 2))
        rho, ideal = rho_noisy0, rho_ideal0
        done = 0
        for j, m in enumerate(lengths):
            for i in range(done, m):
                ka, kb = int(ks[i, 0]), int(ks[i, 1])
                rho = backend.gate(backend.layer(rho, ka, kb))
                u = ucp @ lift["B"][kb] @ lift["A"][ka]
                ideal = u @ ideal @ u.conj().T
            done = m
            p_exp = computational_distribution(ideal, COMP)
            p_meas = computational_distribution(rho, labels)
            if shots:
                p_meas = rng.multinomial(shots, p_meas) / shots
            num[s, j], den[s, j] = xeb_terms(p_init, p_meas, p_exp)
    fid = num.sum(axis=0) / den.sum(axis=0)
    seq_fid = np.divide(num, den, out=np.full_like(num, np.nan), where=np.abs(den) > 1e-12)
    fit = fit_exponential_decay(lengths, fid, baseline=0.0)
    p_err = fit.p_err
    if n_bootstrap:
        boot_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(n_random + 1)[-1])
        p_err = bootstrap_decay_error(lengths, num, den, boot_rng, n_bootstrap)
    r_cycle = cycle_error(fit.p, 4)
    r_cycle_p = pauli_error(r_cycle, 4)
    r_cp_p = cp_pauli_error(r_cycle_p, r_pauli_a, r_pauli_b)
    errors = {"p": fit.p, "p_err": p_err, "p_err_fit": fit.p_err, "r_cycle": r_cycle,
              "r_cycle_pauli": r_cycle_p, "r_cycle_pauli_err": 15.0 / 16.0 * p_err,
              "r_cp_pauli": r_cp_p, "r_cp": gate_error(r_cp_p, 4),
              "r_cp_err": 0.8 * 15.0 / 16.0 * p_err}
    meta = {"phi": float(phi), "n_random": n_random, "seed": seed, "shots": shots,
            "r_pauli_a": r_pauli_a, "r_pauli_b": r_pauli_b}
    return BenchmarkRecord(lengths, fid, seq_fid, fit, errors, meta)
