import numpy as np
import pytest

from fluxstark.benchmarking import (DepolarizingBackend, LindbladBackend, ReadoutParams,
                                    calibrate_readout, clifford_table, cp_pauli_error,
                                    cycle_error, error_matrix, fit_exponential_decay,
                                    gate_error, pauli_error, readout_correct, simulate_rb,
                                    simulate_xeb)
from fluxstark.benchmarking.backends import initial_state
from fluxstark.benchmarking.clifford import (find_clifford, inverse_table,
                                             multiplication_table, recovery_index)
from fluxstark.benchmarking.conversions import decay_from_error
from fluxstark.benchmarking.readout import apply_readout, rabi_populations
from fluxstark.benchmarking.xeb import cross_entropy, xeb_terms
from fluxstark.dynamics import TABLE_I_AVERAGE
from fluxstark.errors import FitError


# ---- Clifford group

def test_clifford_group_closed_with_inverses():
    mult = multiplication_table()
    assert mult.shape == (24, 24)
    # every row is a permutation: closure plus cancellation
    assert all(sorted(row) == list(range(24)) for row in mult)
    inv = inverse_table()
    assert all(mult[i, inv[i]] == 0 for i in range(24))


def test_mean_pulse_count():
    counts = [g.physical_pulse_count for g in clifford_table()]
    assert np.mean(counts) == pytest.approx(0.8333, abs=1e-4)


def test_recovery_returns_identity(rng):
    seq = rng.integers(24, size=30)
    u = np.eye(2)
    table = clifford_table()
    for k in seq:
        u = table[k].unitary() @ u
    u = table[recovery_index(seq)].unitary() @ u
    assert find_clifford(u) == 0


def test_non_clifford_rejected():
    with pytest.raises(ValueError):
        find_clifford(np.diag([1, np.exp(1j * np.pi / 8)]))


# ---- conversions

@pytest.mark.parametrize("n", [2, 4])
def test_conversion_roundtrip(n, rng):
    for p in rng.uniform(0.8, 1.0, 20):
        r = cycle_error(p, n)
        assert r == (n - 1) / n * (1 - p)
        assert decay_from_error(r, n) == pytest.approx(p, abs=1e-12)
        assert gate_error(pauli_error(r, n), n) == pytest.approx(r, abs=1e-12)


def test_cp_error_from_cycle():
    r = cp_pauli_error(0.02, 0.004, 0.002)
    assert (1 - 0.02) == pytest.approx((1 - 0.004) * (1 - 0.002) * (1 - r))


# ---- fitting

def test_decay_fit_exact():
    m = np.array([1, 5, 10, 20, 50, 100, 200])
    fit = fit_exponential_decay(m, 0.7 * 0.99 ** m + 0.25)
    assert fit.p == pytest.approx(0.99, abs=1e-9)
    assert fit.a == pytest.approx(0.7, abs=1e-7)


def test_decay_fit_needs_lengths():
    with pytest.raises((FitError, ValueError)):
        fit_exponential_decay([1, 2, 3], [0.9, 0.8, 0.7])


def test_flat_data():
    m = np.arange(1, 10)
    assert fit_exponential_decay(m, np.full(9, 0.9)).p == 1.0
    with pytest.raises(FitError):
        fit_exponential_decay(m, np.full(9, 0.25))


# ---- readout

def test_readout_inverse_roundtrip(rng):
    params = ReadoutParams(0.02, 0.03, 0.01, 0.04, 0.005, 0.01)
    p = rng.dirichlet(np.ones(4))
    assert np.allclose(readout_correct(apply_readout(p, params), params), p)
    assert np.allclose(error_matrix(params).sum(axis=0), 1.0)


def test_readout_validation():
    with pytest.raises(ValueError):
        ReadoutParams(a1=0.6)
    with pytest.raises(ValueError):
        readout_correct([0.5, 0.5, 0.5, 0.5], ReadoutParams())


def test_readout_calibration_recovers_parameters():
    truth = ReadoutParams(0.03, 0.02, 0.015, 0.025, 0.01, 0.005)
    angles = np.linspace(0, 2 * np.pi, 41)
    ma = np.array([apply_readout(p, truth) for p in rabi_populations(angles, "A", 0.9, 0.85)])
    mb = np.array([apply_readout(p, truth) for p in rabi_populations(angles, "B", 0.9, 0.85)])
    # free ground populations: data reproduced, one direction unresolved
    fitted, ground = calibrate_readout(angles, ma, mb)
    model = np.array([apply_readout(p, fitted) for p in rabi_populations(angles, "A", *ground)])
    assert np.max(np.abs(model - ma)) < 1e-7
    assert fitted.c1 == pytest.approx(0.01, abs=1e-3)
    # known ground populations pin every parameter
    fitted, _ = calibrate_readout(angles, ma, mb, p_ground=(0.9, 0.85))
    assert np.allclose([fitted.a1, fitted.a2, fitted.b1, fitted.b2, fitted.c1, fitted.c2],
                       [0.03, 0.02, 0.015, 0.025, 0.01, 0.005], atol=1e-5)


# ---- randomized benchmarking

def test_rb_recovers_depolarizing_error():
    lengths = [1, 5, 10, 25, 50, 100, 200, 400]
    rec = simulate_rb(DepolarizingBackend(r_a=2e-3), lengths, n_random=20, seed=3)["A"]
    assert rec.errors["r"] == pytest.approx(2e-3, rel=1e-6)


def test_rb_is_deterministic():
    lengths = [1, 5, 10, 25, 50]
    be = LindbladBackend.from_table(TABLE_I_AVERAGE)
    a = simulate_rb(be, lengths, 5, seed=11, qubits=("A", "B"), shots=500)
    b = simulate_rb(be, lengths, 5, seed=11, qubits=("A", "B"), shots=500)
    assert np.array_equal(a["B"].fidelities, b["B"].fidelities)


def test_lindblad_rb_error_is_coherence_limited():
    be = LindbladBackend.from_table(TABLE_I_AVERAGE)
    rec = simulate_rb(be, [1, 10, 25, 50, 100, 200, 400], 20, seed=0)["A"]
    # 45 ns pulses, 0.83 pulses per Clifford, T2E = 14.5 us: r ~ t / (3 T2)
    assert 3e-4 < rec.errors["r"] < 3e-3


def test_rb_rejects_bad_lengths():
    with pytest.raises(ValueError):
        simulate_rb(DepolarizingBackend(), [5, 3, 10], 4)


# ---- cross-entropy benchmarking

def test_cross_entropy_terms():
    p = np.array([0.25] * 4)
    q = np.array([0.7, 0.1, 0.1, 0.1])
    assert cross_entropy(q, q) < cross_entropy(p, q)
    num, den = xeb_terms(p, q, q)
    assert num == pytest.approx(den)


def test_xeb_ideal_register_gives_unit_fidelity():
    rec = simulate_xeb(DepolarizingBackend(phi=np.pi / 3), np.pi / 3, [1, 3, 6, 10, 15], 50,
                       seed=0, shots=None, n_bootstrap=0)
    assert np.allclose(rec.fidelities, 1.0)


def test_xeb_recovers_injected_error():
    lengths = [1, 3, 6, 10, 15, 22, 30, 45, 60]
    rec = simulate_xeb(DepolarizingBackend(r_cycle_pauli=0.01, phi=np.pi / 2), np.pi / 2,
                       lengths, 200, seed=5)
    err = rec.errors
    assert abs(err["r_cycle_pauli"] - 0.01) < 3 * err["r_cycle_pauli_err"]


def test_initial_state_populations():
    rho = initial_state(((0, 0), (0, 1), (1, 0), (1, 1)), (0.2, 0.3))
    assert np.trace(rho).real == pytest.approx(1.0)
    assert rho[3, 3].real == pytest.approx(0.06)
