"""State and process tomography of two qubits.

Signals are s = Tr(M R rho R^dag) with the measurement operator
M = b_II II + b_IZ IZ + b_ZI ZI + b_ZZ ZZ and R one of the tomography
pulses. States are reconstructed by least-squares likelihood maximization
over the Cholesky form rho = T^dag T / Tr(T^dag T), processes by linear
inversion into the Pauli-basis chi matrix

    E(rho) = sum_mn chi_mn P_m rho P_n^dag.

Pauli order is II, IX, IY, IZ, XI, ..., ZZ with the first letter on qubit A.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .benchmarking.clifford import axis_rotation
from .optimize import nelder_mead_minimize

_P1 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0 + 0j, -1.0]),
}
PAULI_LABELS = tuple(a + b for a, b in product("IXYZ", repeat=2))
PAULIS = np.array([np.kron(_P1[a], _P1[b]) for a, b in PAULI_LABELS])
D = 4

_SINGLE = {
    "I": None, "Xp": ("X", np.pi), "Xm": ("X", -np.pi),
    "X90": ("X", np.pi / 2), "Xm90": ("X", -np.pi / 2),
    "Y90": ("Y", np.pi / 2), "Ym90": ("Y", -np.pi / 2),
}
# (A, B) single-qubit pulse names
PREPARATION_PULSES = (
    ("I", "I"), ("I", "X90"), ("I", "Y90"), ("I", "Xm90"),
    ("Xp", "I"), ("Xp", "Xp"), ("Xp", "Y90"), ("Xp", "Xm90"),
    ("Y90", "I"), ("Y90", "Xp"), ("Y90", "Y90"), ("Y90", "Xm90"),
    ("Xm90", "I"), ("Xm90", "Xp"), ("Xm90", "Y90"), ("Xm90", "Xm90"),
)
_TOMO_SINGLE = ("I", "Xp", "X90", "Xm90", "Y90", "Ym90")
TOMOGRAPHY_PULSES = tuple((a, b) for b in _TOMO_SINGLE for a in _TOMO_SINGLE)
CALIBRATION_PULSES = (("I", "I"), ("I", "Xp"), ("Xp", "I"), ("Xp", "Xp"))


def pulse_name(pulse):
    return f"{pulse[0]}.{pulse[1]}"


def single_pulse(name):
    spec = _SINGLE[name]
    return np.eye(2, dtype=complex) if spec is None else axis_rotation(*spec)


def pulse_unitary(pulse):
    """Two-qubit unitary of an (A, B) pulse pair."""
    return np.kron(single_pulse(pulse[0]), single_pulse(pulse[1]))


@dataclass(frozen=True)
class MeasurementOperator:
    beta_ii: complex
    beta_iz: complex
    beta_zi: complex
    beta_zz: complex

    def matrix(self):
        z, i = _P1["Z"], _P1["I"]
        return (self.beta_ii * np.eye(4) + self.beta_iz * np.kron(i, z)
                + self.beta_zi * np.kron(z, i) + self.beta_zz * np.kron(z, z))

    def signals(self, rho, pulses=TOMOGRAPHY_PULSES):
        """Expected signal after each pulse."""
        m = self.matrix()
        out = []
        for p in pulses:
            u = pulse_unitary(p)
            out.append(np.trace(m @ u @ rho @ u.conj().T))
        return np.array(out)


_MEAS_BASIS = [PAULIS[PAULI_LABELS.index(k)] for k in ("II", "IZ", "ZI", "ZZ")]


def calibrate_measurement_operator(signals, rho_init, pulses=CALIBRATION_PULSES):
    """Solve the four beta coefficients from the calibration signals.

    Parameters
    ----------
    signals : array_like of complex, length 4
        Signals after II, IX_pi, X_pi I, X_pi X_pi.
    rho_init : ndarray
        Known state before the calibration pulses.

    Raises
    ------
    ValueError
        If the system is singular, e.g. for a fully mixed initial state.
    """
    rows = []
    for p in pulses:
        u = pulse_unitary(p)
        rho = u @ rho_init @ u.conj().T
        rows.append([np.trace(b @ rho).real for b in _MEAS_BASIS])
    a = np.array(rows)
    if abs(np.linalg.det(a)) < 1e-10:
        raise ValueError("calibration system is singular (initial state has no Z polarization)")
    beta = np.linalg.solve(a, np.asarray(signals, dtype=complex))
    return MeasurementOperator(*beta)


def cholesky_state(t):
    """Density matrix from the 16 real Cholesky parameters t_1..t_16."""
    t = np.asarray(t, dtype=float)
    tm = np.diag(t[:4]).astype(complex)
    tm[1, 0] = t[4] + 1j * t[5]
    tm[2, 1] = t[6] + 1j * t[7]
    tm[3, 2] = t[8] + 1j * t[9]
    tm[2, 0] = t[10] + 1j * t[11]
    tm[3, 1] = t[12] + 1j * t[13]
    tm[3, 0] = t[14] + 1j * t[15]
    rho = tm.conj().T @ tm
    return rho / np.trace(rho).real


def cholesky_parameters(rho, floor=1e-10):
    """Inverse of ``cholesky_state`` for a (regularized) density matrix."""
    rho = 0.5 * (rho + rho.conj().T) + floor * np.eye(D)
    j = np.eye(D)[::-1]
    low = np.linalg.cholesky(j @ rho @ j)
    tm = j @ low.conj().T @ j
    return np.array([tm[0, 0].real, tm[1, 1].real, tm[2, 2].real, tm[3, 3].real,
                     tm[1, 0].real, tm[1, 0].imag, tm[2, 1].real, tm[2, 1].imag,
                     tm[3, 2].real, tm[3, 2].imag, tm[2, 0].real, tm[2, 0].imag,
                     tm[3, 1].real, tm[3, 1].imag, tm[3, 0].real, tm[3, 0].imag])


def _design(op, pulses):
    """Real linear map from Pauli coefficients of rho to stacked signals."""
    cols = [op.signals(p / D, pulses) for p in PAULIS]
    a = np.array(cols).T
    return np.vstack([a.real, a.imag])


def _canonical(records, pulses):
    if isinstance(records, dict):
        items = [(tuple(k.split(".")) if isinstance(k, str) else tuple(k), v)
                 for k, v in records.items()]
    else:
        items = list(zip((tuple(p) for p in pulses), records))
    items.sort(key=lambda kv: pulse_name(kv[0]))
    return [k for k, _ in items], np.array([v for _, v in items], dtype=complex)


def project_physical(rho):
    """Nearest unit-trace PSD matrix by eigenvalue clipping."""
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(D) / D
    return (v * (w / w.sum())) @ v.conj().T


def linear_state_estimate(records, op, pulses=TOMOGRAPHY_PULSES):
    """Least-squares linear inversion (may be unphysical)."""
    pulses, values = _canonical(records, pulses)
    a = _design(op, pulses)
    a = a[:, 1:]
    y = np.concatenate([values.real, values.imag]) - np.concatenate(
        [np.full(len(values), op.beta_ii.real), np.full(len(values), op.beta_ii.imag)])
    if np.linalg.matrix_rank(a) < D * D - 1:
        raise ValueError("measurement set is not informationally complete")
    coef = np.linalg.lstsq(a, y, rcond=None)[0]
    return (np.eye(D) + np.tensordot(coef, PAULIS[1:], axes=1)) / D


def mle_state_tomography(records, op, pulses=TOMOGRAPHY_PULSES, weights=None, max_iter=3000):
    """Maximum-likelihood density matrix from tomography signals.

    Parameters
    ----------
    records : dict or array_like
        Signal per pulse: a dict keyed by (A, B) pulse pairs or their
        ``pulse_name``, or values aligned with ``pulses``.
    op : MeasurementOperator
    weights : array_like, optional
        Per-record weights of the squared residuals (aligned with the
        sorted pulse names).

    Returns
    -------
    ndarray
        4x4 density matrix, PSD with unit trace by construction.

    Notes
    -----
    The likelihood is a least-squares objective. The search starts from
    the projected linear-inversion estimate and runs Nelder-Mead over the
    16 Cholesky parameters. Records are sorted by pulse name first, so the
    result does not depend on their order.
    """
    pulses, values = _canonical(records, pulses)
    w = np.ones(len(values)) if weights is None else np.asarray(weights, dtype=float)
    a = _design(op, pulses)
    y = np.concatenate([values.real, values.imag])
    ww = np.concatenate([w, w])

    def cost(t):
        rho = cholesky_state(t)
        coef = np.real(np.einsum("kij,ji->k", PAULIS, rho))
        r = a @ coef - y
        return float(np.sum(ww * r * r))

    start = project_physical(linear_state_estimate(dict(zip(pulses, values)), op))
    t0 = cholesky_parameters(start)
    scale = max(np.max(np.abs(t0)), 1e-3)
    res = nelder_mead_minimize(cost, t0, steps=np.full(16, 1e-3 * scale), max_iter=max_iter,
                               fatol=1e-16)
    return cholesky_state(res.x)


def prepared_states(rho_init, pulses=PREPARATION_PULSES):
    out = []
    for p in pulses:
        u = pulse_unitary(p)
        out.append(u @ rho_init @ u.conj().T)
    return out


@dataclass
class ChiMatrix:
    chi: np.ndarray
    basis: tuple = PAULI_LABELS
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"basis": list(self.basis), "re": self.chi.real.tolist(),
                "im": self.chi.imag.tolist(), "diagnostics": self.diagnostics}


def _pauli_superoperators():
    # vec(P_m rho P_n^dag) = (P_m (x) P_n^*) vec(rho), row-major
    return np.array([np.kron(pm, pn.conj()).reshape(-1) for pm in PAULIS for pn in PAULIS]).T


_BASIS_INV = None


def _basis_inverse():
    global _BASIS_INV
    if _BASIS_INV is None:
        _BASIS_INV = np.linalg.inv(_pauli_superoperators())
    return _BASIS_INV


def superoperator_from_pairs(inputs, outputs):
    """Row-major superoperator S with S vec(rho_j) = vec(E(rho_j)), least squares."""
    x = np.array([np.asarray(r, dtype=complex).reshape(-1) for r in inputs]).T
    y = np.array([np.asarray(r, dtype=complex).reshape(-1) for r in outputs]).T
    if np.linalg.matrix_rank(x, tol=1e-10) < D * D:
        raise ValueError("input states are not linearly independent")
    return y @ np.linalg.pinv(x)


def chi_from_superoperator(sup):
    chi = (_basis_inverse() @ np.asarray(sup).reshape(-1)).reshape(D * D, D * D)
    return 0.5 * (chi + chi.conj().T)


def process_tomography(inputs, outputs):
    """Chi matrix by linear inversion from 16 input/output density matrices.

    Positivity is not enforced; the smallest eigenvalue and the trace are
    reported in ``diagnostics``.
    """
    chi = chi_from_superoperator(superoperator_from_pairs(inputs, outputs))
    w = np.linalg.eigvalsh(chi)
    return ChiMatrix(chi, PAULI_LABELS, {"min_eigenvalue": float(w[0]),
                                         "trace": float(np.trace(chi).real),
                                         "physical": bool(w[0] > -1e-6)})


def chi_of_unitary(u):
    c = np.einsum("kij,ji->k", PAULIS, np.asarray(u)) / D
    return np.outer(c, c.conj())


def chi_fidelity(chi, chi_ideal):
    """(d Tr[chi^dag chi_ideal] + 1)/(d + 1) with d = 4."""
    chi = chi.chi if isinstance(chi, ChiMatrix) else np.asarray(chi)
    chi_ideal = chi_ideal.chi if isinstance(chi_ideal, ChiMatrix) else np.asarray(chi_ideal)
    return float((np.trace(chi.conj().T @ chi_ideal).real * D + 1) / (D + 1))


def fold_to_qubits(rho, labels):
    """Reduce a register state to the two-qubit space, reading |2l> as |1l>.

    Coherences involving leaked levels are dropped.
    """
    idx = {lab: i for i, lab in enumerate(labels)}
    comp = [(0, 0), (0, 1), (1, 0), (1, 1)]
    ci = [idx[c] for c in comp]
    out = np.array(rho)[np.ix_(ci, ci)].astype(complex)
    for (k, l), i in idx.items():
        if k >= 2 and l < 2:
            out[2 + l, 2 + l] += rho[i, i].real
    return out


def simulate_qpt(superoperator, labels, chi_ideal, op, rho_init, noise=0.0, seed=0):
    """Prepare, evolve, measure and reconstruct: the full QPT pipeline.

    Parameters
    ----------
    superoperator : ndarray
        Row-major channel on ``labels`` (4 computational or more levels).
    chi_ideal : ndarray
        Target process matrix.
    op : MeasurementOperator
        Measurement operator used to generate and to analyse the signals.
    rho_init : ndarray
        4x4 initialization state the preparation pulses act on.
    noise : float
        Standard deviation of Gaussian noise on real and imaginary signal parts.

    Returns
    -------
    ChiMatrix
        With the chi fidelity in ``diagnostics``.
    """
    rng = np.random.default_rng(seed)
    dim = len(labels)
    comp = [labels.index(c) for c in ((0, 0), (0, 1), (1, 0), (1, 1))]
    inputs = prepared_states(rho_init)
    outputs = []
    for rho in inputs:
        full = np.zeros((dim, dim), dtype=complex)
        full[np.ix_(comp, comp)] = rho
        out = (superoperator @ full.reshape(-1)).reshape(dim, dim)
        sig = op.signals(fold_to_qubits(out, labels))
        sig = sig + noise * (rng.standard_normal(len(sig)) + 1j * rng.standard_normal(len(sig)))
        outputs.append(mle_state_tomography(sig, op))
    chi = process_tomography(inputs, outputs)
    chi.diagnostics["fidelity"] = chi_fidelity(chi, chi_ideal)
    return chi
