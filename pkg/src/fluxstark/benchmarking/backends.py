"""Noise backends for benchmarking sequences on a two-qubit register.

A backend evolves density matrices on its ``labels`` basis through layers
of simultaneous single-qubit Cliffords and through the two-qubit gate.
``DepolarizingBackend`` works on the four computational states;
``LindbladBackend`` on the rotating-frame levels including |20>, |21>.
"""

from dataclasses import dataclass, field

import numpy as np

from ..dynamics.lindblad import build_collapse_operators, idle_channel, lindblad_channel
from ..dynamics.rwa import BASE_LABELS, COMPUTATIONAL, evolve_rwa
from ..metrics import computational_block, cp_unitary, z_correction
from .clifford import clifford_table

_S = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0 + 0j, -1.0]),
}
EXCITED_INIT = (0.69, 0.82)


def embed_single(u, qubit, labels):
    """Lift a 2x2 operator on qubit A or B to the register basis.

    Qubit A acts on the pairs (|0l>, |1l>), qubit B on (|k0>, |k1>); levels
    without a partner (|2l> for A) are left untouched.
    """
    idx = {lab: i for i, lab in enumerate(labels)}
    out = np.eye(len(labels), dtype=complex)
    for lab in labels:
        k, l = lab
        if qubit == "A":
            lo, hi = (0, l), (1, l)
        elif qubit == "B":
            lo, hi = (k, 0), (k, 1)
        else:
            raise ValueError("qubit must be 'A' or 'B'")
        if lab == lo and hi in idx:
            i, j = idx[lo], idx[hi]
            out[np.ix_([i, j], [i, j])] = u
    return out


def initial_state(labels, excited=EXCITED_INIT):
    """Product mixed state with the given excited populations of A and B."""
    rho = np.zeros((len(labels), len(labels)), dtype=complex)
    pa, pb = excited
    for i, (k, l) in enumerate(labels):
        if k < 2 and l < 2:
            rho[i, i] = (pa if k else 1 - pa) * (pb if l else 1 - pb)
    return rho


def computational_distribution(rho, labels):
    """Outcome probabilities (00, 01, 10, 11); |2l> reads as |1l>."""
    p = np.zeros(4)
    for i, (k, l) in enumerate(labels):
        p[2 * min(k, 1) + min(l, 1)] += rho[i, i].real
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def ground_population(rho, labels, qubit):
    col = 0 if qubit == "A" else 1
    return float(sum(rho[i, i].real for i, lab in enumerate(labels) if lab[col] == 0))


def _twirl(rho, ops, p):
    """p rho + (1 - p) * mean_P P rho P."""
    if p == 1.0:
        return rho
    mixed = sum(o @ rho @ o.conj().T for o in ops) / len(ops)
    return p * rho + (1 - p) * mixed


@dataclass
class DepolarizingBackend:
    """Ideal gates followed by depolarizing channels.

    ``r_a``, ``r_b`` are average errors per single-qubit Clifford;
    ``r_cycle_pauli`` is the two-qubit Pauli error added after each gate.
    Acts on the four computational states.
    """

    r_a: float = 0.0
    r_b: float = 0.0
    r_cycle_pauli: float = 0.0
    phi: float = np.pi
    labels = COMPUTATIONAL

    def __post_init__(self):
        self._lifted = {q: [embed_single(g.unitary(), q, self.labels) for g in clifford_table()]
                        for q in "AB"}
        self._paulis = {q: [embed_single(s, q, self.labels) for s in _S.values()] for q in "AB"}

    def layer(self, rho, ka=None, kb=None):
        for q, k, r in (("A", ka, self.r_a), ("B", kb, self.r_b)):
            if k is None:
                continue
            u = self._lifted[q][k]
            rho = _twirl(u @ rho @ u.conj().T, self._paulis[q], 1.0 - 2.0 * r)
        return rho

    def gate(self, rho):
        u = cp_unitary(self.phi)
        p = 1.0 - 16.0 / 15.0 * self.r_cycle_pauli
        # the two-qubit Pauli twirl sends rho to Tr(rho) I / 4
        return p * (u @ rho @ u.conj().T) + (1 - p) * np.trace(rho) * np.eye(4) / 4


def corrected_cp_superoperator(model, pulse, collapse_ops, phi):
    """Lindblad channel of the pulse followed by its virtual-Z correction.

    The correction is split into single-qubit phases; |2l> receives the
    phase of qubit B only, which is immaterial at the leakage level.
    """
    u = computational_block(evolve_rwa(model, pulse))
    uz, _, _ = z_correction(u, phi)
    theta = np.angle(np.diag(uz))
    g, b1, a1 = theta[0], theta[1] - theta[0], theta[2] - theta[0]
    phases = np.array([g + (a1 if k == 1 else 0.0) + (b1 if l == 1 else 0.0)
                       for k, l in model.labels])
    d = np.exp(1j * phases)
    chan = lindblad_channel(model, pulse, collapse_ops)
    zsup = np.kron(np.diag(d), np.diag(d.conj()))
    return zsup @ chan.superoperator


@dataclass
class LindbladBackend:
    """Ideal rotations plus Lindblad idling for the pulse durations.

    Each physical single-qubit pulse is modeled as the ideal rotation
    followed by free decay for ``t_pulse_a`` / ``t_pulse_b`` ns; simultaneous
    layers last as long as the longer pulse. The two-qubit gate is a
    precomputed superoperator on ``labels``.
    """

    collapse_ops: list
    gate_superoperator: np.ndarray = None
    labels: tuple = BASE_LABELS
    t_pulse_a: float = 45.0
    t_pulse_b: float = 26.0
    _idle: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_table(cls, table, labels=BASE_LABELS, **kwargs):
        return cls(build_collapse_operators(table, labels), labels=labels, **kwargs)

    def __post_init__(self):
        self._table = clifford_table()
        self._lifted = {q: [embed_single(g.unitary(), q, self.labels) for g in self._table]
                        for q in "AB"}

    def _idle_apply(self, rho, duration):
        if duration <= 0:
            return rho
        if duration not in self._idle:
            self._idle[duration] = idle_channel(self.labels, self.collapse_ops, duration)
        return self._idle[duration].apply(rho)

    def layer(self, rho, ka=None, kb=None):
        duration = 0.0
        u = np.eye(len(self.labels), dtype=complex)
        if ka is not None:
            u = self._lifted["A"][ka] @ u
            duration = max(duration, self.t_pulse_a * self._table[ka].physical_pulse_count)
        if kb is not None:
            u = self._lifted["B"][kb] @ u
            duration = max(duration, self.t_pulse_b * self._table[kb].physical_pulse_count)
        return self._idle_apply(u @ rho @ u.conj().T, duration)

    def gate(self, rho):
        if self.gate_superoperator is None:
            raise ValueError("no two-qubit gate channel configured")
        d = len(self.labels)
        out = (self.gate_superoperator @ rho.reshape(-1)).reshape(d, d)
        return 0.5 * (out + out.conj().T)
