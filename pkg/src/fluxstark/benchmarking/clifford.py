"""Single-qubit Clifford group as sequences of X, Y and virtual Z rotations."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
P, H = np.pi, np.pi / 2

# written as operator products: the rightmost rotation acts first
_TABLE = (
    (),
    (("X", P),), (("Y", P),), (("Z", P),),
    (("X", H),), (("X", -H),), (("Y", H),), (("Y", -H),), (("Z", H),), (("Z", -H),),
    (("Y", H), ("Z", H)), (("Y", -H), ("Z", -H)), (("Y", H), ("Z", -H)), (("Y", -H), ("Z", H)),
    (("X", H), ("Z", -H)), (("X", -H), ("Z", H)), (("X", H), ("Z", H)), (("X", -H), ("Z", -H)),
    (("Z", H), ("X", H), ("Z", H)), (("Z", H), ("X", -H), ("Z", H)),
    (("Z", -H), ("Y", H), ("Z", -H)), (("Z", -H), ("Y", -H), ("Z", -H)),
    (("Z", -H), ("X", P), ("Z", -P)), (("Z", H), ("X", P), ("Z", -P)),
)


def axis_rotation(axis, angle):
    """exp(-i angle sigma_axis / 2)."""
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * _PAULI[axis]


@dataclass(frozen=True)
class CliffordGate:
    """A Clifford element as an operator product of axis rotations.

    Z rotations are virtual and identity is empty, so only X and Y entries
    count as physical pulses.
    """

    decomposition: tuple

    @property
    def physical_pulse_count(self):
        return sum(1 for axis, _ in self.decomposition if axis in "XY")

    @property
    def label(self):
        if not self.decomposition:
            return "I"
        return "".join(f"{a}({ang / np.pi:+g}pi)" for a, ang in self.decomposition)

    def unitary(self):
        u = np.eye(2, dtype=complex)
        for axis, angle in self.decomposition:
            u = u @ axis_rotation(axis, angle)
        return u


def clifford_table():
    """The 24 single-qubit Cliffords used in the benchmarking sequences."""
    return [CliffordGate(d) for d in _TABLE]


def same_up_to_phase(u, v, tol=1e-9):
    """True when u = e^{i a} v for some a (2x2 unitaries)."""
    return abs(abs(np.trace(u.conj().T @ v)) - len(u)) < tol


@lru_cache(maxsize=1)
def _unitaries():
    return np.array([g.unitary() for g in clifford_table()])


def find_clifford(u, tol=1e-9):
    """Index of the table element equal to ``u`` up to global phase.

    Raises
    ------
    ValueError
        If ``u`` is not a Clifford.
    """
    overlaps = np.abs(np.einsum("kij,ij->k", _unitaries().conj(), np.asarray(u)))
    k = int(np.argmax(overlaps))
    if abs(overlaps[k] - 2) > tol:
        raise ValueError("operator is not in the Clifford table")
    return k


@lru_cache(maxsize=1)
def multiplication_table():
    """``table[i, j]`` is the index of U_i U_j."""
    us = _unitaries()
    n = len(us)
    out = np.empty((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            out[i, j] = find_clifford(us[i] @ us[j])
    return out


@lru_cache(maxsize=1)
def inverse_table():
    mult = multiplication_table()
    return np.array([int(np.nonzero(mult[:, i] == 0)[0][0]) for i in range(len(mult))])


def recovery_index(indices):
    """Clifford that undoes the sequence ``indices`` (applied first to last)."""
    mult = multiplication_table()
    total = 0
    for k in indices:
        total = mult[k, total]
    return int(inverse_table()[total])
