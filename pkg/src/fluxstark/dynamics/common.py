"""Shared pieces of the time-evolution code.

Piecewise evolution uses the fourth-order commutator-free Magnus scheme
(two exponentials per step at the Gauss-Legendre nodes). It is unitary for
Hermitian generators and fourth order for any linear ODE.
"""

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi
_R3 = np.sqrt(3.0)
#: Gauss-Legendre nodes on [0, 1].
GAUSS_NODES = (0.5 - _R3 / 6.0, 0.5 + _R3 / 6.0)
#: Node weights of the earlier exponential; the later one uses the reversed pair.
CF4_WEIGHTS = (0.25 + _R3 / 6.0, 0.25 - _R3 / 6.0)

DEFAULT_TOL = 1e-8
MAX_HALVINGS = 4


@dataclass
class EvolutionResult:
    """Outcome of a time evolution.

    Attributes
    ----------
    kind : str
        ``"propagator"`` or ``"density"``.
    operator : ndarray
        Propagator (or its selected columns) or final density matrix.
    labels : tuple
        Product labels of the basis states.
    metadata : dict
        Step size, step count, step-halving accuracy estimate and friends.
    superoperator : ndarray, optional
        Row-major vectorized channel for density evolutions.
    """

    kind: str
    operator: np.ndarray
    labels: tuple
    metadata: dict = field(default_factory=dict)
    superoperator: np.ndarray = None

    def index(self, label):
        return self.labels.index(tuple(label))

    def unitarity_error(self):
        u = self.operator
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def cf4_nodes(t0, h, n):
    """Gauss-node times of ``n`` steps of size ``h`` from ``t0``: shape (n, 2)."""
    starts = t0 + h * np.arange(n)
    return starts[:, None] + h * np.asarray(GAUSS_NODES)[None, :]


def cf4_mix(values):
    """Combine node values (n, 2) into the two exponent weights per step.

    Returns an array (n, 2) whose column 0 is the earlier exponential.
    """
    w1, w2 = CF4_WEIGHTS
    first = w1 * values[:, 0] + w2 * values[:, 1]
    second = w2 * values[:, 0] + w1 * values[:, 1]
    return np.stack([first, second], axis=1)


def chain_product(mats):
    """Time-ordered product M[n-1] @ ... @ M[0] by pairwise reduction."""
    mats = np.asarray(mats)
    if len(mats) == 0:
        raise ValueError("empty chain")
    while len(mats) > 1:
        if len(mats) % 2:
            last = mats[-1:]
            mats = np.concatenate([mats[1:-1:2] @ mats[0:-1:2], last])
        else:
            mats = mats[1::2] @ mats[0::2]
    return mats[0]


def edge_steps(duration, dt):
    return max(1, int(np.ceil(duration / dt - 1e-9)))
