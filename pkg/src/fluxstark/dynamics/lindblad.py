"""Open-system evolution of the rotating-frame model.

d rho/dt = -i 2 pi [H, rho] + sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho} / 2)

Density matrices are vectorized row-major, vec(A rho B) = (A (x) B^T) vec(rho).
Rates are in 1/ns, coherence times in microseconds.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from ..errors import ConvergenceError
from ..pulses import envelope_arrays
from .common import (
    DEFAULT_TOL, MAX_HALVINGS, TWO_PI, EvolutionResult, cf4_mix, cf4_nodes, chain_product,
    edge_steps,
)

RATE_TOL = 1e-6  # 1/ns


@dataclass(frozen=True)
class CoherenceTable:
    """T1 and echo T2 (microseconds) of the transitions entering the model.

    ``a`` is |00>-|10>, ``b`` is |00>-|01>, ``a12`` is |11>-|21> (the
    |1>-|2> transition of qubit A) and ``b12`` the optional |1>-|2> of B.
    ``math.inf`` disables a channel.
    """

    t1_a: float = math.inf
    t2e_a: float = math.inf
    t1_b: float = math.inf
    t2e_b: float = math.inf
    t1_a12: float = math.inf
    t2e_a12: float = math.inf
    t1_b12: float = math.inf
    t2e_b12: float = math.inf

    def __post_init__(self):
        for name in ("a", "b", "a12", "b12"):
            t1, t2 = getattr(self, "t1_" + name), getattr(self, "t2e_" + name)
            if not (t1 > 0 and t2 > 0):
                raise ValueError(f"coherence times of '{name}' must be positive")

    def rates(self, name):
        """(Gamma_1, Gamma_phi) in 1/ns for transition ``name``.

        Gamma_phi = 1/T2E - 1/(2 T1) is clipped at zero when slightly negative.

        Raises
        ------
        ValueError
            If Gamma_phi < -1e-6 / ns.
        """
        t1 = getattr(self, "t1_" + name) * 1e3
        t2 = getattr(self, "t2e_" + name) * 1e3
        g1 = 1.0 / t1
        gphi = 1.0 / t2 - 0.5 * g1
        if gphi < -RATE_TOL:
            raise ValueError(f"negative dephasing rate {gphi:.3e}/ns for '{name}' (T2E > 2 T1)")
        return g1, max(gphi, 0.0)

    def scaled(self, factor):
        """All coherence times multiplied by ``factor``."""
        return CoherenceTable(**{k: v * factor for k, v in self.__dict__.items()})


#: Averages of the measured coherence-time ranges of the main device.
TABLE_I_AVERAGE = CoherenceTable(182.5, 14.5, 128.5, 22.5, 5.55, 3.3)


def _projector(labels, pairs):
    d = len(labels)
    m = np.zeros((d, d), dtype=complex)
    idx = {lab: i for i, lab in enumerate(labels)}
    for ket, bra in pairs:
        if ket in idx and bra in idx:
            m[idx[ket], idx[bra]] = 1.0
    return m


def build_collapse_operators(table, labels):
    """Collapse operators of the rotating-frame model.

    The six operators act on |00>, |01>, |10>, |11>, |20>, |21>; with levels
    |02>, |12> present and B's |1>-|2> times set, two more are appended.
    Zero-rate operators are kept as zero matrices so the list has fixed
    length.
    """
    labels = tuple(tuple(x) for x in labels)
    g1a, gpa = table.rates("a")
    g1b, gpb = table.rates("b")
    g1a12, gpa12 = table.rates("a12")
    ops = [
        np.sqrt(g1a) * _projector(labels, [((0, 0), (1, 0)), ((0, 1), (1, 1))]),
        np.sqrt(g1b) * _projector(labels, [((0, 0), (0, 1)), ((1, 0), (1, 1)), ((2, 0), (2, 1))]),
        np.sqrt(2 * gpa) * _projector(labels, [((0, 0), (0, 0)), ((0, 1), (0, 1))]),
        np.sqrt(2 * gpb) * _projector(labels, [((0, 0), (0, 0)), ((1, 0), (1, 0)),
                                               ((2, 0), (2, 0))]),
        np.sqrt(g1a12) * _projector(labels, [((1, 0), (2, 0)), ((1, 1), (2, 1))]),
        np.sqrt(2 * gpa12) * _projector(labels, [((2, 0), (2, 0)), ((2, 1), (2, 1))]),
    ]
    if (0, 2) in labels or (1, 2) in labels:
        g1b12, gpb12 = table.rates("b12")
        ops.append(np.sqrt(g1b12) * _projector(labels, [((0, 1), (0, 2)), ((1, 1), (1, 2))]))
        ops.append(np.sqrt(2 * gpb12) * _projector(labels, [((0, 2), (0, 2)), ((1, 2), (1, 2))]))
    return ops


def commutator_generator(h):
    """Superoperator of -i 2 pi [H, .]."""
    eye = np.eye(len(h))
    return -1j * TWO_PI * (np.kron(h, eye) - np.kron(eye, h.T))


def dissipator(ops):
    d = len(ops[0]) if ops else 0
    out = np.zeros((d * d, d * d), dtype=complex)
    eye = np.eye(d)
    for op in ops:
        if not np.any(op):
            continue
        ldl = op.conj().T @ op
        out += np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)
    return out


@dataclass
class Channel:
    """Row-major superoperator with its basis labels."""

    superoperator: np.ndarray
    labels: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.labels)

    def apply(self, rho):
        d = self.dim
        return (self.superoperator @ np.asarray(rho, dtype=complex).reshape(-1)).reshape(d, d)


def _generators(model, f_d, ops):
    d, c, s = model.matrices(f_d)
    dim = len(d)
    if ops:
        ops = [np.asarray(o, dtype=complex) for o in ops]
        if any(o.shape != (dim, dim) for o in ops):
            raise ValueError("collapse operators do not match the model dimension")
    g0 = commutator_generator(np.diag(d).astype(complex)) + (dissipator(ops) if ops else 0)
    g1 = commutator_generator(c.astype(complex))
    g2 = commutator_generator(s)
    return g0, g1, g2


def _channel_matrix(g0, g1, g2, pulse, n_edge):
    amp, tr, tf = pulse.amplitude, pulse.t_rise, pulse.t_flat
    h = tr / n_edge

    def edge(t0):
        nodes = cf4_nodes(t0, h, n_edge)
        g, dg = envelope_arrays(pulse, nodes.ravel())
        a = cf4_mix((0.5 * amp * g).reshape(n_edge, 2)).ravel()
        b = cf4_mix((0.5 * amp * pulse.drag_coeff * dg).reshape(n_edge, 2)).ravel()
        gens = h * (0.5 * g0[None] + a[:, None, None] * g1[None] + b[:, None, None] * g2[None])
        return chain_product(expm(gens))

    out = edge(0.0)
    if tf > 0:
        out = expm(tf * (g0 + 0.5 * amp * g1)) @ out
    return edge(tr + tf) @ out


def lindblad_channel(model, pulse, collapse_ops, *, dt=None, tol=DEFAULT_TOL, check=True,
                     max_halvings=MAX_HALVINGS):
    """Superoperator of the whole pulse under the Lindblad equation.

    Edges use fourth-order Magnus steps (default dt = t_rise / 100) and the
    plateau a single exponential. Step halving as in the unitary solvers.
    """
    g0, g1, g2 = _generators(model, pulse.f_d, collapse_ops)
    n = edge_steps(pulse.t_rise, pulse.t_rise / 100.0 if dt is None else dt)
    sup = _channel_matrix(g0, g1, g2, pulse, n)
    meta = {"model": "lindblad-rwa", "steps_per_edge": n}
    if check:
        for _ in range(max_halvings):
            sup2 = _channel_matrix(g0, g1, g2, pulse, 2 * n)
            err = float(np.max(np.abs(sup2 - sup)))
            n *= 2
            sup = sup2
            if err < tol:
                break
        else:
            raise ConvergenceError(f"Lindblad channel not converged (change {err:.2e})", err)
        meta["accuracy"] = err
    meta.update(steps_per_edge=n, dt=pulse.t_rise / n)
    return Channel(sup, model.labels, meta)


def idle_channel(labels, collapse_ops, duration, hamiltonian=None):
    """Channel of free evolution for ``duration`` ns (H defaults to zero)."""
    dim = len(labels)
    gen = dissipator(collapse_ops) if collapse_ops else np.zeros((dim * dim, dim * dim), complex)
    if hamiltonian is not None:
        gen = gen + commutator_generator(np.asarray(hamiltonian, dtype=complex))
    return Channel(expm(duration * gen), tuple(labels), {"duration": duration})


def check_density(rho, tol=1e-8):
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD within tol."""
    rho = np.asarray(rho)
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValueError("density matrix trace differs from 1")
    if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -tol:
        raise ValueError("density matrix has negative eigenvalues")


def evolve_lindblad(model, pulse, collapse_ops, rho0, **kwargs):
    """Final density matrix of ``rho0`` after the pulse.

    The returned result also carries the channel superoperator.
    """
    check_density(rho0)
    chan = lindblad_channel(model, pulse, collapse_ops, **kwargs)
    rho = chan.apply(rho0)
    rho = 0.5 * (rho + rho.conj().T)
    return EvolutionResult("density", rho, model.labels, chan.metadata, chan.superoperator)
