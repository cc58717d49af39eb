"""Gate scores on the computational subspace.

phi_kl = -arg <kl|U|kl>, phi_U = phi_00 + phi_11 - phi_10 - phi_01, and the
phase mismatch to the target is removed with virtual Z rotations before the
fidelity

    F = (Tr[U'^dag U'] + |Tr[U_CP^dag U']|^2) / 20,  U_CP = diag(1, 1, 1, e^{-i phi})

is evaluated. Basis order is |00>, |01>, |10>, |11>.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .dynamics.common import EvolutionResult

COMPUTATIONAL = ((0, 0), (0, 1), (1, 0), (1, 1))
MIN_DIAGONAL = 1e-6


@dataclass
class GateReport:
    u_projected: np.ndarray
    u_corrected: np.ndarray
    phi_accumulated: float
    phi_target: float
    delta_phi: float
    fidelity: float
    phase_error: float
    leakage: float
    incoherent_error: float = None

    @property
    def infidelity(self):
        return 1.0 - self.fidelity

    def to_dict(self):
        """JSON-ready dict; complex matrices become [re, im] pairs."""
        out = asdict(self)
        for key in ("u_projected", "u_corrected"):
            m = np.asarray(out[key])
            out[key] = np.stack([m.real, m.imag], axis=-1).tolist()
        out["infidelity"] = self.infidelity
        return out


def wrap_phase(x):
    """Map to (-pi, pi]."""
    y = np.mod(x + np.pi, 2 * np.pi) - np.pi
    return float(np.where(y == -np.pi, np.pi, y))


def cp_unitary(phi):
    return np.diag([1, 1, 1, np.exp(-1j * phi)])


def computational_block(result):
    """Extract the 4x4 computational block from a result or pass a matrix through."""
    if not isinstance(result, EvolutionResult):
        u = np.asarray(result)
        if u.shape != (4, 4):
            raise ValueError("expected a 4x4 matrix or an EvolutionResult")
        return u
    rows = [result.index(lab) for lab in COMPUTATIONAL]
    cols_meta = result.metadata.get("columns")
    if cols_meta is None:
        cols = rows
    else:
        cols_meta = [tuple(c) for c in cols_meta]
        cols = [cols_meta.index(lab) for lab in COMPUTATIONAL]
    return result.operator[np.ix_(rows, cols)]


def accumulated_phases(u):
    """phi_kl for the four computational states and phi_U."""
    diag = np.diag(u)
    if np.any(np.abs(diag) < MIN_DIAGONAL):
        raise ValueError("vanishing diagonal element; accumulated phase undefined")
    phis = -np.angle(diag)
    return phis, phis[0] + phis[3] - phis[1] - phis[2]


def z_correction(u, phi_target):
    """Virtual-Z operator U_Z and the wrapped phase mismatch."""
    phis, phi_u = accumulated_phases(u)
    dphi = wrap_phase(phi_u - phi_target)
    q = dphi / 4.0
    uz = np.diag(np.exp(1j * np.array([phis[0] - q, phis[1] + q, phis[2] + q,
                                       phis[3] - q - phi_target])))
    return uz, dphi, phi_u


def gate_fidelity(u_prime, phi):
    """(Tr[U'^dag U'] + |Tr[U_CP^dag U']|^2) / 20."""
    u_prime = np.asarray(u_prime)
    ucp = cp_unitary(phi)
    val = (np.trace(u_prime.conj().T @ u_prime).real
           + abs(np.trace(ucp.conj().T @ u_prime)) ** 2) / 20.0
    return float(min(max(val, 0.0), 1.0))


def leakage(u):
    """1 - Tr(U^dag U) / 4, clipped to [0, 1]."""
    u = np.asarray(u)
    val = 1.0 - 0.25 * np.trace(u.conj().T @ u).real
    return float(min(max(val, 0.0), 1.0))


def phase_error(delta_phi):
    return 0.8 * np.sin(delta_phi / 4.0) ** 2


def project_and_phase(result, phi_target):
    """Score a propagator against U_CP(phi_target).

    Raises
    ------
    ValueError
        If a computational diagonal element vanishes.
    """
    u = computational_block(result)
    uz, dphi, phi_u = z_correction(u, phi_target)
    up = uz @ u
    return GateReport(u, up, float(phi_u), float(phi_target), dphi,
                      gate_fidelity(up, phi_target), float(phase_error(dphi)), leakage(u))


def product_states():
    """The 36 products of {|0>, |1>, |+>, |->, |+i>, |-i>} as 4-vectors."""
    s = 1 / np.sqrt(2)
    single = [np.array([1, 0]), np.array([0, 1]), np.array([s, s]), np.array([s, -s]),
              np.array([s, 1j * s]), np.array([s, -1j * s])]
    return [np.kron(a, b).astype(complex) for a in single for b in single]


def incoherent_gate_error(model, pulse, collapse_ops, phi, u_z=None, **kwargs):
    """36-state average of 1 - Tr(rho rho_ideal) under Lindblad evolution.

    Parameters
    ----------
    model : RWAModel
    pulse : PulseProgram
    collapse_ops : list of ndarray
        Operators on the model basis.
    phi : float
        Target phase.
    u_z : ndarray, optional
        Virtual-Z operator; by default computed from the closed-system
        propagator of the same model and pulse.
    """
    from .dynamics.lindblad import lindblad_channel
    from .dynamics.rwa import evolve_rwa

    if u_z is None:
        u_z, _, _ = z_correction(computational_block(evolve_rwa(model, pulse)), phi)
    chan = lindblad_channel(model, pulse, collapse_ops, **kwargs)
    dim = model.dim
    comp = [model.labels.index(lab) for lab in COMPUTATIONAL]
    target = u_z.conj().T @ cp_unitary(phi)
    errs = []
    for psi4 in product_states():
        psi = np.zeros(dim, dtype=complex)
        psi[comp] = psi4
        rho = chan.apply(np.outer(psi, psi.conj()))
        ideal = np.zeros(dim, dtype=complex)
        ideal[comp] = target @ psi4
        errs.append(1.0 - np.real(ideal.conj() @ rho @ ideal))
    return float(np.mean(errs))
