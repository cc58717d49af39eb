"""Single fluxonium circuit: Hamiltonian, spectrum and charge matrix elements.

The circuit Hamiltonian is

    H = 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext)

and is diagonalized in the number basis of the harmonic oscillator formed by
the charging and inductive terms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

#: Extra oscillator states used when building cos(phi) before truncation.
COS_PADDING = 40
#: Step by which the basis grows during the convergence check.
BASIS_STEP = 20
DEFAULT_BASIS_DIM = 80
MAX_BASIS_DIM = 400
ENERGY_TOL = 1e-6


@dataclass(frozen=True)
class FluxoniumSpec:
    """Circuit energies (GHz) and external flux phase (radians)."""

    e_c: float
    e_l: float
    e_j: float
    phi_ext: float = np.pi

    def __post_init__(self):
        if not np.isfinite(self.e_c) or self.e_c <= 0:
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if not np.isfinite(self.e_l) or self.e_l <= 0:
            raise ValueError(f"e_l must be positive, got {self.e_l}")
        if not np.isfinite(self.e_j) or self.e_j < 0:
            raise ValueError(f"e_j must be non-negative, got {self.e_j}")
        if not np.isfinite(self.phi_ext):
            raise ValueError("phi_ext must be finite")


@dataclass(frozen=True, eq=False)
class QubitEigenSystem:
    """Lowest eigenstates of one fluxonium.

    Attributes
    ----------
    energies : ndarray
        Ascending eigenenergies relative to the ground state (GHz).
    charge_op : ndarray
        Complex matrix of the charge operator in the eigenbasis.
    vectors : ndarray
        Eigenvectors in the oscillator basis (columns).
    basis_dim : int
        Oscillator truncation used.
    """

    spec: FluxoniumSpec
    energies: np.ndarray
    charge_op: np.ndarray
    vectors: np.ndarray
    basis_dim: int

    @property
    def n_levels(self):
        return len(self.energies)

    @property
    def charge_elements(self):
        """Magnitudes |<k|n|l>|."""
        return np.abs(self.charge_op)


def _oscillator_operators(spec, dim):
    """Phase and charge operators in the oscillator number basis."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    phi0 = (8.0 * spec.e_c / spec.e_l) ** 0.25
    phi = phi0 * (a + a.T) / np.sqrt(2.0)
    n_op = 1j * (a.T - a) / (np.sqrt(2.0) * phi0)
    return phi, n_op


def hamiltonian(spec, basis_dim=DEFAULT_BASIS_DIM):
    """Return (H, n) in a ``basis_dim`` oscillator basis.

    The cosine is evaluated through the eigendecomposition of phi in a
    padded basis, so the retained block is free of truncation artefacts
    from the matrix function.
    """
    big = basis_dim + COS_PADDING
    phi, n_op = _oscillator_operators(spec, big)
    w, v = np.linalg.eigh(phi)
    cos_term = (v * np.cos(w - spec.phi_ext)) @ v.T
    h = 4.0 * spec.e_c * (n_op @ n_op).real + 0.5 * spec.e_l * (phi @ phi) - spec.e_j * cos_term
    return h[:basis_dim, :basis_dim], n_op[:basis_dim, :basis_dim]


def _solve(spec, n_levels, basis_dim):
    h, n_op = hamiltonian(spec, basis_dim)
    energies, vecs = np.linalg.eigh(h)
    vecs = vecs[:, :n_levels]
    # fix the sign of each eigenvector so matrix elements are reproducible
    pivots = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[pivots, np.arange(n_levels)])
    energies = energies[:n_levels]
    charge = vecs.T @ n_op @ vecs
    return energies - energies[0], charge, vecs


def diagonalize(spec, n_levels=6, basis_dim=DEFAULT_BASIS_DIM, *, max_basis_dim=MAX_BASIS_DIM,
                tol=ENERGY_TOL):
    """Diagonalize a fluxonium and keep its lowest ``n_levels`` states.

    The basis grows in steps of 20 until the retained energies move by less
    than ``tol`` (GHz) between ``basis_dim`` and ``basis_dim + 20``.

    Raises
    ------
    ValueError
        If ``n_levels > basis_dim`` or ``basis_dim < 20``.
    ConvergenceError
        If ``max_basis_dim`` is reached without convergence.
    """
    if basis_dim < 20:
        raise ValueError("basis_dim must be at least 20")
    if n_levels < 1 or n_levels > basis_dim:
        raise ValueError("need 1 <= n_levels <= basis_dim")
    dim = basis_dim
    energies, charge, vecs = _solve(spec, n_levels, dim)
    while True:
        e2, c2, v2 = _solve(spec, n_levels, dim + BASIS_STEP)
        residual = float(np.max(np.abs(e2 - energies)))
        if residual < tol:
            break
        if dim + BASIS_STEP >= max_basis_dim:
            raise ConvergenceError(
                f"fluxonium spectrum not converged at basis_dim={dim + BASIS_STEP}", residual)
        dim += BASIS_STEP
        energies, charge, vecs = e2, c2, v2
    return QubitEigenSystem(spec, energies, charge, vecs, dim)


def _check_index(eig, *idx):
    for i in idx:
        if not 0 <= i < eig.n_levels:
            raise IndexError(f"level {i} outside 0..{eig.n_levels - 1}")


def transition_frequency(eig, k, l):
    """Frequency of the |k> -> |l> transition (GHz), requires k < l."""
    _check_index(eig, k, l)
    if k >= l:
        raise ValueError("transition_frequency needs k < l")
    return float(eig.energies[l] - eig.energies[k])


def charge_matrix_element(eig, k, l):
    """Magnitude of the charge matrix element |<k|n|l>|."""
    _check_index(eig, k, l)
    return float(abs(eig.charge_op[k, l]))
