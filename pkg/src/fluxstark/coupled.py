"""Two capacitively coupled fluxoniums with product-state labeling.

The static Hamiltonian is built in the product of the single-qubit
eigenbases,

    H = H_A (x) 1 + 1 (x) H_B + J_C n_A (x) n_B,

and every coupled eigenstate gets the label |kl> of the uncoupled product
state it overlaps most with.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LabelingError
from .spectrum import DEFAULT_BASIS_DIM, FluxoniumSpec, diagonalize

DEFAULT_LEVELS = 6
OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class CoupledSpec:
    qubit_a: FluxoniumSpec
    qubit_b: FluxoniumSpec
    j_c: float
    levels_per_qubit: int = DEFAULT_LEVELS
    basis_dim: int = DEFAULT_BASIS_DIM

    def __post_init__(self):
        if not np.isfinite(self.j_c):
            raise ValueError("j_c must be a finite real number")
        if self.levels_per_qubit < 4:
            raise ValueError("levels_per_qubit must be at least 4")


@dataclass(frozen=True, eq=False)
class LabeledSpectrum:
    """Coupled eigenstates sorted by product label.

    State ``i`` carries label ``labels[i] = (k, l)`` with ``i = k * L + l``.
    Energies are in GHz relative to |00>.
    """

    spec: CoupledSpec
    labels: tuple
    energies: np.ndarray
    vectors: np.ndarray
    charge_a: np.ndarray
    charge_b: np.ndarray
    overlap_quality: np.ndarray

    @property
    def levels_per_qubit(self):
        return self.spec.levels_per_qubit

    @property
    def dim(self):
        return len(self.energies)

    def index(self, label):
        k, l = label
        n = self.levels_per_qubit
        if not (0 <= k < n and 0 <= l < n):
            raise KeyError(f"label |{k}{l}> not in spectrum")
        return k * n + l

    def energy(self, label):
        return float(self.energies[self.index(label)])

    def transition(self, lower, upper):
        """Frequency of lower -> upper (GHz, signed)."""
        return self.energy(upper) - self.energy(lower)

    def drive_operator(self, eps_ratio):
        """n_A + eps_ratio * n_B in the labeled eigenbasis."""
        return self.charge_a + eps_ratio * self.charge_b

    @property
    def states(self):
        return [(lab, float(e), self.vectors[:, i])
                for i, (lab, e) in enumerate(zip(self.labels, self.energies))]


def parse_label(label):
    """Accept (k, l) tuples or strings like '11' / '|11>'."""
    if isinstance(label, str):
        s = label.strip().strip("|>").strip()
        if len(s) != 2 or not s.isdigit():
            raise ValueError(f"cannot parse label {label!r}")
        return int(s[0]), int(s[1])
    k, l = label
    return int(k), int(l)


def assemble_and_label(spec):
    """Diagonalize the coupled Hamiltonian and label its eigenstates.

    Labels come from a maximum-overlap assignment that is injective by
    construction; the assignment fails loudly if any overlap is at most 0.5.

    Raises
    ------
    LabelingError
        With the offending overlaps.
    """
    n = spec.levels_per_qubit
    qa = diagonalize(spec.qubit_a, n, spec.basis_dim)
    qb = diagonalize(spec.qubit_b, n, spec.basis_dim)
    eye = np.eye(n)
    na = np.kron(qa.charge_op, eye)
    nb = np.kron(eye, qb.charge_op)
    h = (np.kron(np.diag(qa.energies), eye) + np.kron(eye, np.diag(qb.energies))
         + spec.j_c * np.kron(qa.charge_op, qb.charge_op))
    energies, vecs = np.linalg.eigh(h)
    weights = np.abs(vecs) ** 2  # [product state, eigenstate]
    rows, cols = linear_sum_assignment(-weights)
    quality = weights[rows, cols]
    bad = quality <= OVERLAP_THRESHOLD
    if np.any(bad):
        offenders = {f"|{r // n}{r % n}>": float(q) for r, q in zip(rows[bad], quality[bad])}
        raise LabelingError(f"ambiguous labels, max overlaps {offenders}", offenders)
    energies = energies[cols]
    vecs = vecs[:, cols]
    # phase convention: the dominant product component is real positive
    lead = vecs[rows, np.arange(len(rows))]
    vecs = vecs * (np.abs(lead) / lead)
    energies = energies - energies[0]
    labels = tuple((r // n, r % n) for r in rows)
    charge_a = vecs.conj().T @ na @ vecs
    charge_b = vecs.conj().T @ nb @ vecs
    return LabeledSpectrum(spec, labels, energies, vecs, charge_a, charge_b, quality)


def static_zz(spectrum):
    """Static ZZ rate (E11 + E00 - E10 - E01), GHz."""
    e = spectrum.energy
    return e((1, 1)) + e((0, 0)) - e((1, 0)) - e((0, 1))


def doublet_splitting(spectrum, doublet=(((1, 0), (2, 0)), ((1, 1), (2, 1)))):
    """Difference of two transition frequencies, f(second) - f(first), GHz.

    The default pair gives Delta = f(11-21) - f(10-20).
    """
    (a0, a1), (b0, b1) = [(parse_label(x), parse_label(y)) for x, y in doublet]
    return spectrum.transition(b0, b1) - spectrum.transition(a0, a1)


def rabi_frequency(spectrum, eps_a, eps_b, frm, to):
    """On-resonance Rabi frequency |<frm|(eps_a n_A + eps_b n_B)|to>| (GHz)."""
    i = spectrum.index(parse_label(frm))
    j = spectrum.index(parse_label(to))
    return float(abs(eps_a * spectrum.charge_a[i, j] + eps_b * spectrum.charge_b[i, j]))


def spectrum_table(spectrum, eps_a=0.0, eps_b=0.0, max_frequency=None):
    """Rows (lower, upper, frequency GHz, Omega GHz) for all upward transitions."""
    rows = []
    for i, lo in enumerate(spectrum.labels):
        for j, hi in enumerate(spectrum.labels):
            f = spectrum.energies[j] - spectrum.energies[i]
            if f <= 0 or (max_frequency is not None and f > max_frequency):
                continue
            om = abs(eps_a * spectrum.charge_a[i, j] + eps_b * spectrum.charge_b[i, j])
            rows.append((f"{lo[0]}{lo[1]}", f"{hi[0]}{hi[1]}", float(f), float(om)))
    rows.sort(key=lambda r: r[2])
    return rows
