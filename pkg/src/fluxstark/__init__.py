"""Simulation and calibration of microwave-activated controlled-phase gates
between capacitively coupled fluxonium qubits.

Units: energies and frequencies in GHz (h = 1), times in ns, phases in radians.
"""

__version__ = "0.1.0"

from .spectrum import (  # noqa: F401
    FluxoniumSpec,
    QubitEigenSystem,
    diagonalize,
    transition_frequency,
    charge_matrix_element,
)
from .coupled import (  # noqa: F401
    CoupledSpec,
    LabeledSpectrum,
    assemble_and_label,
    static_zz,
    doublet_splitting,
    rabi_frequency,
)
from .pulses import PulseProgram, sample_envelope, apply_virtual_z  # noqa: F401
