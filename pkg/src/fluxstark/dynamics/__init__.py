"""Closed- and open-system time evolution of the driven two-fluxonium system."""

from .common import EvolutionResult
from .full import LabFrameModel, evolve_constant_drive, evolve_unitary
from .lindblad import (
    TABLE_I_AVERAGE, Channel, CoherenceTable, build_collapse_operators, evolve_lindblad,
    idle_channel, lindblad_channel,
)
from .rwa import ExtraLevel, RWAModel, evolve_rwa

__all__ = [
    "TABLE_I_AVERAGE", "Channel", "CoherenceTable", "EvolutionResult", "ExtraLevel",
    "LabFrameModel", "RWAModel", "build_collapse_operators", "evolve_constant_drive",
    "evolve_lindblad", "evolve_rwa", "evolve_unitary", "idle_channel", "lindblad_channel",
]
