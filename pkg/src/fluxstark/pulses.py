"""Flat-top Gaussian drive envelopes with DRAG and virtual-Z bookkeeping.

The in-phase envelope rises as a shifted, offset-subtracted Gaussian,

    g_x(t) = [exp(-(t - t_rise)^2 / 2 sigma^2) - exp(-t_rise^2 / 2 sigma^2)]
             / [1 - exp(-t_rise^2 / 2 sigma^2)],

stays at 1 for ``t_flat`` and falls symmetrically. The quadrature is
g_y = drag_coeff * dg_x/dt.
"""

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class PulseProgram:
    """Drive pulse parameters.

    Attributes
    ----------
    f_d : float
        Drive frequency (GHz).
    t_rise, t_flat : float
        Edge and plateau durations (ns).
    sigma : float or None
        Gaussian width (ns); ``None`` means t_rise / sqrt(2 pi).
    amplitude : float
        Peak drive amplitude eps_A (GHz).
    drag_coeff : float
        DRAG coefficient (ns).
    eps_ratio : float
        eps_B / eps_A.
    frame_phases : tuple
        Accumulated virtual-Z phases of qubits A and B (radians).
    """

    f_d: float
    t_rise: float
    t_flat: float
    amplitude: float
    drag_coeff: float = 0.0
    eps_ratio: float = 1.3
    sigma: float = None
    frame_phases: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.t_rise > 0:
            raise ValueError("t_rise must be positive")
        if not self.t_flat >= 0:
            raise ValueError("t_flat must be non-negative")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")
        for name in ("f_d", "amplitude", "drag_coeff", "eps_ratio"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def width(self):
        return self.sigma if self.sigma is not None else self.t_rise / np.sqrt(2 * np.pi)

    @property
    def t_gate(self):
        return 2 * self.t_rise + self.t_flat

    def replace(self, **changes):
        return replace(self, **changes)


def _edge(tau, t_rise, sigma):
    """Rising-edge value and derivative at tau in [0, t_rise]."""
    offset = np.exp(-t_rise ** 2 / (2 * sigma ** 2))
    gauss = np.exp(-(tau - t_rise) ** 2 / (2 * sigma ** 2))
    norm = 1.0 - offset
    return (gauss - offset) / norm, -(tau - t_rise) / sigma ** 2 * gauss / norm


def envelope_arrays(p, t):
    """Vectorized (g_x, dg_x/dt) without range checks."""
    t = np.asarray(t, dtype=float)
    tr, tg = p.t_rise, p.t_gate
    rise = t < tr
    fall = t > tr + p.t_flat
    g = np.ones_like(t)
    dg = np.zeros_like(t)
    if np.any(rise):
        g[rise], dg[rise] = _edge(t[rise], tr, p.width)
    if np.any(fall):
        gf, dgf = _edge(tg - t[fall], tr, p.width)
        g[fall], dg[fall] = gf, -dgf
    return g, dg


def sample_envelope(p, t):
    """Envelope quadratures (g_x, g_y) at time(s) ``t`` in [0, t_gate].

    Raises
    ------
    ValueError
        If any time lies outside the pulse.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > p.t_gate):
        raise ValueError(f"time outside [0, {p.t_gate}] ns")
    g, dg = envelope_arrays(p, t_arr)
    gy = p.drag_coeff * dg
    if t_arr.ndim == 0:
        return float(g), float(gy)
    return g, gy


def drive_coefficient(p, t):
    """Scalar lab-frame drive amplitude eps_A [g_x cos + g_y sin](2 pi f_d t)."""
    g, dg = envelope_arrays(p, t)
    ph = 2 * np.pi * p.f_d * np.asarray(t, dtype=float)
    return p.amplitude * (g * np.cos(ph) + p.drag_coeff * dg * np.sin(ph))


def apply_virtual_z(p, qubit, phase):
    """Return a copy of ``p`` with ``phase`` added to the frame of ``qubit``."""
    idx = {"A": 0, "B": 1}[str(qubit).upper()]
    frames = list(p.frame_phases)
    frames[idx] = float(np.mod(frames[idx] + phase, 2 * np.pi))
    return replace(p, frame_phases=tuple(frames))


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]])


def rotation(angle, axis_phase=0.0, frame_phase=0.0):
    """Single-qubit rotation about cos(phi) X + sin(phi) Y in a shifted frame.

    The effective axis is ``axis_phase - frame_phase``, so a pulse played
    after virtual Z(theta) behaves as Z(theta) followed by the rotated pulse.
    """
    phi = axis_phase - frame_phase
    gen = np.cos(phi) * _SX + np.sin(phi) * _SY
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * gen


def z_rotation(angle):
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
