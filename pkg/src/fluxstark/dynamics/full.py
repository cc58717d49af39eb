"""Lab-frame propagation of the driven coupled system.

H(t) = H_static + (eps_A n_A + eps_B n_B)[g_x cos(2 pi f_d t) + g_y sin(2 pi f_d t)]

in the labeled eigenbasis of H_static. Pulse edges are integrated with a
fixed-step classical Runge-Kutta scheme in the interaction picture of
H_static. On the plateau the Hamiltonian is periodic with the drive period,
so the one-period propagator is computed once and raised to a power.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ConvergenceError
from ..pulses import envelope_arrays
from .common import DEFAULT_TOL, MAX_HALVINGS, TWO_PI, EvolutionResult


@njit(cache=True)
def _deriv(y, ph, nmat, c):
    tmp = np.empty_like(y)
    for i in range(y.shape[0]):
        tmp[i, :] = np.conj(ph[i]) * y[i, :]
    out = nmat @ tmp
    for i in range(y.shape[0]):
        out[i, :] *= -1j * c * ph[i]
    return out


@njit(cache=True)
def _rk4_interaction(psi, w, nmat, coef, t0, h, nsteps):
    """RK4 for d psi_I/dt = -i c(t) e^{iwt} N e^{-iwt} psi_I.

    ``coef[j]`` is the angular drive coefficient at t0 + j h / 2.
    """
    y = psi.copy()
    for k in range(nsteps):
        t = t0 + k * h
        ph0 = np.exp(1j * w * t)
        ph1 = np.exp(1j * w * (t + 0.5 * h))
        ph2 = np.exp(1j * w * (t + h))
        k1 = _deriv(y, ph0, nmat, coef[2 * k])
        k2 = _deriv(y + 0.5 * h * k1, ph1, nmat, coef[2 * k + 1])
        k3 = _deriv(y + 0.5 * h * k2, ph1, nmat, coef[2 * k + 1])
        k4 = _deriv(y + h * k3, ph2, nmat, coef[2 * k + 2])
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


@dataclass(frozen=True, eq=False)
class LabFrameModel:
    """Static energies (GHz) and drive operator per unit eps_A."""

    energies: np.ndarray
    drive_operator: np.ndarray
    labels: tuple

    @classmethod
    def from_spectrum(cls, spectrum, eps_ratio):
        return cls(np.asarray(spectrum.energies, dtype=float),
                   np.ascontiguousarray(spectrum.drive_operator(eps_ratio), dtype=complex),
                   tuple(spectrum.labels))

    @property
    def dim(self):
        return len(self.energies)

    def index(self, label):
        return self.labels.index(tuple(label))


def _segment(model, psi_s, t0, duration, h_max, coef_fn):
    """Propagate Schrodinger-picture columns over [t0, t0 + duration]."""
    n = max(1, int(np.ceil(duration / h_max - 1e-9)))
    h = duration / n
    w = TWO_PI * model.energies
    times = t0 + 0.5 * h * np.arange(2 * n + 1)
    coef = TWO_PI * coef_fn(times)
    psi_i = np.exp(1j * w * t0)[:, None] * psi_s
    psi_i = _rk4_interaction(np.ascontiguousarray(psi_i), w, model.drive_operator, coef, t0, h, n)
    return np.exp(-1j * w * (t0 + duration))[:, None] * psi_i


def _pulse_coef(pulse):
    amp, alpha, f_d = pulse.amplitude, pulse.drag_coeff, pulse.f_d

    def coef(t):
        g, dg = envelope_arrays(pulse, t)
        ph = TWO_PI * f_d * t
        return amp * (g * np.cos(ph) + alpha * dg * np.sin(ph))
    return coef


def _cw_coef(amplitude, f_d):
    def coef(t):
        return amplitude * np.cos(TWO_PI * f_d * t)
    return coef


def _periodic(model, psi, t0, duration, f_d, amplitude, h):
    """Constant-envelope segment via powers of the one-period propagator."""
    period = 1.0 / f_d
    n_per = int(np.floor(duration / period + 1e-12))
    rest = duration - n_per * period
    coef = _cw_coef(amplitude, f_d)
    if n_per > 0:
        eye = np.eye(model.dim, dtype=complex)
        u_t = _segment(model, eye, t0, period, h, coef)
        psi = np.linalg.matrix_power(u_t, n_per) @ psi
    if rest > 1e-12:
        # the Hamiltonian is periodic, so the remainder starts at phase t0
        psi = _segment(model, psi, t0, rest, h, coef)
    return psi


def _full_propagator(model, pulse, h, columns):
    psi = np.eye(model.dim, dtype=complex)[:, columns]
    coef = _pulse_coef(pulse)
    tr, tf = pulse.t_rise, pulse.t_flat
    psi = _segment(model, psi, 0.0, tr, h, coef)
    if tf > 0:
        psi = _periodic(model, psi, tr, tf, pulse.f_d, pulse.amplitude, h)
    psi = _segment(model, psi, tr + tf, tr, h, coef)
    return psi


def default_dt(pulse):
    return min(1.0 / (50.0 * pulse.f_d), pulse.t_rise / 200.0)


def _halving_loop(run, h, tol, check, max_halvings, meta):
    u = run(h)
    meta["dt"] = h
    if not check:
        return u
    err = np.inf
    for _ in range(max_halvings):
        h /= 2
        u2 = run(h)
        err = float(np.max(np.abs(u2 - u)))
        u = u2
        if err < tol:
            break
    else:
        raise ConvergenceError(f"propagator not converged at dt={h:.3g} ns (change {err:.2e})",
                               err)
    meta.update(dt=h, accuracy=err)
    return u


def evolve_unitary(system, pulse, *, dt=None, columns=None, tol=DEFAULT_TOL, check=True,
                   max_halvings=MAX_HALVINGS):
    """Lab-frame propagator of a pulse.

    Parameters
    ----------
    system : LabeledSpectrum or LabFrameModel
        A spectrum is combined with ``pulse.eps_ratio`` into the drive operator.
    pulse : PulseProgram
        ``pulse.amplitude`` is eps_A (GHz).
    dt : float, optional
        Initial step, default min(1 / (50 f_d), t_rise / 200).
    columns : sequence of labels, optional
        Initial basis states to propagate; default all states.
    check : bool
        Halve the step until the result changes by less than ``tol``.

    Returns
    -------
    EvolutionResult
        ``operator`` has shape (dim, len(columns)).
    """
    model = system if isinstance(system, LabFrameModel) else \
        LabFrameModel.from_spectrum(system, pulse.eps_ratio)
    cols = list(range(model.dim)) if columns is None else [model.index(c) for c in columns]
    h = default_dt(pulse) if dt is None else dt
    meta = {"model": "lab-frame"}
    u = _halving_loop(lambda step: _full_propagator(model, pulse, step, cols), h, tol, check,
                      max_halvings, meta)
    meta["columns"] = [model.labels[c] for c in cols]
    return EvolutionResult("propagator", u, model.labels, meta)


def evolve_constant_drive(model, f_d, amplitude, duration, *, t0=0.0, dt=None, columns=None,
                          tol=DEFAULT_TOL, check=True, max_halvings=MAX_HALVINGS):
    """Propagator of a continuous drive amplitude * cos(2 pi f_d t) * N."""
    cols = list(range(model.dim)) if columns is None else [model.index(c) for c in columns]
    h = 1.0 / (50.0 * f_d) if dt is None else dt
    meta = {"model": "lab-frame-cw"}

    def run(step):
        psi = np.eye(model.dim, dtype=complex)[:, cols]
        return _periodic(model, psi, t0, duration, f_d, amplitude, step)
    u = _halving_loop(run, h, tol, check, max_halvings, meta)
    meta["columns"] = [model.labels[c] for c in cols]
    return EvolutionResult("propagator", u, model.labels, meta)


def floquet_period_propagator(model, f_d, amplitude, *, dt=None, t0=0.0):
    """One drive period of the continuous-drive propagator (full matrix)."""
    h = 1.0 / (200.0 * f_d) if dt is None else dt
    eye = np.eye(model.dim, dtype=complex)
    return _segment(model, eye, t0, 1.0 / f_d, h, _cw_coef(amplitude, f_d))

