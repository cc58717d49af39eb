"""Differential ac-Stark model of the drive-induced ZZ interaction.

A drive near the |10>-|20> and |11>-|21> transitions shifts |10> and |11>
by different amounts, so the ZZ rate changes by

    xi_drive = df(Omega_11-21, delta - Delta) - df(Omega_10-20, delta),
    df(Omega, delta) = (sqrt(Omega^2 + delta^2) - delta) / 2.
"""

from dataclasses import dataclass, replace

import numpy as np

from .coupled import doublet_splitting, static_zz
from .errors import NoRootError

LOWER = ((1, 0), (2, 0))
UPPER = ((1, 1), (2, 1))


@dataclass(frozen=True)
class StarkSetting:
    """Drive seen by the two doublets (all rates in GHz)."""

    omega_upper: float
    omega_lower: float
    delta: float
    splitting: float
    static_zz: float = 0.0

    def __post_init__(self):
        if self.omega_upper < 0 or self.omega_lower < 0:
            raise ValueError("Rabi frequencies must be non-negative")

    @property
    def ratio(self):
        """Omega_11-21 / Omega_10-20."""
        return self.omega_upper / self.omega_lower if self.omega_lower else np.inf

    def with_upper(self, omega_upper):
        """Rescale both Rabi frequencies at fixed ratio."""
        scale = omega_upper / self.omega_upper if self.omega_upper else 0.0
        return replace(self, omega_upper=omega_upper, omega_lower=self.omega_lower * scale)


def stark_shift(omega, detuning):
    """Shift of the computational state of a driven two-level pair, GHz.

    (sqrt(Omega^2 + delta^2) - delta) / 2 for blue detuning; the square
    root takes the sign of ``detuning`` so that red detuning follows the
    adiabatically connected branch as well.
    """
    omega = np.asarray(omega, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    sign = np.where(detuning < 0, -1.0, 1.0)
    out = 0.5 * (sign * np.hypot(omega, detuning) - detuning)
    return out if out.ndim else float(out)


def induced_zz_analytic(s):
    """Drive-induced ZZ rate from the closed form, GHz."""
    return (stark_shift(s.omega_upper, s.delta - s.splitting)
            - stark_shift(s.omega_lower, s.delta))


def total_zz_analytic(s):
    return s.static_zz + induced_zz_analytic(s)


def setting_from_spectrum(spectrum, f_d, omega_upper, eps_ratio, splitting=None):
    """Build a StarkSetting for drive frequency ``f_d`` on a labeled spectrum.

    The Rabi ratio follows from the charge matrix elements with
    eps_B / eps_A = ``eps_ratio``. ``splitting`` overrides the spectral Delta.
    """
    drive = spectrum.drive_operator(eps_ratio)
    n_up = abs(drive[spectrum.index(UPPER[0]), spectrum.index(UPPER[1])])
    n_lo = abs(drive[spectrum.index(LOWER[0]), spectrum.index(LOWER[1])])
    delta = f_d - spectrum.transition(*LOWER)
    if splitting is None:
        splitting = doublet_splitting(spectrum)
    return StarkSetting(omega_upper, omega_upper * n_lo / n_up, delta, splitting,
                        static_zz(spectrum))


def solve_cancellation_amplitude(s, tol=1e-12):
    """Omega_11-21 at which static and drive-induced ZZ cancel (GHz).

    Bisection over [0, delta] at fixed Omega_11-21 / Omega_10-20 ratio on
    the blue-detuned branch. ``s.omega_upper`` only fixes the ratio.

    Raises
    ------
    NoRootError
        If the configuration has no sign change in the bracket.
    """
    if s.static_zz == 0:
        return 0.0
    if not (s.delta > s.splitting > 0):
        raise NoRootError("cancellation needs delta > Delta > 0 (blue-detuned branch)")
    ratio = s.ratio
    if not np.isfinite(ratio) or ratio <= 0:
        raise NoRootError("Rabi ratio must be positive and finite")

    def total(om):
        return s.static_zz + (stark_shift(om, s.delta - s.splitting)
                              - stark_shift(om / ratio, s.delta))

    lo, hi = 0.0, s.delta
    f_lo, f_hi = total(lo), total(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoRootError(f"no root in [0, {hi:.4g}] GHz: total ZZ {f_lo:.3e} -> {f_hi:.3e}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = total(mid)
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rwa_block_shift(omega, detuning):
    """Exact shift of the computational state in a driven two-level block.

    The block [[0, omega/2], [omega/2, -detuning]] is diagonalized and the
    eigenvalue adiabatically connected to the computational state (the one
    with the larger weight on it) is returned.
    """
    h = np.array([[0.0, omega / 2], [omega / 2, -detuning]])
    w, v = np.linalg.eigh(h)
    return float(w[np.argmax(np.abs(v[0]))])


def rwa_quasi_zz(s):
    """Drive-induced ZZ from the eigenvalues of the RWA blocks, GHz."""
    return (rwa_block_shift(s.omega_upper, s.delta - s.splitting)
            - rwa_block_shift(s.omega_lower, s.delta))


def dressing_parameter(omega_upper, f_d, f_upper):
    """lambda = Omega_11-21 / |f_d - f(11-21)|."""
    return omega_upper / abs(f_d - f_upper)


def dressed_dephasing_rate(lam, gamma1_12):
    """Extra dephasing rate of the dressed |11> state, lambda^2 Gamma_1 / 8."""
    if lam < 0 or gamma1_12 < 0:
        raise ValueError("lambda and gamma1_12 must be non-negative")
    return lam ** 2 * gamma1_12 / 8.0


def zz_map(spectrum, f_d_values, omega_upper_values, eps_ratio, splitting=None):
    """Total analytic ZZ rate on a (f_d, Omega_11-21) grid.

    Returns rows (f_d, omega_upper, xi_total) in GHz.
    """
    rows = []
    for f_d in np.atleast_1d(f_d_values):
        base = setting_from_spectrum(spectrum, float(f_d), 1.0, eps_ratio, splitting)
        for om in np.atleast_1d(omega_upper_values):
            s = base.with_upper(float(om))
            rows.append((float(f_d), float(om), s.static_zz + rwa_quasi_zz(s)))
    return rows
