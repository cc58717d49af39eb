"""Least-squares fit of benchmarking decays to A p^m + B."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from ..errors import FitError

FLAT_TOL = 1e-12


@dataclass(frozen=True)
class DecayFit:
    a: float
    p: float
    b: float
    a_err: float
    p_err: float
    b_err: float

    def curve(self, m):
        return self.a * self.p ** np.asarray(m, dtype=float) + self.b


def _model(m, a, p, b):
    return a * p ** m + b


def fit_exponential_decay(lengths, fidelities, baseline=0.25):
    """Fit A p^m + B.

    Parameters
    ----------
    lengths, fidelities : array_like
        At least four distinct lengths.
    baseline : float
        Initial guess for B: 0.25 for two qubits, 0.5 for one.

    Returns
    -------
    DecayFit
        Parameters with one-sigma uncertainties from the covariance.
        Data that is flat away from the baseline is fit exactly by p = 1
        with B held at ``baseline``.

    Raises
    ------
    FitError
        Too few lengths, flat data at the baseline (p unidentifiable), a
        failed fit, or p outside (0, 1].
    """
    m = np.asarray(lengths, dtype=float)
    f = np.asarray(fidelities, dtype=float)
    if m.shape != f.shape or len(np.unique(m)) < 4:
        raise FitError("need at least four distinct lengths")
    if not np.all(np.isfinite(f)):
        raise FitError("non-finite fidelities")
    if np.ptp(f) < FLAT_TOL:
        if abs(f[0] - baseline) < 1e-9:
            raise FitError("flat data at the baseline; decay constant unidentifiable")
        return DecayFit(float(f[0] - baseline), 1.0, float(baseline), 0.0, 0.0, 0.0)
    # initial p from the log-slope of the excess over the baseline
    excess = np.clip(f - baseline, 1e-12, None)
    order = np.argsort(m)
    slope = np.polyfit(m[order], np.log(excess[order]), 1)[0]
    p0 = float(np.clip(np.exp(slope), 0.05, 1.0 - 1e-9))
    a0 = float(excess[order][0] / p0 ** m[order][0])
    try:
        popt, pcov = curve_fit(_model, m, f, p0=(a0, p0, baseline),
                               bounds=([-np.inf, 0.0, -np.inf], [np.inf, 1.0, np.inf]),
                               xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=10000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"decay fit did not converge: {exc}") from exc
    a, p, b = (float(x) for x in popt)
    if not 0.0 < p <= 1.0:
        raise FitError(f"fitted p = {p} outside (0, 1]")
    errs = np.sqrt(np.clip(np.diag(pcov), 0.0, None))
    if not np.all(np.isfinite(errs)):
        raise FitError("decay fit covariance undefined")
    return DecayFit(a, p, b, *(float(e) for e in errs))


@dataclass
class BenchmarkRecord:
    """Sequence fidelities per length, their decay fit and derived errors."""

    lengths: np.ndarray
    fidelities: np.ndarray
    sequence_fidelities: np.ndarray
    fit: DecayFit
    errors: dict
    metadata: dict

    def to_dict(self):
        return {
            "lengths": [int(m) for m in self.lengths],
            "fidelities": [float(f) for f in self.fidelities],
            "fit": {k: float(v) for k, v in self.fit.__dict__.items()},
            "errors": {k: float(v) for k, v in self.errors.items()},
            "metadata": self.metadata,
        }
