"""Two-qubit readout-error model and its calibration from Rabi traces.

Populations are ordered (gg, ge, eg, ee) with the first letter for qubit A.
Measured populations are p' = M p with

    M = [[1-a1-b1, b2,           a2,           0      ],
         [b1,      1-a1-b2-c1,   c2,           a2     ],
         [a1,      c1,           1-a2-b1-c2,   b2     ],
         [0,       a1,           b1,           1-a2-b2]]
"""

from dataclasses import astuple, dataclass

import numpy as np
from scipy.optimize import least_squares

from ..errors import FitError

VIOLATION_MARGIN = 0.05


@dataclass(frozen=True)
class ReadoutParams:
    a1: float = 0.0
    a2: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self):
        for name, v in zip("a1 a2 b1 b2 c1 c2".split(), astuple(self)):
            if not 0.0 <= v < 0.5:
                raise ValueError(f"readout parameter {name}={v} outside [0, 0.5)")


def error_matrix(params):
    a1, a2, b1, b2, c1, c2 = astuple(params)
    return np.array([
        [1 - a1 - b1, b2, a2, 0.0],
        [b1, 1 - a1 - b2 - c1, c2, a2],
        [a1, c1, 1 - a2 - b1 - c2, b2],
        [0.0, a1, b1, 1 - a2 - b2],
    ])


def apply_readout(populations, params):
    return error_matrix(params) @ np.asarray(populations, dtype=float)


def readout_correct(measured, params):
    """Undo the readout errors: M^-1 p', renormalized to unit sum.

    Raises
    ------
    ValueError
        If ``measured`` does not sum to 1, M is singular, or a corrected
        population falls outside [-0.05, 1.05].
    """
    p = np.asarray(measured, dtype=float)
    if p.shape != (4,) or abs(p.sum() - 1.0) > 1e-6:
        raise ValueError("measured populations must be a 4-vector summing to 1")
    m = error_matrix(params)
    if abs(np.linalg.det(m)) < 1e-12:
        raise ValueError("readout error matrix is singular")
    out = np.linalg.solve(m, p)
    out /= out.sum()
    if np.any(out < -VIOLATION_MARGIN) or np.any(out > 1 + VIOLATION_MARGIN):
        raise ValueError(f"corrected populations {out} violate the readout model")
    return out


def product_populations(p_ground_a, p_ground_b):
    return np.array([p_ground_a * p_ground_b, p_ground_a * (1 - p_ground_b),
                     (1 - p_ground_a) * p_ground_b, (1 - p_ground_a) * (1 - p_ground_b)])


def rabi_populations(angles, qubit, p_ground_a, p_ground_b):
    """True populations of a Rabi scan on ``qubit`` with the other qubit in |+>.

    The rotated qubit starts with ground population ``p_ground_*``; the
    other one is rotated by pi/2 and sits at 1/2 whatever its start.
    """
    angles = np.asarray(angles, dtype=float)
    p0 = p_ground_a if qubit == "A" else p_ground_b
    rotated = 0.5 + (p0 - 0.5) * np.cos(angles)
    if qubit == "A":
        return np.stack([product_populations(g, 0.5) for g in rotated])
    if qubit == "B":
        return np.stack([product_populations(0.5, g) for g in rotated])
    raise ValueError("qubit must be 'A' or 'B'")


def calibrate_readout(angles, measured_a, measured_b, guess=None, p_ground=None):
    """Fit the six error parameters and the two ground populations.

    The two Rabi scans leave one combination of the ground populations and
    the flip errors a1, a2, b1, b2 unresolved: any point along it reproduces
    the data exactly. Passing ``p_ground`` (for example from a heralded
    initialization) fixes the populations and removes the degeneracy.

    Parameters
    ----------
    angles : array_like
        Rabi rotation angles (radians).
    measured_a, measured_b : ndarray, shape (len(angles), 4)
        Measured populations of the Rabi scans on A and on B.

    Returns
    -------
    params : ReadoutParams
    p_ground : tuple
        Fitted (or the given) (p_gA, p_gB) at the start of the scans.

    Raises
    ------
    FitError
        If the least-squares fit fails.
    """
    measured_a = np.asarray(measured_a, dtype=float)
    measured_b = np.asarray(measured_b, dtype=float)
    x0 = np.array(guess if guess is not None else [0.02] * 6 + [0.9, 0.9], dtype=float)
    n_free = 6 if p_ground is not None else 8
    x0 = x0[:n_free]

    def residual(x):
        m = error_matrix(_unchecked(x[:6]))
        ga, gb = p_ground if p_ground is not None else x[6:8]
        ra = rabi_populations(angles, "A", ga, gb) @ m.T - measured_a
        rb = rabi_populations(angles, "B", ga, gb) @ m.T - measured_b
        return np.concatenate([ra.ravel(), rb.ravel()])

    lo = ([0.0] * 6 + [0.0, 0.0])[:n_free]
    hi = ([0.499] * 6 + [1.0, 1.0])[:n_free]
    res = least_squares(residual, np.clip(x0, lo, hi), bounds=(lo, hi), xtol=1e-14, ftol=1e-14)
    if not res.success:
        raise FitError(f"readout calibration failed: {res.message}")
    ground = tuple(p_ground) if p_ground is not None else (float(res.x[6]), float(res.x[7]))
    return ReadoutParams(*(float(v) for v in res.x[:6])), ground


def _unchecked(values):
    par = object.__new__(ReadoutParams)
    for name, v in zip("a1 a2 b1 b2 c1 c2".split(), values):
        object.__setattr__(par, name, float(v))
    return par
