"""Bounded Nelder-Mead simplex minimization."""

from dataclasses import dataclass

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass
class NMResult:
    x: np.ndarray
    fun: float
    nit: int
    nfev: int
    converged: bool
    message: str


def initial_simplex(x0, rel_step=0.05, abs_floor=1e-4, steps=None):
    """Simplex of x0 plus one vertex per coordinate.

    Each coordinate moves by ``rel_step`` times its value, at least
    ``abs_floor``; explicit per-coordinate ``steps`` override both.
    """
    x0 = np.asarray(x0, dtype=float)
    if steps is None:
        steps = np.maximum(np.abs(x0) * rel_step, abs_floor)
    steps = np.broadcast_to(np.asarray(steps, dtype=float), x0.shape)
    simplex = np.tile(x0, (len(x0) + 1, 1))
    for i in range(len(x0)):
        simplex[i + 1, i] += steps[i]
    return simplex, steps


def nelder_mead_minimize(fun, x0, *, bounds=None, rel_step=0.05, abs_floor=1e-4, steps=None,
                         xatol=1e-8, fatol=1e-10, max_iter=2000, f_target=None, callback=None):
    """Minimize ``fun`` with the Nelder-Mead simplex method.

    Coefficients are 1 (reflection), 2 (expansion), 0.5 (contraction) and
    0.5 (shrink). Trial points are projected into ``bounds``. The search
    stops when the simplex diameter, measured in units of the initial
    steps, drops below ``xatol``, when the spread of vertex values drops
    below ``fatol``, when the best value reaches ``f_target``, or after
    ``max_iter`` iterations.

    Returns
    -------
    NMResult
        ``converged`` is False when the iteration budget ran out; the best
        point found is returned either way and is never worse than x0.

    Raises
    ------
    ValueError
        If the objective returns NaN.
    """
    x0 = np.asarray(x0, dtype=float)
    if bounds is not None:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
        if np.any(lo > hi):
            raise ValueError("lower bound above upper bound")
    else:
        lo = np.full(x0.shape, -np.inf)
        hi = np.full(x0.shape, np.inf)
    x0 = np.clip(x0, lo, hi)
    simplex, scale = initial_simplex(x0, rel_step, abs_floor, steps)
    # vertices pushed through a bound flip to the other side of x0
    for i in range(len(x0)):
        v = simplex[i + 1]
        if v[i] > hi[i]:
            v[i] = x0[i] - scale[i]
        v[i] = min(max(v[i], lo[i]), hi[i])
    nfev = 0

    def evaluate(x):
        nonlocal nfev
        nfev += 1
        val = float(fun(x))
        if np.isnan(val):
            raise ValueError(f"objective returned NaN at {x}")
        return val

    def project(x):
        return np.clip(x, lo, hi)

    fvals = np.array([evaluate(v) for v in simplex])
    nit = 0
    message = "maximum iterations reached"
    converged = False
    while nit < max_iter:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        diameter = np.max(np.abs((simplex[1:] - simplex[0]) / scale))
        if f_target is not None and fvals[0] <= f_target:
            message, converged = "target value reached", True
            break
        if fvals[-1] - fvals[0] < fatol:
            message, converged = "function spread below tolerance", True
            break
        if diameter < xatol:
            message, converged = "simplex diameter below tolerance", True
            break
        nit += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = project(centroid + REFLECT * (centroid - worst))
        fr = evaluate(xr)
        if fr < fvals[0]:
            xe = project(centroid + EXPAND * (xr - centroid))
            fe = evaluate(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = project(centroid + CONTRACT * (xr - centroid))
                fc = evaluate(xc)
                accept = fc <= fr
            else:
                xc = project(centroid + CONTRACT * (worst - centroid))
                fc = evaluate(xc)
                accept = fc < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, len(simplex)):
                    simplex[i] = project(simplex[0] + SHRINK * (simplex[i] - simplex[0]))
                    fvals[i] = evaluate(simplex[i])
        if callback is not None:
            callback(simplex[np.argmin(fvals)], float(np.min(fvals)))
    best = int(np.argmin(fvals))
    return NMResult(simplex[best].copy(), float(fvals[best]), nit, nfev, converged, message)
