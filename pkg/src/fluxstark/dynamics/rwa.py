"""Rotating-frame model of the driven |1x> - |2x> doublets.

Basis order: |00>, |01>, |10>, |11>, |20>, |21>, then optional extra levels
(for example |02>, |12>). In the frame rotating with the drive,

    H/h = -delta |20><20| - (delta - Delta) |21><21|
          + (Omega_l/2)[(g_x - i g_y)|10><20| + h.c.]
          + (Omega_u/2)[(g_x - i g_y)|11><21| + h.c.]

optionally with the static ZZ rate added to |11> and |21> (and to any
extra level whose parent carries it).
"""

from dataclasses import dataclass

import numpy as np

from ..coupled import doublet_splitting, static_zz as spectrum_zz
from ..errors import ConvergenceError
from ..pulses import envelope_arrays
from .common import (
    DEFAULT_TOL, MAX_HALVINGS, TWO_PI, EvolutionResult, cf4_mix, cf4_nodes, chain_product,
    edge_steps,
)

BASE_LABELS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1))
COMPUTATIONAL = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class ExtraLevel:
    """Additional level reached from a computational ``parent`` by the drive.

    ``frequency`` is the parent -> level transition (GHz) and ``coupling``
    the Rabi frequency per unit amplitude.
    """

    label: tuple
    parent: tuple
    frequency: float
    coupling: float


@dataclass(frozen=True)
class RWAModel:
    """Parameters of the rotating-frame model.

    ``coupling_lower`` and ``coupling_upper`` convert the pulse amplitude into
    Omega_10-20 and Omega_11-21. ``f_lower`` is f(10-20), ``f_upper`` f(11-21).
    """

    f_lower: float
    f_upper: float
    coupling_lower: float
    coupling_upper: float
    static_zz: float = 0.0
    extra_levels: tuple = ()

    @property
    def splitting(self):
        return self.f_upper - self.f_lower

    @property
    def labels(self):
        return BASE_LABELS + tuple(tuple(x.label) for x in self.extra_levels)

    @property
    def dim(self):
        return len(self.labels)

    @classmethod
    def from_stark(cls, f_lower, delta_splitting, ratio, static_zz=0.0):
        """Model in which the pulse amplitude equals Omega_11-21 directly."""
        return cls(f_lower, f_lower + delta_splitting, 1.0 / ratio, 1.0, static_zz)

    @classmethod
    def from_spectrum(cls, spectrum, eps_ratio, include_static_zz=True, extra=()):
        """Derive detunings and couplings from a labeled spectrum.

        ``extra`` lists (parent, level) label pairs to add, e.g.
        (((0, 1), (0, 2)), ((1, 1), (1, 2))).
        """
        drive = spectrum.drive_operator(eps_ratio)

        def coupling(a, b):
            return float(abs(drive[spectrum.index(a), spectrum.index(b)]))

        f_lower = spectrum.transition((1, 0), (2, 0))
        f_upper = f_lower + doublet_splitting(spectrum)
        levels = tuple(ExtraLevel(tuple(b), tuple(a), spectrum.transition(a, b), coupling(a, b))
                       for a, b in extra)
        return cls(f_lower, f_upper, coupling((1, 0), (2, 0)), coupling((1, 1), (2, 1)),
                   spectrum_zz(spectrum) if include_static_zz else 0.0, levels)

    def matrices(self, f_d):
        """Diagonal D, coupling C and quadrature S for drive frequency f_d.

        H = diag(D) + (amp g_x / 2) C + (amp g_y / 2) S.
        """
        labels = self.labels
        idx = {lab: i for i, lab in enumerate(labels)}
        d = np.zeros(self.dim)
        d[idx[(1, 1)]] = self.static_zz
        d[idx[(2, 0)]] = -(f_d - self.f_lower)
        d[idx[(2, 1)]] = -(f_d - self.f_upper) + self.static_zz
        pairs = [((1, 0), (2, 0), self.coupling_lower), ((1, 1), (2, 1), self.coupling_upper)]
        for lev in self.extra_levels:
            d[idx[tuple(lev.label)]] = d[idx[tuple(lev.parent)]] - (f_d - lev.frequency)
            pairs.append((tuple(lev.parent), tuple(lev.label), lev.coupling))
        c = np.zeros((self.dim, self.dim))
        s = np.zeros((self.dim, self.dim), dtype=complex)
        for a, b, n in pairs:
            i, j = idx[a], idx[b]
            c[i, j] = c[j, i] = n
            s[i, j] = -1j * n
            s[j, i] = 1j * n
        return d, c, s

    def hamiltonian(self, f_d, amplitude, g_x=1.0, g_y=0.0):
        d, c, s = self.matrices(f_d)
        return np.diag(d) + 0.5 * amplitude * (g_x * c + g_y * s)


def _blocks(c):
    """Connected components of the coupling graph, as sorted index lists."""
    n = len(c)
    seen = [False] * n
    out = []
    for i in range(n):
        if seen[i]:
            continue
        stack, comp = [i], []
        seen[i] = True
        while stack:
            k = stack.pop()
            comp.append(k)
            for j in np.nonzero(c[k])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        out.append(sorted(comp))
    return out


def _exp_blocks(h_stack, theta):
    """exp(-i theta H) for a stack of Hermitian matrices (n, m, m)."""
    m = h_stack.shape[-1]
    if m == 1:
        return np.exp(-1j * theta * h_stack)
    if m == 2:
        p = h_stack[:, 0, 0].real
        r = h_stack[:, 1, 1].real
        q = h_stack[:, 0, 1]
        mean = 0.5 * (p + r)
        vz = 0.5 * (p - r)
        om = np.sqrt(vz ** 2 + np.abs(q) ** 2)
        cs = np.cos(theta * om)
        sn = theta * np.sinc(theta * om / np.pi)  # sin(theta om) / om
        ph = np.exp(-1j * theta * mean)
        out = np.empty(h_stack.shape, dtype=complex)
        out[:, 0, 0] = ph * (cs - 1j * sn * vz)
        out[:, 1, 1] = ph * (cs + 1j * sn * vz)
        out[:, 0, 1] = ph * (-1j * sn * q)
        out[:, 1, 0] = ph * (-1j * sn * np.conj(q))
        return out
    w, v = np.linalg.eigh(h_stack)
    return (v * np.exp(-1j * theta * w)[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _edge_product(blocks, d, c, s, amp, pulse, t0, h, n):
    """Block propagators of one pulse edge via fourth-order Magnus steps."""
    nodes = cf4_nodes(t0, h, n)
    g, dg = envelope_arrays(pulse, nodes.ravel())
    a = cf4_mix((0.5 * amp * g).reshape(n, 2))
    b = cf4_mix((0.5 * amp * pulse.drag_coeff * dg).reshape(n, 2))
    a = a.ravel()  # time ordered: step0-first, step0-second, step1-first, ...
    b = b.ravel()
    out = []
    for blk in blocks:
        ix = np.ix_(blk, blk)
        hs = (0.5 * np.diag(d[blk])[None] + a[:, None, None] * c[ix][None]
              + b[:, None, None] * s[ix][None])
        out.append(chain_product(_exp_blocks(hs, TWO_PI * h)))
    return out


def _assemble(blocks, mats, dim):
    u = np.zeros((dim, dim), dtype=complex)
    for blk, m in zip(blocks, mats):
        u[np.ix_(blk, blk)] = m
    return u


def _rwa_propagator(model, pulse, n_edge):
    d, c, s = model.matrices(pulse.f_d)
    blocks = _blocks(c)
    amp = pulse.amplitude
    tr, tf = pulse.t_rise, pulse.t_flat
    h = tr / n_edge
    rise = _edge_product(blocks, d, c, s, amp, pulse, 0.0, h, n_edge)
    fall = _edge_product(blocks, d, c, s, amp, pulse, tr + tf, h, n_edge)
    mats = []
    for blk, ur, uf in zip(blocks, rise, fall):
        if tf > 0:
            ix = np.ix_(blk, blk)
            hp = np.diag(d[blk]) + 0.5 * amp * c[ix]
            up = _exp_blocks(hp[None].astype(complex), TWO_PI * tf)[0]
            mats.append(uf @ up @ ur)
        else:
            mats.append(uf @ ur)
    return _assemble(blocks, mats, model.dim)


def evolve_rwa(model, pulse, *, dt=None, tol=DEFAULT_TOL, check=True, max_halvings=MAX_HALVINGS):
    """Propagator of the rotating-frame model over the whole pulse.

    Edges are integrated with fixed fourth-order Magnus steps (default
    dt = t_rise / 200); the plateau is a single exact exponential. With
    ``check`` the step is halved until the propagator changes by less than
    ``tol`` in every entry.

    Raises
    ------
    ConvergenceError
        If ``max_halvings`` halvings do not reach ``tol``.
    """
    if dt is None:
        dt = pulse.t_rise / 200.0
    n = edge_steps(pulse.t_rise, dt)
    u = _rwa_propagator(model, pulse, n)
    meta = {"model": "rwa", "steps_per_edge": n, "dt": pulse.t_rise / n}
    if check:
        for _ in range(max_halvings):
            u2 = _rwa_propagator(model, pulse, 2 * n)
            err = float(np.max(np.abs(u2 - u)))
            n *= 2
            u = u2
            if err < tol:
                break
        else:
            raise ConvergenceError(f"RWA propagator not converged (change {err:.2e})", err)
        meta.update(steps_per_edge=n, dt=pulse.t_rise / n, accuracy=err)
    return EvolutionResult("propagator", u, model.labels, meta)


def rwa_trajectory(model, pulse, psi0, n_points=201):
    """Populations along the pulse for initial state ``psi0``.

    Returns (times, populations) with populations shaped (n_points, dim).
    Uses second-order midpoint steps on a uniform grid, for plotting only.
    """
    d, c, s = model.matrices(pulse.f_d)
    times = np.linspace(0.0, pulse.t_gate, n_points)
    sub = 20
    psi = np.asarray(psi0, dtype=complex)
    pops = [np.abs(psi) ** 2]
    for t0, t1 in zip(times[:-1], times[1:]):
        h = (t1 - t0) / sub
        mids = t0 + h * (np.arange(sub) + 0.5)
        g, dg = envelope_arrays(pulse, mids)
        for gi, dgi in zip(g, dg):
            hm = np.diag(d) + 0.5 * pulse.amplitude * (gi * c + pulse.drag_coeff * dgi * s)
            w, v = np.linalg.eigh(hm)
            psi = v @ (np.exp(-1j * TWO_PI * h * w) * (v.conj().T @ psi))
        pops.append(np.abs(psi) ** 2)
    return times, np.array(pops)
