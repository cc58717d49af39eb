"""Command-line entry point: ``fluxstark <kind> --device D --experiment E --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 calibration thresholds missed.
"""

import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

from . import __version__
from .config import (KIND_SCHEMAS, KINDS, ExperimentConfig, bundled_device, config_hash, experiment_from_dict,
                     load_config, parse_angle, DeviceConfig)
from .errors import ConfigError, FluxstarkError
from .io import metadata, staged_output

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_THRESHOLD = 0, 2, 3, 4
log = logging.getLogger("fluxstark")


class ThresholdMiss(FluxstarkError):
    """Calibration finished but missed its acceptance thresholds."""


def _grid(g):
    return np.linspace(g["start"], g["stop"], g["num"])


def _child_seeds(seed, n):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def _pulse_dict(p):
    return {k: (float(v) if isinstance(v, (float, np.floating)) else v)
            for k, v in dataclasses.asdict(p).items()}


def _report_dict(r):
    if r is None:
        return None
    return {"infidelity": float(r.infidelity), "leakage": float(r.leakage),
            "phase_error": float(r.phase_error), "phi_accumulated": float(r.phi_accumulated),
            "delta_phi": float(r.delta_phi)}


class _Context:
    """Lazily built device objects shared by the pipelines."""

    def __init__(self, device):
        self.device = device
        self._sp = self._model = None

    @property
    def spectrum(self):
        if self._sp is None:
            from .coupled import assemble_and_label
            self._sp = assemble_and_label(self.device.coupled_spec())
        return self._sp

    @property
    def model(self):
        if self._model is None:
            from .dynamics.rwa import RWAModel
            self._model = RWAModel.from_spectrum(self.spectrum, self.device.eps_ratio)
        return self._model

    def eps_for_upper(self, omega_upper):
        from .coupled import rabi_frequency
        unit = rabi_frequency(self.spectrum, 1.0, self.device.eps_ratio, (1, 1), (2, 1))
        return omega_upper / unit

    def calibrate(self, phi, f_d, lab_frame):
        from .calibration import CalibrationProblem, calibrate_cp_gate, experimental_timing
        from .pulses import PulseProgram
        t_rise, t_flat = experimental_timing(phi, self.model, f_d)
        p0 = PulseProgram(f_d=f_d, t_rise=t_rise, t_flat=t_flat, amplitude=0.05,
                          eps_ratio=self.device.eps_ratio)
        return calibrate_cp_gate(CalibrationProblem(phi, p0), self.model,
                                 system=self.spectrum if lab_frame else None)

    def gate_superoperator(self, phi):
        from .benchmarking.backends import corrected_cp_superoperator
        from .calibration import F_D_EXPERIMENT
        from .dynamics.lindblad import build_collapse_operators
        cal = self.calibrate(phi, F_D_EXPERIMENT, lab_frame=False)
        if cal.rwa_pulse is None:
            raise FluxstarkError(f"gate calibration failed: {cal.diagnostics.get('message')}")
        ops = build_collapse_operators(self.device.coherence, self.model.labels)
        return corrected_cp_superoperator(self.model, cal.rwa_pulse, ops, phi), ops, cal


def _spectrum(ctx, p, seed, out):
    from .coupled import doublet_splitting, spectrum_table, static_zz
    from .spectrum import charge_matrix_element, diagonalize, transition_frequency
    qubits = {}
    for name, spec in (("A", ctx.device.qubit_a), ("B", ctx.device.qubit_b)):
        eig = diagonalize(spec, basis_dim=ctx.device.basis_dim)
        qubits[name] = {"f01": transition_frequency(eig, 0, 1),
                        "f12": transition_frequency(eig, 1, 2),
                        "n01": abs(charge_matrix_element(eig, 0, 1)),
                        "n12": abs(charge_matrix_element(eig, 1, 2))}
    sp = ctx.spectrum
    rows = spectrum_table(sp, 1.0, ctx.device.eps_ratio, p["max_frequency"])
    out.write_json("spectrum.json", {"qubits": qubits, "static_zz": static_zz(sp),
                                     "doublet_splitting": doublet_splitting(sp)})
    out.write_csv("transitions.csv", ["lower", "upper", "frequency_ghz", "omega_per_eps_a"], rows)


def _zz_crossings(rows):
    by_om = {}
    for f, om, xi in rows:
        by_om.setdefault(om, []).append((f, xi))
    crossings = []
    for om, pts in sorted(by_om.items()):
        for (f0, x0), (f1, x1) in zip(pts, pts[1:]):
            if x0 == 0 or x0 * x1 < 0:
                crossings.append({"omega_upper": om, "f_d": f0 - x0 * (f1 - f0) / (x1 - x0)})
    return crossings


def _warn_strong_drive(ctx, f_d, omega_upper):
    """Flag points where the two-level dispersive picture breaks down."""
    f_d, omega_upper = np.meshgrid(np.atleast_1d(f_d), np.atleast_1d(omega_upper))
    delta = np.abs(f_d - ctx.spectrum.transition((1, 1), (2, 1)))
    n = int(np.count_nonzero(omega_upper > delta / 2))
    if n:
        log.warning("%d point(s) have Omega_11-21 > delta/2; the analytic ZZ is unreliable there", n)


def _zz_map(ctx, p, seed, out):
    from .stark import zz_map
    _warn_strong_drive(ctx, _grid(p["f_d"]), _grid(p["omega_upper"]))
    rows = zz_map(ctx.spectrum, _grid(p["f_d"]), _grid(p["omega_upper"]), ctx.device.eps_ratio)
    out.write_csv("zz_map.csv", ["f_d_ghz", "omega_upper_ghz", "xi_zz_ghz"], rows)
    out.write_json("zz_map.json", {"zero_crossings": _zz_crossings(rows)})


def _ramsey(ctx, f_d, omega_upper, times, out, extra):
    from .dynamics.ramsey import simulate_zz_ramsey
    eps = ctx.eps_for_upper(omega_upper)
    rec = simulate_zz_ramsey(ctx.spectrum, f_d, eps, times, ctx.device.eps_ratio)
    out.write_csv("ramsey.csv", ["time_ns", "zi_expectation"], rec.to_rows())
    out.write_json("ramsey.json", {**extra, "f_d": f_d, "omega_upper": omega_upper,
                                   "eps_a": eps, "xi_zz": rec.xi, "xi_zz_err": rec.xi_err,
                                   "contrast": rec.contrast})


def _cancel(ctx, p, seed, out):
    from .stark import setting_from_spectrum, solve_cancellation_amplitude, total_zz_analytic
    s = setting_from_spectrum(ctx.spectrum, p["f_d"], 0.03, ctx.device.eps_ratio)
    om = solve_cancellation_amplitude(s)
    _warn_strong_drive(ctx, p["f_d"], om)
    extra = {"omega_cancel": om, "analytic_total_zz": total_zz_analytic(s.with_upper(om))}
    _ramsey(ctx, p["f_d"], om, _grid(p["times"]), out, extra)


def _zz_ramsey(ctx, p, seed, out):
    _ramsey(ctx, p["f_d"], p["omega_upper"], _grid(p["times"]), out, {})


def _gate(ctx, p, seed, out):
    from .calibration import full_report, rwa_report
    from .dynamics.lindblad import build_collapse_operators
    from .metrics import incoherent_gate_error
    from .pulses import PulseProgram
    pulse = PulseProgram(eps_ratio=ctx.device.eps_ratio, **p["pulse"])
    phi = p["phi"]
    rec = {"phi": phi, "pulse": _pulse_dict(pulse),
           "rwa": _report_dict(rwa_report(ctx.model, pulse, phi))}
    if p["lab_frame"]:
        rec["lab_frame"] = _report_dict(full_report(ctx.spectrum, pulse, phi, check=True))
    if p["incoherent"]:
        ops = build_collapse_operators(ctx.device.coherence, ctx.model.labels)
        rec["incoherent_error"] = incoherent_gate_error(ctx.model, pulse, ops, phi)
    out.write_json("gate.json", rec)


def _calibrate(ctx, p, seed, out):
    res = ctx.calibrate(p["phi"], p["f_d"], p["lab_frame"])
    final = res.verification if res.verification is not None else res.report
    rec = {"phi": p["phi"], "success": res.success,
           "pulse": _pulse_dict(res.pulse),
           "rwa_pulse": _pulse_dict(res.rwa_pulse) if res.rwa_pulse is not None else None,
           "rwa_report": _report_dict(res.report),
           "lab_frame_report": _report_dict(res.verification),
           "coherent_error": None if final is None else float(final.infidelity),
           "diagnostics": res.diagnostics}
    out.write_json("calibration.json", rec)
    if not res.success:
        # the record is still useful: run_experiment keeps it and signals the miss
        raise ThresholdMiss(f"calibration missed thresholds: {res.diagnostics.get('message')}")


def _decay_rows(rec):
    return [(int(m), float(f)) for m, f in zip(rec.lengths, rec.fidelities)]


def _rb(ctx, p, seed, out):
    from .benchmarking import DepolarizingBackend, LindbladBackend, simulate_rb
    if p["backend"] == "lindblad":
        backend = LindbladBackend.from_table(ctx.device.coherence)
    elif p["backend"] == "depolarizing":
        r = p["error_per_clifford"]
        backend = DepolarizingBackend(r_a=r, r_b=r)
    else:
        raise ConfigError(f"unknown backend {p['backend']!r}", "params.backend")
    recs = simulate_rb(backend, p["lengths"], p["n_random"], seed, tuple(p["qubits"]),
                       p["shots"] or None)
    for q, rec in recs.items():
        out.write_csv(f"rb_{q}.csv", ["length", "fidelity"], _decay_rows(rec))
    out.write_json("rb.json", {q: rec.to_dict() for q, rec in recs.items()})


def _xeb(ctx, p, seed, out):
    from .benchmarking import DepolarizingBackend, LindbladBackend, simulate_rb, simulate_xeb
    rb_seed, xeb_seed = _child_seeds(seed, 2)
    phi = p["phi"]
    if p["backend"] == "lindblad":
        sup, ops, cal = ctx.gate_superoperator(phi)
        backend = LindbladBackend(ops, sup, labels=ctx.model.labels)
        rb = simulate_rb(backend, p["rb_lengths"], p["rb_n_random"], rb_seed, ("A", "B"))
        ra, rb_ = rb["A"].errors["r_pauli"], rb["B"].errors["r_pauli"]
        extra = {"pulse": _pulse_dict(cal.rwa_pulse), "rb": {q: r.to_dict() for q, r in rb.items()}}
    elif p["backend"] == "depolarizing":
        backend = DepolarizingBackend(r_cycle_pauli=p["r_cycle_pauli"], phi=phi)
        ra = rb_ = 0.0
        extra = {}
    else:
        raise ConfigError(f"unknown backend {p['backend']!r}", "params.backend")
    rec = simulate_xeb(backend, phi, p["lengths"], p["n_random"], xeb_seed, p["shots"] or None,
                       ra, rb_)
    out.write_csv("xeb.csv", ["cycles", "fidelity"], _decay_rows(rec))
    out.write_json("xeb.json", {**rec.to_dict(), **extra})


def _qpt(ctx, p, seed, out):
    from .benchmarking.backends import COMPUTATIONAL, initial_state
    from .metrics import cp_unitary
    from .tomography import MeasurementOperator, chi_of_unitary, simulate_qpt
    beta = {k: complex(*v) if len(v) == 2 else complex(v[0]) for k, v in p["beta"].items()}
    op = MeasurementOperator(beta["ii"], beta["iz"], beta["zi"], beta["zz"])
    sup, _, _ = ctx.gate_superoperator(p["phi"])
    chi = simulate_qpt(sup, ctx.model.labels, chi_of_unitary(cp_unitary(p["phi"])), op,
                       initial_state(COMPUTATIONAL, tuple(p["excited_init"])), p["noise"], seed)
    out.write_json("qpt.json", chi.to_dict())


PIPELINES = {"spectrum": _spectrum, "zz-map": _zz_map, "cancel": _cancel, "gate": _gate,
             "calibrate": _calibrate, "rb": _rb, "xeb": _xeb, "qpt": _qpt,
             "zz-ramsey": _zz_ramsey}
assert set(PIPELINES) == set(KINDS)


def run_experiment(device, exp, out_dir):
    """Run one pipeline and write its artifacts into ``out_dir``.

    Returns the list of files written. Raises the pipeline's error after
    removing partial output; a calibration threshold miss keeps its record
    and raises ThresholdMiss.
    """
    if not isinstance(device, DeviceConfig) or not isinstance(exp, ExperimentConfig):
        raise ConfigError("run_experiment needs a device and an experiment config")
    meta = metadata(config_hash(device, exp, seed=exp.seed), exp.seed, kind=exp.kind,
                    device=device.name)
    ctx = _Context(device)
    miss = None
    with staged_output(out_dir, meta) as out:
        try:
            PIPELINES[exp.kind](ctx, exp.params, exp.seed, out)
        except ThresholdMiss as exc:
            miss = exc
        written = list(out.written)
    if miss is not None:
        raise miss
    return written


def _load(path, expected):
    cfg = load_config(path)
    if not isinstance(cfg, expected):
        raise ConfigError(f"{path}: expected a {expected.__name__}")
    return cfg


def build_parser():
    ap = argparse.ArgumentParser(prog="fluxstark", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fluxstark {__version__}")
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind)
        sp.add_argument("--device", help="device config (default: bundled main device)")
        sp.add_argument("--experiment", help="experiment config (default: built-in defaults)")
        sp.add_argument("--out", default=None, help="output directory (default: results/<kind>)")
        sp.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        sp.add_argument("--threads", type=int, default=None, help="numba worker threads")
        sp.add_argument("--phi", default=None, help="target phase, e.g. pi or 3pi/4")
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.threads is not None:
            import numba
            if args.threads < 1:
                raise ConfigError("--threads must be at least 1")
            # the bundled TBB is often too old; skip it unless asked for
            if "NUMBA_THREADING_LAYER" not in os.environ:
                numba.config.THREADING_LAYER = "omp"
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
        device = _load(args.device or bundled_device("main"), DeviceConfig)
        if args.experiment:
            exp = _load(args.experiment, ExperimentConfig)
            if exp.kind != args.kind:
                raise ConfigError(f"experiment kind {exp.kind!r} does not match "
                                  f"subcommand {args.kind!r}", "kind")
            params, seed = dict(exp.params), exp.seed
        else:
            params, seed = {}, 0
        if args.phi is not None:
            if "phi" not in KIND_SCHEMAS[args.kind]:
                raise ConfigError(f"--phi does not apply to {args.kind}")
            try:
                params["phi"] = parse_angle(args.phi)
            except ValueError as exc:
                raise ConfigError(str(exc), "--phi") from None
        if args.seed is not None:
            seed = args.seed
        if seed < 0:
            raise ConfigError("--seed must be non-negative")
        exp = experiment_from_dict(args.kind, seed, params)
        written = run_experiment(device, exp, args.out or f"results/{args.kind}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ThresholdMiss as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_THRESHOLD
    except (FluxstarkError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure in {args.kind}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for name in written:
        print(f"{args.out or 'results/' + args.kind}/{name}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
