import numpy as np
import pytest

from fluxstark import PulseProgram, rabi_frequency
from fluxstark.calibration import (FAMILY_T_RISE, PI_TIMING, CalibrationProblem,
                                   amplitude_for_phase, calibrate_cp_gate, experimental_timing,
                                   family_amplitude, meets, rwa_phase, rwa_report, scan_t_flat)
from fluxstark.stark import setting_from_spectrum, total_zz_analytic


def test_problem_validation():
    p = PulseProgram(f_d=4.545, t_rise=10, t_flat=100, amplitude=0.1)
    with pytest.raises(ValueError):
        CalibrationProblem(0.0, p)
    with pytest.raises(ValueError):
        CalibrationProblem(np.pi, p, f_window=0.01)
    with pytest.raises(ValueError):
        CalibrationProblem(np.pi, p, free=("sigma",))
    with pytest.raises(ValueError):
        CalibrationProblem(np.pi, p, bounds={"f_d": (4.5, 4.6)}).resolved_bounds()


def test_family_amplitude_sets_plateau_rate(main_spectrum, main_model):
    amp = family_amplitude(main_model)
    om = amp * rabi_frequency(main_spectrum, 1.0, 1.3, (1, 1), (2, 1))
    s = setting_from_spectrum(main_spectrum, 4.545, om, 1.3, splitting=main_model.splitting)
    assert total_zz_analytic(s) == pytest.approx(4.3e-3, rel=1e-6)


def test_experimental_timing(main_model):
    assert experimental_timing(np.pi, main_model) == PI_TIMING
    t = [experimental_timing(k * np.pi / 16, main_model)[1] for k in range(1, 16)]
    assert all(tr == FAMILY_T_RISE for tr, _ in
               [experimental_timing(k * np.pi / 16, main_model) for k in (1, 8)])
    assert t[0] == 0.0 and np.all(np.diff(t) >= 0)


def test_amplitude_for_phase_hits_target(main_model):
    p = PulseProgram(f_d=4.545, t_rise=50, t_flat=20, amplitude=0.0)
    amp = amplitude_for_phase(main_model, p, np.pi / 2)
    phase = rwa_phase(main_model, p.replace(amplitude=amp)) - rwa_phase(main_model, p)
    assert np.angle(np.exp(1j * (phase - np.pi / 2))) == pytest.approx(0.0, abs=1e-6)
    assert amplitude_for_phase(main_model, p, np.pi, amp_max=0.01) is None


def test_rwa_calibration_quarter_phase(main_model):
    tr, tf = experimental_timing(np.pi / 4, main_model)
    p0 = PulseProgram(f_d=4.545, t_rise=tr, t_flat=tf, amplitude=0.05)
    res = calibrate_cp_gate(CalibrationProblem(np.pi / 4, p0), main_model)
    assert res.success and meets(res.report)
    assert abs(res.pulse.f_d - 4.545) <= 0.005 + 1e-12
    assert res.verification is None


def test_t_flat_scan_leakage_pattern(main_model):
    # rotating-frame optimum of the controlled-Z pulse
    pulse = PulseProgram(f_d=4.5458964, t_rise=10, t_flat=132, amplitude=0.10659993,
                         drag_coeff=1.8314847)
    rows = np.array(scan_t_flat(main_model, pulse, np.pi, np.arange(0, 201, 2.0)))
    leak = rows[:, 2]
    assert leak.max() > 5e-3
    assert leak.min() < 1e-3
    assert rwa_report(main_model, pulse, np.pi).leakage < 1e-4
