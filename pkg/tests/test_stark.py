import numpy as np
import pytest

from fluxstark.errors import NoRootError
from fluxstark.stark import (StarkSetting, dressed_dephasing_rate, dressing_parameter,
                             induced_zz_analytic, rwa_quasi_zz, setting_from_spectrum,
                             solve_cancellation_amplitude, stark_shift, total_zz_analytic,
                             zz_map)

FIG2 = StarkSetting(omega_upper=0.0524, omega_lower=0.0524 / 1.114, delta=0.057, splitting=0.008)


def test_induced_zz_reference_point():
    assert induced_zz_analytic(FIG2) == pytest.approx(2.9e-3, abs=0.15e-3)


def test_closed_form_matches_block_eigenvalues(rng):
    for _ in range(50):
        s = StarkSetting(rng.uniform(0, 0.2), rng.uniform(0, 0.2), rng.uniform(-0.3, 0.3),
                         rng.uniform(-0.05, 0.05))
        if min(abs(s.delta), abs(s.delta - s.splitting)) < 1e-3:
            continue
        assert induced_zz_analytic(s) == pytest.approx(rwa_quasi_zz(s), abs=1e-15)


def test_stark_shift_small_drive_limit():
    # perturbative shift Omega^2 / (4 delta)
    assert stark_shift(1e-4, 0.1) == pytest.approx(1e-8 / 0.4, rel=1e-6)


def test_no_drive_no_induced_zz():
    s = StarkSetting(0.0, 0.0, 0.05, 0.008, static_zz=-3e-4)
    assert induced_zz_analytic(s) == 0.0
    assert total_zz_analytic(s) == -3e-4


def test_cancellation_root(main_spectrum):
    s = setting_from_spectrum(main_spectrum, 4.65, 0.03, 1.3)
    om = solve_cancellation_amplitude(s)
    assert om == pytest.approx(0.030, abs=0.003)
    assert abs(total_zz_analytic(s.with_upper(om))) < 1e-12


def test_cancellation_without_root():
    s = StarkSetting(0.03, 0.03, 0.05, -0.09, static_zz=-2e-3)
    with pytest.raises(NoRootError):
        solve_cancellation_amplitude(s)


def test_ratio_from_matrix_elements(main_spectrum):
    s = setting_from_spectrum(main_spectrum, 4.6, 0.05, 1.3)
    assert s.ratio == pytest.approx(0.62237 / 0.55885, rel=1e-3)


def test_zz_map_shape_and_sign_change(main_spectrum):
    f = np.linspace(4.55, 4.95, 16)
    rows = zz_map(main_spectrum, f, [0.0, 0.02], 1.3)
    assert len(rows) == 32
    assert all(r[2] < 0 for r in rows if r[1] == 0.0)
    xi = np.array([r[2] for r in rows if r[1] == 0.02])
    assert xi.min() < 0 < xi.max()


def test_dressing():
    lam = dressing_parameter(0.05, 4.6, 4.5)
    assert 0 < lam < 1
    assert dressed_dephasing_rate(lam, 1 / 5550.0) == pytest.approx(lam ** 2 / 5550.0 / 8)
    with pytest.raises(ValueError):
        dressed_dephasing_rate(-1, 1.0)
