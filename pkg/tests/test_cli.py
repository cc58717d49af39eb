import json
import os

import numpy as np
import pytest

from fluxstark.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_THRESHOLD, main
from fluxstark.config import bundled_device
from fluxstark.io import read_csv
from fluxstark.stark import setting_from_spectrum, solve_cancellation_amplitude

SECOND = str(bundled_device("second"))


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def result(path):
    with open(path) as fh:
        doc = json.load(fh)
    assert set(doc["metadata"]) >= {"tool", "version", "config_hash", "seed"}
    return doc["result"]


def test_spectrum(tmp_path):
    out = tmp_path / "spec"
    assert main(["spectrum", "--out", str(out)]) == EXIT_OK
    res = result(out / "spectrum.json")
    assert res["qubits"]["A"]["f01"] == pytest.approx(0.2172, abs=1e-3)
    meta, header, rows = read_csv(out / "transitions.csv")
    assert header[:3] == ["lower", "upper", "frequency_ghz"] and meta["tool"] == "fluxstark"


def test_zz_map_zero_crossing(tmp_path, main_spectrum):
    exp = write(tmp_path, "zz.cfg", """schema_version: 1
type: experiment
kind: zz-map
params:
  f_d: {start: 4.40, stop: 5.10, num: 701}
  omega_upper: {start: 0.052, stop: 0.052, num: 1}
""")
    out = tmp_path / "zz"
    assert main(["zz-map", "--experiment", exp, "--out", str(out)]) == EXIT_OK
    _, _, rows = read_csv(out / "zz_map.csv")
    f = np.array([float(r[0]) for r in rows])
    xi = np.array([float(r[2]) for r in rows])
    assert len(rows) == 701
    # one crossing on the blue side of the doublet, far from resonance at 52 MHz
    crossings = [c["f_d"] for c in result(out / "zz_map.json")["zero_crossings"]]
    f_upper = main_spectrum.transition((1, 1), (2, 1))
    blue_side = [c for c in crossings if c > f_upper + 0.05]
    assert len(blue_side) == 1
    blue = blue_side[0]
    s = setting_from_spectrum(main_spectrum, blue, 0.052, 1.3)
    assert solve_cancellation_amplitude(s) == pytest.approx(0.052, rel=0.01)
    assert xi[f > blue + 0.005].max() < 0 < xi[(f < blue) & (f > blue - 0.02)].min()


def test_determinism(tmp_path):
    exp = write(tmp_path, "x.cfg", """schema_version: 1
type: experiment
kind: xeb
params: {backend: depolarizing, n_random: 300}
""")
    outs = [tmp_path / "a", tmp_path / "b"]
    for o in outs:
        assert main(["xeb", "--experiment", exp, "--phi", "pi", "--seed", "7",
                     "--out", str(o)]) == EXIT_OK
    a, b = [(o / "xeb.json").read_bytes() for o in outs]
    assert a == b
    assert main(["xeb", "--experiment", exp, "--seed", "8", "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "xeb.json").read_bytes() != a


def test_config_errors_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.cfg", open(bundled_device("main")).read().replace(
        "e_c: 1.051", "e_c: -1"))
    assert main(["spectrum", "--device", bad, "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "positive" in capsys.readouterr().err
    assert main(["spectrum", "--phi", "pi", "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["calibrate", "--phi", "pi/x", "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    wrong = write(tmp_path, "w.cfg", "schema_version: 1\ntype: experiment\nkind: rb\n")
    assert main(["xeb", "--experiment", wrong, "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["spectrum", "--device", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert not (tmp_path / "o").exists()


def test_numeric_failure_exit_3_leaves_nothing(tmp_path, capsys):
    out = tmp_path / "cancel"
    # the second device's doublet is inverted: no cancellation root
    assert main(["cancel", "--device", SECOND, "--out", str(out)]) == EXIT_NUMERIC
    assert "NoRootError" in capsys.readouterr().err
    assert not out.exists()
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".fluxstark")]


def test_threshold_miss_exit_4_keeps_record(tmp_path):
    exp = write(tmp_path, "c.cfg", """schema_version: 1
type: experiment
kind: calibrate
params: {phi: pi, f_d: 4.9, lab_frame: false}
""")
    out = tmp_path / "cal"
    assert main(["calibrate", "--experiment", exp, "--out", str(out)]) == EXIT_THRESHOLD
    assert result(out / "calibration.json")["success"] is False


def test_second_device_spectrum(tmp_path):
    out = tmp_path / "s2"
    assert main(["spectrum", "--device", SECOND, "--out", str(out)]) == EXIT_OK
    assert result(out / "spectrum.json")["static_zz"] == pytest.approx(-2.1e-3, rel=0.2)


def test_threads_flag(tmp_path):
    assert main(["spectrum", "--threads", "1", "--out", str(tmp_path / "t")]) == EXIT_OK
    assert main(["spectrum", "--threads", "0", "--out", str(tmp_path / "t")]) == EXIT_CONFIG


def test_rb_and_qpt_pipelines(tmp_path):
    rb = write(tmp_path, "rb.cfg", """schema_version: 1
type: experiment
kind: rb
seed: 3
params: {qubits: [A, B], n_random: 10, lengths: [1, 10, 50, 100, 200]}
""")
    assert main(["rb", "--experiment", rb, "--out", str(tmp_path / "rb")]) == EXIT_OK
    res = result(tmp_path / "rb" / "rb.json")
    assert 0 < res["B"]["errors"]["r"] < res["A"]["errors"]["r"]
    assert main(["qpt", "--phi", "pi", "--out", str(tmp_path / "q")]) == EXIT_OK
    chi = result(tmp_path / "q" / "qpt.json")
    assert 0.9 < chi["diagnostics"]["fidelity"] <= 1.0


def test_calibrate_half_phase(tmp_path):
    out = tmp_path / "cal"
    assert main(["calibrate", "--phi", "pi/2", "--out", str(out)]) == EXIT_OK
    res = result(out / "calibration.json")
    assert res["success"] and res["coherent_error"] < 1e-4
    assert res["pulse"]["t_rise"] == 50.0


def test_zz_map_warns_on_strong_drive(tmp_path, caplog):
    exp = write(tmp_path, "zz.cfg", """schema_version: 1
type: experiment
kind: zz-map
params:
  f_d: {start: 4.50, stop: 4.52, num: 3}
  omega_upper: {start: 0.05, stop: 0.05, num: 1}
""")
    with caplog.at_level("WARNING", logger="fluxstark"):
        assert main(["zz-map", "--experiment", exp, "--out", str(tmp_path / "o")]) == EXIT_OK
    assert "delta/2" in caplog.text
