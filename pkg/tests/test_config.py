import math

import numpy as np
import pytest
import yaml

from fluxstark.config import (DeviceConfig, ExperimentConfig, KINDS, bundled_device,
                              config_hash, dumps_config, experiment_from_dict, load_config,
                              loads_config, parse_angle)
from fluxstark.dynamics import CoherenceTable
from fluxstark.errors import ConfigError, FluxstarkError
from fluxstark.spectrum import FluxoniumSpec

MAIN = bundled_device("main")


def test_bundled_device_loads():
    dev = load_config(MAIN)
    assert isinstance(dev, DeviceConfig)
    assert dev.qubit_a == FluxoniumSpec(1.051, 0.753, 5.263, math.pi)
    assert dev.j_c == 0.248 and dev.coherence.t1_a == 182.5
    assert math.isinf(dev.coherence.t1_b12)


@pytest.mark.parametrize("text,value", [("pi", math.pi), ("pi/2", math.pi / 2),
                                        ("3pi/4", 0.75 * math.pi), ("-pi/16", -math.pi / 16),
                                        ("3*pi/16", 3 * math.pi / 16), ("1.5", 1.5), (2, 2.0)])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


@pytest.mark.parametrize("bad", ["pie", "pi/", "", True, "2pi/x"])
def test_parse_angle_rejects(bad):
    with pytest.raises(ValueError):
        parse_angle(bad)


def _main_text():
    with open(MAIN) as fh:
        return fh.read()


def test_negative_charging_energy_rejected():
    text = _main_text().replace("e_c: 1.051", "e_c: -1")
    with pytest.raises(ConfigError) as info:
        loads_config(text)
    assert info.value.path == "qubit_a.e_c"
    assert "positive" in str(info.value) and info.value.line is not None


def test_unknown_key_location():
    text = _main_text().replace("j_c: 0.248", "j_c: 0.248\nj_x: 1")
    with pytest.raises(ConfigError) as info:
        loads_config(text)
    assert info.value.path == "j_x"
    assert info.value.line == text.splitlines().index("j_x: 1") + 1
    assert info.value.column == 1


def test_nested_unknown_key():
    text = _main_text().replace("t1_a: 182.5", "t1_a: 182.5\n  t3_a: 1")
    with pytest.raises(ConfigError, match="coherence.t3_a"):
        loads_config(text)


def test_syntax_error_has_position():
    with pytest.raises(ConfigError) as info:
        loads_config("schema_version: 1\ntype: device\nqubit_a: {e_c: 1\n")
    assert info.value.line is not None


@pytest.mark.parametrize("text,match", [
    ("schema_version: 2\ntype: experiment\nkind: rb\n", "schema_version"),
    ("schema_version: 1\ntype: thing\n", "unknown type"),
    ("schema_version: 1\ntype: experiment\nkind: magic\n", "unknown experiment kind"),
    ("schema_version: 1\ntype: experiment\nkind: calibrate\n", "params.phi"),
    ("schema_version: 1\ntype: experiment\nkind: rb\nseed: -3\n", "non-negative"),
    ("schema_version: 1\ntype: experiment\nkind: rb\nseed: 1.5\n", "expected a int"),
    ("- a\n- b\n", "mapping"),
])
def test_experiment_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        loads_config(text)


def test_experiment_defaults_are_explicit():
    exp = loads_config("schema_version: 1\ntype: experiment\nkind: xeb\n")
    assert exp.seed == 0
    assert exp.params["phi"] == pytest.approx(math.pi)
    assert exp.params["n_random"] == 1000


def test_every_kind_has_defaults_or_requirements():
    for kind in KINDS:
        try:
            experiment_from_dict(kind)
        except ConfigError as exc:
            assert "missing required key" in str(exc)


def random_device(rng):
    coh = {k: float(rng.uniform(1, 300)) for k in ("t1_a", "t1_b", "t1_a12")}
    coh.update({k.replace("t1", "t2e"): float(v * rng.uniform(0.1, 1.9)) for k, v in coh.items()})
    return DeviceConfig(
        name=f"dev{rng.integers(1000)}",
        qubit_a=FluxoniumSpec(*map(float, rng.uniform(0.5, 5, 3)), float(rng.uniform(0, 6.3))),
        qubit_b=FluxoniumSpec(*map(float, rng.uniform(0.5, 5, 3))),
        j_c=float(rng.normal(0, 0.3)), coherence=CoherenceTable(**coh),
        eps_ratio=float(rng.uniform(0.1, 3)), levels_per_qubit=int(rng.integers(4, 9)),
        basis_dim=int(rng.integers(20, 200)))


@pytest.mark.parametrize("seed", range(25))
def test_device_roundtrip(seed):
    dev = random_device(np.random.default_rng(seed))
    assert loads_config(dumps_config(dev)) == dev
    assert dumps_config(loads_config(dumps_config(dev))) == dumps_config(dev)


@pytest.mark.parametrize("seed", range(10))
def test_experiment_roundtrip(seed):
    rng = np.random.default_rng(seed)
    exp = experiment_from_dict("xeb", int(rng.integers(2 ** 32)),
                               {"phi": float(rng.uniform(0.1, 3)),
                                "n_random": int(rng.integers(1, 500)),
                                "lengths": sorted(set(rng.integers(1, 100, 6).tolist()))})
    back = loads_config(dumps_config(exp))
    assert back == exp


def test_hash_depends_on_seed_and_content():
    dev = load_config(MAIN)
    exp = experiment_from_dict("rb")
    assert config_hash(dev, exp, seed=0) == config_hash(dev, exp, seed=0)
    assert config_hash(dev, exp, seed=0) != config_hash(dev, exp, seed=1)
    assert config_hash(dev, experiment_from_dict("rb", 0, {"n_random": 3}), seed=0) != \
        config_hash(dev, exp, seed=0)


@pytest.mark.parametrize("seed", range(60))
def test_fuzzed_configs_fail_cleanly(seed):
    rng = np.random.default_rng(seed)
    chars = list(_main_text())
    for _ in range(int(rng.integers(1, 6))):
        i = int(rng.integers(len(chars)))
        op = rng.integers(3)
        if op == 0:
            del chars[i]
        elif op == 1:
            chars.insert(i, str(rng.choice(list(":-{}[]#\n -1x.9'\""))))
        else:
            chars[i] = str(rng.choice(list("0a:\n ")))
    try:
        cfg = loads_config("".join(chars))
    except FluxstarkError:
        return
    assert isinstance(cfg, (DeviceConfig, ExperimentConfig))


@pytest.mark.parametrize("params,match", [
    ("lengths: [5, 3]", "ascending"), ("lengths: [a]", "positive integers"),
    ("qubits: [C]", "qubits"), ("backend: exact", "backend")])
def test_list_and_choice_fields(params, match):
    text = f"schema_version: 1\ntype: experiment\nkind: rb\nparams:\n  {params}\n"
    with pytest.raises(ConfigError, match=match):
        loads_config(text)
