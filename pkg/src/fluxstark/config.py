"""Device and experiment configuration files.

Configurations are YAML documents with a ``schema_version`` and a ``type``
(``device`` or ``experiment``). Unknown keys are rejected with their line
and column. Angles accept numbers or expressions such as ``pi``, ``pi/2``
or ``3*pi/16``. Energies and frequencies are in GHz, times in ns,
coherence times in microseconds.
"""

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field

import yaml

from .dynamics.lindblad import CoherenceTable
from .errors import ConfigError
from .spectrum import FluxoniumSpec

SCHEMA_VERSION = 1
KINDS = ("spectrum", "zz-map", "cancel", "gate", "calibrate", "rb", "xeb", "qpt", "zz-ramsey")
_ANGLE = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(value):
    """Radians from a number or a string like '3pi/4', '-pi/16', '1.5'."""
    if isinstance(value, bool):
        raise ValueError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    m = _ANGLE.match(text)
    if m:
        coef = m.group(1)
        num = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not an angle: {value!r}") from None


# ---- schema ---------------------------------------------------------------

class _Field:
    def __init__(self, kind, default=None, required=False, check=None, sub=None):
        self.kind = kind          # "float", "int", "str", "bool", "angle", "grid", "list", "map"
        self.default = default
        self.required = required
        self.check = check
        self.sub = sub


def _positive(v):
    return None if v > 0 else "must be positive"


def _nonneg(v):
    return None if v >= 0 else "must be non-negative"


_QUBIT = {"e_c": _Field("float", required=True, check=_positive),
          "e_l": _Field("float", required=True, check=_positive),
          "e_j": _Field("float", required=True, check=_nonneg),
          "phi_ext": _Field("angle", default=math.pi)}
_COHERENCE = {k: _Field("float", default=math.inf, check=_positive)
              for k in ("t1_a", "t2e_a", "t1_b", "t2e_b", "t1_a12", "t2e_a12", "t1_b12",
                        "t2e_b12")}
DEVICE_SCHEMA = {
    "schema_version": _Field("int", required=True),
    "type": _Field("str", required=True),
    "name": _Field("str", default="device"),
    "qubit_a": _Field("map", required=True, sub=_QUBIT),
    "qubit_b": _Field("map", required=True, sub=_QUBIT),
    "j_c": _Field("float", required=True),
    "coherence": _Field("map", default={}, sub=_COHERENCE),
    "eps_ratio": _Field("float", default=1.3),
    "levels_per_qubit": _Field("int", default=6, check=lambda v: None if v >= 4 else "must be >= 4"),
    "basis_dim": _Field("int", default=80, check=lambda v: None if v >= 20 else "must be >= 20"),
}
def _lengths(v):
    if not v or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in v):
        return "must be a non-empty list of positive integers"
    if any(b <= a for a, b in zip(v, v[1:])):
        return "must be strictly ascending"
    return None


def _qubits(v):
    ok = v in (["A"], ["B"], ["A", "B"])
    return None if ok else "must be [A], [B] or [A, B]"


def _pair(v):
    ok = len(v) in (1, 2) and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                   for x in v)
    return None if ok else "must be [re] or [re, im]"


def _populations(v):
    ok = len(v) == 2 and all(isinstance(x, (int, float)) and 0 <= x <= 1 for x in v)
    return None if ok else "must be two populations in [0, 1]"


def _backend(v):
    return None if v in ("lindblad", "depolarizing") else "must be lindblad or depolarizing"


_GRID = {"start": _Field("float", required=True), "stop": _Field("float", required=True),
         "num": _Field("int", required=True, check=_positive)}
_PULSE = {"f_d": _Field("float", required=True, check=_positive),
          "t_rise": _Field("float", required=True, check=_positive),
          "t_flat": _Field("float", required=True, check=_nonneg),
          "amplitude": _Field("float", required=True, check=_nonneg),
          "drag_coeff": _Field("float", default=0.0)}
_BETA = {k: _Field("list", required=True, check=_pair) for k in ("ii", "iz", "zi", "zz")}
KIND_SCHEMAS = {
    "spectrum": {"max_frequency": _Field("float", default=10.0, check=_positive)},
    "zz-map": {"f_d": _Field("grid", required=True, sub=_GRID),
               "omega_upper": _Field("grid", required=True, sub=_GRID)},
    "cancel": {"f_d": _Field("float", default=4.65, check=_positive),
               "times": _Field("grid", default={"start": 0.0, "stop": 20000.0, "num": 101},
                               sub=_GRID)},
    "zz-ramsey": {"f_d": _Field("float", required=True, check=_positive),
                  "omega_upper": _Field("float", default=0.0, check=_nonneg),
                  "times": _Field("grid", required=True, sub=_GRID)},
    "gate": {"phi": _Field("angle", required=True),
             "pulse": _Field("map", required=True, sub=_PULSE),
             "lab_frame": _Field("bool", default=True),
             "incoherent": _Field("bool", default=True)},
    "calibrate": {"phi": _Field("angle", required=True),
                  "f_d": _Field("float", default=4.545, check=_positive),
                  "lab_frame": _Field("bool", default=True)},
    "rb": {"qubits": _Field("list", default=["A"], check=_qubits),
           "lengths": _Field("list", default=[1, 5, 10, 20, 40, 80, 150, 250, 400],
                             check=_lengths),
           "n_random": _Field("int", default=51, check=_positive),
           "backend": _Field("str", default="lindblad", check=_backend),
           "error_per_clifford": _Field("float", default=1e-3, check=_nonneg),
           "shots": _Field("int", default=0, check=_nonneg)},
    "xeb": {"phi": _Field("angle", default=math.pi),
            "lengths": _Field("list", default=[1, 2, 4, 6, 8, 11, 15, 20, 26, 33, 40, 50, 60],
                              check=_lengths),
            "n_random": _Field("int", default=1000, check=_positive),
            "backend": _Field("str", default="lindblad", check=_backend),
            "r_cycle_pauli": _Field("float", default=1e-2, check=_nonneg),
            "shots": _Field("int", default=4096, check=_nonneg),
            "rb_lengths": _Field("list", default=[1, 5, 10, 20, 40, 80, 150, 250, 400],
                                 check=_lengths),
            "rb_n_random": _Field("int", default=51, check=_positive)},
    "qpt": {"phi": _Field("angle", default=math.pi),
            "noise": _Field("float", default=0.01, check=_nonneg),
            "excited_init": _Field("list", default=[0.0, 0.0], check=_populations),
            "beta": _Field("map", default={"ii": [0.1, 0.0], "iz": [0.35, 0.0],
                                           "zi": [0.45, 0.0], "zz": [0.1, 0.0]}, sub=_BETA)},
}
EXPERIMENT_SCHEMA = {
    "schema_version": _Field("int", required=True),
    "type": _Field("str", required=True),
    "kind": _Field("str", required=True),
    "seed": _Field("int", default=0, check=_nonneg),
    "params": _Field("map", default={}),
}


def _loc(node):
    return node.start_mark.line + 1, node.start_mark.column + 1


def _scalar(node, kind, path):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(f"expected a {kind}", path, *_loc(node))
    value = yaml.safe_load(yaml.serialize(node))
    try:
        if kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                if isinstance(value, str) and value.lower() in ("inf", ".inf"):
                    return math.inf
                raise TypeError
            return float(value)
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError
            return value
        if kind == "bool":
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise TypeError
            return value
        if kind == "angle":
            return parse_angle(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a {kind}, got {value!r}", path, *_loc(node)) from None
    raise AssertionError(kind)


def _walk(node, schema, path):
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("expected a mapping", path or "<root>", *_loc(node))
    out = {}
    seen = set()
    for key_node, value_node in node.value:
        key = key_node.value
        kpath = f"{path}.{key}" if path else key
        if key in seen:
            raise ConfigError("duplicate key", kpath, *_loc(key_node))
        seen.add(key)
        if key not in schema:
            raise ConfigError("unknown key", kpath, *_loc(key_node))
        fld = schema[key]
        if fld.kind in ("map", "grid") and fld.sub is not None:
            value = _walk(value_node, fld.sub, kpath)
        elif fld.kind == "map":
            if not isinstance(value_node, yaml.MappingNode):
                raise ConfigError("expected a mapping", kpath, *_loc(value_node))
            value = yaml.safe_load(yaml.serialize(value_node))
        elif fld.kind == "list":
            if not isinstance(value_node, yaml.SequenceNode):
                raise ConfigError("expected a list", kpath, *_loc(value_node))
            value = yaml.safe_load(yaml.serialize(value_node))
        else:
            value = _scalar(value_node, fld.kind, kpath)
        if fld.check is not None and fld.kind in ("float", "int", "list", "str"):
            msg = fld.check(value)
            if msg:
                raise ConfigError(f"{key} {msg} (got {value!r})", kpath, *_loc(value_node))
        out[key] = value
    for key, fld in schema.items():
        if key not in out:
            if fld.required:
                raise ConfigError("missing required key", f"{path}.{key}" if path else key,
                                  *_loc(node))
            default = fld.default
            if fld.sub is not None and isinstance(default, dict):
                default = {k: v for k, v in default.items()}
                for sk, sf in fld.sub.items():
                    if sk not in default and not sf.required:
                        default[sk] = sf.default
            out[key] = default
    return out


# ---- records ----------------------------------------------------------------

@dataclass(frozen=True)
class DeviceConfig:
    name: str
    qubit_a: FluxoniumSpec
    qubit_b: FluxoniumSpec
    j_c: float
    coherence: CoherenceTable
    eps_ratio: float = 1.3
    levels_per_qubit: int = 6
    basis_dim: int = 80

    def coupled_spec(self):
        from .coupled import CoupledSpec
        return CoupledSpec(self.qubit_a, self.qubit_b, self.j_c, self.levels_per_qubit,
                           self.basis_dim)

    def to_dict(self):
        d = asdict(self)
        d["coherence"] = {k: v for k, v in d["coherence"].items() if math.isfinite(v)}
        return {"schema_version": SCHEMA_VERSION, "type": "device", **d}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "type": "experiment", "kind": self.kind,
                "seed": self.seed, "params": self.params}


def _device_from(tree, where):
    try:
        coh = CoherenceTable(**tree["coherence"])
    except ValueError as exc:
        raise ConfigError(str(exc), "coherence") from None
    qubits = []
    for name in ("qubit_a", "qubit_b"):
        try:
            qubits.append(FluxoniumSpec(**tree[name]))
        except ValueError as exc:
            raise ConfigError(str(exc), name) from None
    return DeviceConfig(tree["name"], qubits[0], qubits[1], tree["j_c"], coh, tree["eps_ratio"],
                        tree["levels_per_qubit"], tree["basis_dim"])


def experiment_from_dict(kind, seed=0, params=None, node=None):
    """Validate kind-specific parameters and fill defaults."""
    if kind not in KIND_SCHEMAS:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {KINDS}", "kind")
    if node is None:
        node = yaml.compose(yaml.safe_dump(params or {}))
    if node is None:
        node = yaml.compose("{}")
    p = _walk(node, KIND_SCHEMAS[kind], "params")
    return ExperimentConfig(kind, seed, p)


def loads_config(text, source="<string>"):
    """Parse configuration text into a DeviceConfig or ExperimentConfig.

    Raises
    ------
    ConfigError
        On syntax errors (with line and column), unknown or missing keys,
        wrong types and violated invariants.
    """
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ConfigError(f"{source}: syntax error: {exc.problem}", None,
                          mark.line + 1 if mark else None,
                          mark.column + 1 if mark else None) from None
    if root is None or not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{source}: expected a mapping at top level")
    kinds = {k.value: v for k, v in root.value}
    if "type" not in kinds:
        raise ConfigError(f"{source}: missing 'type' (device or experiment)", "type",
                          *_loc(root))
    ctype = kinds["type"].value
    if ctype == "device":
        tree = _walk(root, DEVICE_SCHEMA, "")
    elif ctype == "experiment":
        # params are validated against the kind's schema below
        tree = _walk(root, EXPERIMENT_SCHEMA, "")
    else:
        raise ConfigError(f"{source}: unknown type {ctype!r}", "type", *_loc(kinds["type"]))
    if tree["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"{source}: unsupported schema_version {tree['schema_version']}",
                          "schema_version", *_loc(kinds["schema_version"]))
    if ctype == "device":
        return _device_from(tree, source)
    return experiment_from_dict(tree["kind"], tree["seed"], None,
                                kinds.get("params") or yaml.compose("{}"))


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return loads_config(text, str(path))


def dumps_config(record):
    """Serialize a config record; ``loads_config`` inverts it exactly."""
    return yaml.safe_dump(record.to_dict(), sort_keys=False, default_flow_style=None)


def config_hash(*records, seed=None):
    """Short SHA-256 of the canonical JSON of the given records and seed."""
    payload = json.dumps([r.to_dict() for r in records] + [seed], sort_keys=True,
                         default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def bundled_device(name="main"):
    """Path of a device file shipped with the package."""
    from importlib.resources import files
    return files("fluxstark") / "data" / f"device_{name}.cfg"
