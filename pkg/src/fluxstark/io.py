"""Artifact writing: JSON records and CSV sweeps with a metadata header.

Every artifact starts with the same metadata (tool name and version,
config hash, seed). CSV files carry it as ``#`` comment lines. All files of
a run are written to a staging directory that is moved into place only
when the whole run succeeds, so a failed run leaves nothing behind.
"""

import csv
import io
import json
import math
import os
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import __version__

TOOL = "fluxstark"


def metadata(config_hash, seed, **extra):
    return {"tool": TOOL, "version": __version__, "config_hash": config_hash,
            "seed": seed, **extra}


def to_jsonable(obj):
    """Convert numpy scalars, arrays, complex numbers and dataclasses."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if hasattr(obj, "__dataclass_fields__"):
        return to_jsonable({k: getattr(obj, k) for k in obj.__dataclass_fields__
                            if not k.startswith("_")})
    return obj


def json_text(meta, record):
    return json.dumps({"metadata": meta, "result": to_jsonable(record)}, indent=2,
                      sort_keys=True) + "\n"


def csv_text(meta, header, rows):
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}: {meta[key]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_csv(path):
    """(metadata, header, rows) of a CSV artifact; values stay strings."""
    meta, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                k, _, v = line[2:].rstrip("\n").partition(": ")
                meta[k] = v
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return meta, rows[0], rows[1:]


@dataclass
class ArtifactWriter:
    """Collects files in a staging directory; ``commit`` moves them to ``out``."""

    out: str
    meta: dict
    written: list = field(default_factory=list)

    def __post_init__(self):
        parent = os.path.dirname(os.path.abspath(self.out)) or "."
        os.makedirs(parent, exist_ok=True)
        self._stage = tempfile.mkdtemp(prefix=".fluxstark-", dir=parent)

    def write_json(self, name, record):
        self._write(name, json_text(self.meta, record))

    def write_csv(self, name, header, rows):
        self._write(name, csv_text(self.meta, header, rows))

    def _write(self, name, text):
        with open(os.path.join(self._stage, name), "w", encoding="utf-8") as fh:
            fh.write(text)
        self.written.append(name)

    def commit(self):
        os.makedirs(self.out, exist_ok=True)
        for name in self.written:
            os.replace(os.path.join(self._stage, name), os.path.join(self.out, name))
        shutil.rmtree(self._stage, ignore_errors=True)

    def discard(self):
        shutil.rmtree(self._stage, ignore_errors=True)


@contextmanager
def staged_output(out, meta):
    """Yield an ArtifactWriter; files appear in ``out`` only on success."""
    writer = ArtifactWriter(out, meta)
    try:
        yield writer
    except BaseException:
        writer.discard()
        raise
    writer.commit()
