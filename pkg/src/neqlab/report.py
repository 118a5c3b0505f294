"""Deterministic report emission: JSON, CSV, and run manifests.

Floats are printed with 17 significant digits through a small in-house
JSON writer so that identical runs produce byte-identical files (the
stdlib encoder does not expose float formatting).
"""

from __future__ import annotations

import hashlib
import io
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import EmptyReport, IoError


def format_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x == float("inf"):
        return "Infinity"
    if x == float("-inf"):
        return "-Infinity"
    s = format(float(x), ".17g")
    # ensure the token parses back as a float, not an int
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _write_json(obj, out: io.StringIO, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.write(f'{pad}  "{k}": ')
            _write_json(v, out, indent + 1)
            out.write(",\n" if i + 1 < len(items) else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.write("[]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad + "  ")
            _write_json(v, out, indent + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(pad + "]")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif obj is None:
        out.write("null")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(format_float(float(obj)))
    elif isinstance(obj, np.ndarray):
        _write_json(obj.tolist(), out, indent)
    elif isinstance(obj, str):
        out.write('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    else:
        raise IoError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    out = io.StringIO()
    _write_json(obj, out, 0)
    out.write("\n")
    return out.getvalue()


def write_json(obj, path) -> str:
    text = dumps_json(obj)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return str(path)


def write_csv(rows, header, path) -> str:
    """rows: iterables of str/int/float; floats are rendered with 17 digits."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(format_float(float(v)))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return str(path)


@dataclass
class RunManifest:
    spec_hash: str
    command: str
    tolerances: dict
    tool_version: str = __version__
    outputs: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def to_json_dict(self):
        return {
            "spec_hash": self.spec_hash,
            "command": self.command,
            "tolerances": self.tolerances,
            "tool_version": self.tool_version,
            "outputs": self.outputs,
            "wall_time_s": self.wall_time_s,
        }


def tolerances_dict(tol):
    return {
        "ode_rel": tol.ode_rel,
        "ode_abs": tol.ode_abs,
        "root_tol": tol.root_tol,
        "hyp_tol": tol.hyp_tol,
        "crit_tol": tol.crit_tol,
        "sum_tol": tol.sum_tol,
    }


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def emit_report(records, out_dir, spec, fmt="json", command="solve"):
    """Write equilibrium records plus profiles and a manifest.

    Returns the list of written files.  Deterministic: same inputs give
    byte-identical report files (the manifest carries wall time and is
    excluded from that contract).
    """
    if not records:
        raise EmptyReport("no records to emit")
    os.makedirs(out_dir, exist_ok=True)
    spec_hash = spec.content_hash()
    outputs = []
    recs_doc = []
    for i, rec in enumerate(records):
        profile_file = f"profile_{i:04d}.json"
        pdoc = rec.profile.to_json_dict()
        outputs.append(write_json(pdoc, os.path.join(out_dir, profile_file)))
        doc = {
            "u0": rec.u0,
            "is_constant": rec.is_constant,
            "multiplicity": rec.multiplicity,
            "miss": rec.miss,
            "miss_slope": rec.miss_slope,
            "profile": profile_file,
            "flags": dict(sorted(rec.flags.items())),
        }
        if rec.spectrum is not None:
            doc["spectrum"] = rec.spectrum.to_json_dict()
        recs_doc.append(doc)
    summary = {
        "schema_version": 1,
        "spec_hash": spec_hash,
        "scan_bound": spec.scan_bound,
        "n_records": len(records),
        "records": recs_doc,
    }
    if fmt == "json":
        outputs.append(write_json(summary, os.path.join(out_dir, "equilibria.json")))
    elif fmt == "csv":
        rows = [
            (i, r.u0, int(r.is_constant), r.miss, r.miss_slope)
            for i, r in enumerate(records)
        ]
        outputs.append(
            write_csv(rows, ["index", "u0", "is_constant", "miss", "miss_slope"],
                      os.path.join(out_dir, "equilibria.csv"))
        )
    else:
        raise IoError(f"unknown format {fmt!r}")
    return outputs
