"""Serialization of traces and tables with fixed numeric formatting."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .algebra import EnsembleSpec
from .states import PulseTrace

OUTPUT_DIR_ENV = "DICKESTARK_OUTPUT_DIR"


def fmt(x) -> str:
    """17 significant digits, '.' separator, no locale involvement."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def resolve_output(path, default_name: str) -> Path:
    """Explicit paths are used as given; otherwise the env-configured directory (or cwd)."""
    if path:
        return Path(path)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_columns(spec: EnsembleSpec):
    return ["tau", "intensity"] + [f"p[{spec.label(k)}]" for k in range(spec.dim)]


def trace_csv(spec: EnsembleSpec, trace: PulseTrace) -> str:
    lines = [",".join(trace_columns(spec))]
    for t, i, row in zip(trace.times, trace.intensities, trace.population_history):
        lines.append(",".join([fmt(t), fmt(i)] + [fmt(p) for p in row]))
    return "\n".join(lines) + "\n"


def _json_list(values) -> str:
    return "[" + ", ".join(fmt(v) for v in values) + "]"


def trace_json(spec: EnsembleSpec, trace: PulseTrace) -> str:
    cols = trace_columns(spec)
    parts = [
        f'  "columns": {json.dumps(cols)}',
        f'  "tau": {_json_list(trace.times)}',
        f'  "intensity": {_json_list(trace.intensities)}',
    ]
    pops = ",\n".join(
        f"    {json.dumps(name)}: {_json_list(trace.population_history[:, k])}" for k, name in enumerate(cols[2:])
    )
    parts.append('  "populations": {\n' + pops + "\n  }")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def write_trace(spec: EnsembleSpec, trace: PulseTrace, path, fmt_name: str = "csv", metadata: dict | None = None):
    """Write a trace (and its ``.meta.json`` sidecar when metadata is given)."""
    path = Path(path)
    text = trace_csv(spec, trace) if fmt_name == "csv" else trace_json(spec, trace)
    atomic_write(path, text)
    if metadata is not None:
        atomic_write(sidecar_path(path), json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    return path


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def read_trace_csv(path):
    """(header, data array) of a CSV trace."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def table_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"
