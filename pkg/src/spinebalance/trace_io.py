"""CSV traces with JSON sidecars.

Each record is a CSV file with a fixed header and a sidecar ``.json`` next to
it holding the configuration snapshot, run identity and metrics. Floats are
written with 17 significant digits, which round-trips every double exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import TraceFormatError, TraceIOError
from .tilt import BalanceMetrics

SCHEMA_VERSION = "1.0"
COLUMNS = ("t", "l_f", "l_h", "R", "f_T", "k", "fx", "fy", "hx", "hy", "dis", "theta_roll", "theta_pitch")


@dataclass
class ExperimentRecord:
    """One run: configuration, identity, trace columns and metrics.

    ``data`` has shape ``(n_rows, len(COLUMNS))``.
    """

    config: dict
    controller: str
    frequency: float
    seed: int
    repetition: int = 0
    data: np.ndarray = field(default_factory=lambda: np.empty((0, len(COLUMNS))))
    metrics: BalanceMetrics = field(default_factory=BalanceMetrics)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(COLUMNS))

    def column(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    def sidecar(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "controller": self.controller,
            "frequency": self.frequency,
            "seed": self.seed,
            "repetition": self.repetition,
            "columns": list(COLUMNS),
            "rows": int(self.data.shape[0]),
            "metrics": self.metrics.to_dict(),
            "config": self.config,
        }


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def dump_json(obj, path):
    """Deterministic JSON (sorted keys, fixed indent, finite numbers only)."""
    path = Path(path)
    try:
        text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    except ValueError as exc:
        raise TraceFormatError(f"cannot serialise: {exc}", path) from exc
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise TraceIOError(f"{path}: {exc.strerror or exc}") from exc


def write_trace(record: ExperimentRecord, destination) -> Path:
    """Write ``destination`` (CSV) and its sidecar; returns the CSV path."""
    dest = Path(destination)
    if not np.all(np.isfinite(record.data)):
        raise TraceFormatError("trace contains non-finite values", dest)
    try:
        dest.parent.mkdir(parents=True, exist_ok=True)
        with dest.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for row in record.data.tolist():
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise TraceIOError(f"{dest}: {exc.strerror or exc}") from exc
    dump_json(record.sidecar(), sidecar_path(dest))
    return dest


def _parse_float(token, path, line):
    try:
        v = float(token)
    except ValueError:
        raise TraceFormatError(f"not a number: {token!r}", path, line) from None
    if not math.isfinite(v):
        raise TraceFormatError(f"non-finite value {token!r}", path, line)
    return v


def _read_sidecar(path):
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise TraceIOError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from exc
    version = str(meta.get("schema_version", ""))
    major = version.split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise TraceFormatError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})", path)
    return meta


def read_trace(source) -> ExperimentRecord:
    """Read a CSV trace and its sidecar back into a record."""
    src = Path(source)
    meta = _read_sidecar(sidecar_path(src))
    rows = []
    try:
        with src.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != COLUMNS:
                raise TraceFormatError(f"unexpected header {header!r}", src, 1)
            for line, row in enumerate(reader, start=2):
                if len(row) != len(COLUMNS):
                    raise TraceFormatError(f"expected {len(COLUMNS)} fields, got {len(row)}", src, line)
                rows.append([_parse_float(tok, src, line) for tok in row])
    except OSError as exc:
        raise TraceIOError(f"{src}: {exc.strerror or exc}") from exc
    if "rows" in meta and meta["rows"] != len(rows):
        raise TraceFormatError(f"sidecar announces {meta['rows']} rows, CSV has {len(rows)}", src)
    try:
        metrics = BalanceMetrics.from_dict(meta["metrics"])
        return ExperimentRecord(
            config=meta["config"],
            controller=meta["controller"],
            frequency=float(meta["frequency"]),
            seed=int(meta["seed"]),
            repetition=int(meta.get("repetition", 0)),
            data=np.array(rows, dtype=float).reshape(-1, len(COLUMNS)),
            metrics=metrics,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceFormatError(f"incomplete sidecar: {exc}", sidecar_path(src)) from exc


def write_summary(summary: dict, path) -> Path:
    """Write an aggregated summary as deterministic JSON."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise TraceIOError(f"{path.parent}: {exc.strerror or exc}") from exc
    dump_json({"schema_version": SCHEMA_VERSION, **summary}, path)
    return path
