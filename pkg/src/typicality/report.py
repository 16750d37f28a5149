"""Experiment report container and its JSON / CSV serialization.

JSON shape::

    {"name": str, "version": str, "params": {...},
     "series": {table: {column: [values...]}}, "summary": {...}}

CSV output writes one file per series table, ``<name>__<table>.csv``,
preceded by ``#`` comment lines carrying name, version, and params.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


def substream(seed: int, name: str, *keys: int) -> np.random.Generator:
    """Generator for the named substream ``name`` (plus integer keys) of ``seed``."""
    entropy = [int(seed), zlib.crc32(name.encode("utf-8")), *(int(k) for k in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=True) + "\n"


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def write_csv(path, columns: dict, header: dict | None = None) -> Path:
    """Write equal-length columns to ``path`` with optional ``# key: value`` lines."""
    path = Path(path)
    names = list(columns)
    lengths = {len(columns[c]) for c in names}
    if len(lengths) > 1:
        raise ValueError(f"columns of {path.name} differ in length: {sorted(lengths)}")
    buf = io.StringIO()
    for key, value in (header or {}).items():
        text = value if isinstance(value, str) else json.dumps(to_jsonable(value), sort_keys=True)
        buf.write(f"# {key}: {text}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*(columns[c] for c in names)):
        writer.writerow([_cell(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


@dataclass
class ExperimentReport:
    name: str
    params: dict
    series: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return to_jsonable({
            "name": self.name,
            "version": __version__,
            "params": self.params,
            "series": self.series,
            "summary": self.summary,
        })

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    def write_csv(self, directory) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        header = {"name": self.name, "version": __version__, "params": self.params}
        return [write_csv(directory / f"{self.name}__{table}.csv", cols, header)
                for table, cols in self.series.items()]

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        series = {t: {c: np.asarray(v) for c, v in cols.items()} for t, cols in d["series"].items()}
        return cls(d["name"], d["params"], series, d["summary"])
