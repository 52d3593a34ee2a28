"""CSV and JSON writers with round-trip float precision and run manifests."""

from __future__ import annotations

import json
import math
import platform
import time
from importlib import metadata
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """Shortest repr that round-trips; NaN is written as an empty field."""
    if x is None:
        return ""
    if isinstance(x, (str, bool, np.bool_)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


def write_csv(path, columns, rows, header: dict | None = None) -> Path:
    """Write ``rows`` under ``columns``; ``header`` goes in leading ``# key: value`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for k, v in (header or {}).items():
        lines.append(f"# {k}: {v if isinstance(v, str) else json.dumps(v, default=_jsonable)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path) -> tuple[dict, list[str], np.ndarray]:
    """Inverse of write_csv; empty and non-numeric fields become NaN."""
    header, cols, rows = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            header[k.strip()] = v.strip()
        elif cols is None:
            cols = line.split(",")
        elif line:
            rows.append([_number(x) for x in line.split(",")])
    return header, cols, np.array(rows, dtype=float).reshape(-1, len(cols))


def _number(field: str) -> float:
    try:
        return float(field) if field else np.nan
    except ValueError:
        return np.nan


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=False, default=_jsonable) + "\n",
                    encoding="utf-8")
    return path


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def code_version() -> str:
    try:
        return metadata.version("dressedthermo")
    except metadata.PackageNotFoundError:
        return "unknown"


class Manifest:
    """Collects outputs and failures of one command; written as manifest.json."""

    def __init__(self, command: str, config: dict, argv: list[str] | None = None):
        self.command = command
        self.config = config
        self.argv = list(argv or [])
        self.outputs: list[str] = []
        self.failures: list[dict] = []
        self._start = time.perf_counter()

    def add_output(self, path):
        self.outputs.append(Path(path).name)

    def add_failure(self, point: dict, error: str):
        self.failures.append({"point": point, "error": error})

    def write(self, out_dir) -> Path:
        return write_json(Path(out_dir) / f"manifest_{self.command}.json", {
            "command": self.command,
            "argv": self.argv,
            "code_version": code_version(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "wall_time_s": time.perf_counter() - self._start,
            "outputs": self.outputs,
            "failures": self.failures,
            "config": self.config,
        })
