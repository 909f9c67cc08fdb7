from __future__ import annotations

import csv
import json
from logging import getLogger
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from qeclab.domain.ports import ArtifactSink

logger = getLogger(__name__)

CSV_SCHEMA_VERSION = 1


def format_cell(value: Any) -> str:
    """Floats via repr so reruns are byte-identical; bools as 0/1."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (tuple, set)):
        return list(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


class FileArtifactSink(ArtifactSink):
    def __init__(self, out_dir: Path | str):
        self.out_dir = Path(out_dir)

    def _path(self, name: str, suffix: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / f"{name}{suffix}"

    def write_table(self, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]], config_hash: str) -> Path:
        path = self._path(name, ".csv")
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(f"# schema={CSV_SCHEMA_VERSION}\n")
            fh.write(f"# config_hash={config_hash}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
        logger.debug(f"wrote {path} ({len(rows)} rows)")
        return path

    def write_json(self, name: str, payload: dict, config_hash: str) -> Path:
        path = self._path(name, ".json")
        doc = {"configHash": config_hash, **payload}
        path.write_text(json.dumps(doc, indent=2, default=to_jsonable) + "\n", encoding="utf-8")
        logger.debug(f"wrote {path}")
        return path


def read_table(path: Path | str) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """(header comments, columns, rows) of a CSV written by `FileArtifactSink`."""
    meta: dict[str, str] = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, value = line[1:].strip().partition("=")
        meta[key] = value
    else:
        body_start = len(lines)
    reader = list(csv.reader(lines[body_start:]))
    if not reader:
        return meta, [], []
    return meta, reader[0], reader[1:]
