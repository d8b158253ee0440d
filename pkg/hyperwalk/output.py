"""Result files: CSV with a commented metadata preamble, or JSON.

Files are written to a temporary sibling and renamed into place, so a failed
run never leaves a partial result behind.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

import hyperwalk

logger = logging.getLogger(__name__)


@dataclass
class FigureTable:
    """Rows for one figure, with a fixed column order."""

    figure: str
    columns: List[str]
    rows: List[Dict[str, object]] = field(default_factory=list)

    def add(self, **row):
        missing = set(self.columns) - set(row)
        if missing:
            raise KeyError(f"Row for {self.figure} is missing columns: {', '.join(sorted(missing))}")
        self.rows.append(row)

    def column(self, name):
        return [row[name] for row in self.rows]


def _plain(value):
    """Convert numpy scalars; NaN and None both mean 'no value'."""
    if value is None:
        return None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    return value


def format_value(value) -> str:
    """Render a cell: floats at round-trip precision, missing values as ''."""
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_metadata(config, wall_time) -> Dict[str, object]:
    return {
        "figure": config.figure,
        "mode": config.mode,
        "seed": config.seed,
        "version": hyperwalk.__version__,
        "wall_time_s": round(wall_time, 3),
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": json.dumps(config.as_dict(), sort_keys=True),
    }


def _atomic_write(path: Path, write):
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
    )
    try:
        with handle:
            write(handle)
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except FileNotFoundError:
            pass
        raise


def write_csv(path, table: FigureTable, metadata: Optional[Dict[str, object]] = None) -> Path:
    path = Path(path)

    def write(stream):
        for key, value in (metadata or {}).items():
            stream.write(f"# {key}: {value}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(row[name]) for name in table.columns])

    _atomic_write(path, write)
    return path


def write_json(path, table: FigureTable, metadata: Optional[Dict[str, object]] = None) -> Path:
    path = Path(path)
    document = {
        "metadata": metadata or {},
        "columns": table.columns,
        "rows": [{name: _plain(row[name]) for name in table.columns} for row in table.rows],
    }

    def write(stream):
        json.dump(document, stream, indent=2, allow_nan=False)
        stream.write("\n")

    _atomic_write(path, write)
    return path


WRITERS = {"csv": write_csv, "json": write_json}


def write_result(table: FigureTable, config, wall_time) -> List[Path]:
    metadata = build_metadata(config, wall_time)
    paths = []
    for fmt, target in config.output_targets():
        paths.append(WRITERS[fmt](target, table, metadata))
        logger.info("wrote %d rows of %s to %s", len(table.rows), table.figure, paths[-1])
    return paths
