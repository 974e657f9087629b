"""Dataset emission: fixed CSV schemas with a JSON-lines mirror.

Schemas are a stable contract for downstream consumers (the plotting
component parses them by header).  Floats are serialized with 17 significant
digits so emitted values re-parse bit-exactly; NaN is rejected, infinities
are allowed only where a schema says so (region endpoints).
"""
from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import SchemaError


@dataclass(frozen=True)
class Schema:
    name: str
    columns: tuple[str, ...]
    inf_ok: frozenset = frozenset()


SCHEMAS = {
    "contour": Schema("contour", ("theta", "pi")),
    "validity": Schema("validity", ("alpha", "cdf", "band")),
    "false_confidence": Schema("false_confidence", ("alpha", "assigner", "cdf")),
    "equivalence": Schema("equivalence", ("u", "hitting", "contour", "mc_se")),
    "coverage": Schema(
        "coverage",
        ("method", "level", "coverage", "mean_length", "unbounded_count",
         "mc_se", "reps", "seed"),
        inf_ok=frozenset({"mean_length"}),
    ),
    "region": Schema("region", ("model", "alpha", "lower", "upper"),
                     inf_ok=frozenset({"lower", "upper"})),
}


def format_value(value, column: str, schema: Schema) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise SchemaError(f"NaN in column {column!r} of schema {schema.name!r}")
        if math.isinf(value) and column not in schema.inf_ok:
            raise SchemaError(
                f"infinite value not allowed in column {column!r} of schema {schema.name!r}"
            )
        return f"{value:.17g}"
    return str(value)


def _check_row(row: dict, schema: Schema) -> list[str]:
    if set(row.keys()) != set(schema.columns):
        raise SchemaError(
            f"row keys {sorted(row)} do not match schema {schema.name!r} "
            f"columns {list(schema.columns)}"
        )
    return [format_value(row[c], c, schema) for c in schema.columns]


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_dataset(path, schema: Schema | str, rows, fmt: str = "csv") -> list[Path]:
    """Write rows under a schema; returns the written paths.

    fmt='csv' writes the CSV plus a .jsonl mirror next to it;
    fmt='json-lines' writes only the JSON-lines file at the given path.
    """
    if isinstance(schema, str):
        schema = SCHEMAS[schema]
    path = Path(path)
    formatted = [_check_row(dict(r), schema) for r in rows]
    jsonl_lines = [
        json.dumps({c: v for c, v in zip(schema.columns, vals)}, sort_keys=False)
        for vals in formatted
    ]
    written: list[Path] = []
    if fmt == "csv":
        out = ",".join(schema.columns) + "\n"
        out += "".join(",".join(vals) + "\n" for vals in formatted)
        _atomic_write(path, out)
        written.append(path)
        mirror = path.with_suffix(".jsonl")
        _atomic_write(mirror, "".join(line + "\n" for line in jsonl_lines))
        written.append(mirror)
    elif fmt == "json-lines":
        _atomic_write(path, "".join(line + "\n" for line in jsonl_lines))
        written.append(path)
    else:
        raise SchemaError(f"unknown output format {fmt!r}")
    return written


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]
