"""Dataset ingestion and plot/score document serialization.

CSV convention: a header row; one column holds the observed response
(default name ``y``), columns named ``yhat:<label>`` hold one model's
predictions each, every other column is a variable. Numeric parsing is
locale-independent (dot decimal); NaN/Inf in response or prediction cells
are rejected at ingestion with the offending cell named.

Plot data and score reports serialize to JSON documents (schema_version 1)
that round-trip losslessly; the only non-deterministic field is the
``generated_at`` timestamp, which consumers exclude from determinism
comparisons.
"""
from __future__ import annotations

import csv
import datetime
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .frame import AuditFrame, CurveSeries, ScoreResult, PLOT_KINDS

SCHEMA_VERSION = "1"
PREDICTION_PREFIX = "yhat:"


# -- CSV ---------------------------------------------------------------------

def _parse_number(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell.strip())
    except ValueError:
        raise ValidationError(
            f"cell at data row {row}, column {column!r} is not numeric: {cell!r}")
    if not math.isfinite(value):
        raise ValidationError(
            f"cell at data row {row}, column {column!r} is not finite: {cell!r}")
    return value


def read_csv_columns(path) -> tuple[list[str], list[list[str]]]:
    """Read a CSV file into (header, per-column string cells)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file")
        rows = list(reader)
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise ValidationError(f"{path}: duplicate header columns {dupes}")
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise ValidationError(
                f"{path}: row {i} has {len(row)} cells, expected {len(header)}")
    columns = [[row[j] for row in rows] for j in range(len(header))]
    return header, columns


def ingest_csv(path, y_column: str = "y") -> AuditFrame:
    """Load a wide CSV into a validated AuditFrame."""
    header, columns = read_csv_columns(path)
    if y_column not in header:
        raise ValidationError(f"{path}: missing response column {y_column!r}")
    by_name = dict(zip(header, columns))
    if not by_name[y_column]:
        raise ValidationError(f"{path}: no data rows")
    y = [_parse_number(cell, i + 1, y_column)
         for i, cell in enumerate(by_name[y_column])]

    models = []
    variables: dict[str, object] = {}
    for name in header:
        if name == y_column:
            continue
        cells = by_name[name]
        if name.startswith(PREDICTION_PREFIX):
            label = name[len(PREDICTION_PREFIX):]
            values = [_parse_number(cell, i + 1, name)
                      for i, cell in enumerate(cells)]
            models.append((label, np.asarray(values)))
        else:
            variables[name] = _variable_column(cells)
    return AuditFrame(y=np.asarray(y), models=tuple(models), variables=variables)


def _variable_column(cells: list[str]):
    values = []
    for cell in cells:
        try:
            value = float(cell.strip())
        except ValueError:
            return np.asarray([c.strip() for c in cells], dtype=str)
        if not math.isfinite(value):
            return np.asarray([c.strip() for c in cells], dtype=str)
        values.append(value)
    return np.asarray(values)


def format_number(value: float) -> str:
    """Shortest round-trip decimal form (so CSV/JSON round-trips are exact)."""
    return repr(float(value))


def table_csv_text(columns: Mapping[str, np.ndarray]) -> str:
    """Named numeric columns as CSV text with round-trip float formatting."""
    import io as _io
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for i in range(len(next(iter(columns.values())))):
        writer.writerow([format_number(columns[name][i]) for name in names])
    return buf.getvalue()


def write_table_csv(columns: Mapping[str, np.ndarray], path):
    """Write named numeric columns as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(table_csv_text(columns))


def frame_to_csv(frame: AuditFrame, path, y_column: str = "y"):
    """Serialize an AuditFrame back to the wide CSV convention."""
    names = [y_column] + [PREDICTION_PREFIX + lbl for lbl, _ in frame.models] \
        + list(frame.variables)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for i in range(frame.n):
            row = [format_number(frame.y[i])]
            row += [format_number(pred[i]) for _, pred in frame.models]
            for col in frame.variables.values():
                row.append(format_number(col[i])
                           if np.issubdtype(col.dtype, np.floating)
                           else str(col[i]))
            writer.writerow(row)


def dataset_sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# -- documents ----------------------------------------------------------------

def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def make_metadata(dataset_hash: str | None = None, seed: int | None = None,
                  warnings: Sequence[str] = ()) -> dict:
    return {
        "dataset_sha256": dataset_hash,
        "seed": seed,
        "generated_at": _timestamp(),
        "warnings": list(warnings),
    }


def serialize_series(series: CurveSeries) -> dict:
    return {
        "kind": series.kind,
        "label": series.label,
        "points": [[x, y] for x, y in zip(series.xs.tolist(), series.ys.tolist())],
        "aux": {name: list(values) for name, values in series.aux.items()},
    }


def parse_series(obj: dict) -> CurveSeries:
    try:
        points = obj["points"]
        xs = np.asarray([p[0] for p in points], dtype=float)
        ys = np.asarray([p[1] for p in points], dtype=float)
        return CurveSeries(kind=obj["kind"], label=obj["label"], xs=xs, ys=ys,
                           aux={k: tuple(v) for k, v in obj.get("aux", {}).items()})
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed series object: {exc}")


@dataclass(frozen=True)
class PlotDataDocument:
    """All series of one plot type, for every model, plus metadata."""

    plot_type: str
    series: tuple[CurveSeries, ...]
    metadata: Mapping[str, object] = field(default_factory=dict)
    extra: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.plot_type not in PLOT_KINDS:
            raise ValidationError(f"unknown plot type {self.plot_type!r}")

    def to_dict(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "plot_type": self.plot_type,
            "series": [serialize_series(s) for s in self.series],
            "metadata": dict(self.metadata),
        }
        if self.extra:
            doc["extra"] = json.loads(json.dumps(dict(self.extra)))
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          allow_nan=False) + "\n"


def parse_plot_document(text: str) -> PlotDataDocument:
    obj = json.loads(text)
    if not isinstance(obj, dict) or obj.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError("not a schema_version 1 plot document")
    return PlotDataDocument(
        plot_type=obj.get("plot_type", ""),
        series=tuple(parse_series(s) for s in obj.get("series", [])),
        metadata=obj.get("metadata", {}),
        extra=obj.get("extra", {}))


def serialize_score(result: ScoreResult) -> dict:
    return {"name": result.name, "label": result.label, "value": result.value,
            "components": dict(result.components)}


def parse_score(obj: dict) -> ScoreResult:
    try:
        return ScoreResult(name=obj["name"], label=obj["label"],
                           value=obj["value"],
                           components=obj.get("components", {}))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed score object: {exc}")


@dataclass(frozen=True)
class ScoreReport:
    """A list of scalar diagnostics plus metadata."""

    scores: tuple[ScoreResult, ...]
    metadata: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scores": [serialize_score(s) for s in self.scores],
            "metadata": dict(self.metadata),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          allow_nan=False) + "\n"


def parse_score_report(text: str) -> ScoreReport:
    obj = json.loads(text)
    if not isinstance(obj, dict) or obj.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError("not a schema_version 1 score report")
    return ScoreReport(scores=tuple(parse_score(s) for s in obj.get("scores", [])),
                       metadata=obj.get("metadata", {}))
