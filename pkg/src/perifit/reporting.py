"""Run records, CSV round-trip and the Mean/Median/Min/Max aggregate table.

One RunRecord summarizes one (image, seed) fit.  CSV columns are fixed and
floats are written with repr(), so re-parsing an emitted file reproduces
the records exactly (infinite GF included).  Aggregation reports mean,
median, min and max per index; GF is aggregated over per-record values,
with infinite entries excluded and counted separately.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .evolve import FitResult

__all__ = [
    "RunRecord",
    "AggregateReport",
    "CSV_COLUMNS",
    "AGGREGATE_COLUMNS",
    "write_csv",
    "csv_text",
    "read_csv",
    "aggregate",
    "format_report",
]

CSV_COLUMNS = (
    "image", "seed", "theta", "xc", "yc", "a", "b", "fitness",
    "pr", "pg", "pc", "pb", "gf", "generations", "evaluations", "time_s",
)

AGGREGATE_COLUMNS = ("pr", "pg", "pc", "pb", "gf", "time_s")

_COLUMN_LABELS = {"pr": "PR", "pg": "PG", "pc": "PC", "pb": "PB",
                  "gf": "GF", "time_s": "Time (s)"}

_STAT_ROWS = ("Mean", "Median", "Min", "Max")


@dataclass(frozen=True)
class RunRecord:
    """One fit outcome: best parameters, objective, indices and bookkeeping."""

    image: str
    seed: int
    theta: float
    xc: float
    yc: float
    a: float
    b: float
    fitness: float
    pr: float
    pg: float
    pc: float
    pb: float
    gf: float
    generations: int
    evaluations: int
    time_s: float

    @classmethod
    def from_fit(cls, image: str, seed: int, result: FitResult) -> "RunRecord":
        params = result.best.params
        metrics = result.metrics
        return cls(
            image=image,
            seed=seed,
            theta=params.theta,
            xc=params.x_c,
            yc=params.y_c,
            a=params.a,
            b=params.b,
            fitness=result.best.fitness,
            pr=metrics.pr,
            pg=metrics.pg,
            pc=metrics.pc,
            pb=metrics.pb,
            gf=metrics.gf,
            generations=result.generations_run,
            evaluations=result.evaluations,
            time_s=result.elapsed,
        )

    def to_csv_row(self) -> list[str]:
        row = []
        for f in fields(self):
            value = getattr(self, f.name)
            row.append(repr(value) if isinstance(value, float) else str(value))
        return row

    @classmethod
    def from_csv_row(cls, row: Mapping[str, str]) -> "RunRecord":
        kwargs = {}
        for f in fields(cls):
            raw = row[f.name]
            if f.type == "int":
                kwargs[f.name] = int(raw)
            elif f.type == "float":
                kwargs[f.name] = float(raw)
            else:
                kwargs[f.name] = raw
        return cls(**kwargs)


def csv_text(records) -> str:
    """Serialize records as CSV text with the fixed column order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(record.to_csv_row())
    return buf.getvalue()


def write_csv(path, records) -> None:
    Path(path).write_text(csv_text(records), encoding="utf-8")


def read_csv(path) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return [RunRecord.from_csv_row(row) for row in reader]


@dataclass(frozen=True)
class AggregateReport:
    """Mean/median/min/max per index over a set of run records.

    ``stats`` maps column name to (mean, median, min, max).  GF statistics
    cover only records with finite GF; the excluded count is reported so
    perfect fits (GF = inf) remain visible.  Columns with no usable values
    carry NaN statistics.
    """

    stats: dict[str, tuple[float, float, float, float]]
    record_count: int
    gf_infinite_count: int

    def gf_finite_count(self) -> int:
        return self.record_count - self.gf_infinite_count


def _column_stats(values) -> tuple[float, float, float, float]:
    if not values:
        return (math.nan,) * 4
    return (statistics.fmean(values), statistics.median(values),
            min(values), max(values))


def aggregate(records) -> AggregateReport:
    records = list(records)
    stats = {}
    gf_infinite = 0
    for column in AGGREGATE_COLUMNS:
        values = [getattr(r, column) for r in records]
        if column == "gf":
            finite = [v for v in values if math.isfinite(v)]
            gf_infinite = len(values) - len(finite)
            values = finite
        stats[column] = _column_stats(values)
    return AggregateReport(
        stats=stats, record_count=len(records), gf_infinite_count=gf_infinite
    )


def _cell(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:.2f}"


def format_report(report: AggregateReport) -> str:
    """Render the aggregate as a table: columns PR..Time, rows Mean..Max."""
    header = "".join(f"{_COLUMN_LABELS[c]:>10}" for c in AGGREGATE_COLUMNS)
    lines = [f"{'':8}{header}"]
    for row_index, label in enumerate(_STAT_ROWS):
        cells = "".join(
            f"{_cell(report.stats[c][row_index]):>10}" for c in AGGREGATE_COLUMNS
        )
        lines.append(f"{label:<8}{cells}")
    lines.append(f"Records: {report.record_count}")
    if report.gf_infinite_count:
        lines.append(
            f"GF aggregated over {report.gf_finite_count()} of {report.record_count} "
            f"records ({report.gf_infinite_count} with infinite GF excluded)"
        )
    return "\n".join(lines)
