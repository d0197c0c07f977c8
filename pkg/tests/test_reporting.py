"""Run records, CSV round-trip, and the aggregate table."""

import math

import numpy as np
import pytest

from perifit import RunRecord, aggregate, format_report
from perifit.reporting import CSV_COLUMNS, csv_text, read_csv, write_csv


def make_record(i=0, **overrides):
    base = dict(
        image=f"img_{i}.png",
        seed=i,
        theta=123.456789 + i,
        xc=200.1 + i,
        yc=199.9 - i,
        a=150.0 + 0.1 * i,
        b=120.0,
        fitness=123456.789 + i,
        pr=97.0 + i * 0.3,
        pg=20.0 - i,
        pc=1.5,
        pb=10.0 + i,
        gf=1.0 + i,
        generations=100 + i,
        evaluations=4020 + 40 * i,
        time_s=2.523 + 0.01 * i,
    )
    base.update(overrides)
    return RunRecord(**base)


class TestCsvRoundTrip:
    def test_columns_are_pinned(self):
        assert CSV_COLUMNS == (
            "image", "seed", "theta", "xc", "yc", "a", "b", "fitness",
            "pr", "pg", "pc", "pb", "gf", "generations", "evaluations", "time_s",
        )
        header = csv_text([]).strip()
        assert header == ",".join(CSV_COLUMNS)

    def test_round_trip_is_exact(self, tmp_path):
        records = [
            make_record(0, theta=0.1 + 0.2),  # a float with a long repr
            make_record(1, gf=math.inf),
            make_record(2, pr=100.0, pg=0.0, pb=0.0, gf=math.inf),
        ]
        path = tmp_path / "runs.csv"
        write_csv(path, records)
        assert read_csv(path) == records

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_csv(path)


class TestAggregate:
    def test_simple_gf_statistics(self):
        records = [make_record(i, gf=v) for i, v in enumerate([1.0, 2.0, 3.0])]
        report = aggregate(records)
        mean, median, mn, mx = report.stats["gf"]
        assert (mean, median, mn, mx) == (2.0, 2.0, 1.0, 3.0)

    def test_infinite_gf_excluded_and_counted(self):
        records = [make_record(0, gf=2.0), make_record(1, gf=math.inf),
                   make_record(2, gf=4.0)]
        report = aggregate(records)
        assert report.gf_infinite_count == 1
        assert report.gf_finite_count() == 2
        assert report.stats["gf"] == (3.0, 3.0, 2.0, 4.0)

    def test_all_infinite_gf_yields_nan_stats(self):
        report = aggregate([make_record(0, gf=math.inf)])
        assert all(math.isnan(v) for v in report.stats["gf"])
        assert "n/a" in format_report(report)

    def test_min_median_max_ordering(self, np_rng):
        records = [make_record(i, pr=float(v))
                   for i, v in enumerate(np_rng.uniform(0, 100, size=11))]
        report = aggregate(records)
        for column in ("pr", "pg", "pc", "pb", "time_s"):
            mean, median, mn, mx = report.stats[column]
            assert mn <= median <= mx
            assert mn <= mean <= mx

    def test_recomputed_from_emitted_csv_matches(self, tmp_path, np_rng):
        records = [
            make_record(i, pr=float(np_rng.uniform(50, 100)),
                        gf=float(np_rng.uniform(0.5, 10)),
                        time_s=float(np_rng.uniform(1, 5)))
            for i in range(9)
        ]
        path = tmp_path / "runs.csv"
        write_csv(path, records)
        direct = aggregate(records)
        reparsed = aggregate(read_csv(path))
        for column in ("pr", "pg", "pc", "pb", "gf", "time_s"):
            for got, expected in zip(reparsed.stats[column], direct.stats[column]):
                assert got == pytest.approx(expected, abs=1e-9)
        # independent recomputation with numpy
        values = np.array([r.pr for r in read_csv(path)])
        assert direct.stats["pr"][0] == pytest.approx(float(values.mean()), abs=1e-9)
        assert direct.stats["pr"][1] == pytest.approx(float(np.median(values)), abs=1e-9)


class TestFormatReport:
    def test_table_layout(self):
        records = [make_record(i) for i in range(4)]
        text = format_report(aggregate(records))
        lines = text.splitlines()
        for label, line in zip(("Mean", "Median", "Min", "Max"), lines[1:5]):
            assert line.startswith(label)
        header = lines[0]
        for column in ("PR", "PG", "PC", "PB", "GF", "Time (s)"):
            assert column in header
        assert "Records: 4" in text

    def test_exclusion_note_present_only_with_infinite_gf(self):
        finite = format_report(aggregate([make_record(0, gf=1.0)]))
        assert "infinite GF" not in finite
        mixed = format_report(aggregate([make_record(0, gf=1.0),
                                         make_record(1, gf=math.inf)]))
        assert "1 with infinite GF excluded" in mixed
