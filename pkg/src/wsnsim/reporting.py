"""Cross-run aggregation and CSV/JSON output."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .engine import RoundMetrics, RunSummary

ROUND_COLUMNS = ["round", "alive", "dead", "ch_count", "packets_to_bs", "packets_to_ch", "total_residual_j"]
SUMMARY_COLUMNS = ["protocol", "scenario", "seed", "first_death", "tenth_death", "last_death", "total_packets"]
METRICS = ["first_death", "tenth_death", "last_death", "total_packets", "instability"]


@dataclass
class SummaryRow:
    protocol: str
    scenario: str
    seed: int
    first_death: Optional[int]
    tenth_death: Optional[int]
    last_death: Optional[int]
    total_packets: int

    @property
    def instability(self) -> Optional[int]:
        if self.first_death is None or self.last_death is None:
            return None
        return self.last_death - self.first_death

    @classmethod
    def from_run(cls, run: RunSummary) -> "SummaryRow":
        return cls(run.protocol, run.scenario, run.seed, run.first_death_round,
                   run.tenth_death_round, run.last_death_round, run.total_packets_to_bs)


@dataclass
class Aggregate:
    """Median and interquartile range of one metric over the defined values."""

    median: Optional[float]
    iqr: Optional[float]
    n_defined: int


@dataclass
class ComparisonTable:
    rows: List[SummaryRow] = field(default_factory=list)
    aggregates: Dict[Tuple[str, str], Dict[str, Aggregate]] = field(default_factory=dict)

    def median(self, protocol: str, scenario: str, metric: str) -> Optional[float]:
        return self.aggregates[(protocol, scenario)][metric].median


def _aggregate(values: Iterable[Optional[int]]) -> Aggregate:
    defined = [v for v in values if v is not None]
    if not defined:
        return Aggregate(None, None, 0)
    q25, q50, q75 = np.percentile(defined, [25, 50, 75])
    return Aggregate(float(q50), float(q75 - q25), len(defined))


def aggregate_rows(rows: Sequence[SummaryRow]) -> Dict[Tuple[str, str], Dict[str, Aggregate]]:
    groups: Dict[Tuple[str, str], List[SummaryRow]] = {}
    for row in rows:
        groups.setdefault((row.protocol, row.scenario), []).append(row)
    return {
        key: {metric: _aggregate(getattr(r, metric) for r in members) for metric in METRICS}
        for key, members in groups.items()
    }


def summarize(runs: Sequence[RunSummary]) -> ComparisonTable:
    rows = [SummaryRow.from_run(run) for run in runs]
    return ComparisonTable(rows=rows, aggregates=aggregate_rows(rows))


def _cell(value) -> str:
    return "" if value is None else str(value)


def _opt_int(text: str) -> Optional[int]:
    return None if text == "" else int(text)


def emit_round_csv(rows: Sequence[RoundMetrics], path: "os.PathLike[str] | str") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROUND_COLUMNS)
        for m in rows:
            writer.writerow([m.round, m.alive, m.dead, m.ch_count, m.packets_to_bs,
                             m.packets_to_ch, repr(float(m.total_residual))])


def read_round_csv(path: "os.PathLike[str] | str") -> List[RoundMetrics]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            RoundMetrics(
                round=int(r["round"]), alive=int(r["alive"]), dead=int(r["dead"]),
                ch_count=int(r["ch_count"]), packets_to_bs=int(r["packets_to_bs"]),
                packets_to_ch=int(r["packets_to_ch"]), total_residual=float(r["total_residual_j"]),
            )
            for r in reader
        ]


def emit_summary_csv(table: ComparisonTable, path: "os.PathLike[str] | str") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for r in table.rows:
            writer.writerow([r.protocol, r.scenario, r.seed, _cell(r.first_death),
                             _cell(r.tenth_death), _cell(r.last_death), r.total_packets])


def read_summary_csv(path: "os.PathLike[str] | str") -> ComparisonTable:
    with open(path, newline="") as fh:
        rows = [
            SummaryRow(r["protocol"], r["scenario"], int(r["seed"]), _opt_int(r["first_death"]),
                       _opt_int(r["tenth_death"]), _opt_int(r["last_death"]), int(r["total_packets"]))
            for r in csv.DictReader(fh)
        ]
    return ComparisonTable(rows=rows, aggregates=aggregate_rows(rows))


def emit_json(run: RunSummary, path: "os.PathLike[str] | str") -> None:
    with open(path, "w") as fh:
        json.dump(run.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_json(path: "os.PathLike[str] | str") -> RunSummary:
    with open(path) as fh:
        data = json.load(fh)
    data["per_round"] = [RoundMetrics(**row) for row in data["per_round"]]
    return RunSummary(**data)


def format_table(table: ComparisonTable) -> str:
    """Plain-text table of per-protocol medians (IQR in brackets)."""
    header = f"{'scenario':<9} {'protocol':<8} {'runs':>4}  {'first':>14} {'tenth':>14} {'last':>14} {'packets':>18}"
    lines = [header, "-" * len(header)]
    counts: Dict[Tuple[str, str], int] = {}
    for row in table.rows:
        key = (row.protocol, row.scenario)
        counts[key] = counts.get(key, 0) + 1
    for (protocol, scenario), agg in table.aggregates.items():
        cells = []
        for metric, width in (("first_death", 14), ("tenth_death", 14), ("last_death", 14), ("total_packets", 18)):
            a = agg[metric]
            text = "-" if a.median is None else f"{a.median:g} [{a.iqr:g}]"
            cells.append(f"{text:>{width}}")
        lines.append(f"{scenario:<9} {protocol:<8} {counts[(protocol, scenario)]:>4}  " + " ".join(cells))
    return "\n".join(lines)


def aggregates_as_dict(table: ComparisonTable) -> Dict[str, Dict[str, dict]]:
    return {f"{p}/{s}": {m: asdict(a) for m, a in agg.items()} for (p, s), agg in table.aggregates.items()}
