"""Report export: CSV (one row per arm and milestone) and JSON."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from craftbench.harness.metrics import MilestoneTable

REPORT_SCHEMA_VERSION = 1

CSV_HEADER = (
    "schema_version",
    "arm",
    "milestone",
    "mean_iterations",
    "achieved",
    "total",
)


def render_csv(table: MilestoneTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for arm in sorted(table.arms):
        stats = table.arms[arm]
        for milestone in table.milestones:
            cell = stats.milestones[milestone]
            writer.writerow(
                [
                    REPORT_SCHEMA_VERSION,
                    arm,
                    milestone,
                    cell.rendered_mean(),
                    cell.achieved,
                    cell.total,
                ]
            )
    return buffer.getvalue()


def render_json(table: MilestoneTable) -> str:
    body = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "milestones": list(table.milestones),
        "notes": list(table.notes),
        "arms": {},
    }
    for arm, stats in sorted(table.arms.items()):
        body["arms"][arm] = {
            "trials": stats.trials,
            "reached_goal": stats.reached_goal,
            "aborted": stats.aborted,
            "milestones": {
                m: {
                    "mean_iterations": (
                        None
                        if cell.mean_iterations is None
                        else round(cell.mean_iterations, 2)
                    ),
                    "achieved": cell.achieved,
                    "total": cell.total,
                }
                for m, cell in stats.milestones.items()
            },
            "match_rate": (
                None
                if stats.match is None
                else {
                    "pairs_total": stats.match.pairs_total,
                    "pairs_matched": stats.match.pairs_matched,
                    "rate": stats.match.rate,
                    "excluded": stats.match.excluded,
                }
            ),
            "extraction": (
                None if stats.extraction is None else stats.extraction.as_dict()
            ),
        }
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def export_report(
    table: MilestoneTable, out_dir: str | Path, formats=("csv", "json")
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        path = out_dir / "report.csv"
        path.write_text(render_csv(table), encoding="utf-8")
        written.append(path)
    if "json" in formats:
        path = out_dir / "report.json"
        path.write_text(render_json(table), encoding="utf-8")
        written.append(path)
    return written


def parse_csv(path: str | Path) -> list[dict]:
    """Rows of a milestone CSV, with the em-dash cell mapped back to None."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                {
                    "schema_version": int(row["schema_version"]),
                    "arm": row["arm"],
                    "milestone": row["milestone"],
                    "mean_iterations": (
                        None
                        if row["mean_iterations"] == "—"
                        else float(row["mean_iterations"])
                    ),
                    "achieved": int(row["achieved"]),
                    "total": int(row["total"]),
                }
            )
    return rows
