"""Stage-time distribution summaries over recorded pipeline runs."""

from __future__ import annotations

import csv
import io
import json
import statistics
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NothingToReport
from .pipeline import BenchReport, TIMED_STAGES

FORMATS = ("json", "csv", "markdown")
STAT_NAMES = ("count", "mean", "min", "max", "stddev")
SUMMARY_STAGES = (*TIMED_STAGES, "total_generation")


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def summarize(runs: Sequence[dict]) -> list[dict]:
    """One row per stage; numbers are rendered once so every format agrees."""
    if not runs:
        raise NothingToReport("no recorded runs")
    rows = []
    for stage in SUMMARY_STAGES:
        xs = [float(r["timings"][stage]) for r in runs]
        rows.append({"stage": stage, "count": str(len(xs)), "mean": _fmt(statistics.fmean(xs)),
                     "min": _fmt(min(xs)), "max": _fmt(max(xs)),
                     "stddev": _fmt(statistics.pstdev(xs))})
    return rows


def render(runs: Sequence[dict], fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    rows = summarize(runs)
    cols = ["stage", *STAT_NAMES]
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    lines += ["| " + " | ".join(r[c] for c in cols) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def append_runs(path: str | Path, reports: Iterable[BenchReport]):
    with open(path, "a") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def load_runs(path: str | Path) -> list[dict]:
    p = Path(path)
    if not p.exists():
        raise NothingToReport(f"{p} does not exist")
    return [json.loads(line) for line in p.read_text().splitlines() if line.strip()]
