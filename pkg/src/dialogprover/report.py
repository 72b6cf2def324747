"""Batch result records: CSV serialization, summaries and figures."""
from __future__ import annotations

import csv
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

__all__ = [
    "BatchRecord", "CSV_HEADER", "normalize_status", "agreement",
    "write_csv", "read_csv", "summary_line", "plot_batch",
]

CSV_HEADER = ("problem", "intended", "computed", "agrees", "reason", "seconds")

# display order and colours for the figure
_STATUS_ORDER = ("Theorem", "NonTheorem", "GaveUp", "Timeout", "Inappropriate", "Error")
_STATUS_COLOURS = {
    "Theorem": "#1b9e77",
    "NonTheorem": "#7570b3",
    "GaveUp": "#d95f02",
    "Timeout": "#e7298a",
    "Inappropriate": "#999999",
    "Error": "#444444",
}


def normalize_status(status: Optional[str]) -> str:
    """Canonical spelling of an SZS status name (``Non-Theorem`` -> ``nontheorem``)."""
    return (status or "").replace("-", "").replace("_", "").strip().lower()


def agreement(intended: Optional[str], computed: str) -> Optional[bool]:
    if not intended:
        return None
    return normalize_status(intended) == normalize_status(computed)


@dataclass(frozen=True)
class BatchRecord:
    problem: str
    intended: Optional[str]
    computed: str
    reason: str
    seconds: float

    @property
    def agrees(self) -> Optional[bool]:
        return agreement(self.intended, self.computed)

    def row(self) -> tuple[str, ...]:
        agrees = {True: "+", False: "-", None: ""}[self.agrees]
        return (self.problem, self.intended or "", self.computed, agrees,
                self.reason, f"{self.seconds:.3f}")


def write_csv(records: Iterable[BatchRecord], path: os.PathLike | str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(r.row())


def read_csv(path: os.PathLike | str) -> list[BatchRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [BatchRecord(row["problem"], row["intended"] or None, row["computed"],
                            row["reason"], float(row["seconds"]))
                for row in csv.DictReader(fh)]


def summary_line(records: Sequence[BatchRecord]) -> str:
    if not records:
        return "0 problems"
    counts = Counter(r.computed for r in records)
    parts = [f"{s}={counts[s]}" for s in _STATUS_ORDER if counts[s]]
    parts += [f"{s}={n}" for s, n in sorted(counts.items()) if s not in _STATUS_ORDER]
    judged = [r for r in records if r.agrees is not None]
    agreed = sum(1 for r in judged if r.agrees)
    noun = "problem" if len(records) == 1 else "problems"
    return f"{len(records)} {noun}: {' '.join(parts)}; agrees {agreed}/{len(judged)}"


def plot_batch(records: Sequence[BatchRecord], path: os.PathLike | str,
               title: str = "") -> Path:
    """Per-problem run time coloured by computed status, next to status counts."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Patch

    path = Path(path)
    height = max(2.5, 0.28 * len(records) + 1.2)
    fig, (ax_time, ax_count) = plt.subplots(
        1, 2, figsize=(10, height), gridspec_kw={"width_ratios": [3, 2]})

    if records:
        names = [r.problem for r in records]
        seconds = [max(r.seconds, 1e-3) for r in records]
        colours = [_STATUS_COLOURS.get(r.computed, "#000000") for r in records]
        ypos = range(len(records))
        ax_time.barh(list(ypos), seconds, color=colours)
        ax_time.set_yticks(list(ypos))
        ax_time.set_yticklabels(names, fontsize=7)
        ax_time.invert_yaxis()
        ax_time.set_xscale("log")
        for y, r in zip(ypos, records):
            mark = {True: "+", False: "−", None: ""}[r.agrees]
            ax_time.annotate(mark, (seconds[y], y), xytext=(3, 0),
                             textcoords="offset points", va="center", fontsize=8)
        present = [s for s in _STATUS_ORDER if any(r.computed == s for r in records)]
        ax_time.legend(handles=[Patch(color=_STATUS_COLOURS[s], label=s) for s in present],
                       fontsize=7, loc="lower right")
    else:
        ax_time.text(0.5, 0.5, "no problems", ha="center", va="center",
                     transform=ax_time.transAxes)
    ax_time.set_xlabel("wall-clock seconds (log scale)")
    ax_time.set_title("run time per problem", fontsize=9)

    computed = Counter(r.computed for r in records)
    intended = Counter(r.intended.replace("-", "") for r in records if r.intended)
    statuses = list(_STATUS_ORDER)
    xs = range(len(statuses))
    width = 0.4
    ax_count.bar([x - width / 2 for x in xs], [intended[s] for s in statuses], width,
                 label="intended", color="#cccccc", edgecolor="#666666")
    ax_count.bar([x + width / 2 for x in xs], [computed[s] for s in statuses], width,
                 label="computed", color=[_STATUS_COLOURS[s] for s in statuses])
    ax_count.set_xticks(list(xs))
    ax_count.set_xticklabels(statuses, rotation=35, ha="right", fontsize=7)
    ax_count.set_ylabel("problems")
    ax_count.set_title("status counts", fontsize=9)
    ax_count.legend(fontsize=7)

    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
