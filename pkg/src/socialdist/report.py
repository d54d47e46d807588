"""Evaluation report serialization and table rendering.

The harness stores one JSON document per evaluation run; this module turns
those documents into the human-facing CSV/markdown tables (per-focal-length
breakdowns, safe-distance F1 rows) and the error-versus-distance data
series used for plotting.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

from .evaluation import DatasetEvaluation, binary_classification

DEFAULT_THRESHOLDS_MM = (1000.0, 1500.0, 2000.0, 3000.0)


def _summary(ev: DatasetEvaluation) -> dict:
    return {
        "d_E": ev.d_E,
        "detection_rate": ev.detection_rate,
        "false_discovery_rate": ev.false_discovery_rate,
        "n_images": ev.n_images,
        "n_images_scored": ev.n_images_scored,
    }


def evaluation_report(ev: DatasetEvaluation,
                      thresholds_mm: Sequence[float] = DEFAULT_THRESHOLDS_MM) -> dict:
    """Full JSON-ready report: overall metrics, per-image detail, breakdowns, F1."""
    per_image = []
    for image_ev in ev.per_image:
        per_image.append({
            "image": image_ev.image_id,
            "n_matched": image_ev.n_matched,
            "n_ground_truth": image_ev.n_ground_truth,
            "n_false_positive": image_ev.n_false_positive,
            "d_e": image_ev.d_e,
            "pairs": [
                {
                    "tags": list(p.tags),
                    "estimated_mm": p.estimated_mm,
                    "ground_truth_mm": p.ground_truth_mm,
                    "signed_percent": p.signed_percent,
                }
                for p in image_ev.pair_errors
            ],
        })
    breakdowns = {
        dim: {value: _summary(sub) for value, sub in groups.items()}
        for dim, groups in ev.breakdowns.items()
    }
    f1_rows = [vars(binary_classification(ev.per_image, thr)) for thr in thresholds_mm]
    return {
        "overall": _summary(ev),
        "per_image": per_image,
        "breakdowns": breakdowns,
        "f1": f1_rows,
    }


def save_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _sort_key(value: str):
    try:
        return (0, float(value))
    except ValueError:
        return (1, value)


def breakdown_rows(report: dict, dim: str) -> list[dict]:
    """Rows of a breakdown table (numeric group labels sorted numerically)."""
    groups = report.get("breakdowns", {}).get(dim, {})
    rows = []
    for value in sorted(groups, key=_sort_key):
        cell = groups[value]
        rows.append({"group": value, **cell})
    rows.append({"group": "All", **report["overall"]})
    return rows


def f1_rows(report: dict) -> list[dict]:
    return sorted(report.get("f1", []), key=lambda r: r["threshold_mm"])


def error_vs_distance_series(report: dict) -> list[tuple[float, float]]:
    """(ground-truth mm, signed percent error) per pair, ascending distance."""
    series = []
    for image in report.get("per_image", []):
        for pair in image.get("pairs", []):
            series.append((pair["ground_truth_mm"], pair["signed_percent"]))
    series.sort()
    return series


def _fmt(value, digits=4) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{digits}f}".rstrip("0").rstrip(".")
    return str(value)


def write_breakdown_csv(reports: Mapping[str, dict], dim: str, path) -> None:
    """One table over several labeled runs: rate and error columns per run."""
    labels = list(reports)
    rows_by_label = {label: {r["group"]: r for r in breakdown_rows(report, dim)}
                     for label, report in reports.items()}
    groups: list[str] = []
    for rows in rows_by_label.values():
        for g in rows:
            if g not in groups:
                groups.append(g)
    groups.sort(key=lambda g: (g == "All", _sort_key(g)))

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        header = [dim, "n_images"]
        for label in labels:
            header += [f"{label}_detection_rate", f"{label}_error_percent"]
        w.writerow(header)
        for g in groups:
            any_row = next((rows[g] for rows in rows_by_label.values() if g in rows), None)
            row = [g, any_row["n_images"] if any_row else ""]
            for label in labels:
                cell = rows_by_label[label].get(g)
                if cell is None:
                    row += ["", ""]
                else:
                    row += [_fmt(cell["detection_rate"]), _fmt(cell["d_E"], 2)]
            w.writerow(row)


def write_f1_csv(report: dict, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["safe_distance_m", "precision", "recall", "f1"])
        for row in f1_rows(report):
            w.writerow([_fmt(row["threshold_mm"] / 1000.0, 2),
                        _fmt(row["precision"]), _fmt(row["recall"]), _fmt(row["f1"])])


def write_series_csv(report: dict, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["ground_truth_mm", "signed_percent_error", "abs_percent_error"])
        for gt_mm, signed in error_vs_distance_series(report):
            w.writerow([_fmt(gt_mm, 3), _fmt(signed, 6), _fmt(abs(signed), 6)])


def render_markdown(reports: Mapping[str, dict],
                    dims: Sequence[str] = ("focal_length", "setting", "camera")) -> str:
    """Markdown summary of one or more labeled evaluation runs."""
    lines: list[str] = ["# Evaluation report", ""]
    for label, report in reports.items():
        overall = report["overall"]
        lines.append(f"## {label}")
        lines.append("")
        lines.append(f"- images: {overall['n_images']} "
                     f"(scored: {overall['n_images_scored']})")
        lines.append(f"- detection rate: {_fmt(overall['detection_rate'])}")
        lines.append(f"- pairwise percent distance error: {_fmt(overall['d_E'], 2)}")
        lines.append(f"- false discovery rate: {_fmt(overall['false_discovery_rate'])}")
        lines.append("")
        for dim in dims:
            if not report.get("breakdowns", {}).get(dim):
                continue
            lines.append(f"### by {dim.replace('_', ' ')}")
            lines.append("")
            lines.append(f"| {dim} | images | detection rate | error % |")
            lines.append("|---|---|---|---|")
            for row in breakdown_rows(report, dim):
                lines.append(f"| {row['group']} | {row['n_images']} | "
                             f"{_fmt(row['detection_rate'])} | {_fmt(row['d_E'], 2)} |")
            lines.append("")
        if report.get("f1"):
            lines.append("### safe-distance classification")
            lines.append("")
            lines.append("| safe distance (m) | precision | recall | F1 |")
            lines.append("|---|---|---|---|")
            for row in f1_rows(report):
                lines.append(f"| {_fmt(row['threshold_mm'] / 1000.0, 2)} | "
                             f"{_fmt(row['precision'])} | {_fmt(row['recall'])} | "
                             f"{_fmt(row['f1'])} |")
            lines.append("")
    return "\n".join(lines)
