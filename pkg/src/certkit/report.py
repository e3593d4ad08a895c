"""Certification report bundles: canonical JSON, delimited tables, and a
rendered sensitivity figure.

A bundle is regenerated purely from the store and an evaluation-report
digest, so two runs over the same store state produce byte-identical
output. Determinism rules for the figure: Agg backend, fixed svg.hashsalt,
no creation date, and all numbers formatted through the canonical decimal
formatter (never locale-dependent).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

from .canonical import canonical_dumps, fmt_decimal, parse_decimal
from .domain import OperationalDomainSpec, coverage
from .errors import NotFoundError
from .evaluation import PredictionSet
from .stability import StabilityRow, build_timelines, flicker_analysis
from .store import Digest

_SVG_HASHSALT = "certkit"


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _csv_num(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return fmt_decimal(value)


def render_sensitivity_svg(dimension_name: str, labels: list[str], aps: list[float | None]) -> bytes:
    """Bar chart of per-bin AP; bins without ground truth render as empty slots."""
    # imported lazily so CLI commands that never render skip the matplotlib cost
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = _SVG_HASHSALT
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    positions = range(len(labels))
    heights = [ap if ap is not None else 0.0 for ap in aps]
    bars = ax.bar(positions, heights, color="#4878d0", width=0.6)
    for pos, bar, ap in zip(positions, bars, aps):
        if ap is None:
            ax.text(pos, 0.02, "no data", ha="center", va="bottom", fontsize=8, color="#666666")
        else:
            ax.text(
                pos,
                bar.get_height() + 0.015,
                format(ap, ".3f"),
                ha="center",
                va="bottom",
                fontsize=8,
            )
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel(dimension_name)
    ax.set_ylabel("average precision")
    ax.set_title(f"Sensitivity by {dimension_name}")
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


@dataclass(frozen=True)
class ReportBundle:
    directory: Path
    bundle_digest: Digest
    files: tuple[str, ...]
    omissions: tuple[str, ...]


def _stability_rows_canonical(rows: list[StabilityRow]) -> list[dict]:
    return [
        {
            "sequence_id": r.sequence_id,
            "track": r.track_key,
            "n_frames": r.n_frames,
            "n_gt_frames": r.n_gt_frames,
            "detected_frames": r.detected_frames,
            "detection_rate": fmt_decimal(r.detection_rate),
            "flicker_events": r.flicker_events,
            "max_gap": r.max_gap,
            "flicker_rate": fmt_decimal(r.flicker_rate),
        }
        for r in rows
    ]


def generate_report(repo, report_id: Digest, out_dir: str | Path) -> ReportBundle:
    """Write the full bundle for a stored evaluation report.

    Coverage and stability are recomputed from the stored prediction set,
    dataset, and domain spec; when an input is unavailable (e.g. no sequence
    labels for stability) the section is omitted and the omission recorded
    in report.json.
    """
    store = repo.store
    try:
        report_doc = store.get_json(report_id)
    except NotFoundError:
        raise NotFoundError(f"unknown evaluation report: {report_id.hex}") from None

    domain = OperationalDomainSpec.from_obj(store.get_json(Digest(report_doc["domain_spec"])))
    predictions = PredictionSet.from_canonical(
        store.get_json(Digest(report_doc["prediction_set"]))
    )
    dataset_id = Digest(report_doc["dataset"])
    manifest = repo.checkout_dataset(dataset_id, verify=False)

    omissions: list[str] = []

    coverage_doc = None
    if domain.dimensions:
        coverage_doc = coverage(repo, dataset_id, domain).to_canonical()
    else:
        omissions.append("coverage: domain spec has no dimensions")

    timelines = build_timelines(
        repo,
        manifest,
        predictions,
        iou_threshold=parse_decimal(report_doc["iou_threshold"]),
        operating_confidence=parse_decimal(report_doc["operating_confidence"]),
    )
    stability_doc = None
    if timelines:
        stability_doc = _stability_rows_canonical([flicker_analysis(t) for t in timelines])
    else:
        omissions.append("stability: dataset carries no sequence labels")

    numeric_dims = [d for d in domain.dimensions if d.kind == "numeric"]
    if not numeric_dims:
        omissions.append("sensitivity figure: domain spec has no numeric dimension")

    provenance = {
        "evaluation_report": report_id.hex,
        "prediction_set": report_doc["prediction_set"],
        "dataset": report_doc["dataset"],
        "domain_spec": report_doc["domain_spec"],
        "requirement_spec": report_doc["requirement_spec"],
        "model_manifest": report_doc.get("model_manifest"),
    }
    for key, hex_ in provenance.items():
        if hex_ is not None and not store.exists(Digest(hex_)):
            raise NotFoundError(f"provenance entry {key} does not resolve: {hex_}")

    bundle_doc = {
        "evaluation": report_doc,
        "coverage": coverage_doc,
        "stability": stability_doc,
        "omissions": omissions,
        "provenance": provenance,
    }
    bundle_bytes = canonical_dumps(bundle_doc)
    bundle_digest = Digest.of_bytes(bundle_bytes)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []

    # The canonical report is written under its own digest (self-certifying
    # name) and duplicated as report.json for a stable entry point.
    for name in (f"{bundle_digest.hex}.json", "report.json"):
        (out / name).write_bytes(bundle_bytes)
        files.append(name)

    if coverage_doc is not None:
        rows = []
        for dim in coverage_doc["dimensions"]:
            for i, b in enumerate(dim["bins"]):
                rows.append(
                    [
                        dim["name"],
                        dim["unit"],
                        str(i),
                        b["label"],
                        str(b["count"]),
                        str(b["min_count"]),
                        _csv_num(b["covered"]),
                        b["observed_proportion"],
                        b["expected_proportion"] or "",
                        b["deviation"] or "",
                    ]
                )
        write_csv(
            out / "coverage.csv",
            [
                "dimension",
                "unit",
                "bin",
                "label",
                "count",
                "min_count",
                "covered",
                "observed_proportion",
                "expected_proportion",
                "deviation",
            ],
            rows,
        )
        files.append("coverage.csv")

    if numeric_dims:
        rows = []
        for dim in numeric_dims:
            bins = report_doc["partitions"].get(dim.name, [])
            for (lo, hi), cell in zip(dim.bins, bins):
                rows.append(
                    [
                        dim.name,
                        fmt_decimal(lo),
                        fmt_decimal(hi),
                        cell["ap"] if cell["ap"] is not None else "",
                        str(cell["n_gt"]),
                    ]
                )
        write_csv(out / "sensitivity.csv", ["dimension", "bin_lo", "bin_hi", "ap", "n_gt"], rows)
        files.append("sensitivity.csv")

        chart_dim = numeric_dims[0]
        cells = report_doc["partitions"].get(chart_dim.name, [])
        svg = render_sensitivity_svg(
            chart_dim.name,
            [c["label"] for c in cells],
            [None if c["ap"] is None else parse_decimal(c["ap"]) for c in cells],
        )
        (out / "sensitivity.svg").write_bytes(svg)
        files.append("sensitivity.svg")

    write_csv(
        out / "requirements.csv",
        ["name", "threshold", "observed", "pass"],
        [
            [r["name"], r["threshold"], r["observed"], _csv_num(r["pass"])]
            for r in report_doc["requirements"]
        ],
    )
    files.append("requirements.csv")

    if stability_doc is not None:
        write_csv(
            out / "stability.csv",
            [
                "sequence_id",
                "track",
                "n_frames",
                "n_gt_frames",
                "detected_frames",
                "detection_rate",
                "flicker_events",
                "max_gap",
                "flicker_rate",
            ],
            [
                [
                    r["sequence_id"],
                    r["track"] or "",
                    str(r["n_frames"]),
                    str(r["n_gt_frames"]),
                    str(r["detected_frames"]),
                    r["detection_rate"],
                    str(r["flicker_events"]),
                    str(r["max_gap"]),
                    r["flicker_rate"],
                ]
                for r in stability_doc
            ],
        )
        files.append("stability.csv")

    return ReportBundle(out, bundle_digest, tuple(files), tuple(omissions))
