"""certkit command-line interface.

Exit-code contract (consumed by CI gates):

  0  success — the requested verification passed or the action completed
  1  verification failure — requirements failed, disjointness or coverage
     violated, integrity violation, model mismatch, audit finding
  2  usage or input error — bad arguments, malformed files, unknown ids

Machine-readable results go to stdout (JSON by default, CSV where a
command has a delimited form); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .canonical import canonical_dumps, fmt_decimal
from .datasets import (
    AnnotationRecord,
    BoundingBox,
    DatasetEntry,
    ImageMeta,
    Repository,
)
from .domain import coverage, load_domain_spec
from .errors import CertkitError, FormatError, IntegrityError, NotFoundError, ValidationError
from .evaluation import (
    evaluate,
    load_predictions,
    load_requirement_spec,
    sensitivity_by_partition,
    prepare_image_evals,
)
from .registry import ModelManifest, ModelRegistry
from .report import generate_report
from .stability import stability_report
from .store import ContentStore, Digest
from .synthgen import SyntheticConfig, generate, load_synthetic_config

_HEX_LEN = 64


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _print_csv(header: list[str], rows: list[list[str]]) -> None:
    print(",".join(header))
    for row in rows:
        print(",".join(row))


def _store_root(args) -> Path:
    if args.store:
        return Path(args.store)
    env = os.environ.get("CERTKIT_STORE")
    if env:
        return Path(env)
    return Path("certkit-store")


def _open_repo(args, create: bool = False) -> Repository:
    return Repository(ContentStore(_store_root(args), create=create))


def _resolve_dataset(repo: Repository, token: str) -> Digest:
    """A dataset argument is either a digest or a dataset name (its tip)."""
    if len(token) == _HEX_LEN and all(c in "0123456789abcdef" for c in token):
        return Digest(token)
    return repo.dataset_tip(token)


def _load_entries(path: str) -> list[DatasetEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                entries.append(DatasetEntry(Digest(obj["image"]), Digest(obj["annotation"])))
            except (json.JSONDecodeError, KeyError, ValidationError) as exc:
                raise FormatError(f"bad entry: {exc}", line=lineno) from None
    return entries


# -- command handlers ------------------------------------------------------------


def cmd_init(args) -> int:
    repo = _open_repo(args, create=True)
    _print_json({"store": str(repo.store.root)})
    return 0


def cmd_ingest(args) -> int:
    repo = _open_repo(args, create=True)
    results = []
    if args.meta_file:
        with open(args.meta_file, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    data = Path(obj["file"]).read_bytes()
                    meta = ImageMeta(
                        camera_id=obj["camera_id"],
                        flight_id=obj["flight_id"],
                        capture_time=obj["capture_time"],
                        width=obj.get("width"),
                        height=obj.get("height"),
                        sequence_id=obj.get("sequence_id"),
                        frame_index=obj.get("frame_index"),
                    )
                except (json.JSONDecodeError, KeyError) as exc:
                    raise FormatError(f"bad ingest line: {exc}", line=lineno) from None
                completed = repo.ingest_image(data, meta)
                results.append({"file": obj["file"], "image": completed.image_digest.hex})
    else:
        if not args.images:
            raise ValidationError("provide image paths or --meta-file")
        if not (args.camera_id and args.flight_id and args.capture_time):
            raise ValidationError("--camera-id, --flight-id, and --capture-time are required")
        for path in args.images:
            meta = ImageMeta(
                camera_id=args.camera_id,
                flight_id=args.flight_id,
                capture_time=args.capture_time,
                sequence_id=args.sequence_id,
                frame_index=args.frame_index,
            )
            completed = repo.ingest_image(Path(path).read_bytes(), meta)
            results.append({"file": path, "image": completed.image_digest.hex})
    _print_json(results)
    return 0


def cmd_annotate_import(args) -> int:
    repo = _open_repo(args, create=True)
    ids = repo.import_autolabels(args.file, author=args.author, created_at=args.created_at)
    _print_json({"annotations": [d.hex for d in ids]})
    return 0


def cmd_dataset_create(args) -> int:
    repo = _open_repo(args, create=True)
    dataset_id = repo.create_dataset(args.name, args.role, _load_entries(args.entries))
    _print_json({"dataset_id": dataset_id.hex, "version": 1})
    return 0


def cmd_dataset_commit(args) -> int:
    repo = _open_repo(args, create=True)
    parent = _resolve_dataset(repo, args.parent)
    dataset_id = repo.commit_version(parent, _load_entries(args.entries), role=args.role)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    _print_json({"dataset_id": dataset_id.hex, "version": manifest.version})
    return 0


def cmd_dataset_checkout(args) -> int:
    repo = _open_repo(args)
    dataset_id = _resolve_dataset(repo, args.dataset)
    manifest = repo.checkout_dataset(dataset_id)
    doc = manifest.to_canonical()
    doc["dataset_id"] = dataset_id.hex
    if args.out:
        Path(args.out).write_bytes(canonical_dumps(manifest.to_canonical()))
    _print_json(doc)
    return 0


def cmd_dataset_diff(args) -> int:
    repo = _open_repo(args)
    diff = repo.diff_datasets(_resolve_dataset(repo, args.a), _resolve_dataset(repo, args.b))
    _print_json(
        {
            "added": list(diff.added),
            "removed": list(diff.removed),
            "annotation_changed": [
                {"image": img, "old": old, "new": new}
                for img, old, new in diff.annotation_changed
            ],
        }
    )
    return 0


def cmd_dataset_history(args) -> int:
    repo = _open_repo(args)
    dataset_id = _resolve_dataset(repo, args.dataset)
    rows = []
    for digest in repo.dataset_history(dataset_id):
        manifest = repo.checkout_dataset(digest, verify=False)
        rows.append(
            {
                "dataset_id": digest.hex,
                "version": manifest.version,
                "role": manifest.role,
                "entries": len(manifest.entries),
            }
        )
    _print_json({"name": repo.checkout_dataset(dataset_id, verify=False).name, "versions": rows})
    return 0


def cmd_dataset_verify_disjoint(args) -> int:
    repo = _open_repo(args)
    dev = [_resolve_dataset(repo, token) for token in args.dev]
    cert = _resolve_dataset(repo, args.cert)
    report = repo.verify_disjoint(dev, cert)
    _print_json(
        {
            "image_overlap": list(report.image_overlap),
            "flight_overlap": list(report.flight_overlap),
            "pass": report.passed,
        }
    )
    if not report.passed:
        print(
            f"disjointness violated: {len(report.image_overlap)} shared image(s), "
            f"{len(report.flight_overlap)} shared flight(s)",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_coverage(args) -> int:
    repo = _open_repo(args)
    spec = load_domain_spec(args.domain)
    cross = tuple(args.cross.split(",")) if args.cross else None
    if cross is not None and len(cross) != 2:
        raise ValidationError("--cross takes exactly two dimension names, comma separated")
    report = coverage(repo, _resolve_dataset(repo, args.dataset), spec, cross=cross)
    doc = report.to_canonical()
    doc["domain_spec_id"] = spec.spec_id.hex
    if args.format == "csv":
        rows = []
        for dim in doc["dimensions"]:
            for i, b in enumerate(dim["bins"]):
                rows.append(
                    [
                        dim["name"],
                        str(i),
                        b["label"],
                        str(b["count"]),
                        str(b["min_count"]),
                        "true" if b["covered"] else "false",
                        b["observed_proportion"],
                        b["expected_proportion"] or "",
                        b["deviation"] or "",
                    ]
                )
        _print_csv(
            [
                "dimension",
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
    else:
        _print_json(doc)
    if not report.overall_pass:
        print("coverage verification failed: under-populated bins", file=sys.stderr)
        return 1
    return 0


def cmd_model_import_trace(args) -> int:
    registry = ModelRegistry(_open_repo(args, create=True))
    trace = registry.import_trace(args.file)
    if not trace.entries:
        print("warning: trace has no entries", file=sys.stderr)
    _print_json({"trace_id": trace.trace_id.hex, "entries": len(trace.entries)})
    return 0


def cmd_model_register(args) -> int:
    repo = _open_repo(args, create=True)
    registry = ModelRegistry(repo)
    model_bytes = Path(args.model_file).read_bytes()
    with open(args.manifest, encoding="utf-8") as fh:
        doc = json.load(fh)

    trace_field = doc.get("training_code_trace")
    if isinstance(trace_field, dict):
        from .registry import EnvironmentTrace

        trace_id = registry.commit_trace(EnvironmentTrace.from_obj(trace_field))
    elif isinstance(trace_field, str):
        trace_id = Digest(trace_field)
    else:
        raise ValidationError("manifest needs training_code_trace (digest or inline trace)")

    manifest = ModelManifest(
        model_file_digest=Digest.of_bytes(model_bytes),
        training_code_trace=trace_id,
        random_seeds=tuple((n, s) for n, s in doc.get("random_seeds", [])),
        train_datasets=tuple(
            _resolve_dataset(repo, token) for token in doc.get("train_datasets", [])
        ),
        eval_datasets=tuple(
            _resolve_dataset(repo, token) for token in doc.get("eval_datasets", [])
        ),
        hyperparameters=doc.get("hyperparameters", {}),
        metrics={k: str(v) for k, v in doc.get("metrics", {}).items()},
        initial_weights_digest=(
            Digest(doc["initial_weights"]) if doc.get("initial_weights") else None
        ),
        parent_model=Digest(doc["parent_model"]) if doc.get("parent_model") else None,
    )
    registered = registry.register_model(model_bytes, manifest)
    _print_json(
        {
            "manifest_id": registered.manifest_id.hex,
            "model_file": registered.model_file_digest.hex,
        }
    )
    return 0


def cmd_model_verify(args) -> int:
    registry = ModelRegistry(_open_repo(args))
    manifest_id = Digest(args.manifest)
    if args.model_file:
        match = registry.verify_model_file(manifest_id, Path(args.model_file).read_bytes())
        _print_json({"match": match})
        return 0 if match else 1
    if args.against:
        report = registry.verify_reproduction(manifest_id, Digest(args.against))
        _print_json(
            {
                "inputs_equal": report.inputs_equal,
                "outputs_equal": report.outputs_equal,
                "differing_fields": list(report.differing_fields),
                "determinism_violation": report.determinism_violation,
            }
        )
        return 1 if report.determinism_violation else 0
    raise ValidationError("model verify needs --model-file or --against")


def cmd_model_audit(args) -> int:
    registry = ModelRegistry(_open_repo(args))
    violations = registry.audit()
    _print_json(
        {
            "manifests": len(registry.list_manifests()),
            "violations": [
                {"manifest": m, "certification_dataset": d} for m, d in violations
            ],
        }
    )
    if violations:
        print(f"audit failed: {len(violations)} manifest(s) trained on certification data", file=sys.stderr)
        return 1
    return 0


def cmd_model_show(args) -> int:
    registry = ModelRegistry(_open_repo(args))
    manifest = registry.get_manifest(Digest(args.manifest))
    doc = manifest.to_canonical()
    doc["manifest_id"] = manifest.manifest_id.hex
    _print_json(doc)
    return 0


def cmd_eval_run(args) -> int:
    repo = _open_repo(args, create=True)
    requirements = load_requirement_spec(args.requirements)
    domain = load_domain_spec(args.domain)
    dataset_id = _resolve_dataset(repo, args.dataset)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    model = Digest(args.model) if args.model else None
    predictions = load_predictions(args.predictions, manifest, model_manifest=model)
    report = evaluate(repo, predictions, requirements, domain)
    doc = report.to_canonical()
    doc["report_id"] = report.report_id.hex
    _print_json(doc)
    if not report.requirements_pass:
        failed = [r.name for r in report.requirements if not r.passed]
        print(f"requirements failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_eval_sensitivity(args) -> int:
    repo = _open_repo(args)
    domain = load_domain_spec(args.domain)
    dimension = domain.dimension(args.dimension)
    dataset_id = _resolve_dataset(repo, args.dataset)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    predictions = load_predictions(args.predictions, manifest)
    evals = prepare_image_evals(repo, manifest, predictions, args.iou_threshold)
    bins = sensitivity_by_partition(evals, dimension)
    cells = [bins[i] for i in sorted(bins)]
    if args.format == "csv":
        if dimension.kind == "numeric":
            rows = [
                [
                    fmt_decimal(lo),
                    fmt_decimal(hi),
                    fmt_decimal(cell.ap) if cell.ap is not None else "",
                    str(cell.n_gt),
                ]
                for (lo, hi), cell in zip(dimension.bins, cells)
            ]
            _print_csv(["bin_lo", "bin_hi", "ap", "n_gt"], rows)
        else:
            rows = [
                [cell.label, fmt_decimal(cell.ap) if cell.ap is not None else "", str(cell.n_gt)]
                for cell in cells
            ]
            _print_csv(["bin", "ap", "n_gt"], rows)
    else:
        _print_json(
            {
                "dimension": dimension.name,
                "iou_threshold": fmt_decimal(args.iou_threshold),
                "bins": [
                    {
                        "bin": cell.bin,
                        "label": cell.label,
                        "ap": fmt_decimal(cell.ap) if cell.ap is not None else None,
                        "n_gt": cell.n_gt,
                        "n_images": cell.n_images,
                    }
                    for cell in cells
                ],
            }
        )
    if args.svg:
        from .report import render_sensitivity_svg

        Path(args.svg).write_bytes(
            render_sensitivity_svg(
                dimension.name, [c.label for c in cells], [c.ap for c in cells]
            )
        )
    return 0


def cmd_stability(args) -> int:
    repo = _open_repo(args)
    dataset_id = _resolve_dataset(repo, args.dataset)
    manifest = repo.checkout_dataset(dataset_id, verify=False)
    predictions = load_predictions(args.predictions, manifest)
    rows = stability_report(
        repo, manifest, predictions, args.iou_threshold, args.confidence
    )
    if not rows:
        print("warning: dataset carries no sequence labels", file=sys.stderr)
    if args.format == "csv":
        _print_csv(
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
                    r.sequence_id,
                    r.track_key or "",
                    str(r.n_frames),
                    str(r.n_gt_frames),
                    str(r.detected_frames),
                    fmt_decimal(r.detection_rate),
                    str(r.flicker_events),
                    str(r.max_gap),
                    fmt_decimal(r.flicker_rate),
                ]
                for r in rows
            ],
        )
    else:
        _print_json(
            [
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
        )
    return 0


def cmd_synth(args) -> int:
    repo = _open_repo(args, create=True)
    config = load_synthetic_config(args.config) if args.config else SyntheticConfig()
    if args.out_dataset:
        config = replace(config, dataset_name=args.out_dataset)
    dataset_id, predictions_path = generate(repo, config, args.out_dir)
    _print_json(
        {
            "dataset_id": dataset_id.hex,
            "dataset_name": config.dataset_name,
            "predictions": str(predictions_path),
            "images": config.n_encounters * config.frames_per_encounter,
        }
    )
    return 0


def cmd_report(args) -> int:
    repo = _open_repo(args)
    bundle = generate_report(repo, Digest(args.eval), args.out_dir)
    _print_json(
        {
            "directory": str(bundle.directory),
            "bundle_digest": bundle.bundle_digest.hex,
            "files": list(bundle.files),
            "omissions": list(bundle.omissions),
        }
    )
    return 0


def cmd_store_verify(args) -> int:
    repo = _open_repo(args)
    violations = repo.store.verify()
    dangling = repo.verify_references()
    _print_json(
        {
            "integrity_violations": [d.hex for d in violations],
            "dangling_references": [
                {"referrer": a, "missing": b} for a, b in dangling
            ],
        }
    )
    if violations or dangling:
        print(
            f"store verification failed: {len(violations)} corrupt object(s), "
            f"{len(dangling)} dangling reference(s)",
            file=sys.stderr,
        )
        return 1
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--store", help="store root (default: $CERTKIT_STORE or ./certkit-store)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format")

    parser = argparse.ArgumentParser(
        prog="certkit",
        description="Certification-evidence toolkit for vision-based detection systems.",
    )
    parser.add_argument("--version", action="version", version=f"certkit {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("init", parents=[common], help="initialize a store")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("ingest", parents=[common], help="ingest images with capture metadata")
    p.add_argument("images", nargs="*", help="image files (flags apply to all)")
    p.add_argument("--meta-file", help="batch mode: one JSON object per line")
    p.add_argument("--camera-id")
    p.add_argument("--flight-id")
    p.add_argument("--capture-time")
    p.add_argument("--sequence-id")
    p.add_argument("--frame-index", type=int)
    p.set_defaults(func=cmd_ingest)

    annotate = sub.add_parser("annotate", help="annotation operations")
    asub = annotate.add_subparsers(dest="subcommand")
    p = asub.add_parser("import", parents=[common], help="import auto-generated labels")
    p.add_argument("file")
    p.add_argument("--author", default="auto")
    p.add_argument("--created-at", default="1970-01-01T00:00:00Z")
    p.set_defaults(func=cmd_annotate_import)

    dataset = sub.add_parser("dataset", help="dataset version control")
    dsub = dataset.add_subparsers(dest="subcommand")
    p = dsub.add_parser("create", parents=[common], help="create version 1 of a named dataset")
    p.add_argument("--name", required=True)
    p.add_argument("--role", required=True, choices=("development-train", "development-validation", "certification"))
    p.add_argument("--entries", required=True, help="jsonl of {image, annotation} pairs")
    p.set_defaults(func=cmd_dataset_create)
    p = dsub.add_parser("commit", parents=[common], help="commit the next version")
    p.add_argument("--parent", required=True, help="parent dataset id or name (tip)")
    p.add_argument("--entries", required=True)
    p.add_argument("--role", choices=("development-train", "development-validation", "certification"))
    p.set_defaults(func=cmd_dataset_commit)
    p = dsub.add_parser("checkout", parents=[common], help="reconstruct a committed version")
    p.add_argument("dataset", help="dataset id or name")
    p.add_argument("--out", help="also write canonical manifest bytes to a file")
    p.set_defaults(func=cmd_dataset_checkout)
    p = dsub.add_parser("diff", parents=[common], help="entry-level diff of two versions")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_dataset_diff)
    p = dsub.add_parser("history", parents=[common], help="version chain, newest first")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_dataset_history)
    p = dsub.add_parser(
        "verify-disjoint", parents=[common], help="check dev/cert image and flight disjointness"
    )
    p.add_argument("--dev", nargs="+", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_dataset_verify_disjoint)

    p = sub.add_parser("coverage", parents=[common], help="domain coverage of a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--domain", required=True, help="domain spec file")
    p.add_argument("--cross", help="pairwise cross-tabulation: dimA,dimB")
    p.set_defaults(func=cmd_coverage)

    model = sub.add_parser("model", help="model provenance registry")
    msub = model.add_subparsers(dest="subcommand")
    p = msub.add_parser("import-trace", parents=[common], help="import an environment trace")
    p.add_argument("file")
    p.set_defaults(func=cmd_model_import_trace)
    p = msub.add_parser("register", parents=[common], help="register model bytes + manifest")
    p.add_argument("--model-file", required=True)
    p.add_argument("--manifest", required=True, help="manifest fields (JSON)")
    p.set_defaults(func=cmd_model_register)
    p = msub.add_parser("verify", parents=[common], help="verify model bytes or reproduction")
    p.add_argument("manifest", help="manifest id")
    p.add_argument("--model-file", help="candidate model bytes")
    p.add_argument("--against", help="second manifest id for reproduction comparison")
    p.set_defaults(func=cmd_model_verify)
    p = msub.add_parser("audit", parents=[common], help="scan all manifests for training leakage")
    p.set_defaults(func=cmd_model_audit)
    p = msub.add_parser("show", parents=[common], help="print a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_model_show)

    ev = sub.add_parser("eval", help="detection evaluation")
    esub = ev.add_subparsers(dest="subcommand")
    p = esub.add_parser("run", parents=[common], help="full evaluation with requirement checks")
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--requirements", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--model", help="model manifest id")
    p.set_defaults(func=cmd_eval_run)
    p = esub.add_parser("sensitivity", parents=[common], help="per-partition AP for one dimension")
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--dimension", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--iou-threshold", type=float, default=0.5)
    p.add_argument("--svg", help="also render the bar chart to this path")
    p.set_defaults(func=cmd_eval_sensitivity)

    p = sub.add_parser("stability", parents=[common], help="sequence flicker analysis")
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--iou-threshold", type=float, default=0.5)
    p.add_argument("--confidence", type=float, default=0.5)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic encounter dataset")
    p.add_argument("--config", help="synthetic config file (defaults are built in)")
    p.add_argument("--out-dir", default="synth-out")
    p.add_argument("--out-dataset", help="override the dataset name")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", parents=[common], help="write a certification report bundle")
    p.add_argument("--eval", required=True, help="evaluation report id")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    store = sub.add_parser("store", help="store maintenance")
    ssub = store.add_subparsers(dest="subcommand")
    p = ssub.add_parser("verify", parents=[common], help="re-hash all objects, check references")
    p.set_defaults(func=cmd_store_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except IntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, ValidationError, NotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CertkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
