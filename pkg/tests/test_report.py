import hashlib
import json

import pytest

from certkit import (
    DomainDimension,
    NotFoundError,
    OperationalDomainSpec,
    RequirementSpec,
    SyntheticConfig,
    evaluate,
    generate,
    generate_report,
    load_predictions,
)
from certkit.report import render_sensitivity_svg

from test_evaluation import build_fixture, det, gt_box, domain_spec


@pytest.fixture
def evaluated(repo, tmp_path):
    config = SyntheticConfig(seed=7, n_encounters=2, frames_per_encounter=20)
    dataset_id, pred_path = generate(repo, config, tmp_path / "synth")
    manifest = repo.checkout_dataset(dataset_id)
    predictions = load_predictions(pred_path, manifest)
    domain = OperationalDomainSpec(
        (
            config.range_dimension(),
            DomainDimension("time_of_day", "categorical", ("day", "dusk", "night", "dawn"), (0,) * 4),
        )
    )
    spec = RequirementSpec(min_map=0.1, max_fp_per_image=2.0)
    return evaluate(repo, predictions, spec, domain)


def _tree_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_bundle_deterministic(repo, tmp_path, evaluated):
    b1 = generate_report(repo, evaluated.report_id, tmp_path / "bundle1")
    b2 = generate_report(repo, evaluated.report_id, tmp_path / "bundle2")
    assert b1.bundle_digest == b2.bundle_digest
    assert _tree_bytes(b1.directory) == _tree_bytes(b2.directory)


def test_bundle_self_digest_matches_filename(repo, tmp_path, evaluated):
    bundle = generate_report(repo, evaluated.report_id, tmp_path / "bundle")
    named = bundle.directory / f"{bundle.bundle_digest.hex}.json"
    assert named.exists()
    assert hashlib.sha256(named.read_bytes()).hexdigest() == named.stem
    assert (bundle.directory / "report.json").read_bytes() == named.read_bytes()


def test_bundle_contains_expected_files(repo, tmp_path, evaluated):
    bundle = generate_report(repo, evaluated.report_id, tmp_path / "bundle")
    names = set(bundle.files)
    assert {"report.json", "coverage.csv", "sensitivity.csv", "requirements.csv",
            "sensitivity.svg", "stability.csv"} <= names
    assert bundle.omissions == ()
    svg = (bundle.directory / "sensitivity.svg").read_bytes()
    assert svg.startswith(b"<?xml")
    assert b"average precision" in svg


def test_bundle_provenance_resolves(repo, tmp_path, evaluated):
    bundle = generate_report(repo, evaluated.report_id, tmp_path / "bundle")
    doc = json.loads((bundle.directory / "report.json").read_text())
    for key, value in doc["provenance"].items():
        if value is not None:
            from certkit import Digest

            assert repo.store.exists(Digest(value)), key


def test_bundle_sensitivity_csv_matches_report(repo, tmp_path, evaluated):
    bundle = generate_report(repo, evaluated.report_id, tmp_path / "bundle")
    doc = json.loads((bundle.directory / "report.json").read_text())
    lines = (bundle.directory / "sensitivity.csv").read_text().strip().splitlines()
    assert lines[0] == "dimension,bin_lo,bin_hi,ap,n_gt"
    cells = doc["evaluation"]["partitions"]["intruder_range_m"]
    for line, cell in zip(lines[1:], cells):
        fields = line.split(",")
        assert fields[0] == "intruder_range_m"
        assert fields[3] == (cell["ap"] if cell["ap"] is not None else "")
        assert int(fields[4]) == cell["n_gt"]


def test_bundle_omits_stability_without_sequences(repo, tmp_path):
    images = [(100.0, [gt_box()], [det(conf=0.9)])]
    _, predictions = build_fixture(repo, images)
    report = evaluate(repo, predictions, RequirementSpec(min_map=0.1), domain_spec())
    bundle = generate_report(repo, report.report_id, tmp_path / "bundle")
    assert any("stability" in o for o in bundle.omissions)
    assert not (bundle.directory / "stability.csv").exists()
    doc = json.loads((bundle.directory / "report.json").read_text())
    assert doc["stability"] is None
    assert any("stability" in o for o in doc["omissions"])


def test_bundle_unknown_report(repo, tmp_path):
    from certkit import Digest

    with pytest.raises(NotFoundError):
        generate_report(repo, Digest("ab" * 32), tmp_path / "bundle")


def test_svg_renderer_deterministic_and_clean():
    a = render_sensitivity_svg("intruder_range_m", ["[0,375)", "[375,750)"], [0.9, None])
    b = render_sensitivity_svg("intruder_range_m", ["[0,375)", "[375,750)"], [0.9, None])
    assert a == b
    assert b"dc:date" not in a  # no timestamps embedded
