import json
from pathlib import Path

import pytest

from prebuild import docio
from prebuild.cli import main
from prebuild.docio import Document
from prebuild.scaffolding import Scaffolding
from prebuild.synth import lattice_disk

from test_scaffolding import _ring


@pytest.fixture
def lens(tmp_path):
    path = tmp_path / "lens.json"
    assert main(["synth", "--pattern", "8_1,4_2,8_1", "--lengths", "1,2", "--output", str(path)]) == 0
    return path


def _report(path):
    return json.loads(path.read_text())


def test_validate_and_classify(lens, tmp_path):
    rep = tmp_path / "r.json"
    assert main(["validate", "--initial", "--input", str(lens), "--output", str(rep)]) == 0
    assert _report(rep)["post_caustics"][0]["counts"] == [2, 1]
    assert main(["classify", "--input", str(lens), "--output", str(rep)]) == 0
    assert sorted(k for k in _report(rep)["types"].values() if k != "6_0") == ["4_2", "8_1", "8_1"]


def test_reduce(lens, tmp_path):
    out, svg = tmp_path / "core.json", tmp_path / "core.svg"
    assert main(["reduce", "--input", str(lens), "--output", str(out), "--svg", str(svg)]) == 0
    doc = docio.load(out)
    assert not doc.scaffolding.folds and len(doc.steps) == 1
    assert "8₀" in svg.read_text()


def test_step_limit_exit(lens, tmp_path):
    out = tmp_path / "part.json"
    assert main(["reduce", "--max-steps", "0", "--input", str(lens), "--output", str(out)]) == 3
    assert docio.load(out).scaffolding.folds


def test_region_and_step(lens, tmp_path):
    rep = tmp_path / "r.json"
    assert main(["region", "--input", str(lens), "--output", str(rep)]) == 0
    assert _report(rep)["checks"]["ok"]
    assert main(["step", "--input", str(lens), "--output", str(rep)]) == 0
    assert len(docio.load(rep).steps) == 1


def test_trace_and_bps(lens, tmp_path):
    out, rep = tmp_path / "net.json", tmp_path / "r.json"
    assert main(["trace", "--input", str(lens), "--output", str(out)]) == 0
    assert docio.load(out).network["arcs"]
    assert main(["bps-check", "--input", str(lens), "--output", str(rep)]) == 0
    assert _report(rep)["witness"] is None
    # a tiny budget makes the scan inconclusive; --strict turns that into a failure
    small = ["--budget-segments", "3", "--input", str(lens), "--output", str(rep)]
    assert main(["bps-check"] + small) == 0
    assert main(["bps-check", "--strict"] + small) == 1


def test_cycle_exit(tmp_path):
    Z = lattice_disk(2)
    path = tmp_path / "ring.json"
    docio.save(Document(Z, Scaffolding.from_halfedges(Z, _ring(Z))), path)
    rep = tmp_path / "r.json"
    assert main(["fold-graph", "--input", str(path), "--report", str(rep)]) == 2
    assert len(_report(rep)["error"]["witness"]) == 6


def test_bad_orientation_fails(lens, tmp_path):
    d = json.loads(lens.read_text())
    e = d["scaffolding"]["edges"][0]
    # flip the first fold onto the other half-edge of the same edge
    doc = docio.load(lens)
    Z = doc.complex
    he = Z.gluing[(e["face"], e["index"])]
    e.update({"face": he[0], "index": he[1], "from": e["to"], "to": e["from"]})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert main(["validate", "--input", str(bad), "--output", str(tmp_path / "r.json")]) == 1


def test_usage_errors(tmp_path):
    assert main(["bogus"]) == 4
    assert main(["validate"]) == 4
    assert main(["validate", "--input", str(tmp_path / "missing.json")]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["validate", "--input", str(bad)]) == 1


FIXTURES = Path(__file__).parent / "fixtures"


def test_bundled_lens_reduces_in_one_step(tmp_path):
    out = tmp_path / "core.json"
    assert main(["reduce", "--input", str(FIXTURES / "lens.json"), "--max-steps", "10",
                 "--output", str(out)]) == 0
    assert len(docio.load(out).steps) == 1


def test_bundled_ring_reduce_reports_cycle(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["reduce", "--input", str(FIXTURES / "ring.json"), "--report", str(rep)]) == 2
    err = _report(rep)["error"]
    assert err["name"] == "CycleFound" and len(err["witness"]) == 6
