import json
from pathlib import Path

import pytest

from prebuild import docio
from prebuild.docio import Document
from prebuild.errors import DanglingReference, NonRational, SchemaError
from prebuild.synth import FixtureSpec, synthesize_fixture


@pytest.fixture
def text():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], ["1/2", 2]))
    return docio.serialize(Document(fx.complex, fx.scaffolding))


def test_round_trip(text):
    doc = docio.parse(text)
    assert docio.serialize(doc) == text
    assert len(doc.scaffolding.folds) == 2


def test_rationals_are_strings(text):
    d = json.loads(text)
    assert all("/" in x for f in d["complex"]["faces"] for p in f["points"] for x in p)
    d["complex"]["faces"][0]["points"][0][0] = "0.5"
    with pytest.raises(NonRational):
        docio.from_dict(d)


def test_bad_json_position():
    with pytest.raises(SchemaError) as ei:
        docio.parse('{"format": "prebuild/1",\n "complex": }')
    assert "line 2" in str(ei.value)


def test_missing_gluing(text):
    d = json.loads(text)
    d["complex"]["gluings"].pop()
    with pytest.raises(DanglingReference):
        docio.from_dict(d)


def test_wrong_format(text):
    d = json.loads(text)
    d["format"] = "other"
    with pytest.raises(SchemaError):
        docio.from_dict(d)


def test_fold_endpoints_checked(text):
    d = json.loads(text)
    e = d["scaffolding"]["edges"][0]
    e["from"], e["to"] = e["to"], e["from"]
    with pytest.raises(DanglingReference):
        docio.from_dict(d)


@pytest.mark.parametrize("name", ["lens", "chain5", "ring"])
def test_bundled_round_trip(name):
    path = Path(__file__).parent / "fixtures" / (name + ".json")
    raw = path.read_text()
    assert docio.serialize(docio.parse(raw)) == raw
