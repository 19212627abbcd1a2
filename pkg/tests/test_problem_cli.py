import json
from pathlib import Path

import pytest

from idemcore import cli
from idemcore.errors import DanglingRef, SchemaError
from idemcore.fixtures import BROKEN_DOCUMENTS, VALID_DOCUMENTS
from idemcore.problem import parse, parse_document, schema_document

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = sorted((ROOT / "problems").glob("*.json"))


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    return code, capsys.readouterr().out


def write(tmp_path, doc, name="p.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=2))
    return p


def test_schema_in_docs_is_current():
    text = (ROOT / "docs" / "schema.json").read_text()
    assert text == schema_document()
    assert json.loads(text)["properties"]["version"] == {"const": 1}


@pytest.mark.parametrize("path", PROBLEMS, ids=[p.stem for p in PROBLEMS])
def test_golden_reports(capsys, path):
    code, out = run(capsys, "run", path, "--format", "canonical")
    assert out == (ROOT / "problems" / "golden" / path.name).read_text()
    assert code == (2 if path.stem == "budgets" else 0)


@pytest.mark.parametrize("nm", sorted(VALID_DOCUMENTS))
def test_valid_documents_validate(capsys, tmp_path, nm):
    code, out = run(capsys, "validate", write(tmp_path, VALID_DOCUMENTS[nm]))
    assert code == 0, out


@pytest.mark.parametrize("nm", sorted(BROKEN_DOCUMENTS))
def test_broken_documents_exit_1(capsys, tmp_path, nm):
    doc, kind, _ = BROKEN_DOCUMENTS[nm]
    code, out = run(capsys, "validate", write(tmp_path, doc), "--format", "json")
    assert code == 1
    assert kind in out


def test_unknown_field_names_the_field():
    text = b'{\n  "version": 1,\n  "colour": "red"\n}'
    with pytest.raises(SchemaError) as info:
        parse(text)
    rec = info.value.as_record()
    assert rec["witness"]["field"] == "colour"
    assert rec["witness"]["line"] == 3


def test_bad_json_has_position():
    with pytest.raises(SchemaError) as info:
        parse(b'{"version": 1,\n  "categories": }')
    assert info.value.as_record()["witness"]["line"] == 2


def test_dangling_reference():
    doc = {"version": 1, "monads": {"M": {"category": "nope", "identity": True}}}
    with pytest.raises(DanglingRef) as info:
        parse_document(doc)
    assert info.value.as_record()["witness"]["ref"] == "nope"


def test_core_identity_monad(capsys):
    code, out = run(capsys, "core", ROOT / "problems" / "poset2_reflection.json", "--monad", "Id")
    assert code == 0 and "reflective subcategory" in out


def test_core_missing_monad_exit_1(capsys):
    code, out = run(capsys, "core", ROOT / "problems" / "poset2_reflection.json", "--monad", "Nope")
    assert code == 1 and "DanglingRef" in out


def test_sheafify_dense_two_points(capsys):
    code, out = run(capsys, "sheafify", ROOT / "problems" / "sheafify_poset2.json",
                    "--presheaf", "two", "--topology", "dense", "--method", "both", "--format", "json")
    assert code == 0
    rep = json.loads(out)["canonical"]
    assert rep["summary"]["fail"] == 0
    assert any(c["name"] == "aX ≅ X++ compatibly with units" for c in rep["checks"])


@pytest.mark.parametrize("method", ["core", "plus"])
def test_sheafify_methods(capsys, method):
    code, _ = run(capsys, "sheafify", ROOT / "problems" / "sheafify_poset2.json",
                  "--presheaf", "glued", "--topology", "dense", "--method", method)
    assert code == 0


def test_verify_lt_identity_bound_3(capsys):
    code, out = run(capsys, "verify-lt", ROOT / "problems" / "chain3_verify.json", "--topology", "id", "--bound", "3")
    assert code == 0 and "(f)" in out


def test_budget_exit_2(capsys):
    code, out = run(capsys, "sheafify", ROOT / "problems" / "budgets.json", "--presheaf", "two", "--topology", "id")
    assert code == 2 and "BudgetExceeded" in out


def test_orth_failure_exit_1(capsys, tmp_path):
    doc = {"version": 1, "categories": {"F": {"preset": "finset12"}}}
    p = write(tmp_path, doc)
    code, out = run(capsys, "orth", p, "--pair", "2>1:(0, 0)", "2>1:(0, 0)")
    assert code == 1 and "FAIL" in out
    code, _ = run(capsys, "orth", p, "--pair", "2>1:(0, 0)", "1>2:(0,)", "--enriched")
    assert code == 0


def test_output_file_and_canonical_determinism(capsys, tmp_path):
    path = ROOT / "problems" / "bisite_poset2.json"
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["quasitopos", str(path), "--format", "canonical", "-o", str(a)]) == 0
    assert cli.main(["quasitopos", str(path), "--format", "canonical", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_lt_enum_and_factsys(capsys):
    code, out = run(capsys, "lt-enum", ROOT / "problems" / "sheafify_poset2.json")
    assert code == 0 and "round trips" in out
    code, _ = run(capsys, "factsys-check", ROOT / "problems" / "finset_epi_mono.json")
    assert code == 0


def test_suite_fast_criteria(capsys):
    code, out = run(capsys, "suite", "--criteria", "2", "7", "--format", "json")
    assert code == 0
    assert json.loads(out)["canonical"]["summary"]["pass"] == 2
