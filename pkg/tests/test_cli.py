"""Workspace documents, fixtures, commands, exit codes."""

import json

import pytest

from coralg.cli import main
from coralg.errors import SchemaError
from coralg.fixtures import FIXTURE_NAMES, fixture_document
from coralg.workspace import parse_workspace, serialize_workspace


def run_cli(tmp_path, *argv):
    import io
    import contextlib
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def z2_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("ws") / "z2.json"
    p.write_text(json.dumps(fixture_document("FIX-Z2")))
    return str(p)


def test_all_fixtures_parse_and_validate():
    for name in FIXTURE_NAMES:
        doc = fixture_document(name)
        ws = parse_workspace(doc)
        assert ws.validation_errors == [], f"{name}: {ws.validation_errors[:3]}"


def test_parse_serialize_roundtrip():
    for name in ("FIX-TRIV", "FIX-Z2", "FIX-NC", "FIX-FP"):
        doc = fixture_document(name)
        ws = parse_workspace(doc)
        assert serialize_workspace(ws) == doc


def test_non_prime_modulus_rejected():
    doc = fixture_document("FIX-Z2")
    doc["field"] = {"kind": "prime-field", "p": 6}
    with pytest.raises(SchemaError) as exc:
        parse_workspace(doc)
    assert "field.p" in str(exc.value)


def test_schema_error_paths():
    doc = fixture_document("FIX-Z2")
    del doc["algebras"]["A"]["unit"]
    with pytest.raises(SchemaError) as exc:
        parse_workspace(doc)
    assert "algebras.A" in str(exc.value)


def test_cli_fixture_emission(tmp_path):
    out = tmp_path / "doc.json"
    code, _ = run_cli(tmp_path, "fixture", "FIX-TRIV", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["field"]["kind"] == "rationals"
    code, _ = run_cli(tmp_path, "fixture", "FIX-NOPE")
    assert code == 2


def test_cli_validate_and_galois(tmp_path, z2_path):
    code, out = run_cli(tmp_path, "validate", "--workspace", z2_path)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["valid"]
    code, out = run_cli(tmp_path, "galois", "--workspace", z2_path)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["galois"]
    assert "can_inv" in rep["payload"]


def test_cli_validate_corrupted_psi(tmp_path):
    doc = fixture_document("FIX-Z2")
    doc["entwinings"]["psi"]["psi"][0][1] = "7"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, out = run_cli(tmp_path, "validate", "--workspace", str(p))
    assert code == 1
    rep = json.loads(out)
    assert not rep["verdicts"]["valid"]
    assert rep["residuals"]
    # computation commands refuse invalid workspaces
    code, _ = run_cli(tmp_path, "galois", "--workspace", str(p))
    assert code == 2


def test_cli_coinvariants_and_connection(tmp_path, z2_path):
    code, out = run_cli(tmp_path, "coinvariants", "--workspace", z2_path)
    assert code == 0
    assert json.loads(out)["payload"]["dim"] == 1
    code, out = run_cli(tmp_path, "connection", "solve", "--workspace", z2_path)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["exists"] and rep["payload"]["freedom"] == 0
    code, out = run_cli(tmp_path, "connection", "verify", "--workspace", z2_path,
                        "--connection", "ell")
    assert code == 0
    assert json.loads(out)["verdicts"]["strong_connection"]


def test_cli_integral_tflat_hc(tmp_path, z2_path):
    code, out = run_cli(tmp_path, "integral", "--workspace", z2_path)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["relative_injective"]
    assert rep["payload"]["j"][0][0] == "1"
    code, out = run_cli(tmp_path, "tflat", "--workspace", z2_path)
    assert code == 0
    code, out = run_cli(tmp_path, "hc", "--workspace", z2_path, "--degree", "4")
    assert code == 0
    assert json.loads(out)["payload"]["dims"] == [1, 0, 1, 0, 1]


def test_cli_chg_and_compare(tmp_path, z2_path):
    code, out = run_cli(tmp_path, "chg", "--workspace", z2_path,
                        "--degree", "1", "--coidempotent", "e1")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["cycle"]
    assert any(v != "0" for v in rep["payload"]["class"])
    code, out = run_cli(tmp_path, "idempotent", "--workspace", z2_path,
                        "--coidempotent", "e1")
    assert code == 0
    assert json.loads(out)["payload"]["size"] == 1
    code, out = run_cli(tmp_path, "compare", "--workspace", z2_path,
                        "--coidempotent", "e1")
    assert code == 0
    assert json.loads(out)["verdicts"]["chain_equality"]


def test_cli_non_galois_exit_code(tmp_path):
    # x^2 = 0 variant: integral exists but galois fails with exit 1
    from coralg.fixtures import z2_graded_entwining
    from coralg.entwine import extension_from_grouplike
    from coralg.exactla import QQ
    from coralg.workspace import Workspace, serialize_workspace
    ent = z2_graded_entwining(QQ, square=0)
    ent.ring.name = "A"
    ent.base.name = "R"
    ent.coring.name = "C"
    ent.coring.carrier.name = "C"
    x = extension_from_grouplike(ent, [QQ.one, QQ.zero])
    ws = Workspace(QQ)
    ws.algebras["A"] = ent.ring
    ws.algebras["R"] = ent.base
    ws.bimodules["C"] = ent.coring.carrier
    ws.corings["C"] = ent.coring
    ws.entwinings["psi"] = ent
    ws.coactions["rho"] = ("A", "C", x.rho)
    p = tmp_path / "x20.json"
    p.write_text(json.dumps(serialize_workspace(ws)))
    code, out = run_cli(tmp_path, "galois", "--workspace", str(p))
    assert code == 1
    assert not json.loads(out)["verdicts"]["galois"]


def test_report_determinism(tmp_path, z2_path):
    _, out1 = run_cli(tmp_path, "chg", "--workspace", z2_path,
                      "--degree", "1", "--coidempotent", "e1")
    _, out2 = run_cli(tmp_path, "chg", "--workspace", z2_path,
                      "--degree", "1", "--coidempotent", "e1")
    assert out1 == out2
