import json

import pytest

from obliqueframes.bankio import bank_from_json, bank_to_json, dumps
from obliqueframes.cli import RunConfig, main
from obliqueframes.oepkit import verify_oep


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps({"directions": [[1, 0], [0, 1], [1, 1]], "multiplicities": [2, 2, 1],
                             "ell": 2, "dilation": [[2, 0], [0, 2]]}))
    return p


def test_demo_haar(capsys):
    assert main(["demo", "haar"]) == 0
    out = capsys.readouterr().out
    assert "r " in out and "check:oep" in out and "FAIL" not in out


def test_demo_dilation3_partial(capsys):
    assert main(["demo", "--demo", "ex53-partial"]) == 0
    out = capsys.readouterr().out
    assert "fOrder" in out and "13 highpass masks" in out


def test_build_verify_export(tmp_path, spec_file):
    bank_path = tmp_path / "bank.json"
    assert main(["build", "--spec", str(spec_file), "--out", str(bank_path)]) == 0
    doc = json.loads(bank_path.read_text())
    assert doc["counts"]["r"] == 8
    report = tmp_path / "report.json"
    assert main(["verify", "--spec", str(bank_path), "--out", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert rep["passed"] and [c["name"] for c in rep["checks"]][0] == "oep"
    exp = tmp_path / "export.json"
    assert main(["export", "--spec", str(bank_path), "--grid", "8", "--out", str(exp)]) == 0
    assert len(json.loads(exp.read_text())["responses"]["highpass"]) == 8


def test_build_is_deterministic(tmp_path, spec_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["build", "--spec", str(spec_file), "--out", str(a)])
    main(["build", "--spec", str(spec_file), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_verify_fails_loudly(tmp_path, spec_file, capsys):
    bank_path = tmp_path / "bank.json"
    main(["build", "--spec", str(spec_file), "--out", str(bank_path)])
    doc = json.loads(bank_path.read_text())
    term = doc["highpass"][0]["mask"]["num"]["terms"][0]
    term["re"] *= 1.01
    bank_path.write_text(json.dumps(doc))
    assert main(["verify", "--spec", str(bank_path), "--out", str(tmp_path / "r.json")]) == 1
    assert "FAILED: oep" in capsys.readouterr().err


def test_bad_inputs(tmp_path, spec_file):
    assert main(["build", "--spec", str(spec_file), "--ell", "1"]) == 2
    assert main(["build"]) == 2
    with pytest.raises(SystemExit):
        main(["demo", "--demo", "nope"])
    with pytest.raises(ValueError):
        RunConfig("verify", spec=spec_file, tol=-1.0)


def test_bank_json_roundtrip(box2d):
    bank, _ = box2d
    back = bank_from_json(json.loads(dumps(bank_to_json(bank))))
    assert back.r == bank.r and back.provenance == bank.provenance
    assert verify_oep(back, 32).max_residual <= 1e-9


def test_dumps_format():
    text = dumps({"x": 0.1, "n": 3, "inf": float("inf"), "t": (1, 2)})
    assert text == '{"x":0.10000000000000001,"n":3,"inf":"inf","t":[1,2]}\n'
