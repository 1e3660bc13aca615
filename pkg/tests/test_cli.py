import json
from fractions import Fraction

import pytest
from test_dr import brute_force

from quasicf.cf import ConvergentTable
from quasicf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand_rational_and_surd(capsys):
    assert run(capsys, "expand", "--rational", "7/10")[:2] == (0, "0 1 2 3\n")
    code, out, _ = run(capsys, "expand", "--surd", "0,2,1", "--depth", "8")
    assert code == 0 and out.split() == ["1"] + ["2"] * 8


def test_expand_spec(capsys, spec_path):
    code, out, _ = run(capsys, "expand", "--spec", str(spec_path("xi12_pow2")), "--depth", "7")
    assert out.split() == ["0", "1", "2", "2", "1", "1", "1", "1"]


def test_table_round_trips_into_dr(capsys, tmp_path):
    table = tmp_path / "golden.json"
    assert run(capsys, "table", "--rational", "1/2", "--out", str(table))[0] == 0
    code, _, err = run(capsys, "table", "--surd", "1,5,2", "--depth", "120", "--out", str(table))
    assert code == 0 and "121 convergents" in err
    code, out, _ = run(capsys, "dr", "--N", "100", "--epsilon", "1/3", "--table", str(table))
    rep = json.loads(out)
    assert rep["schedule"]["k"] == 2
    exps = [Fraction(e) for e in rep["schedule"]["delta_exponents"]]
    expected = brute_force(ConvergentTable.from_json(json.loads(table.read_text())), 100, exps)
    assert rep["partition"]["members"] == [list(m) for m in expected]
    assert len(rep["manifest"]["input_digest"]) == 64


def test_certify_is_byte_identical(capsys, spec_path, tmp_path):
    a, b = run(capsys, "certify", str(spec_path("xi12_pow3")))[1], run(capsys, "certify", str(spec_path("xi12_pow3")))[1]
    assert a.encode() == b.encode()
    out = tmp_path / "c.json"
    assert run(capsys, "certify", str(spec_path("xi12_pow3")), "--out", str(out))[0] == 0
    certs = {c["theorem_id"]: c["verdict"] for c in json.loads(out.read_text())["certificates"]}
    assert certs["T3.4-amel3"] == "holds-symbolically"


def test_lab_parallel_matches_serial(capsys, spec_path, monkeypatch):
    path = str(spec_path("xi12_pow2"))
    _, serial, _ = run(capsys, "lab", path, "--stages", "1..4", "--check", "b123", "--jobs", "1")
    monkeypatch.setenv("MAILLET_LAB_JOBS", "2")
    _, parallel, err = run(capsys, "lab", path, "--stages", "1..4", "--check", "b123")
    assert serial == parallel
    assert all(r["report"]["certified"] for r in json.loads(serial)["stages"])
    assert "stage 4: certified=True" in err


@pytest.mark.parametrize("argv", [
    ["dr", "--N", "100", "--epsilon", "1/2"],
    ["certify", "/nonexistent.json"],
    ["expand", "--surd", "0,4,1", "--depth", "3"],
    ["expand", "--rational", "abc"],
    ["lab", "specs/xi12_pow2.json", "--stages", "3..1", "--check", "b123"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_invalid_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "certify", str(bad))
    assert code == 2 and "invalid JSON" in err


def test_exhausted_schedule_exit_3(capsys, tmp_path):
    spec = {"header": ["0"], "stages": [{"block": ["1"]}, {"block": ["2"]}],
            "schedule": {"kind": "table", "params": {"values": ["1", "2"]}},
            "assertions": {"not_ultimately_periodic": True}}
    path = tmp_path / "short.json"
    path.write_text(json.dumps(spec))
    assert run(capsys, "expand", "--spec", str(path), "--depth", "20")[0] == 3


def test_unknown_check_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["lab", "specs/xi12_pow2.json", "--stages", "1..2", "--check", "nope"])
    assert info.value.code == 2
