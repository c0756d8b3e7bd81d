"""End-to-end CLI behaviour: output formats, exit codes, config."""

import json

import pytest
from click.testing import CliRunner

from cftkit.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_mdata_table(runner):
    res = runner.invoke(main, ["mdata", "sl2", "--level", "4"])
    assert res.exit_code == 0
    assert "c = 2" in res.output
    assert "| label |" in res.output


def test_mdata_json_roundtrip(runner):
    res = runner.invoke(main, ["mdata", "minimal", "--m", "1", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["c"] == "1/2"
    # canonical formatting: the emitted text is sorted, indented JSON
    assert res.output.strip() == json.dumps(doc, indent=2, sort_keys=True)


def test_mdata_usage_errors(runner):
    assert runner.invoke(main, ["mdata", "sl2"]).exit_code == 2
    assert runner.invoke(main, ["mdata", "e8", "--level", "1"]).exit_code == 2
    assert runner.invoke(main, ["mdata", "sl2", "--level", "-3"]).exit_code == 2


def test_char_commands(runner):
    res = runner.invoke(main, ["char", "sl2", "--level", "1", "--j", "0",
                               "--order", "3"])
    assert res.exit_code == 0
    assert "-1/24" in res.output
    res = runner.invoke(main, ["char", "minimal", "--m", "1", "--r", "1",
                               "--s", "2", "--order", "4", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["leading_exponent"] == "1/24"
    assert runner.invoke(main, ["char", "sl2", "--level", "1"]).exit_code == 2


def test_invariants_enumerate_k10(runner):
    res = runner.invoke(main, ["invariants", "enumerate", "--algebra", "sl2",
                               "--level", "10", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert sorted(inv["tag"] for inv in doc) == ["A", "D_odd", "E6"]


def test_invariants_enumerate_deterministic(runner):
    args = ["invariants", "enumerate", "--algebra", "minimal", "--m", "3",
            "--json"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == b.exit_code == 0
    assert a.output == b.output


def test_invariants_verify_tag(runner):
    res = runner.invoke(main, ["invariants", "verify", "--algebra", "sl2",
                               "--level", "16", "--tag", "E7"])
    assert res.exit_code == 0
    assert "pass" in res.output
    res = runner.invoke(main, ["invariants", "verify", "--algebra", "sl2",
                               "--level", "16", "--tag", "E6"])
    assert res.exit_code == 2


def test_invariants_verify_matrix_file(runner, tmp_path):
    n = 5
    good = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    bad = [row[:] for row in good]
    bad[0][1] = 1
    for name, matrix, code in [("good.json", good, 0), ("bad.json", bad, 1)]:
        path = tmp_path / name
        path.write_text(json.dumps({"matrix": matrix}))
        res = runner.invoke(main, ["invariants", "verify", "--algebra", "sl2",
                                   "--level", "4", "--matrix", str(path)])
        assert res.exit_code == code, res.output


def test_invariants_from_extension(runner):
    res = runner.invoke(main, ["invariants", "from-extension", "--algebra",
                               "sl2", "--level", "4", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert len(doc) == 1
    assert doc[0]["invariant"]["tag"] == "D_even"


def test_invariants_expected_m27(runner):
    res = runner.invoke(main, ["invariants", "expected", "--algebra",
                               "minimal", "--m", "27", "--json"])
    assert res.exit_code == 0
    tags = [inv["tag"] for inv in json.loads(res.output)]
    assert any("E8" in t for t in tags)


def test_coset_verify(runner):
    res = runner.invoke(main, ["coset", "verify", "--m", "1", "--n", "1",
                               "--eps", "0", "--order", "5"])
    assert res.exit_code == 0
    assert "pass" in res.output
    res = runner.invoke(main, ["coset", "verify", "--m", "1", "--n", "0",
                               "--eps", "3", "--order", "5"])
    assert res.exit_code == 2


def test_coset_mirror(runner):
    res = runner.invoke(main, ["coset", "mirror", "--m", "9",
                               "--summands", "0,6", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["summands"] == [[[1, 1], 1], [[1, 7], 1]]
    assert doc["weights"] == ["0", "8"]
    assert doc["unitary"] == "unknown"
    res = runner.invoke(main, ["coset", "mirror", "--m", "9",
                               "--summands", "6"])
    assert res.exit_code == 2


def test_classify(runner):
    res = runner.invoke(main, ["classify", "--c", "25/26",
                               "--summands", "(1,1),(7,1)"])
    assert res.exit_code == 0
    assert "minimal-E6-coset" in res.output
    res = runner.invoke(main, ["classify", "--c", "25/26",
                               "--summands", "(1,1),(5,3)", "--json"])
    assert res.exit_code == 1
    assert json.loads(res.output)["result"] == "rejected"
    res = runner.invoke(main, ["classify", "--c", "3/2",
                               "--summands", "(1,1)"])
    assert res.exit_code == 2


def test_catalog(runner):
    res = runner.invoke(main, ["catalog", "--algebra", "sl2", "--param", "28",
                               "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert {e["voa"] for e in doc} == {"sl2-simple-current", "sl2-E8"}
    res = runner.invoke(main, ["catalog", "--algebra", "sl2", "--param", "5"])
    assert res.exit_code == 0
    assert "no catalog entries" in res.output


def test_config_file(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("order = 3\noutput = markdown\n")
    res = runner.invoke(main, ["--config", str(cfg), "char", "sl2",
                               "--level", "1", "--j", "1"])
    assert res.exit_code == 0
    assert res.output.count("\n") == 5  # header + separator + 3 rows + final

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    res = runner.invoke(main, ["--config", str(bad), "mdata", "sl2",
                               "--level", "1"])
    assert res.exit_code == 2


def test_enumerate_cache_identical(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("CFTKIT_CACHE_DIR", str(tmp_path))
    args = ["invariants", "enumerate", "--algebra", "sl2", "--level", "6",
            "--json", "--cache"]
    cold = runner.invoke(main, args)
    assert cold.exit_code == 0
    assert list(tmp_path.iterdir()), "cache populated"
    warm = runner.invoke(main, args)
    assert warm.output == cold.output
