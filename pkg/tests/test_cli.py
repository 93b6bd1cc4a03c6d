import io
import json
import subprocess
import sys

import pytest

from unidom.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def result(*argv):
    code, text = call(*argv)
    assert code == 0, text
    return json.loads(text)


def test_info():
    d = result("info", "A5")
    assert d["result"]["order"] == 60 and d["command"] == "info"
    assert {"tool", "version", "backend", "seed", "config_digest"} <= d.keys()


def test_mu():
    d = result("mu", "alt 5")
    assert d["result"]["mu"] == 1 and d["result"]["witness_class"] == "5a"
    assert d["certified"] is True


def test_overgroups_and_fpr():
    d = result("overgroups", "A5", "--class", "3a")
    assert sorted(d["result"]["orders"]) == [6, 12, 12]
    d = result("fpr", "A5", "--element", "(1,2,3)")
    assert {a["index"] for a in d["result"]["actions"]} == {5, 10}


def test_base():
    assert result("base", "A5")["result"]["b"] == 3
    assert result("base", "M11")["result"]["b"] == 4


def test_qhat():
    d = result("qhat", "A5", "--class", "5a")
    assert d["result"]["q_hat"]["3"] == "2/3" and d["result"]["min_c_q_hat"] == 3


def test_gamma():
    d = result("gamma", "A5")
    assert d["result"]["bracket"] == [3, 3] and d["result"]["exact"]


def test_alt_theory():
    d = result("alt-theory", "31")
    assert d["result"]["ell"] == 17 and d["result"]["mu_predicted"] == 3


def test_input_errors():
    assert call("info", "foo 3")[0] == 3
    assert call("qhat", "A5", "--element", "(1,2,9)")[0] == 3
    assert call("tds-verify", "A6", "/nonexistent.json")[0] == 3
    assert call("gamma")[0] == 3


def test_tds_round_trip(tmp_path):
    path = tmp_path / "cert.json"
    code, _ = call("tds-search", "A6", "--class", "5a", "--size", "4", "--out", str(path))
    assert code == 0
    assert call("tds-verify", "A6", str(path))[0] == 0
    assert call("tds-verify", "A6", str(path), "--method", "criterion")[0] == 0
    d = json.loads(path.read_text())
    d["conjugators"][1] = d["conjugators"][0]
    path.write_text(json.dumps(d))
    assert call("tds-verify", "A6", str(path))[0] == 1
    assert call("tds-verify", "A7", str(path))[0] == 1


def test_tds_search_inconclusive():
    # no pair of 5-cycles dominates A5
    assert call("tds-search", "A5", "--class", "5a", "--size", "2", "--trials", "50")[0] == 2


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_cache_gives_identical_output(tmp_path, fmt):
    argv = ["gamma", "A5", "--format", fmt, "--cache-dir", str(tmp_path)]
    first = call(*argv)
    second = call(*argv)
    assert first == second and first[0] == 0
    assert any(tmp_path.rglob("*.json"))


def test_reproducible_across_processes():
    argv = [sys.executable, "-m", "unidom.cli", "qhat", "psl2 7", "--class", "7a", "--seed", "5"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
