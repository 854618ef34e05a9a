import json
import subprocess
import sys

import numpy as np
import pytest

from ncgeo.cli import EXIT_GATE, EXIT_INVALID, EXIT_OK, RunConfig, dumps, main, run
from ncgeo.moyal import GridFunction, read_grid_csv, star, write_grid_csv


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def theta_file(tmp_path):
    p = tmp_path / "theta.json"
    p.write_text(json.dumps([[0.0, 2.0], [-2.0, 0.0]]))
    return str(p)


def test_index_bott(capsys):
    code, out = call(capsys, "index-bott", "--theta", "0.5", "--theta-prime", "0", "--cutoff", "100000",
                     "--matrix-cutoff", "1000")
    assert code == EXIT_OK
    js = json.loads(out)
    assert js["closed_form"] == pytest.approx(39.4784, abs=1e-4)
    assert js["series"] == pytest.approx(js["closed_form"], rel=1e-4)


def test_cocycle_constants(capsys):
    code, out = call(capsys, "cocycle-constants", "--m", "2", "--k", "0,0")
    assert code == EXIT_OK
    assert json.loads(out)["alpha"] == "1/2"
    code, out = call(capsys, "cocycle-constants", "--m", "2", "--k", "0,x")
    assert code == EXIT_INVALID


def test_normal_form(capsys, theta_file):
    code, out = call(capsys, "normal-form", "--theta", theta_file)
    js = json.loads(out)
    assert code == EXIT_OK and js["residual"] < 1e-10
    assert js["mu"] == [2.0] and js["rank2n"] == 2


def test_malformed_theta(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[[0, 1], [1, 0]]")
    code, out = call(capsys, "normal-form", "--theta", str(bad))
    assert code == EXIT_INVALID
    assert json.loads(out)["error"]["type"] == "ValidationError"
    bad.write_text("not json")
    assert call(capsys, "normal-form", "--theta", str(bad))[0] == EXIT_INVALID
    assert call(capsys, "normal-form", "--theta", str(tmp_path / "missing.json"))[0] == EXIT_INVALID


def test_argument_errors(capsys):
    assert call(capsys)[0] == EXIT_INVALID
    assert call(capsys, "frobnicate")[0] == EXIT_INVALID
    code, out = call(capsys, "index-bott", "--theta", "0.5")
    assert code == EXIT_INVALID and "error" in json.loads(out)
    assert call(capsys, "heat-trace", "--theta", "x", "--t", "1", "--nmax", "-3")[0] == EXIT_INVALID


def test_heat_trace(capsys, tmp_path):
    p = tmp_path / "t.json"
    p.write_text("[[0, 1], [-1, 0]]")
    code, out = call(capsys, "heat-trace", "--theta", str(p), "--t", "0.5", "--nmax", "200", "--tol", "1e-8")
    js = json.loads(out)
    assert code == EXIT_OK and not js["tail_warning"]
    assert js["closed"] == pytest.approx(np.pi / np.sinh(0.5), rel=1e-14)
    assert abs(js["numeric"] - js["closed"]) < 1e-8


def test_heat_trace_tail_warning(capsys, tmp_path):
    p = tmp_path / "t.json"
    p.write_text("[[0, 1], [-1, 0]]")
    # a coarse cutoff is flagged; the gap stays within the reported tail bound
    code, out = call(capsys, "heat-trace", "--theta", str(p), "--t", "0.1", "--nmax", "5", "--tol", "1e-9")
    js = json.loads(out)
    assert code == EXIT_OK and js["tail_warning"]
    assert abs(js["numeric"] - js["closed"]) <= js["tail_bound"]


def test_index_gate_exit(capsys, monkeypatch):
    from ncgeo import index

    monkeypatch.setattr(index, "bott_series", lambda th, tp, k: (0.0, 1e-12))
    code, out = call(capsys, "index-bott", "--theta", "0.2", "--theta-prime", "0.3", "--cutoff", "200")
    assert code == EXIT_GATE
    assert json.loads(out)["error"]["type"] == "NumericalGateError"


def test_compose(capsys):
    code, out = call(capsys, "compose", "--a", "xi", "--b", "x", "--d", "1", "--exact")
    js = json.loads(out)
    assert code == EXIT_OK
    assert js["c"] == "x1*xi1 - i" and js["verified"] and js["residual"] == 0.0
    code, out = call(capsys, "compose", "--a", "xi^2", "--b", "x^2", "--d", "1", "--order", "1", "--exact")
    js = json.loads(out)
    assert js["residual"] > 0
    code, out = call(capsys, "compose", "--a", "x3", "--b", "x", "--d", "1")
    assert code == EXIT_INVALID


def test_star_csv(tmp_path, theta_file):
    f = GridFunction.from_function(lambda x, y: np.exp(-(x * x + y * y)), 2, 8.0, 64)
    g = GridFunction.from_function(lambda x, y: np.exp(-((x - 0.5) ** 2 + y * y) / 1.5), 2, 8.0, 64)
    fp, gp, out = tmp_path / "f.csv", tmp_path / "g.csv", tmp_path / "h.csv"
    write_grid_csv(f, fp)
    write_grid_csv(g, gp)
    code = main(["--output", str(out), "star", "--f", str(fp), "--g", str(gp), "--theta", theta_file])
    assert code == EXIT_OK
    h = read_grid_csv(out)
    np.testing.assert_allclose(h.samples, star(f, g, 2.0).samples, atol=1e-15)


def test_byte_identical_reruns(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "criteria": [1, 7]}))
    first = call(capsys, "verify-suite", "--config", str(cfg))
    second = call(capsys, "verify-suite", "--config", str(cfg))
    assert first[0] == EXIT_OK
    assert first[1] == second[1]
    assert json.loads(first[1])["seed"] == 3
    args = ("index-bott", "--theta", "0.2", "--theta-prime", "0.3", "--cutoff", "300")
    assert call(capsys, *args)[1] == call(capsys, *args)[1]


def test_verify_suite_config_errors(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    for text in ("", "{}", "[1]", '{"seed": -1}', '{"criteria": [9]}', '{"colour": 1}'):
        cfg.write_text(text)
        code, out = call(capsys, "verify-suite", "--config", str(cfg))
        assert code == EXIT_INVALID, text
        assert "error" in json.loads(out)


def test_verify_suite_seed_one(capsys):
    code, out = call(capsys, "verify-suite", "--seed", "1")
    js = json.loads(out)
    assert code == EXIT_OK and js["passed"]
    assert [c["criterion"] for c in js["criteria"]] == list(range(1, 8))


def test_float_format():
    assert dumps(0.1) == "0.10000000000000001\n"
    assert dumps({"a": [1, 2.0, True, None]}) == '{"a": [1, 2.0, true, null]}\n'


def test_run_config_validation(tmp_path):
    import io

    buf = io.StringIO()
    assert run(RunConfig("index-bott", {"theta": 0.5, "theta_prime": 0.0, "cutoff": 0}), buf) == EXIT_INVALID
    assert run(RunConfig("compose", {"a": "x", "b": "x"}, format="csv"), io.StringIO()) == EXIT_INVALID
    assert run(RunConfig("heat-trace", {"theta_file": None, "t": 1.0, "nmax": 5, "tol": 2.0}), io.StringIO()) == EXIT_INVALID


def test_console_script():
    res = subprocess.run(
        [sys.executable, "-m", "ncgeo", "cocycle-constants", "--m", "0"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["alpha"] == "1"
