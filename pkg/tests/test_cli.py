import csv
import io
import json
import math

import pytest

from gqp import cli
from gqp.models import CallSpec, bs_call_closed


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_holee_bond_json(capsys):
    code, out, _ = run(capsys, "price", "holee-bond", "--x", "0.03", "--sigma", "0.01", "--mu", "0", "--tau", "2",
                       "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(math.exp(-0.06 + 1e-4 * 8 / 6), rel=1e-15)


def test_bs_call_four_routes(capsys):
    code, out, _ = run(capsys, "price", "bs-call", "--spot", "100", "--strike", "100", "--tau", "1", "--sigma", "0.2",
                       "--r", "0.05", "--routes", "closed,mellin,kernel,mc", "--paths", "20000", "--steps", "16",
                       "--seed", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split()[:3] == ["instrument", "route", "value"]
    assert len(lines) == 6 and lines[-1].startswith("max relative spread")
    assert "mc(seed=5)" in out


def test_bs_call_csv_round_trips(capsys):
    code, out, _ = run(capsys, "price", "bs-call", "--spot", "100", "--strike", "120", "--tau", "1", "--r", "0.05",
                       "--routes", "closed", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["value"]) == bs_call_closed(CallSpec(100, 120, 1, 0.2, 0.05))


@pytest.mark.parametrize("argv", [
    ["price", "holee-bond", "--x", "0.03", "--sigma", "-0.01", "--tau", "2"],
    ["price", "bs-call", "--spot", "100", "--strike", "100", "--tau", "1", "--sigma", "0"],
    ["price", "bs-call", "--spot", "100", "--strike", "100"],
    ["price", "bs-call", "--spot", "100", "--strike", "100", "--tau", "1", "--routes", "fft"],
    ["kernel", "--kind", "repulsive", "--omega", "1", "--tau", "4"],
    ["kernel", "--x", "abc"],
    ["price", "propagate", "--tau", "1", "--payoff", "digital:3"],
    ["nonsense"],
    ["verify", "--only", "astrology"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_numeric_failure_exit_3(capsys):
    code, _, err = run(capsys, "mc", "--model", "bs", "--payoff", "call:1.8", "--x0", "0", "--sigma", "0.2",
                       "--paths", "2000", "--steps", "16", "--seed", "1", "--r", "0")
    assert code == 3 and "numerical failure" in err


def test_kernel_csv_grid(capsys):
    code, out, _ = run(capsys, "kernel", "--kind", "bs", "--sigma", "1", "--x", "-1:1:3", "--x-prime", "-1:1:3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,x_prime,tau,k"
    assert len(lines) == 10
    rows = [tuple(map(float, l.split(","))) for l in lines[1:]]
    assert [r[:2] for r in rows] == [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]


def test_kernel_mehler_symmetric(capsys):
    code, out, _ = run(capsys, "kernel", "--kind", "mehler", "--omega", "1", "--sigma", "1", "--tau", "1",
                       "--x", "-1:1:5", "--x-prime", "-1:1:5")
    assert code == 0
    k = {(float(r["x"]), float(r["x_prime"])): r["k"] for r in csv.DictReader(io.StringIO(out))}
    assert all(k[(a, b)] == k[(b, a)] for a, b in k)


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"x": 0.05, "tau": 2, "sigma": 0.01, "format": "json"}))
    _, out, _ = run(capsys, "--config", str(cfg), "price", "holee-bond")
    a = json.loads(out)
    assert a["x"] == 0.05 and a["tau"] == 2
    _, out, _ = run(capsys, "--config", str(cfg), "price", "holee-bond", "--x", "0.01")
    assert json.loads(out)["x"] == 0.01


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"x": 0.05, "tau": 2, "colour": "red"}))
    code, _, err = run(capsys, "--config", str(cfg), "price", "holee-bond")
    assert code == 2 and "colour" in err
    cfg.write_text("[1, 2]")
    assert run(capsys, "--config", str(cfg), "price", "holee-bond")[0] == 2


def test_propagate_martingale(capsys):
    code, out, _ = run(capsys, "price", "propagate", "--payoff", "exp", "--tau", "1", "--sigma", "0.2", "--r", "0.05",
                       "--mu", "0.03", "--x-grid", "-0.5,0,0.5", "--format", "csv")
    assert code == 0
    for row in csv.DictReader(io.StringIO(out)):
        assert float(row["value"]) == pytest.approx(math.exp(float(row["x"])), rel=1e-8)


def test_transform_commands(capsys):
    code, out, _ = run(capsys, "transform", "bromwich", "--x", "-1,0,1", "--format", "json")
    assert code == 0
    assert all(json.loads(l)["abs_error"] <= 1e-7 for l in out.splitlines())
    code, out, _ = run(capsys, "transform", "mellin", "--z", "1.5,2+1j,3", "--format", "json")
    assert code == 0
    assert all(json.loads(l)["rel_error"] <= 1e-8 for l in out.splitlines())
    code, out, _ = run(capsys, "transform", "lct", "--matrix", "1,1,0,1", "--format", "csv")
    assert code == 0
    assert float(out.splitlines()[1].split(",")[2]) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert run(capsys, "transform", "lct", "--matrix", "1,2,3,4")[0] == 2


def test_mc_seed_echo_and_determinism(capsys):
    argv = ["mc", "--paths", "4000", "--steps", "20", "--format", "json"]
    _, out, _ = run(capsys, *argv)
    rec = json.loads(out)
    assert isinstance(rec["seed"], int)
    _, again, _ = run(capsys, *argv, "--seed", str(rec["seed"]))
    assert again == out


def test_mc_harmonic_comparison(capsys):
    code, out, _ = run(capsys, "mc", "--model", "harmonic", "--payoff", "gauss:0.2:0.5", "--x0", "0.3",
                       "--sigma", "0.8", "--omega", "1", "--beta", "0", "--paths", "20000", "--seed", "3",
                       "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert abs(rec["z_score"]) <= 3


def test_verify_only_and_json(capsys):
    code, out, _ = run(capsys, "verify", "--only", "group", "--json")
    assert code == 0
    recs = [json.loads(l) for l in out.splitlines()]
    assert recs and all(set(r) == {"name", "residual", "tolerance", "pass"} for r in recs)
    assert all(r["pass"] for r in recs)
    code, out, _ = run(capsys, "verify", "--only", "transform")
    assert code == 0 and out.strip().endswith("checks passed")


def test_verify_failure_exit_1(capsys, monkeypatch):
    from gqp import verify
    bad = verify.Check("forced", 1.0, 0.5)
    monkeypatch.setattr(verify, "run", lambda only=None: [bad])
    code, out, _ = run(capsys, "verify")
    assert code == 1 and "FAIL" in out


def test_json_line_round_trip():
    vals = {"a": 0.1 + 0.2, "b": 1e-300, "c": -2.5e17, "d": 3, "e": True}
    back = json.loads(cli.json_line(vals))
    assert back == vals


def test_mc_degenerate_payoff_reports_nan_z(capsys):
    code, out, _ = run(capsys, "mc", "--model", "bs", "--payoff", "call:1000", "--x0", "0", "--sigma", "0.2",
                       "--paths", "2000", "--steps", "16", "--seed", "1", "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["estimate"] == 0 and math.isnan(rec["z_score"])
