import json

import numpy as np
import pytest

from rclift import serialize
from rclift.cli import main

SCALAR_PROBLEM = {
    "kind": "nehari",
    "N": 2,
    "u_dim": 1,
    "y_dim": 1,
    "taps": [[[0.5, 0.0]]],
}


@pytest.fixture()
def scalar_problem(tmp_path):
    path = tmp_path / "scalar.json"
    serialize.dump_json(str(path), SCALAR_PROBLEM)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_scalar(scalar_problem, capsys):
    code, out, _ = run(capsys, "validate", scalar_problem)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert any(r["name"] == "hankel_contraction" for r in doc["residuals"])


def test_validate_flags_expansive_instance(tmp_path, capsys):
    bad = dict(SCALAR_PROBLEM, taps=[[[1.2, 0.0]]])
    path = tmp_path / "bad.json"
    serialize.dump_json(str(path), bad)
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1
    doc = json.loads(out)
    row = next(r for r in doc["residuals"] if r["name"] == "hankel_contraction")
    assert not row["passed"]


def test_validate_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2
    assert "error" in err


def test_solve_central_scalar(scalar_problem, tmp_path, capsys):
    out_path = tmp_path / "sol.json"
    code, _, _ = run(capsys, "solve", scalar_problem, "--central",
                     "--degree", "12", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["kind"] == "nehari_solution"
    assert all(pair == [0.0, 0.0] for coeff in doc["H"] for pair in coeff)
    assert abs(doc["sigma_max"] - 0.5) < 1e-12


def test_solve_with_parameter_and_verify(scalar_problem, tmp_path, capsys):
    param = tmp_path / "v.json"
    serialize.dump_json(
        str(param),
        {"variant": "random", "in_dim": 1, "out_dim": 2, "state_dim": 2, "seed": 3},
    )
    sol = tmp_path / "sol.json"
    code, _, _ = run(capsys, "solve", scalar_problem, "--param", str(param),
                     "--degree", "24", "--out", str(sol))
    assert code == 0
    code, out, _ = run(capsys, "verify", scalar_problem, str(sol), "--degree", "24")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_rejects_forged_solution(scalar_problem, tmp_path, capsys):
    sol = tmp_path / "sol.json"
    serialize.dump_json(str(sol), {
        "kind": "nehari_solution",
        "H": [[[2.0, 0.0]]],
        "tail_bound": 0.0,
        "sigma_max": 2.0,
        "report": {},
    })
    code, out, _ = run(capsys, "verify", scalar_problem, str(sol))
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_solve_non_strict_exits_3(tmp_path, capsys):
    inst = dict(SCALAR_PROBLEM, taps=[[[1.0, 0.0]]])
    path = tmp_path / "tight.json"
    serialize.dump_json(str(path), inst)
    code, _, err = run(capsys, "solve", str(path), "--central")
    assert code == 3
    assert "hypothesis" in err


def test_gen_then_validate_all_kinds(tmp_path, capsys):
    for kind, dims in [("nehari", "2,1,3,2"), ("nehari-like", "1,2,2,3"),
                       ("classical-like", "3,3"), ("generic", "4,3,2")]:
        path = tmp_path / f"{kind}.json"
        code, _, _ = run(capsys, "gen", "--kind", kind, "--dims", dims,
                         "--seed", "7", "--norm", "0.7", "--out", str(path))
        assert code == 0
        code, out, _ = run(capsys, "validate", str(path))
        assert code == 0, out


def test_gen_deterministic(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "gen", "--kind", "generic", "--dims", "4,3,2",
                         "--seed", "11", "--out", str(path))
        assert code == 0
    assert a.read_text() == b.read_text()


def test_lifting_solve_verify_roundtrip(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    code, _, _ = run(capsys, "gen", "--kind", "generic", "--dims", "4,3,2",
                     "--seed", "2", "--norm", "0.75", "--out", str(inst))
    assert code == 0
    sol = tmp_path / "sol.json"
    code, _, _ = run(capsys, "solve", str(inst), "--central", "--degree", "24",
                     "--out", str(sol))
    assert code == 0
    doc = json.loads(sol.read_text())
    assert doc["kind"] == "lifting_solution"
    assert doc["report"]["passed"] is True
    code, out, _ = run(capsys, "verify", str(inst), str(sol), "--degree", "24")
    assert code == 0


def test_nehari_subcommand(scalar_problem, capsys):
    code, out, _ = run(capsys, "nehari", scalar_problem, "--degree", "32")
    assert code == 0
    doc = json.loads(out)
    names = {r["name"] for r in doc["residuals"]}
    assert {"hankel_norm", "gram_matches_hankel", "state_spectral_radius",
            "stacked_isometry_residual"} <= names


def test_report_byte_stability(scalar_problem, tmp_path, capsys):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    for out in (out1, out2):
        code, _, _ = run(capsys, "validate", scalar_problem, "--out", str(out))
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_suite_fast_mode(capsys):
    code, out, err = run(capsys, "suite", "--seeds", "1", "--degree", "16")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert len(doc["criteria"]) == 12
    assert err.count("PASS") + err.count("FAIL") == 12
    failed = [c["name"] for c in doc["criteria"] if not c["passed"]]
    assert failed == ["classical_specialization"]


def test_tolerance_env_override(tmp_path, capsys, monkeypatch):
    bad = dict(SCALAR_PROBLEM, taps=[[[1.0000001, 0.0]]])
    path = tmp_path / "edge.json"
    serialize.dump_json(str(path), bad)
    code, _, _ = run(capsys, "validate", str(path))
    assert code == 1
    monkeypatch.setenv("RCLIFT_TOL", "1e-3")
    code, _, _ = run(capsys, "validate", str(path))
    assert code == 0
