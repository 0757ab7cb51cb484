import json

import pytest

from src.cli import EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, main
from src.network_model import load, save


@pytest.fixture
def dyad_file(tmp_path, forceful_dyad):
    return str(save(forceful_dyad, tmp_path / "dyad.json"))


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_generate_to_stdout(capsys):
    code, out = _run(capsys, "generate", "example2", "--case", "a")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["n"] == 6
    assert document["epsilon"] == 0.1


def test_generate_to_file(tmp_path, capsys):
    path = tmp_path / "nets" / "barbell.json"
    code, _ = _run(capsys, "generate", "barbell", "--n1", "3", "--forceful", "2", "3", "0.5", "--out", str(path))
    assert code == EXIT_OK
    network = load(path)
    assert network.n == 6
    assert network.alpha[2, 3] == 0.5


def test_forceful_rejected_for_fixed_kinds(capsys):
    code, out = _run(capsys, "generate", "example2", "--forceful", "0", "1", "0.5")
    assert code == EXIT_DOMAIN
    assert json.loads(out)["error"]["type"] == "ValueError"


def test_bad_generator_params(capsys):
    code, out = _run(capsys, "generate", "complete", "--epsilon", "0.7")
    assert code == EXIT_DOMAIN
    assert "error" in json.loads(out)


def test_validate_ok(dyad_file, capsys):
    code, out = _run(capsys, "validate", dyad_file)
    assert code == EXIT_OK
    assert json.loads(out) == {"ok": True, "violations": []}


def test_validate_reports_violations(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "epsilon": 0.7, "edges": [{"i": 0, "j": 1, "p": 1.0}, {"i": 1, "j": 0, "p": 1.0}]}))
    code, out = _run(capsys, "validate", str(path))
    assert code == EXIT_DOMAIN
    assert [v["code"] for v in json.loads(out)["violations"]] == ["bad_epsilon"]


def test_validate_csv(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "epsilon": 0.7, "edges": [{"i": 0, "j": 1, "p": 1.0}, {"i": 1, "j": 0, "p": 1.0}]}))
    _, out = _run(capsys, "validate", str(path), "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "code,message,indices"
    assert lines[1].startswith("bad_epsilon,")


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{\n  \"n\": 2,\n")
    code, out = _run(capsys, "analyze", str(path))
    assert code == EXIT_PARSE
    assert json.loads(out)["error"]["type"] == "ParseError"


def test_missing_file(tmp_path, capsys):
    code, _ = _run(capsys, "validate", str(tmp_path / "absent.json"))
    assert code == EXIT_PARSE


def test_invalid_network_refused_by_analysis(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "epsilon": 0.7, "edges": [{"i": 0, "j": 1, "p": 1.0}, {"i": 1, "j": 0, "p": 1.0}]}))
    code, out = _run(capsys, "bounds", str(path))
    assert code == EXIT_DOMAIN
    assert json.loads(out)["error"]["type"] == "NetworkValidationError"


def test_analyze(dyad_file, capsys):
    code, out = _run(capsys, "analyze", dyad_file, "--x0", "1", "0")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["schema_version"] == "1.0"
    assert report["consensus"]["pi_bar"] == pytest.approx([1 / 3, 2 / 3])


def test_analyze_writes_out(dyad_file, tmp_path, capsys):
    out_path = tmp_path / "out" / "report.csv"
    code, out = _run(capsys, "analyze", dyad_file, "--format", "csv", "--out", str(out_path))
    assert code == EXIT_OK
    assert out == ""
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("agent,pi_bar,")
    assert len(lines) == 3


def test_bounds_csv(dyad_file, capsys):
    code, out = _run(capsys, "bounds", dyad_file, "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "name,norm,value,actual,certified,holds"
    assert len(lines) > 1


def test_cluster(tmp_path, bridge_barbell, capsys):
    path = save(bridge_barbell, tmp_path / "barbell.json")
    code, out = _run(capsys, "cluster", str(path), "0", "5", "--exact-cuts")
    assert code == EXIT_OK
    trace = json.loads(out)
    assert trace["certified"]


def test_simulate_weights(dyad_file, capsys):
    code, out = _run(capsys, "simulate", dyad_file, "--trials", "20", "--seed", "4")
    assert code == EXIT_OK
    estimate = json.loads(out)
    assert len(estimate["pi_hat"]) == 2
    assert estimate["trials"] == 20


def test_simulate_from_x0_is_reproducible(dyad_file, capsys):
    _, first = _run(capsys, "simulate", dyad_file, "--x0", "1", "0", "--trials", "5")
    _, second = _run(capsys, "simulate", dyad_file, "--x0", "1", "0", "--trials", "5")
    assert first == second
    payload = json.loads(first)
    assert payload["run"]["status"] == "converged"
    assert payload["trials"] == 5


def test_simulate_trace_csv(dyad_file, capsys):
    code, out = _run(capsys, "simulate", dyad_file, "--x0", "1", "0", "--trials", "2", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "event,spread"
    assert lines[1] == "0,1.0"


def test_wrong_x0_length(dyad_file, capsys):
    code, _ = _run(capsys, "simulate", dyad_file, "--x0", "1", "0", "0")
    assert code == EXIT_DOMAIN


@pytest.mark.parametrize("argv", [["analyze"], ["bounds"], ["simulate", "--trials", "2"], ["cluster", "0", "1"]],
                         ids=["analyze", "bounds", "simulate", "cluster"])
def test_commands_refuse_invalid_networks(tmp_path, capsys, argv):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "epsilon": 0.7, "edges": [{"i": 0, "j": 1, "p": 1.0}, {"i": 1, "j": 0, "p": 1.0}]}))
    command, *rest = argv
    code, out = _run(capsys, command, str(path), *rest)
    assert code == EXIT_DOMAIN
    error = json.loads(out)["error"]
    assert error["type"] == "NetworkValidationError"
    assert "epsilon" in error["message"]
