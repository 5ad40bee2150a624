import json

from ncq.cli import main
from ncq.operators import MultiSource, make_planar_measurement


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_certify_builtin_bb84_exits_nonclassical(capsys):
    code, out = run(["certify", "--kind", "measurement", "bb84", "--builtin"], capsys)
    assert code == 10
    assert "nonclassical" in out


def test_certify_trivial_exits_classical(capsys):
    code, out = run(["certify", "--kind", "measurement", "trivial", "--builtin"], capsys)
    assert code == 0


def test_malformed_json_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(["certify", "--kind", "measurement", str(bad)])
    assert code == 2


def test_unknown_builtin_exits_two(capsys):
    code = main(["certify", "--kind", "states", "not_a_set", "--builtin"])
    assert code == 2


def test_robustness_states_builtin_json(capsys):
    code, out = run(
        ["robustness", "--kind", "states", "icosahedron12", "--builtin", "--format", "json"], capsys
    )
    assert code == 10
    payload = json.loads(out)
    assert abs(payload["value"] - 0.4194695) < 1e-4
    assert payload["quantity"] == "eta"


def test_robustness_dual_flag(capsys):
    code, out = run(["robustness", "--kind", "measurement", "planar4", "--builtin", "--dual"], capsys)
    assert code == 10
    assert "0.7071" in out


def test_robustness_sweep(capsys):
    code, out = run(
        ["robustness", "--kind", "measurement", "planar4", "--builtin", "--sweep", "0.5:1.0:3"], capsys
    )
    assert code == 0
    lines = [l for l in out.strip().splitlines() if l.startswith("eta=")]
    assert len(lines) == 3


def test_fraction_planar5(capsys):
    code, out = run(["fraction", "--kind", "measurement", "planar5", "--builtin", "--format", "json"], capsys)
    assert code == 10
    assert abs(json.loads(out)["value"] - 1.0) < 1e-6


def test_witness_command(capsys):
    code, out = run(["witness", "--kind", "states", "bb84_states", "--builtin", "--format", "json"], capsys)
    assert code == 10
    payload = json.loads(out)
    assert payload["verdict"] == "nonclassical"
    assert payload["value"] < 1


def test_measurement_file_roundtrip(tmp_path, capsys):
    meas = make_planar_measurement(4)
    path = tmp_path / "meas.json"
    path.write_text(json.dumps(meas.to_json_dict()))
    code, _ = run(["certify", "--kind", "measurement", str(path)], capsys)
    assert code == 10


def test_lp_model_pentagon_scenario(tmp_path, capsys):
    from ncq.operators import make_planar_state_set

    source = MultiSource.deterministic(make_planar_state_set(5))
    meas = make_planar_measurement(5)
    scenario = tmp_path / "scenario.json"
    scenario.write_text(
        json.dumps({"source": source.to_json_dict(), "measurement": meas.to_json_dict()})
    )
    code, out = run(["lp-model", str(scenario), "--format", "json"], capsys)
    assert code == 10
    payload = json.loads(out)
    assert payload["feasible"] is False
    assert payload["violation"] > 1e-6
    assert payload["inequality"]["kind"] == "nc_inequality"


def test_steer_command_reduce(capsys):
    code, out = run(["steer", "--eta", "0.7", "--reduce"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "state_set"
    assert len(payload["states"]) == 12


def test_dump_polytope(capsys):
    code, out = run(["dump-polytope", "--kind", "measurement", "pentagon", "--builtin"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["v_representation"]["vertices"]) == 5
    assert payload["identity_space"]["side"] == "measurement"


def test_reproduce_state_examples(capsys):
    code, out = run(["reproduce", "state-examples"], capsys)
    assert code == 0
    assert "OK" in out
    assert out.count("computed=") == 5


def test_solver_eps_env_override(monkeypatch, capsys):
    monkeypatch.setenv("NCQ_SOLVER_EPS", "1e-8")
    code, _ = run(["certify", "--kind", "measurement", "planar3", "--builtin"], capsys)
    assert code == 0


def test_json_reports_are_deterministic(capsys):
    argv = ["robustness", "--kind", "measurement", "planar5", "--builtin", "--format", "json"]
    _, first = run(argv, capsys)
    _, second = run(argv, capsys)
    assert first == second


def test_steer_with_builtin_measurement_name(capsys):
    code, out = run(["steer", "--eta", "0.5", "--measurement", "octahedron"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "multi_source"
    assert len(payload["settings"]) == 1  # one six-outcome setting


def test_enum_cap_exit_code(capsys):
    code = main(["certify", "--kind", "measurement", "dodecahedron", "--builtin", "--enum-cap", "5"])
    assert code == 4
