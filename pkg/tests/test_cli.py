import json

import pytest

from ncwalk.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def js(capsys, *argv):
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_eval_5453(capsys):
    assert js(capsys, "eval", "--psi", "4", "--N", "2", "--t", "3", "--lambda", "4,2")["value"] == "5453"


def test_state_zero_and_polynomial(capsys):
    assert js(capsys, "state", "--monomial", "E[1,1]E[1,2]", "--t", "t")["state"] == "0"
    assert js(capsys, "state", "--monomial", "E[2,1]E[1,2]E[2,1]E[1,2]")["state"] == "2*t^2 + t"
    assert js(capsys, "state", "--monomial", "E[2,1]E[1,2]", "--t", "1/2")["state"] == "1/2"


def test_oracle_state_agrees(capsys):
    a = js(capsys, "oracle-state", "--monomial", "E[1,1]E[1,1]E[1,1]E[2,2]")["state"]
    b = js(capsys, "state", "--monomial", "E[1,1]E[1,1]E[1,1]E[2,2]")["state"]
    assert a == b == "t^4 + 3*t^3 + t^2"


def test_normal_form_and_apply_pt(capsys):
    nf = js(capsys, "normal-form", "--element", "E[1,2]E[2,1]")["normal_form"]
    assert "E[2,1]E[1,2]" in nf
    out = js(capsys, "apply-pt", "--element", "E[1,1]", "--t", "s", "--normal")["apply_pt"]
    assert out == "(s) + E[1,1]"


def test_psi_hc_pt_expand(capsys):
    assert js(capsys, "hc", "--psi", "2", "--N", "2")["hc"] == "x1^2 + x2^2"
    assert js(capsys, "psi", "--k", "2", "--N", "2")["terms"] > 0
    exp = js(capsys, "pt-expand", "--k", "2", "--N", "3")["expansion"]
    assert exp == {"(2)": "1", "(1)": "2*t", "()": "3*t^2 + 9*t"}


def test_two_level_eval(capsys):
    out = js(capsys, "eval", "--element", "(E[1,1]+E[2,2]-1)E[1,1]", "--N", "2", "--t", "1",
             "--levels-at", "2:1,0;1:0")
    assert out["value"] == "3"


def test_asymptotics(capsys):
    out = js(capsys, "asymptotics", "--k", "2")["coefficients"]
    assert out["(1)"] == "2*tau"


def test_cov_and_ckl(capsys):
    assert js(capsys, "cov", "--i", "1,2,1", "--j", "1,1,2")["cov"] == "1"
    out = js(capsys, "cov", "--verify-ckl", "3", "--tau1", "1", "--tau2", "3", "--eta", "2")
    assert out["c_kl"] == ["24", "6", "1"] and out["timelike_identity"] is True


def test_detform(capsys):
    assert abs(js(capsys, "detform", "--x", "4", "--y", "2", "--t", "3", "--k", "4")["value"] - 5453) < 1e-6


def test_simulate_json_csv_and_seed_env(capsys, tmp_path, monkeypatch):
    path = tmp_path / "snap.csv"
    args = ["simulate", "--levels", "2", "--schedule", "(2,1);(1,1)", "--obs", "p1;p1",
            "--initial", "0;1,-1", "--replicas", "2000"]
    monkeypatch.setenv("NCWALK_SEED", "99")
    a = js(capsys, *args, "--csv", str(path), "--csv-rows", "10")
    assert a["seed"] == 99 and a["replicas"] == 2000
    assert len(path.read_text().strip().splitlines()) == 1 + 2 * 10
    b = js(capsys, *args)
    assert a == b
    c = js(capsys, *args, "--seed", "5")
    assert c["seed"] == 5


def test_ctmc(capsys):
    out = js(capsys, "ctmc", "--levels", "1", "--schedule", "(1,2)", "--obs", "p1")
    assert abs(out["value"] - 2) <= out["error_bound"] + 1e-12


@pytest.mark.parametrize("argv", [
    ["state", "--monomial", "E[1,2"],
    ["state", "--monomial", "E[1,1]", "--t", "0.5"],
    ["simulate", "--levels", "2", "--schedule", "(2;x)", "--obs", "p1"],
    ["nonsense"],
    ["eval", "--psi", "2"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


def test_domain_error_exit_1(capsys):
    code, _, err = run_cli(capsys, "pt-expand", "--k", "3", "--N", "2")
    assert code == 1 and "exceeds rank" in err


def test_verify_subset(capsys):
    out = js(capsys, "verify", "--suite", "quick", "--only", "1,4,5")
    assert out["passed"] is True
    assert [c["id"] for c in out["criteria"]] == [1, 4, 5]
