import io
import json

import pytest

from photontriplets.cli import cli_main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_model_defaults():
    code, out, _ = run("model")
    assert code == 0
    assert "triplets per pulse" in out and "0.384275" in out


def test_model_energies_and_gamma():
    _, a, _ = run("model", "--xi-p", "19.3", "--xi-sti", "3.04")
    _, b, _ = run("model", "--gamma", "overlap")
    assert "beta*L" in a and "0.576203" in b


def test_missing_config():
    code, _, err = run("model", "--config", "missing.cfg")
    assert code == 1 and "missing.cfg" in err


@pytest.mark.parametrize("argv", [("frobnicate",), ("model", "--bogus"), (), ("model", "--gamma", "x")])
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == 1 and "usage" in err


def test_bad_tf_is_config_error():
    assert run("model", "--tf", "2")[0] == 1


def test_report(tmp_path):
    code, out, _ = run("report", "--tf", "0.11", "--out", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["absolute.csv", "fig3_set_A_normalized.svg", "fig4_set_B_normalized.svg",
                     "fig5_absolute.svg", "set_A.csv", "set_B.csv"]
    assert "scale factor" in out


def test_report_output_is_a_file(tmp_path):
    f = tmp_path / "f"
    f.write_text("")
    code, _, err = run("report", "--out", str(f / "x"))
    assert code == 3 and str(f) in err


def test_numerical_error_exit(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("set,xi_p_uJ,xi_p_err,xi_sti_uJ,xi_sti_err,eta_hat,eta_err\nA,19.3,1,3,1,1.5,0.1\n")
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dataset_csv": str(data)}))
    code, _, err = run("report", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 2 and "numerical" in err


def test_simulate_deterministic(tmp_path):
    a = run("simulate", "--seed", "42", "--pulses", "1000000")
    b = run("simulate", "--seed", "42", "--pulses", "1000000", "--workers", "4")
    assert a[0] == 0 and a[1] == b[1]
    doc = json.loads(a[1])
    assert doc["pulses"] == 1_000_000 and doc["rng_seed"] == 42
    assert doc["eta_ci"][0] <= doc["eta_hat"] <= doc["eta_ci"][1]


def test_simulate_writes_file(tmp_path):
    code, out, _ = run("simulate", "--seed", "3", "--pulses", "1000", "--out", str(tmp_path))
    assert code == 0 and (tmp_path / "simulate_seed3.json").read_text() == out
    assert run("simulate", "--pulses", "0")[0] == 1


def test_fit_tf():
    code, out, _ = run("fit-tf")
    assert code == 0 and "T_F =" in out


def test_check():
    code, out, _ = run("check")
    assert code == 0 and "FAIL" not in out and out.count("PASS") == 11
