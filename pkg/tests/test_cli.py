import json
import subprocess
import sys

import pytest

from pvext.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, RunConfig, main, run
from pvext.symbolic import GaussRat
from pvext.weyl import catalog_json


def call(argv, capsys):
    code = main(argv + ["--deterministic"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_verify_all(capsys):
    code, rep = call(["verify-bernstein", "--all"], capsys)
    assert code == EXIT_OK and rep["passed"]
    assert len(rep["result"]["entries"]) == 6


def test_verify_reports_iterated_b(capsys):
    code, rep = call(["verify-bernstein", "--f", "z", "--M", "3"], capsys)
    assert code == EXIT_OK
    certs = rep["result"]["entries"][0]["certificates"]
    b3 = next(c["B_M"] for c in certs if c["check"] == "iterate[z, M=3]")
    assert b3 == "lam^3 + 6*lam^2 + 11*lam + 6"


def test_corrupted_catalog_fails(tmp_path, capsys):
    doc = json.loads(catalog_json())
    for e in doc["entries"]:
        if e["name"] == "z^2":
            # b_factored holds (numerator, denominator, multiplicity); move the root -1 to -2
            e["b_factored"] = [[-1, 2, 1], [-2, 1, 1]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, rep = call(["verify-bernstein", "--f", "z^2", "--catalog", str(path)], capsys)
    assert code == EXIT_FAIL
    first = rep["result"]["entries"][0]["certificates"][0]
    assert first["status"] == "fail" and first["residual"] != "0"


def test_compare_report(capsys):
    code, rep = call(["compare", "--f", "z", "--alpha", "1/2+1/4*i", "--N", "2"], capsys)
    assert code == EXIT_OK
    assert rep["result"]["rel_discrepancy"] <= 1e-4
    assert rep["alpha_exact"] == str(GaussRat.parse("1/2+1/4*i"))


def test_pv_symmetry_zero(capsys):
    code, rep = call(["pv", "--f", "z", "--alpha", "0", "--N", "1", "--form", "radial"], capsys)
    assert code == EXIT_OK
    assert abs(complex(*rep["result"]["value"])) <= 1e-10


def test_symfun_footnote(capsys):
    code, rep = call(["symfun", "--k", "2", "--check", "footnote-identity"], capsys)
    assert code == EXIT_OK and rep["passed"]


def test_negative_alpha_needs_equals_form(capsys):
    code, rep = call(["finite-part", "--f", "z", "--alpha=-13/10", "--form", "radial"], capsys)
    assert code == EXIT_OK
    assert rep["alpha_exact"] == "-13/10"


def test_decimal_alpha_is_exact():
    assert RunConfig(command="pv", alpha="0.3").alpha_exact() == GaussRat.parse("3/10")


@pytest.mark.parametrize("argv", [
    ["pv", "--f", "z", "--alpha", "abc"],
    ["pv", "--f", "z^7", "--alpha", "0.3"],
    ["pv", "--f", "z", "--alpha", "0.3", "--form", "nosuchform"],
])
def test_configuration_errors_exit_3(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_unknown_command_exit_code():
    res = subprocess.run([sys.executable, "-m", "pvext.cli", "bogus"], capture_output=True)
    assert res.returncode == EXIT_CONFIG


def test_deterministic_reports_are_identical(tmp_path):
    outs = []
    path = tmp_path / "report.json"
    for _ in range(2):
        assert main(["pv", "--f", "z", "--alpha", "3/10", "--seed", "4", "--deterministic",
                     "--out", str(path)]) == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert "timestamp" not in rep
    assert rep["catalog_version"] and rep["conventions"]


def test_report_embeds_conventions():
    rep, code = run(RunConfig(command="verify-bernstein", f="z", M=1))
    assert code == EXIT_OK
    assert "timestamp" in rep and rep["schema_version"]


def test_sweep_csv(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, _ = call(["pv", "--f", "z", "--alpha", "3/10", "--csv", str(path)], capsys)
    assert code == EXIT_OK
    lines = path.read_text().splitlines()
    assert lines[0] == "eps,re,im,err" and len(lines) == 25
