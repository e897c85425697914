import argparse
import json
import math
import subprocess
import sys

import pytest

from heatspec.cli import JobConfig, main, parse_orders, parse_window, run
from heatspec.geometry import flat_field, round_boundary
from heatspec.model_spectra import read_spectrum, sphere_spectrum


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


def test_coeff_interval(capsys):
    code, report, _ = call(capsys, "coeff", "--model", "interval", "--bc", "dirichlet",
                           "--n", "0..3")
    values = [c["value"] for c in report["result"]["coefficients"]]
    assert code == 0
    assert values == pytest.approx([math.sqrt(math.pi) / 2, -0.5, 0.0, 0.0], abs=1e-12)
    assert report["result"]["coefficients"][1]["formula_id"] == "dirichlet.a1"


def test_coeff_from_field_files(tmp_path, capsys):
    (tmp_path / "int.json").write_text(json.dumps(flat_field(2, math.pi).to_json()))
    (tmp_path / "bdy.json").write_text(json.dumps(round_boundary().to_json()))
    code, report, _ = call(capsys, "coeff", "--interior", str(tmp_path / "int.json"),
                           "--boundary", str(tmp_path / "bdy.json"), "--n", "2")
    assert code == 0
    assert report["result"]["coefficients"][0]["value"] == pytest.approx(1 / 6)


def test_verify_disk(tmp_path, capsys):
    out = tmp_path / "disk"
    code, report, err = call(capsys, "verify", "--model", "disk", "--bc", "dirichlet",
                             "--orders", "0..2", "--out", str(out))
    assert code == 0 and report["ok"]
    assert [v["passed"] for v in report["result"]["verdicts"]] == [True, True, True]
    assert err.count("pass") == 3
    assert (tmp_path / "disk.report.json").is_file()
    assert (tmp_path / "disk.fit.csv").read_text().startswith("t,trace,model,residual")


def test_failed_verdict_exits_one(capsys):
    code, report, _ = call(capsys, "verify", "--model", "disk", "--orders", "2",
                           "--tolerance", "1e-9")
    assert code == 1 and report["ok"] is False


def test_kaehler_report(capsys):
    code, report, _ = call(capsys, "kaehler", "--psi", "sin(x1)", "--variant", "standard",
                           "--N", "16")
    res = report["result"]
    assert code == 0
    assert res["kaehler"] is False
    assert res["int_K2"] == pytest.approx(0.5 * (2 * math.pi) ** 6, rel=1e-6)
    assert res["decision"] == "not_decided"
    assert res["a2_equal_p0"] is True and res["a2_equal_p1"] is False
    assert res["delta_vs_2box"]["status"] == "converging"


def test_compare_non_unimodular(capsys):
    code, report, _ = call(capsys, "compare", "--variant", "non_unimodular", "--N", "16")
    res = report["result"]["delta_vs_2box"]
    assert code == 0 and res["status"] == "non-vanishing" and res["rel_diff"] >= 0.2
    code, _, _ = call(capsys, "compare", "--variant", "non_unimodular", "--N", "16",
                      "--tolerance", "0.05")
    assert code == 1


def test_same_seed_same_report(tmp_path, capsys):
    args = ["compare", "--N", "16", "--seed", "7", "--trials", "4"]
    _, first, _ = call(capsys, *args)
    _, second, _ = call(capsys, *args)
    _, other, _ = call(capsys, "compare", "--N", "16", "--seed", "8", "--trials", "4")
    assert first == second
    assert first["result"] != other["result"]


def test_spectrum_round_trip(tmp_path, capsys):
    prefix = tmp_path / "sph"
    code, report, _ = call(capsys, "spectrum", "--model", "sphere", "--l-max", "60",
                           "--out", str(prefix))
    assert code == 0 and report["result"]["count"] == 61 ** 2
    s = read_spectrum(tmp_path / "sph.spectrum.csv")
    assert s.same_as(sphere_spectrum(60))
    side = json.loads((tmp_path / "sph.spectrum.json").read_text())
    assert {"m", "Vol", "Vol_boundary", "bc"} <= set(side)
    code, fit, _ = call(capsys, "fit", "--spectrum", str(tmp_path / "sph.spectrum.csv"),
                        "--t-window", "0.01,0.05", "--n-max", "4")
    assert code == 0
    assert fit["result"]["fit"]["coefficients"]["2"] == pytest.approx(1 / 3, abs=1e-3)


def test_robin_interval_verify(capsys):
    code, report, _ = call(capsys, "verify", "--model", "interval", "--bc", "robin",
                           "--robin-s", "0.1", "--orders", "0..2")
    assert code == 0, report


@pytest.mark.parametrize("argv", [
    ["kaehler", "--psi", "sin(x1"],
    ["kaehler", "--psi", "tan(x1)"],
    ["verify", "--model", "disk", "--bc", "neumann"],
    ["verify", "--model", "moebius"],
    ["coeff", "--model", "interval", "--n", "0..7"],
    ["coeff", "--interior", "/no/such/file.json"],
    ["spectrum"],
    ["compare", "--N", "4"],
    ["spectrum", "--model", "sphere", "--l-max", "-1"],
    ["coeff", "--model", "circle", "--bc", "robin", "--robin-s", "1"],
])
def test_invalid_input_exits_two(argv, capsys):
    assert call(capsys, *argv)[0] == 2


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["coeff", "--n", "a..b"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_numerical_failure_exits_three(capsys):
    code, _, err = call(capsys, "fit", "--model", "interval", "--count", "20",
                        "--t-window", "1e-4,1e-1")
    assert code == 3 and "stage 'fit'" in err


def test_run_accepts_config_object(capsys):
    cfg = JobConfig("coeff", params={"model": "sphere", "orders": [0, 2]})
    assert run(cfg) == 0
    report = json.loads(capsys.readouterr().out)
    vals = [c["value"] for c in report["result"]["coefficients"]]
    assert vals == pytest.approx([1.0, 1 / 3])


def test_parsers():
    assert parse_orders("0..3") == [0, 1, 2, 3] and parse_orders("0,2") == [0, 2]
    assert parse_window("1e-3,0.1") == (1e-3, 0.1)
    for bad in ("3..x", "-1", ""):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_orders(bad)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_window("0.1,0.01")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heatspec.cli", "coeff", "--model", "sphere",
                           "--n", "0"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["coefficients"][0]["value"] == pytest.approx(1.0)
