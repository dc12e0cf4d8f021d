import json

import numpy as np
import pytest

from lle.cli import main

DISK = '{"type":"disk","R":1.0}'
SQUARE = '{"type":"polygon","vertices":[[0,0],[1,0],[1,1],[0,1]]}'


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeff_renyi_table(capsys):
    code, out, _ = run_cli(capsys, "coeff", "--levels", "single:0",
                           "--f", "renyi:1", "--format", "csv")
    assert code == 0
    value = float(out.strip().split("\n")[1].split(",")[2])
    assert value == pytest.approx(0.203, abs=2e-3)


def test_coeff_upto_equals_single(capsys):
    code, out, _ = run_cli(capsys, "coeff", "--levels", "single:0,upto:0",
                           "--f", "renyi:1")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows[0]["value"] == pytest.approx(rows[1]["value"], abs=1e-9)


def test_coeff_monomial_identity_zero(capsys):
    code, out, _ = run_cli(capsys, "coeff", "--levels", "single:2",
                           "--f", "monomial:1", "--format", "csv")
    assert code == 0
    assert float(out.strip().split("\n")[1].split(",")[2]) == 0.0


def test_coeff_bad_spec_exits_2(capsys):
    code, _, err = run_cli(capsys, "coeff", "--levels", "single:0",
                           "--f", "exp:1")
    assert code == 2
    assert "usage error" in err


def test_spectrum_trace_and_determinism(capsys):
    args = ("spectrum", "--region", DISK, "--B", "1", "--levels", "upto:1",
            "--L", "12", "--solver", "disk")
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    code, out2, _ = run_cli(capsys, *args)
    assert out1 == out2  # byte-identical repeat
    payload = json.loads(out1)["result"]
    trace = sum(payload["eigenvalues"])
    assert trace == pytest.approx(2 * 144 / 2, rel=1e-6)


def test_spectrum_cross_solver_diff(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--region", DISK, "--B", "1",
                           "--levels", "upto:1", "--L", "3",
                           "--solver", "both")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["max_abs_diff"] < 1e-4
    assert res["count_diff"] == 0


def test_spectrum_polygon_nystrom_exits_3(capsys):
    code, _, err = run_cli(capsys, "spectrum", "--region", SQUARE, "--B", "1",
                           "--levels", "single:0", "--L", "2",
                           "--solver", "nystrom2d")
    assert code == 3
    assert "capability" in err


def test_scaling_report(tmp_path, capsys):
    csv_path = tmp_path / "series.csv"
    code, out, _ = run_cli(capsys, "--threads", "2", "scaling",
                           "--region", DISK, "--B", "1",
                           "--levels", "upto:0", "--alpha", "1",
                           "--L-min", "10", "--L-max", "24", "--L-step", "2",
                           "--csv", str(csv_path))
    assert code == 0
    report = json.loads(out)
    assert 0.99 < report["ratio"] < 1.01
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "L,value"
    assert len(lines) == 9


def test_scaling_single_level_against_coefficient(capsys):
    code, out, _ = run_cli(capsys, "scaling", "--region", DISK, "--B", "1",
                           "--levels", "single:1", "--alpha", "1",
                           "--L-min", "10", "--L-max", "24", "--L-step", "2")
    assert code == 0
    report = json.loads(out)
    assert 0.98 < report["ratio"] < 1.02
    assert report["coefficient"]["M"] == pytest.approx(0.3350585866, abs=1e-8)


def test_verify_pass_and_fail_paths(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "hermite-identity",
                           "--cases", "40", "--seed", "42")
    assert code == 0
    assert json.loads(out)["passed"]
    code, _, err = run_cli(capsys, "verify", "--suite", "bogus")
    assert code == 2


def test_verify_all_small(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "all", "--cases", "25",
                           "--seed", "5")
    assert code == 0
    report = json.loads(out)
    assert set(report["suites"]) == {
        "phase-telescoping", "local-frame", "exponent", "t-tables",
        "laguerre-maps", "hermite-identity", "mehler", "christoffel-darboux"}


def test_rocca_square_slab_exact(capsys):
    code, out, _ = run_cli(capsys, "rocca", "--region", SQUARE,
                           "--vectors", "[[1,0]]",
                           "--eps-min-exp", "3", "--eps-max-exp", "5")
    assert code == 0
    rows = out.strip().split("\n")[1:]
    for row in rows:
        eps, removed, first, *_ = row.split(",")
        assert float(removed) == pytest.approx(float(eps), abs=1e-14)
        assert float(first) == pytest.approx(float(eps), abs=1e-14)


def test_rocca_disk_residual_trend(capsys):
    code, out, _ = run_cli(capsys, "rocca", "--region", DISK,
                           "--vectors", "[[1,0]]",
                           "--eps-min-exp", "3", "--eps-max-exp", "6")
    assert code == 0
    resid = [abs(float(r.split(",")[4])) for r in out.strip().split("\n")[1:]]
    assert np.all(np.diff(resid) < 0)


def test_rocca_eps_zero_row():
    # eps = 2^0 = 1 is allowed; the zero-vector family gives zero rows
    code = main(["rocca", "--region", DISK, "--vectors", "[[0,0]]",
                 "--eps-min-exp", "3", "--eps-max-exp", "3"])
    assert code == 0


def test_bad_flag_exits_2():
    assert main(["coeff", "--levels", "single:0"]) == 2  # missing --f
    assert main(["frobnicate"]) == 2
