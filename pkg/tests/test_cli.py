import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaborlike import closed_form
from gaborlike.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_VERIFY,
    GridAxis,
    format_grid,
    main,
    parse_grid,
    parse_number,
    resolve_config,
)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_synth_box_grid():
    code, out, _ = run("synth", "--kernel", "hall42", "--windows", "box,box", "--grid", "-6:6:121,-6:6:121")
    assert code == EXIT_OK
    table = rows(out)
    assert len(table) == 121 * 121
    peak = max(table, key=lambda r: float(r["abs"]))
    assert abs(float(peak["x1"])) <= 1 and abs(float(peak["x2"])) <= 1


def test_synth_gaussian_against_closed_form():
    code, out, _ = run("synth", "--kernel", "landau44", "--windows", "gauss,gauss", "--grid", "-3:3:61,-3:3:61")
    assert code == EXIT_OK
    worst = 0.0
    for r in rows(out):
        x = np.array([float(r["x1"]), float(r["x2"])])
        v = complex(float(r["re"]), float(r["im"]))
        worst = max(worst, abs(v - closed_form("gauss_landau", x, corrected=True)))
    assert worst <= 1e-6


def test_invalid_window_lists_names():
    code, out, err = run("synth", "--kernel", "hall42", "--windows", "box,hann", "--grid", "0:1:2,0:1:2")
    assert code == EXIT_CONFIG and out == ""
    assert "box, sinc, gauss, haar" in err


@pytest.mark.parametrize("argv", [
    ("synth", "--kernel", "hall99", "--windows", "box,box", "--grid", "0:1:2,0:1:2"),
    ("synth", "--kernel", "hall42", "--windows", "box,box", "--grid", "1:0:5,0:1:2"),
    ("synth", "--kernel", "hall42", "--windows", "box,box"),
    ("synth", "--kernel", "hall42", "--windows", "box", "--grid", "0:1:2"),
    ("gram", "--windows", "box,box", "--range", "-1"),
    ("gram", "--windows", "haar,haar", "--mode", "wavelet", "--method", "direct"),
    ("--abs-tol", "0", "gram", "--windows", "box,box"),
    ("parseval", "--windows", "box,box", "--function", "nope"),
])
def test_configuration_errors_exit_two(argv):
    code, _, err = run(*argv)
    assert code == EXIT_CONFIG
    assert err.startswith("gaborlike: error:")


def test_usage_error_exits_two():
    code, _, _ = run("synth", "--no-such-flag")
    assert code == 2


def test_synth_lattice_element():
    code, out, _ = run("synth", "--kernel", "landau44", "--windows", "box,box", "--grid", "0:1:2,0:1:2",
                       "--l", "1,0", "--k", "0,1", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["re"]) == 4


def test_figure_three_support_and_modulus():
    code, out, _ = run("figure", "3", "--grid", "-6:6:49,-6:6:49")
    assert code == EXIT_OK
    for r in rows(out):
        x1, x2, m = float(r["x1"]), float(r["x2"]), float(r["abs"])
        if abs(x1) > math.pi or abs(x2 - x1) > math.pi:
            assert m == 0
        elif abs(x1) < math.pi - 0.1 and abs(x2 - x1) < math.pi - 0.1:
            assert m == pytest.approx(1 / (2 * math.pi), rel=1e-12)


def test_figure_one_decays():
    code, out, _ = run("figure", "1")
    assert code == EXIT_OK
    table = rows(out)
    assert len(table) == 161 * 161
    edge = max(float(r["abs"]) for r in table if max(abs(float(r["x1"])), abs(float(r["x2"]))) == 8)
    centre = max(float(r["abs"]) for r in table)
    # the box field decays like 1/|x|: at radius 8 about a fifth of the peak remains
    assert edge < 0.25 * centre


def test_figure_number_checked():
    assert run("figure", "7")[0] == EXIT_CONFIG


def test_gram_box_both_methods():
    code, out, _ = run("gram", "--windows", "box,box", "--range", "1", "--method", "both", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["max_deviation"]["factorized"] <= 1e-12
    assert data["max_deviation"]["direct"] <= 1e-8
    assert data["max_discrepancy"] <= 1e-8


def test_gram_wavelet_mode():
    code, out, _ = run("gram", "--windows", "haar,haar", "--mode", "wavelet", "--range", "1", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["max_deviation"]["exact"] == 0


def test_gram_reports_non_orthonormal_without_failing():
    code, out, _ = run("gram", "--windows", "gauss,gauss", "--a", "sqrt(pi)", "--b", "sqrt(pi)", "--range", "1",
                       "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["max_deviation"]["factorized"] > 0.1


def test_frame_gaussian_report(tmp_path):
    target = tmp_path / "frame.json"
    code, _, _ = run("frame", "--windows", "gauss,gauss", "--a", "sqrt(pi)", "--b", "sqrt(pi)", "--corpus", "3",
                     "--format", "json", "--out", str(target))
    assert code == EXIT_OK
    data = json.loads(target.read_text())
    assert data["converged"] and data["all_inside"]
    assert 2.5 < data["product_lower"] < data["product_upper"] < 6


def test_frame_unconverged_exits_three_but_reports(tmp_path):
    target = tmp_path / "frame.csv"
    code, _, err = run("frame", "--windows", "gauss,gauss", "--basis-size", "8", "--truncation", "2",
                       "--corpus", "1", "--sum-n", "2", "--out", str(target))
    assert code == EXIT_NUMERIC
    assert "warning: dimension 1" in err and "did not converge" in err
    assert target.read_text().startswith("label,value")
    code, _, _ = run("frame", "--windows", "gauss,gauss", "--basis-size", "8", "--truncation", "2",
                     "--corpus", "1", "--sum-n", "2", "--allow-unconverged", "--out", str(target))
    assert code == EXIT_OK


def test_numeric_failure_leaves_no_file(tmp_path):
    target = tmp_path / "field.csv"
    code, _, err = run("--abs-tol", "1e-300", "--rel-tol", "1e-300", "synth", "--kernel", "hall42",
                       "--windows", "sinc,sinc", "--grid", "-1:1:3,-1:1:3", "--out", str(target))
    assert code == EXIT_NUMERIC
    assert "at grid node" in err
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []


def test_parseval_box_function():
    code, out, _ = run("parseval", "--windows", "box,box", "--n", "2", "--function", "box1", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["monotone"] and abs(data["final"] - 1) <= 1e-8


def test_verify_subset():
    code, out, _ = run("verify", "--only", "gram", "--only", "2")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "2/2 criteria passed"
    assert out.count("PASS") == 2


def test_verify_refuses_loose_tolerance():
    code, out, _ = run("--abs-tol", "1e-2", "verify", "--only", "gram")
    assert code == EXIT_VERIFY
    assert "FAIL" in out


def test_verify_unknown_criterion():
    assert run("verify", "--only", "nope")[0] == EXIT_CONFIG


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"windows": "box,box", "range": 0, "format": "json"}))
    code, out, _ = run("--config", str(cfg), "gram")
    assert code == EXIT_OK
    assert len(json.loads(out)["results"]["factorized"]["first"]) == 1
    code, out, _ = run("--config", str(cfg), "gram", "--range", "1")
    assert len(json.loads(out)["results"]["factorized"]["first"]) == 9


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        resolve_config("gram", {}, {"colour": "blue"})


def test_runs_are_byte_identical(tmp_path):
    argv = ["synth", "--kernel", "hall42", "--windows", "sinc,box", "--grid", "-2:2:9,-2:2:9"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*argv, "--out", str(first))[0] == EXIT_OK
    assert run(*argv, "--out", str(second))[0] == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gaborlike", "synth", "--kernel", "landau44", "--windows",
                           "box,box", "--grid", "0:1:2,0:1:2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "x1,x2,re,im,abs"


@pytest.mark.parametrize("text, value", [("2*pi", 2 * math.pi), ("sqrt(pi)", math.sqrt(math.pi)), ("-1.5", -1.5),
                                         ("1e-3", 1e-3), ("2**-2", 0.25), ("e", math.e)])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["__import__('os')", "pi.real", "[1]", "abs(1)", ""])
def test_parse_number_rejects_code(text):
    with pytest.raises(ValueError):
        parse_number(text)


axes = st.tuples(st.floats(-1e6, 1e6), st.floats(1e-3, 1e6), st.integers(2, 500)).map(
    lambda t: GridAxis(t[0], t[0] + t[1], t[2]))


@given(st.lists(axes, min_size=1, max_size=3))
def test_grid_round_trip(grid):
    grid = tuple(grid)
    assert parse_grid(format_grid(grid)) == grid


def test_grid_validation():
    for bad in ["0:1", "0:1:1", "1:0:3", "a:b:c"]:
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_star_import_exposes_public_api():
    namespace = {}
    exec("from gaborlike import *", namespace)
    for name in ("synthesize", "catalog_kernel", "FactorizedState", "estimate_frame_bounds_1d", "QuadSpec"):
        assert name in namespace
