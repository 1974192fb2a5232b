import csv
import json

import numpy as np
import pytest

from slicereg.cli import EXIT_DOMAIN, EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_PASS, main
from slicereg.series import TruncatedSeries, bullet_compose


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def koebe32(tmp_path, capsys):
    path = tmp_path / "koebe32.json"
    assert main(["series", "make", "koebe", "--degree", "32", "--out", str(path)]) == EXIT_PASS
    return path


@pytest.fixture
def q2_plus_qJ(tmp_path):
    path = tmp_path / "q2_plus_qJ.json"
    path.write_text(json.dumps({"coeffs": [[0, 0, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]]}))
    return path


# --- series ------------------------------------------------------------------------------


def test_make_koebe(capsys):
    code, doc = run_json(capsys, "series", "make", "koebe", "--degree", "32")
    assert code == EXIT_PASS
    assert [c[0] for c in doc["coeffs"]] == list(range(33))
    assert doc["degree"] == 32


def test_make_operators(capsys, koebe32):
    code, doc = run_json(capsys, "series", "make", "alexander", "--from", str(koebe32))
    assert code == EXIT_PASS and all(c[0] == 1.0 for c in doc["coeffs"][1:])
    code, doc = run_json(capsys, "series", "make", "mobius", "--t", "0.5", "--degree", "4")
    assert doc["coeffs"][0][0] == 0.5
    code, doc = run_json(capsys, "series", "make", "caratheodory-extremal", "--theta", "0.3", "--unit", "k", "--degree", "3")
    assert doc["coeffs"][2][3] != 0.0
    assert run(capsys, "series", "make", "mobius", "--t", "1.5")[0] == EXIT_DOMAIN


def test_compose_with_identity_reproduces_input(capsys, koebe32):
    code, out, _ = run(capsys, "series", "compose", "--g", str(koebe32), "--w", "identity")
    assert code == EXIT_PASS and out == koebe32.read_text()


def test_invert_compose_round_trip(capsys, tmp_path, koebe32):
    inv = tmp_path / "inv.json"
    assert main(["series", "invert-compose", "--g", str(koebe32), "--side", "right", "--out", str(inv)]) == EXIT_PASS
    code, doc = run_json(capsys, "series", "compose", "--g", str(koebe32), "--w", str(inv))
    got = TruncatedSeries.from_dict(doc)
    resid = got - TruncatedSeries.identity(32)
    # absolute residual is limited by the size of the Catalan-number coefficients at q^32
    scale = TruncatedSeries.from_json(inv.read_text()).norms().max()
    assert resid.norms()[:29].max() < 1e-10
    assert resid.norms().max() / scale < 1e-14


def test_other_series_commands(capsys, koebe32):
    code, doc = run_json(capsys, "series", "star-mul", "--f", "identity", "--g", "identity", "--degree", "2")
    assert doc["coeffs"][2] == [1.0, 0.0, 0.0, 0.0]
    code, doc = run_json(capsys, "series", "star-inv", "--f", '{"coeffs": [[1,0,0,0],[-1,0,0,0]]}', "--degree", "5")
    assert [c[0] for c in doc["coeffs"]] == [1.0] * 6
    code, doc = run_json(capsys, "series", "derive", "--f", str(koebe32))
    assert doc["coeffs"][3][0] == 16.0
    code, doc = run_json(capsys, "series", "evaluate", "--f", "koebe", "--degree", "200", "--q", "0.5,0,0,0")
    assert abs(doc["value"][0] - 2.0) < 1e-12
    code, doc = run_json(capsys, "series", "split", "--f", '{"coeffs": [[0,0,0,0],[0,1,1,0]]}', "--unit", "i", "--j", "j")
    assert doc["f1"][1] == [0.0, 1.0] and doc["f2"][1] == [1.0, 0.0]
    code, doc = run_json(capsys, "series", "classify", "--f", str(koebe32))
    assert doc["class"] == "intrinsic"


def test_series_csv_format(capsys):
    code, out, _ = run(capsys, "series", "make", "identity", "--degree", "2", "--format", "csv")
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["n", "w", "x", "y", "z"] and len(rows) == 4


# --- exit codes --------------------------------------------------------------------------


def test_exit_codes(capsys, tmp_path, q2_plus_qJ):
    assert run(capsys, "series", "star-inv", "--f", "identity")[0] == EXIT_DOMAIN
    assert run(capsys, "series", "compose", "--g", "koebe", "--w", "geometric")[0] == EXIT_PASS
    assert run(capsys, "series", "compose", "--g", "koebe", "--w", '{"coeffs": [[1,0,0,0]]}')[0] == EXIT_DOMAIN
    assert run(capsys, "series", "derive", "--f", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text('{"coeffs": [[0, 0, 0]]}')
    code, _, err = run(capsys, "series", "derive", "--f", str(bad))
    assert code == EXIT_INPUT and "input error" in err
    assert run(capsys, "series", "make", "koebe", "--degree", "0")[0] == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["series", "make", "koebe", "--degree", "many"])
    assert exc.value.code == EXIT_INPUT
    code, _, err = run(capsys, "check", "slice-starlike", "--series", '{"coeffs": [[0,0,0,0],[2,0,0,0]]}')
    assert code == EXIT_DOMAIN and "normalized" in err
    code, _, _ = run(capsys, "verify", "area", "--tail", '{"coeffs": [[0,0,0,0],[1.734,0,0,0]]}')
    assert code == EXIT_HYPOTHESIS
    code, _, _ = run(capsys, "verify", "convex-coeff", "--series", "koebe")
    assert code == EXIT_FAIL


# --- check ------------------------------------------------------------------------------------


def test_check_examples(capsys, koebe32, q2_plus_qJ):
    code, doc = run_json(capsys, "check", "slice-starlike", "--series", str(koebe32))
    assert code == EXIT_PASS and doc["report"]["passed"]
    code, doc = run_json(capsys, "check", "injectivity", "--series", str(q2_plus_qJ), "--unit", "j")
    assert code == EXIT_FAIL and len(doc["report"]["witness_pair"]) == 2
    code, doc = run_json(capsys, "check", "injectivity", "--series", str(q2_plus_qJ), "--unit", "i")
    assert code == EXIT_PASS


def test_spirallike_gamma_zero_matches_starlike(capsys, koebe32):
    _, a = run_json(capsys, "check", "slice-starlike", "--series", str(koebe32))
    _, b = run_json(capsys, "check", "spirallike", "--gamma", "0", "--series", str(koebe32))
    a["report"].pop("condition"), b["report"].pop("condition")
    assert a["report"] == b["report"] and a["config"] == b["config"]


def test_grid_file(capsys, tmp_path, koebe32):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"radii": [0.2, 0.4], "angles": 8, "n_units": 4, "seed": 3}))
    code, doc = run_json(capsys, "check", "slice-starlike", "--series", str(koebe32), "--grid", str(grid))
    assert code == EXIT_PASS and doc["report"]["points_checked"] == 2 * 8 * 4


def test_seed_env_overrides_flag(capsys, monkeypatch, koebe32):
    monkeypatch.setenv("SLICEREG_SEED", "17")
    _, doc = run_json(capsys, "check", "slice-starlike", "--series", str(koebe32), "--seed", "3")
    assert doc["config"]["seed"] == 17


# --- verify ----------------------------------------------------------------------------------


def test_verify_examples(capsys, koebe32):
    code, doc = run_json(capsys, "verify", "growth", "--series", "koebe")
    rep = doc["report"]
    assert code == EXIT_PASS and rep["extremal"] and rep["details"]["lower_tightness"] < 1e-8
    assert rep["details"]["lower_witness"][0] < 0
    code, doc = run_json(capsys, "verify", "rogosinski", "--against", str(koebe32), "--w", "half-identity")
    assert code == EXIT_PASS
    code, doc = run_json(capsys, "verify", "area", "--tail", '{"coeffs":[[0,0,0,0],[0.5,0,0,0]]}')
    assert code == EXIT_PASS
    assert abs(doc["report"]["details"]["formula_value"] - np.pi * 1.75) < 1e-12


@pytest.mark.parametrize(
    "argv",
    [
        ["caratheodory", "--series", "caratheodory-extremal", "--degree", "128"],
        ["distortion", "--series", "koebe"],
        ["rotation-ratio", "--series", "koebe"],
        ["bieberbach", "--series", "koebe"],
        ["starlike-coeff", "--series", "koebe"],
        ["area-sum", "--series", '{"coeffs": [[0,0,0,0],[1,0,0,0]]}'],
        ["integral-mean", "--series", "koebe", "--r", "0.5"],
        ["koebe-quarter", "--series", "koebe"],
        ["subordination", "--against", "koebe", "--w", "half-identity"],
        ["t-transform", "--series", '{"coeffs": [[0,0,0,0],[1,0,0,0],[0.25,0,0,0]]}'],
    ],
)
def test_verify_kinds_pass(capsys, argv):
    code, doc = run_json(capsys, "verify", *argv)
    assert code == EXIT_PASS and doc["report"]["passed"]


def test_verify_m_norm(capsys):
    code, doc = run_json(capsys, "verify", "m-norm", "--series", "identity", "--norm", "MP", "--r", "0.5")
    assert code == EXIT_PASS
    assert doc["report"]["normalization"] == pytest.approx(1 / (4 * np.pi))


def test_verify_csv_format(capsys):
    code, out, _ = run(capsys, "verify", "bieberbach", "--series", "koebe", "--degree", "8", "--format", "csv")
    header, row = list(csv.reader(out.splitlines()))
    rec = dict(zip(header, row))
    assert rec["kind"] == "verify:bieberbach" and rec["report.passed"] == "True"


# --- report ------------------------------------------------------------------------------------


def _pipeline(directory, seed="5"):
    directory.mkdir()
    runs = [
        ["verify", "growth", "--series", "koebe"],
        ["verify", "bieberbach", "--series", "koebe"],
        ["check", "slice-starlike", "--series", "koebe"],
    ]
    for i, argv in enumerate(runs):
        main(argv + ["--seed", seed, "--out", str(directory / f"r{i}.json")])
    assert main(["report", str(directory)]) == EXIT_PASS


def test_report_empty_directory(tmp_path):
    assert main(["report", str(tmp_path)]) == EXIT_PASS
    assert (tmp_path / "summary.csv").read_text().strip() == "kind,series,passed,margin,max_violation,witness,file"


def test_report_rows_sorted(tmp_path):
    _pipeline(tmp_path / "a")
    rows = list(csv.DictReader((tmp_path / "a" / "summary.csv").open()))
    assert [r["kind"] for r in rows] == ["check:slice-starlike", "verify:bieberbach", "verify:growth"]
    assert (tmp_path / "a" / "summary.dat").read_text().count("\n") == 4


def test_report_deterministic(tmp_path):
    _pipeline(tmp_path / "a")
    _pipeline(tmp_path / "b")
    for name in ("r0.json", "r1.json", "r2.json", "summary.csv", "summary.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_report_schema_mismatch(tmp_path):
    (tmp_path / "x.json").write_text('{"hello": 1}')
    assert main(["report", str(tmp_path)]) == EXIT_INPUT
