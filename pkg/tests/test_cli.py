import json
from pathlib import Path

import numpy as np
import pytest

from tenttile.cli import main
from tenttile.export import read_pgm, read_voxels

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list_has_eleven_rows_and_flags_index_zero(capsys):
    code, out, _ = run(capsys, "list")
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1
    assert len(data["records"]) == 11
    row0 = next(r for r in data["records"] if r["index"] == 0)
    assert row0["tent_tile"] is False
    row = next(r for r in data["records"] if r["index"] == -5)
    assert row["minpoly"] == "t^3 - 5t^2 + 4t - 1"
    code, out, _ = run(capsys, "list", "--format", "csv")
    assert "No tent-tile" in out and len(out.strip().splitlines()) == 12


@pytest.mark.parametrize("argv,name", [(["list"], "list.json"), (["dimension", "3"], "dimension_3.json"),
                                       (["boundary", "1"], "boundary_1.json")])
def test_reports_match_golden_files(capsys, argv, name):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(out) == json.loads((FIXTURES / name).read_text())


def test_dimension_example(capsys):
    code, out, _ = run(capsys, "dimension", "3")
    data = json.loads(out)
    assert abs(data["dim_H"] - 1.02952) < 1e-4
    assert data["mu_sr_poly"] == [-1, 0, -2, 0, 0, 0, 0, 1]


def test_reports_are_byte_identical_across_runs(capsys):
    first = run(capsys, "tiling", "-3", "--resolution", "128")[1]
    second = run(capsys, "tiling", "-3", "--resolution", "128")[1]
    assert first == second


@pytest.mark.parametrize("argv", [["info", "0"], ["render", "0"], ["info", "9"], ["tiling", "1", "--resolution", "0"],
                                  ["list", "--precision", "-3"], ["bogus"], ["verify-all", "--only", "nope"],
                                  ["render", "2", "--format", "pgm"], ["render", "4", "--format", "svg"]])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_render_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "render", "-2", "--format", "svg", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["interval"][0] == pytest.approx(-(1 + 5 ** 0.5) / 2)
    code, _, _ = run(capsys, "render", "1", "--format", "pgm", "--resolution", "64", "--out", str(tmp_path))
    img = read_pgm(tmp_path / "tent_1.pgm")
    assert code == 0 and img.shape == (64, 64) and (img > 0).mean() > 0.2
    code, _, _ = run(capsys, "render", "1", "--what", "rauzy", "--format", "csv", "--resolution", "64",
                     "--out", str(tmp_path))
    header = (tmp_path / "rauzy_1.csv").read_text().splitlines()[0]
    assert code == 0 and header == "letter,x0,x1"
    code, _, _ = run(capsys, "render", "4", "--resolution", "32", "--out", str(tmp_path))
    vox = read_voxels(tmp_path / "tent_4.vox.json")
    assert code == 0 and vox.shape == (32, 32, 32) and vox.any()


def test_tiling_heatmap_and_unknown(tmp_path, capsys):
    code, out, _ = run(capsys, "tiling", "1", "--resolution", "128", "--format", "pgm", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["passed"] is True
    assert read_pgm(tmp_path / "tiling_1.pgm").shape == (128, 128)
    code, out, _ = run(capsys, "tiling", "5")
    assert code == 0 and json.loads(out)["status"] == "unknown"


def test_tiling_reflection_center(capsys):
    code, out, _ = run(capsys, "tiling", "-1", "--resolution", "128")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert data["spec"]["reflected"] and data["spec"]["reflection_center"] == ["0", "1", "0"]


def test_correspond_exact(capsys):
    code, out, _ = run(capsys, "correspond", "5", "--exact-only")
    assert code == 0 and json.loads(out)["exact_certificate"]["holds"]


def test_verify_all_subset_exit_codes(capsys):
    code, out, err = run(capsys, "verify-all", "--only", "dimensions,identities")
    data = json.loads(out)
    assert [c["key"] for c in data["criteria"]] == ["dimensions", "identities"]
    assert code == (0 if data["passed"] else 1)
    assert "criterion 1" in err
    # the stated polynomial for one case disagrees with the computed graph, so this subset fails
    code, out, _ = run(capsys, "verify-all", "--only", "polynomials")
    assert code == 1 and json.loads(out)["passed"] is False
