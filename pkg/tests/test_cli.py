import json

import numpy as np
import pytest

from annulift.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zoo_list(capsys):
    code, out, _ = run(capsys, "zoo", "list")
    assert code == 0
    for name in ("power", "perturbed_power", "ends_attracting", "ends_repelling",
                 "end_swap", "counterexample_deg_minus1"):
        assert name in out


def test_index_power_outer_circle(capsys):
    code, out, _ = run(capsys, "index", "--map", "power", "--params", '{"d": 2}',
                       "--curve", "circle:r=2")
    assert code == 0
    assert out.strip() == "2"


def test_index_rect_curve(capsys):
    code, out, _ = run(capsys, "index", "--map", "power", "--params", '{"d": 3}',
                       "--curve", "rect:-2,2,-2,2")
    assert code == 0
    assert out.strip() == "3"


def test_index_curve_from_file(tmp_path, capsys):
    # radius 1.5: clear of the map's fixed point on the unit circle
    pts = [[1.5 * float(np.cos(a)), 1.5 * float(np.sin(a))]
           for a in np.linspace(0, 2 * np.pi, 64, endpoint=False)]
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(pts))
    code, out, _ = run(capsys, "index", "--map", "power", "--params", '{"d": 2}',
                       "--curve", str(path), "--min-disp", "1e-9")
    assert code == 0
    assert out.strip() == "2"


def test_completeness_table_and_artifacts(tmp_path, capsys):
    js = tmp_path / "report.json"
    cs = tmp_path / "boxes.csv"
    code, out, _ = run(capsys, "completeness", "--map", "power", "--params", '{"d": 2}',
                       "--nmax", "3", "--json", str(js), "--csv", str(cs))
    assert code == 0
    assert "COMPLETE" in out and "INCOMPLETE" not in out
    payload = json.loads(js.read_text())
    counts = [r["count_lower_bound"] for r in payload["reports"]]
    assert counts == [1, 3, 7]
    lines = cs.read_text().strip().splitlines()
    assert lines[0] == "n,k,x_lo,x_hi,y_lo,y_hi,degree,residue"
    assert len(lines) == 1 + 1 + 3 + 7


def test_json_artifact_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "completeness", "--map", "power", "--params", '{"d": 2}',
        "--nmax", "2", "--json", str(a))
    run(capsys, "completeness", "--map", "power", "--params", '{"d": 2}',
        "--nmax", "2", "--json", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_growth_command(tmp_path, capsys):
    js = tmp_path / "growth.json"
    code, out, _ = run(capsys, "growth", "--map", "power", "--params", '{"d": 2}',
                       "--nmax", "3", "--json", str(js))
    assert code == 0
    payload = json.loads(js.read_text())
    assert payload["counts"] == {"1": 1, "2": 3, "3": 7}
    assert abs(payload["rate"] - np.log(7) / 3) < 1e-12
    assert "ln|d|" in out


def test_fixed_points_command(tmp_path, capsys):
    cs = tmp_path / "fp.csv"
    code, out, _ = run(capsys, "fixed-points", "--map", "power", "--params", '{"d": 2}',
                       "--lift-k", "1", "--region=-2,2,-2,2", "--resolution", "1e-3",
                       "--csv", str(cs))
    assert code == 0
    assert "1 certified box(es)" in out
    row = cs.read_text().strip().splitlines()[1].split(",")
    assert row[0] == "1" and row[1] == "1"
    assert float(row[2]) < -0.999 < -0.998 < -float(row[3]) < 1.0
    assert row[7] == "0"  # residue of the k=1 translate's point


def test_lemmas_command(capsys):
    code, out, _ = run(capsys, "lemmas")
    assert code == 0
    assert out.count("PASS") == 6
    assert "FAIL" not in out


def test_unknown_map_is_usage_error(capsys):
    code, _, err = run(capsys, "index", "--map", "nosuch", "--curve", "circle:r=1")
    assert code == 2
    assert json.loads(err)["error"] == "UnknownZooEntry"


def test_bad_params_is_usage_error(capsys):
    code, _, err = run(capsys, "index", "--map", "power", "--params", "notjson",
                       "--curve", "circle:r=1")
    assert code == 2
    assert json.loads(err)["error"] == "UsageError"


def test_identity_map_index_fails_with_code_one(capsys):
    # the degree-1 power lift is the identity: every curve point is fixed
    code, _, err = run(capsys, "index", "--map", "power", "--params", '{"d": 1}',
                       "--curve", "circle:r=1")
    assert code == 1
    assert json.loads(err)["error"] == "FixedPointOnCurve"


def test_usage_error_without_subcommand():
    assert main([]) == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"min_disp": 10.0}))  # absurd floor: index must fail
    code, _, err = run(capsys, "index", "--map", "power", "--params", '{"d": 2}',
                       "--curve", "circle:r=2", "--config", str(cfg))
    assert code == 1
    assert json.loads(err)["error"] == "FixedPointOnCurve"
    # an explicit flag overrides the config file
    code, out, _ = run(capsys, "index", "--map", "power", "--params", '{"d": 2}',
                       "--curve", "circle:r=2", "--config", str(cfg),
                       "--min-disp", "1e-6")
    assert code == 0
    assert out.strip() == "2"


def test_tabulated_lift_as_map_argument(tmp_path, capsys):
    from annulift.annulus_maps import write_grid_lift
    xs = np.arange(16) / 16
    ys = np.linspace(-1, 1, 9)
    gx, gy = np.meshgrid(xs, ys)
    values = np.stack([2 * gx, 2 * gy], axis=-1)
    path = tmp_path / "tab.json"
    write_grid_lift(path, values, 2, 0.0, -1.0, 1.0, fmt="csv")
    code, out, _ = run(capsys, "index", "--map", str(path), "--curve", "circle:r=2")
    assert code == 0
    assert out.strip() == "2"
