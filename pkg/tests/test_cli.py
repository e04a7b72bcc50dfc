import subprocess
import sys

import numpy as np
import pytest

from spin_eraser.cli import ConfigError, main, parse_config, read_config_file, run_scenario
from spin_eraser.core import DEFAULT_PARAMS, DensityField, GridSpec, ParamError
from spin_eraser.output import (
    EmptyDensityError,
    read_csv,
    read_pgm,
    read_summary,
    to_gray,
    write_csv,
    write_pgm,
)

SMALL_GRID = "96,128,-53,53,-85,85"


def floats(text):
    return [float(v) for v in text.split(",")]


# -- configuration ---------------------------------------------------------------

def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("# nothing here\n\n")
    cfg = parse_config(path)
    assert cfg.params == DEFAULT_PARAMS
    assert cfg.scenario == "eraser" and not cfg.oracle


def test_config_values_are_read(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("sigma = 1.5  # wider slits\nt-e = 3\ngrid = 64,32,-10,10,-5,5\noracle = yes\n")
    cfg = parse_config(path, scenario="whichway")
    assert cfg.params.sigma == 1.5 and cfg.params.t_e == 3.0
    assert cfg.grid == GridSpec(-10, 10, 64, -5, 5, 32)
    assert cfg.oracle


def test_negative_sigma_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("sigma = -1\n")
    with pytest.raises(ParamError, match="sigma must be positive"):
        parse_config(path)


def test_flag_beats_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("beta = 0.25\nz0 = 5\n")
    cfg = parse_config(path, {"beta": 0.75, "z0": None})
    assert cfg.params.beta == 0.75
    assert cfg.params.z0 == 5.0


@pytest.mark.parametrize("body, lineno", [
    ("sigma = 1\nnonsense line\n", 2),
    ("# c\n\nfoo = 3\n", 3),
    ("beta = half\n", 1),
    ("oracle = maybe\n", 1),
])
def test_parse_errors_carry_line_numbers(tmp_path, body, lineno):
    path = tmp_path / "bad.cfg"
    path.write_text(body)
    with pytest.raises(ConfigError, match=rf"bad\.cfg:{lineno}:"):
        read_config_file(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "absent.cfg")


def test_magnet_must_fit_before_screen():
    with pytest.raises(ParamError):
        parse_config(overrides={"t": 3.0}, scenario="eraser")
    assert parse_config(overrides={"t": 3.0}, scenario="no-eraser").params.t == 3.0


# -- emitted files ------------------------------------------------------------------

def test_csv_round_trip_is_fixed_point(tmp_path, params):
    g = GridSpec(-7.3, 11.1, 17, -3.3, 2.9, 13)
    rng = np.random.default_rng(0)
    d = DensityField(g, rng.random(g.shape) * 1e-3)
    a = write_csv(d, tmp_path / "a.csv")
    back = read_csv(a)
    np.testing.assert_array_equal(back.values, d.values)
    b = write_csv(back, tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "x,z,density"


def test_csv_row_order(tmp_path):
    g = GridSpec(0, 1, 2, 0, 2, 3)
    d = DensityField(g, np.arange(6.0).reshape(2, 3))
    rows = write_csv(d, tmp_path / "d.csv").read_text().splitlines()[1:]
    assert rows[:4] == ["0.0,0.0,0.0", "0.0,1.0,1.0", "0.0,2.0,2.0", "1.0,0.0,3.0"]


def test_uniform_field_is_white(tmp_path):
    g = GridSpec(0, 1, 5, 0, 1, 4)
    path = write_pgm(DensityField(g, np.full(g.shape, 0.3)), tmp_path / "u.pgm")
    img = read_pgm(path)
    assert img.shape == (4, 5)
    assert np.all(img == 255)
    assert path.read_bytes().startswith(b"P5\n5 4\n255\n")


def test_graymap_orientation():
    g = GridSpec(0, 1, 3, 0, 1, 2)
    v = np.zeros(g.shape)
    v[2, 1] = 2.0
    v[0, 0] = 1.0
    img = to_gray(DensityField(g, v))
    # rows are z increasing downward, columns are x
    assert img[1, 2] == 255 and img[0, 0] == 128


def test_zero_field_is_an_error(tmp_path):
    g = GridSpec(0, 1, 3, 0, 1, 3)
    with pytest.raises(EmptyDensityError, match="empty density"):
        write_pgm(DensityField(g, np.zeros(g.shape)), tmp_path / "z.pgm")


# -- scenarios --------------------------------------------------------------------------

def run(tmp_path, *args):
    return main(list(args) + ["--grid", SMALL_GRID, "--out", str(tmp_path)])


def test_no_eraser_summary(tmp_path):
    assert run(tmp_path, "no-eraser") == 0
    s = read_summary(tmp_path / "summary.txt")
    assert float(s["analysis"]["visibility_per_lobe"]) < 0.01
    assert s["analysis"]["fringe_period"] == "none"
    assert "beta" not in s["params"]
    assert {"no-eraser.csv", "no-eraser.pgm"} <= set(s["files"])


def test_eraser_summary(tmp_path):
    assert main(["eraser", "--out", str(tmp_path)]) == 0
    a = read_summary(tmp_path / "summary.txt")["analysis"]
    assert int(a["lobes"]) == 2
    assert min(floats(a["visibility_per_lobe"])) > 0.9
    assert float(a["complementarity_visibility"]) < 0.01
    assert float(a["reference_deviation"]) < 1e-6
    assert float(a["fringe_period"]) == pytest.approx(float(a["expected_period"]), rel=0.02)


def test_delayed_snapshots(tmp_path):
    assert main(["delayed", "--out", str(tmp_path)]) == 0
    s = read_summary(tmp_path / "summary.txt")
    mid, final = s["intermediate.analysis"], s["final.analysis"]
    assert float(mid["time"]) == DEFAULT_PARAMS.t_i
    assert max(floats(mid["visibility_per_lobe"])) < 0.01
    assert int(final["lobes"]) == 2
    assert min(floats(final["visibility_per_lobe"])) > 0.9
    for name in ("delayed_intermediate", "delayed_final"):
        assert (tmp_path / f"{name}.csv").exists() and (tmp_path / f"{name}.pgm").exists()


def test_whichway_summary(tmp_path):
    assert run(tmp_path, "whichway", "--b0", "0.5") == 0
    a = read_summary(tmp_path / "summary.txt")["analysis"]
    assert float(a["distinguishability"]) > 0.99


def test_oracle_residual_reported(tmp_path):
    assert main(["no-eraser", "--oracle", "--grid", "64,256,-30,30,-85,85", "--out", str(tmp_path)]) == 0
    a = read_summary(tmp_path / "summary.txt")["analysis"]
    assert float(a["oracle_residual"]) < 1e-6
    assert float(a["oracle_norm"]) == pytest.approx(1.0, abs=1e-10)


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "eraser") == 0 and run(b, "eraser") == 0
    for name in ("eraser.csv", "eraser.pgm", "summary.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_no_eraser_ignores_magnet_parameters(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "no-eraser") == 0
    assert run(b, "no-eraser", "--beta", "2.5", "--b0", "0") == 0
    for name in ("no-eraser.csv", "no-eraser.pgm", "summary.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_scenario_returns_summary(tmp_path):
    cfg = parse_config(overrides={"grid": GridSpec(-53, 53, 64, -85, 85, 64)}, scenario="eraser")
    summary = run_scenario(cfg, tmp_path)
    assert read_summary(tmp_path / "summary.txt")["run"]["scenario"] == summary["run"]["scenario"]


@pytest.mark.parametrize("argv, code", [
    (["eraser", "--sigma", "-1"], 2),
    (["eraser", "--t", "3"], 2),
    (["eraser", "--grid", "8,8,5,6,5,6", "--oracle"], 1),
])
def test_exit_codes(tmp_path, capsys, argv, code):
    assert main(argv + ["--out", str(tmp_path)]) == code
    assert "spin-eraser: error:" in capsys.readouterr().err


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("beta = 0.1\nbeta: 2\n")
    assert main(["eraser", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "bad.cfg:2:" in capsys.readouterr().err


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["interferometer"])
    assert exc.value.code != 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spin_eraser.cli", "no-eraser", "--grid", "32,32,-30,30,-60,60",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert str(tmp_path / "summary.txt") in proc.stdout
