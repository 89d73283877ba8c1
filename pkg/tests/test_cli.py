import numpy as np
import pytest

from physarum_adder import cli
from physarum_adder.adder import CalibrationTable, write_calibration_csv
from physarum_adder.analysis import VoltageTrace, write_traces
from physarum_adder.config import build_run_config, load_config, parse_config, write_config
from physarum_adder.engine import RunConfig
from physarum_adder.errors import ParseError

FAST = ["--total-steps", "400", "--warmup-steps", "100"]


def test_config_defaults_match_model_values():
    cfg = build_run_config({})
    p, g = cfg.params, cfg.geometry
    assert (p.sensor_angle, p.rotation_angle, p.sensor_offset, p.deposit) == (90, 22.5, 15, 5)
    assert (p.damping, p.sample_interval, p.population) == (0.99, 5, 5000)
    assert (g.lattice_width, g.lattice_height, g.habitable_width, g.habitable_height) == (360, 66, 300, 20)


def test_config_parse():
    vals = parse_config(["# comment", "", "sensor_offset = 9  # inline", "fraction=0.5",
                         "sensor_mode = clamp", "seed = 12"])
    assert vals == {"sensor_offset": 9.0, "fraction": 0.5, "sensor_mode": "clamp", "seed": 12}
    cfg = build_run_config(vals)
    assert cfg.params.sensor_offset == 9.0 and cfg.fraction == 0.5 and cfg.seed == 12


@pytest.mark.parametrize("lines,lineno", [(["bogus = 1"], 1), (["seed = 1", "seed = 2"], 2),
                                          (["", "population = many"], 2), (["noequals"], 1)])
def test_config_errors(lines, lineno):
    with pytest.raises(ParseError) as exc:
        parse_config(lines)
    assert exc.value.line == lineno


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(fraction=0.75, seed=4, total_steps=500, warmup_steps=50)
    write_config(tmp_path / "c.txt", cfg)
    assert build_run_config(load_config(tmp_path / "c.txt")) == cfg


def test_flag_precedence(tmp_path):
    (tmp_path / "c.txt").write_text("seed = 5\nfraction = 0.5\ntotal_steps = 300\nwarmup_steps = 50\n")
    args = cli.build_parser().parse_args(
        ["--seed", "9", "simulate", "--config", str(tmp_path / "c.txt"), "--fraction", "0.25"])
    cfg = cli.run_config(args)
    assert (cfg.seed, cfg.fraction, cfg.total_steps) == (9, 0.25, 300)
    args = cli.build_parser().parse_args(["simulate", "--seed", "3", "--set", "total_steps=700", "--set", "warmup_steps=10"])
    assert cli.run_config(args).seed == 3 and cli.run_config(args).total_steps == 700


def test_truth_table(capsys):
    assert cli.main(["truth-table"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert len(rows) == 8
    assert "1 0 1 | 1 0" in rows[5] and "0 1 0 | 0 1" in rows[2]


def test_simulate_outputs(tmp_path, capsys):
    out = tmp_path / "sim"
    assert cli.main(["--out", str(out), "--seed", "2", "simulate", *FAST, "--snapshot", "200"]) == 0
    for name in ("flux.csv", "spectrum.csv", "flux.svg", "config.txt", "field_000200.pgm"):
        assert (out / name).exists()
    assert len((out / "flux.csv").read_text().splitlines()) == 400 // 5 + 1
    assert "dominant frequency" in capsys.readouterr().out


def test_simulate_bad_fraction(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path), "simulate", "--fraction", "1.5"]) != 0
    assert "fraction" in capsys.readouterr().err


def test_simulate_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["--out", str(blocker / "sub"), "simulate", *FAST]) != 0


def test_simulate_deterministic(tmp_path):
    for d in ("a", "b"):
        cli.main(["--out", str(tmp_path / d), "--seed", "6", "simulate", *FAST, "--fraction", "0.5"])
    for name in ("flux.csv", "spectrum.csv", "config.txt", "flux.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_outputs(tmp_path):
    out = tmp_path / "sw"
    assert cli.main(["--out", str(out), "--seed", "3", "sweep", *FAST, "--fractions", "1,0.5",
                     "--runs", "2"]) == 0
    lines = (out / "manifest.csv").read_text().splitlines()
    assert lines[0] == "fraction,seed,series_path,dominant_frequency"
    assert [l.split(",")[:2] for l in lines[1:]] == [["1.0", "3"], ["1.0", "4"], ["0.5", "3"], ["0.5", "4"]]
    for l in lines[1:]:
        assert (out / l.split(",")[2]).exists()


def test_calibrate_reports(tmp_path, capsys):
    # at this scale the bins may or may not separate; either outcome must be reported cleanly
    code = cli.main(["--out", str(tmp_path), "calibrate", *FAST, "--runs", "1"])
    captured = capsys.readouterr()
    if code == 0:
        assert (tmp_path / "calibration.csv").exists()
        assert "low confidence" in captured.out
    else:
        assert code == 3
        assert "bin 0" in captured.err and not (tmp_path / "calibration.csv").exists()


def _cal_file(path, thresholds):
    write_calibration_csv(path, CalibrationTable((1.0, 0.75, 0.5, 0.25), (0, 1, 2, 3), thresholds))


@pytest.mark.parametrize("ths,expect", [((1.0, 2.0, 3.0), "S=0 Cout=0"),
                                        ((-3.0, -2.0, -1.0), "S=1 Cout=1")])
def test_add_plumbing(tmp_path, capsys, ths, expect):
    # thresholds far from any real frequency pin the bin, isolating the CLI path
    _cal_file(tmp_path / "cal.csv", ths)
    assert cli.main(["--out", str(tmp_path), "add", "1", "1", "0", *FAST,
                     "--calibration", str(tmp_path / "cal.csv"), "--votes", "3"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == expect
    rows = (tmp_path / "add_report.csv").read_text().splitlines()
    assert rows[0] == "run,seed,fraction,dominant_frequency,bin" and len(rows) == 4


def test_add_bad_bits(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--out", str(tmp_path), "add", "2", "0", "1", "--calibration", "x.csv"])
    assert exc.value.code == 2


def test_add_missing_calibration(tmp_path):
    assert cli.main(["--out", str(tmp_path), "add", "0", "0", "0", *FAST,
                     "--calibration", str(tmp_path / "none.csv")]) != 0


def _traces(path, lengths):
    tr = [VoltageTrace(x, 1.0, np.sin(2 * np.pi * (-0.0015 * x + 0.0109) * np.arange(4000)))
          for x in lengths]
    write_traces(path, tr)


def test_analyze(tmp_path, capsys):
    _traces(tmp_path / "t.csv", (0.75, 1.5, 2.25, 3.0))
    assert cli.main(["--out", str(tmp_path / "o"), "analyze", str(tmp_path / "t.csv")]) == 0
    slope = float((tmp_path / "o" / "fit.csv").read_text().splitlines()[1].split(",")[0])
    assert slope == pytest.approx(-0.0015, rel=0.05)
    assert (tmp_path / "o" / "summary.csv").exists() and (tmp_path / "o" / "fit.svg").exists()


def test_analyze_errors(tmp_path, capsys):
    (tmp_path / "e.csv").write_text("")
    assert cli.main(["--out", str(tmp_path), "analyze", str(tmp_path / "e.csv")]) != 0
    _traces(tmp_path / "one.csv", (1.5, 1.5))
    assert cli.main(["--out", str(tmp_path), "analyze", str(tmp_path / "one.csv")]) != 0
    (tmp_path / "bad.csv").write_text("# trace,1,1\n0.1\nxx\n")
    assert cli.main(["--out", str(tmp_path), "analyze", str(tmp_path / "bad.csv")]) != 0
    assert "line 3" in capsys.readouterr().err
