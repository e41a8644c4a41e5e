import csv
import json

import numpy as np
import pytest

from diracedge import cli
from diracedge.config import ConfigError, parse_config_text, validate
from diracedge.runner import SweepPoint

SMALL_STRAIGHT = """
[geometry]
kind = straight
[grid]
n1 = 256
n2 = 256
[time]
T = {T}
dt = 0.02
sample_interval = 0.25
[output]
tag = small
"""


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_config_gets_defaults():
    cfg = parse_config_text("[geometry]\nkind = straight\n")
    assert cfg.T == 5.0 and cfg.dt == "auto" and cfg.sample_interval == 0.5
    assert cfg.envelope.kind == "gaussian" and cfg.envelope.center == -2.5
    assert cfg.resolved_grid().bounds == (-30, 30, -30, 30)
    assert cfg.resolved_dt() == pytest.approx(0.02)


def test_small_circle_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config_text("[geometry]\nkind = circle\nR = 0.5\n")
    assert any("R > 3*r0" in p for p in exc.value.problems)


def test_circle_auto_box():
    cfg = parse_config_text("[geometry]\nkind = circle\nR = 40\n")
    assert cfg.resolved_grid().bounds == (-60, 60, -60, 60)
    assert cfg.envelope.kind == "bump"


def test_whole_period_box_accepted():
    cfg = parse_config_text(
        "[geometry]\nkind = perturbed\nepsilon = 0.2\n[grid]\nn1 = 128\nn2 = 512\n"
        f"x1_min = -10\nx1_max = 10\nx2_min = {-10 * np.pi!r}\nx2_max = {10 * np.pi!r}\n")
    assert cfg.resolved_grid().shape == (128, 512)


def test_fractional_period_box_rejected():
    with pytest.raises(ConfigError, match="whole number of periods"):
        parse_config_text("[geometry]\nkind = perturbed\nepsilon = 0.2\n[grid]\n"
                          "x1_min = -10\nx1_max = 10\nx2_min = -40\nx2_max = 40\n")


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
def test_epsilon_outside_open_interval(eps):
    with pytest.raises(ConfigError, match="open interval"):
        parse_config_text(f"[geometry]\nkind = perturbed\nepsilon = {eps}\n")


def test_all_problems_reported_together():
    with pytest.raises(ConfigError) as exc:
        parse_config_text("[geometry]\nkind = straight\ncolour = red\n[time]\nT = -1\n[extra]\na = 1\n")
    msgs = exc.value.problems
    assert any("colour" in m for m in msgs)
    assert any("[extra]" in m for m in msgs)
    assert any("T must be nonnegative" in m for m in msgs)


def test_wrong_envelope_for_circle():
    with pytest.raises(ConfigError, match="periodic envelope"):
        parse_config_text("[geometry]\nkind = circle\n[envelope]\nkind = gaussian\n")


def test_fixed_cut_reached_by_envelope():
    # with a fixed cut a quarter revolution at R = 10 drags the bump onto the cut
    cfg = parse_config_text("[geometry]\nkind = circle\nR = 10\nbranch = fixed\n[time]\nT = 5\n")
    assert validate(cfg) == []
    with pytest.raises(ConfigError, match="branch cut"):
        parse_config_text("[geometry]\nkind = circle\nR = 10\nbranch = fixed\n[time]\nT = 30\n")


def test_with_parameter_resets_box():
    cfg = parse_config_text("[geometry]\nkind = circle\nR = 20\n")
    assert cfg.with_parameter(30.0).resolved_grid().bounds == (-50, 50, -50, 50)


def test_run_at_zero_time(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["run", "--config", _write(tmp_path, SMALL_STRAIGHT.format(T=0)),
                     "--out-dir", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "small.csv")))
    assert len(rows) == 1 and float(rows[0]["t"]) == 0.0 and float(rows[0]["l2_error"]) == 0.0


def test_run_snapshots_and_determinism(tmp_path):
    from diracedge.snapshot import read_snapshot

    cfg = _write(tmp_path, SMALL_STRAIGHT.format(T=1))
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", "--config", cfg, "--out-dir", str(a), "--snapshots", "0,0.3,0.5,1"]) == 0
    assert cli.main(["run", "--config", cfg, "--out-dir", str(b), "--snapshots", "0,0.3,0.5,1"]) == 0
    snaps = sorted(a.glob("small_t*.bin"))
    assert len(snaps) == 4
    f, header = read_snapshot(a / "small_t0.3.bin")
    assert header["t"] == 0.3 and header["geometry"] == "straight" and f.grid.shape == (256, 256)
    assert (a / "small.csv").read_bytes() == (b / "small.csv").read_bytes()
    assert (a / "small_t1.bin").read_bytes() == (b / "small_t1.bin").read_bytes()
    times = [float(r["t"]) for r in csv.DictReader(open(a / "small.csv"))]
    assert times == [0.0, 0.25, 0.3, 0.5, 0.75, 1.0]


def test_bad_arguments_exit_2(tmp_path):
    assert cli.main(["nonsense"]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "missing.ini")]) == 2
    bad = _write(tmp_path, "[geometry]\nkind = circle\nR = 0.5\n")
    assert cli.main(["run", "--config", bad]) == 2
    straight = _write(tmp_path, SMALL_STRAIGHT.format(T=1), "s.ini")
    assert cli.main(["run", "--config", straight, "--snapshots", "2"]) != 0


def test_leak_gives_exit_3(tmp_path):
    text = SMALL_STRAIGHT.format(T=1).replace("n1 = 256\nn2 = 256",
                                              "n1 = 64\nn2 = 64\nx1_min = -6\nx1_max = 6\n"
                                              "x2_min = -6\nx2_max = 6")
    assert cli.main(["run", "--config", _write(tmp_path, text), "--out-dir", str(tmp_path)]) == 3


CIRCLE = "[geometry]\nkind = circle\n[output]\ntag = c\n"


def _stub_sweep(law, leaked=()):
    def fake(template, values, workers=1):
        return [SweepPoint(v, law(v), v in leaked) for v in values]
    return fake


@pytest.mark.parametrize("law,slope", [(lambda p: 3 * p**-2.0, -2.0), (lambda p: p**2.0, 2.0)])
def test_sweep_fit_plumbing(tmp_path, monkeypatch, law, slope):
    monkeypatch.setattr(cli, "sweep", _stub_sweep(law))
    code = cli.main(["sweep-radius", "--config", _write(tmp_path, CIRCLE), "--out-dir",
                     str(tmp_path), "--values", "10,20,40"])
    assert code == 0
    fit = json.loads((tmp_path / "c_R_fit.json").read_text())
    assert fit["slope"] == pytest.approx(slope, abs=1e-12)
    assert fit["excluded"] == []


def test_sweep_needs_three_values(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "sweep", _stub_sweep(lambda p: p))
    assert cli.main(["sweep-radius", "--config", _write(tmp_path, CIRCLE), "--out-dir",
                     str(tmp_path), "--values", "10,20"]) == 2


def test_sweep_leaks_excluded_then_fit_fails(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "sweep", _stub_sweep(lambda p: p**-2, leaked={10.0, 15.0}))
    code = cli.main(["sweep-radius", "--config", _write(tmp_path, CIRCLE), "--out-dir",
                     str(tmp_path), "--values", "10,15,20,30"])
    assert code == 4
    rows = list(csv.DictReader(open(tmp_path / "c_R_sweep.csv")))
    assert [r["leaked"] for r in rows] == ["1", "1", "0", "0"]


def test_sweep_wrong_geometry(tmp_path):
    assert cli.main(["sweep-epsilon", "--config", _write(tmp_path, CIRCLE)]) == 2


def test_ansatz_check_epsilon(tmp_path):
    cfg = _write(tmp_path, "[geometry]\nkind = perturbed\n[output]\ntag = p\n")
    code = cli.main(["ansatz-check", "--config", cfg, "--out-dir", str(tmp_path),
                     "--values", "0,0.05,0.1,0.2"])
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "p_residual.csv")))
    assert float(rows[0]["residual_l2"]) == 0.0
    fit = json.loads((tmp_path / "p_residual_fit.json").read_text())
    assert fit["slope"] == pytest.approx(2.0, abs=0.1)


def test_spectrum_command(tmp_path):
    code = cli.main(["spectrum", "--lambda-min", "-0.5", "--lambda-max", "0.5", "--count", "3",
                     "--n", "256", "--out-dir", str(tmp_path), "--dump-vectors"])
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "spectrum.csv")))
    assert [float(r["omega_gap"]) for r in rows] == pytest.approx([0.5, 0.0, -0.5], abs=1e-8)
    assert len(list(tmp_path.glob("mode_*.bin"))) == 3
    assert cli.main(["spectrum", "--count", "0", "--out-dir", str(tmp_path)]) == 2
