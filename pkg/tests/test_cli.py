import csv
import json
import os

import numpy as np
import pytest

from drivetls import cli

FAST_DYN = ["dynamics", "--tiers", "rwa,vv2", "--t-max", "20", "--points-per-period", "16"]


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_dynamics_outputs(tmp_path):
    out = tmp_path / "dyn"
    assert cli.run(FAST_DYN + ["--out", str(out)]) == 0
    header, data = read_csv(f"{out}.csv")
    assert header == ["t", "P_rwa", "P_vv2"]
    assert data[0, 1] == pytest.approx(1.0) and data[0, 2] == pytest.approx(1.0)
    meta = json.loads((tmp_path / "dyn.json").read_text())
    for key in ("format_version", "command", "version", "params", "outputs", "diagnostics"):
        assert key in meta
    assert meta["command"] == "dynamics"
    assert meta["params"]["eps"] == 4.1 and meta["params"]["tiers"] == ["rwa", "vv2"]
    assert meta["diagnostics"]["m"] == 2


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["rates", "--amp-range", "0:4:0.5"]
    assert cli.run(args + ["--out", str(a)]) == 0
    assert cli.run(args + ["--out", str(b)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_metadata_replay(tmp_path):
    first = tmp_path / "first"
    assert cli.run(["spectrum", "--eps-range", "3:5:0.25", "--amp", "2.5", "--out", str(first)]) == 0
    again = tmp_path / "again"
    assert cli.run(["--from-metadata", f"{first}.json", "--out", str(again)]) == 0
    assert (tmp_path / "first.csv").read_bytes() == (tmp_path / "again.csv").read_bytes()
    m1 = json.loads((tmp_path / "first.json").read_text())["params"]
    m2 = json.loads((tmp_path / "again.json").read_text())["params"]
    m1.pop("out"), m2.pop("out")
    assert m1 == m2


def test_config_precedence(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# dynamics settings\neps = 3.9\nomega = 2.0\nt_max = 10  # short\ntiers = rwa\n")
    out = tmp_path / "c"
    assert cli.run(["dynamics", "--config", str(conf), "--eps", "4.2", "--points-per-period", "8", "--out", str(out)]) == 0
    params = json.loads((tmp_path / "c.json").read_text())["params"]
    assert params["eps"] == 4.2
    assert params["t_max"] == 10.0
    assert params["tiers"] == ["rwa"]
    assert params["amp"] == 3.0


def test_unknown_config_key(tmp_path, capsys):
    conf = tmp_path / "bad.cfg"
    conf.write_text("eps = 4\nfrequency = 2\n")
    assert cli.run(["dynamics", "--config", str(conf), "--out", str(tmp_path / "x")]) == 2
    assert "frequency" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nonsense"],
        ["dynamics", "--omega", "-1"],
        ["dynamics", "--omega", "two"],
        ["dynamics", "--tiers", "rwa,exact"],
        ["rates", "--amp-range", "5:1:0.1"],
        ["rates", "--amp-range", "0:1"],
        ["scenario", "dito"],
        ["scenario", "other"],
        ["validity", "--reference", "rwa"],
        ["dynamics", "--bogus", "1"],
    ],
)
def test_validation_exit_code(argv, tmp_path):
    assert cli.run(argv + (["--out", str(tmp_path / "o")] if argv else [])) == 2


def test_missing_metadata_file(tmp_path):
    assert cli.run(["--from-metadata", str(tmp_path / "none.json")]) == 2


@pytest.mark.skipif(hasattr(os, "geteuid") and os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_directory(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    try:
        assert cli.run(FAST_DYN + ["--out", str(locked / "o")]) == 2
    finally:
        locked.chmod(0o700)


def test_output_path_through_a_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.run(FAST_DYN + ["--out", str(blocker / "sub" / "o")]) == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    # m = 0 at epsilon = omega puts a pole in the off-resonant sums
    argv = ["dynamics", "--eps", "2", "--omega", "2", "--m", "0", "--tiers", "vv2", "--t-max", "20", "--out", str(tmp_path / "n")]
    assert cli.run(argv) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_rates_and_xcoeffs_columns(tmp_path):
    assert cli.run(["rates", "--amp-range", "0:2:1", "--out", str(tmp_path / "r")]) == 0
    header, data = read_csv(tmp_path / "r.csv")
    assert header == ["A", "grel_rwa", "grel_vv2", "gdeph_rwa", "gdeph_vv2"]
    assert data.shape == (3, 5)
    assert cli.run(["xcoeffs", "--amp-range", "1:2:1", "--harmonics", "0,2", "--out", str(tmp_path / "x")]) == 0
    header, data = read_csv(tmp_path / "x.csv")
    assert header[:4] == ["A", "Xmm_0_vv1", "Xmm_0_vv2", "Xmm_0_numeric"]
    assert data.shape == (2, 13)


def test_validity_and_fourier(tmp_path):
    argv = ["validity", "--omega-range", "1:3:1", "--amp-range", "0:4:2", "--out", str(tmp_path / "v")]
    assert cli.run(argv) == 0
    header, data = read_csv(tmp_path / "v.csv")
    assert header == ["omega", "A", "m", "deviation", "deviation_clipped", "singular"]
    assert data.shape == (9, 6)
    ok = data[:, 5] == 0
    assert np.all(data[ok, 4] <= 0.15)
    argv = ["fourier", "--tiers", "rwa", "--points-per-period", "32", "--max-nu", "10", "--out", str(tmp_path / "f")]
    # 120 time units cannot resolve a tenth of the 0.45 Rabi frequency
    assert cli.run(argv + ["--t-max", "120"]) == 3
    assert cli.run(argv + ["--t-max", "200"]) == 0
    meta = json.loads((tmp_path / "f.json").read_text())
    peaks = meta["diagnostics"]["peaks"]["rwa"]
    assert any(pk["class"] == "dressed" for pk in peaks)


def test_scenario_cdt(tmp_path):
    argv = ["scenario", "cdt", "--tiers", "rwa,vv2", "--t-max", "20", "--points-per-period", "32", "--out", str(tmp_path / "s")]
    assert cli.run(argv) == 0
    meta = json.loads((tmp_path / "s.json").read_text())
    assert meta["diagnostics"]["numbers"]["omega_vv2"] < 1e-6
    assert meta["params"]["kind"] == "cdt"


def test_parse_helpers():
    assert cli.parse_range("0:1:0.25") == (0.0, 1.0, 0.25)
    assert len(cli.range_values((0.0, 1.0, 0.1))) == 11
    assert cli.parse_bool("yes") is True and cli.parse_bool("off") is False
    with pytest.raises(cli.ConfigError):
        cli.parse_bool("maybe")
    assert cli.parse_int_list("0, 2,-2") == (0, 2, -2)
