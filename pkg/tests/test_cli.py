import os
import pathlib

import pytest

import context  # noqa: F401
import ocscz.cli as cli
import ocscz.util as ocu


TEST_ROOT = pathlib.Path(__file__).parent.resolve()


def _run(*argv):
    return cli.run_subcommand([str(a) for a in argv])


def test_usage_errors(capsys):
    assert _run() == 2
    assert _run("no-such-command") == 2
    assert _run("rx-spectrum", "--scheme", "echo") == 2
    assert _run("--version") == 0
    assert "ocscz" in capsys.readouterr().out


def test_config_errors(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert _run("rx-spectrum", "--config", tmp_path / "missing.ini", "--out", out) == 2
    assert _run("rx-spectrum", "--workers", "0", "--out", out) == 2
    assert "usage:" in capsys.readouterr().err
    assert not out.exists()


def test_eps_m_ratio_is_a_config_error(tmp_path, capsys):
    config = tmp_path / "eps.ini"
    config.write_text("[qubit]\neps_m_ratio = 1.0\n", encoding="utf-8")
    out = tmp_path / "x.csv"
    assert _run("rx-spectrum", "--config", config, "--out", out) == 2
    assert "eps_m_ratio" in capsys.readouterr().err
    assert not out.exists()


def test_numerical_failure(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[transmon]\nparity_split_ghz = 1000\n", encoding="utf-8")
    assert _run("rx-spectrum", "--config", config, "--out", tmp_path / "x.csv") == 1
    assert "InfeasibleBiasError" in capsys.readouterr().err


def test_rx_spectrum(tmp_path):
    out = tmp_path / "rx.csv"
    assert _run("rx-spectrum", "--points", 5, "--out", out) == 0
    metadata, header, rows = ocu.read_csv(str(out))
    assert len(rows) == 5
    assert header[0] == "eps_m_ratio"
    assert metadata["seed"] == "0"
    assert os.path.exists(ocu.manifest_path(str(out)))


def test_rerun_is_byte_identical(tmp_path):
    out = tmp_path / "disp.csv"
    argv = ("transmon-dispersion", "--points", 11, "--out", out)
    assert _run(*argv) == 0
    first = out.read_bytes(), pathlib.Path(ocu.manifest_path(str(out))).read_bytes()
    assert _run(*argv) == 0
    second = out.read_bytes(), pathlib.Path(ocu.manifest_path(str(out))).read_bytes()
    assert first == second


def test_seed_flag_reaches_outputs(tmp_path):
    out = tmp_path / "disp.csv"
    assert _run("transmon-dispersion", "--points", 3, "--seed", 9, "--out", out) == 0
    metadata, _, _ = ocu.read_csv(str(out))
    assert metadata["seed"] == "9"
    assert b"<seed>9</seed>" in pathlib.Path(ocu.manifest_path(str(out))).read_bytes()


def test_coupler_map(tmp_path):
    out = tmp_path / "map.csv"
    assert _run("sensitivity-map", "--target", "coupler", "--points", 3, "--out", out) == 0
    metadata, header, rows = ocu.read_csv(str(out))
    assert header == ["ej_ghz", "ec_ghz", "domega_c_dn_g", "allowed"]
    assert len(rows) == 9
    assert metadata["target"] == "coupler"


def test_synth_offres_pulse(tmp_path):
    out = tmp_path / "pulse.csv"
    assert _run("synth-pulse", "--points", 51, "--out", out) == 0
    metadata, header, rows = ocu.read_csv(str(out))
    assert header == ["time_ns", "omega_x", "omega_y"]
    assert len(rows) == 51
    assert abs(abs(float(metadata["theta_cphase"])) - 3.14159) < 1e-2
    assert (tmp_path / "pulse_bloch.csv").exists()
    assert not (tmp_path / "pulse_spectrum.csv").exists()
    loaded = ocu.pulse_from_csv(str(out))
    assert loaded.t_g == pytest.approx(float(metadata["t_g"]))


@pytest.mark.slow
def test_simulate_gate(tmp_path, capsys):
    out = tmp_path / "gate.csv"
    config = TEST_ROOT.joinpath("test_config.ini")
    assert _run("simulate-gate", "--config", config, "--out", out) == 0
    assert "F = " in capsys.readouterr().out
    metadata, header, rows = ocu.read_csv(str(out))
    assert metadata["seed"] == "7"
    assert len(rows) == 1
    assert rows[0][header.index("scheme")] == "offres"
