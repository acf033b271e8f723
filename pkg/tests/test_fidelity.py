import logging

import numpy as np
import pytest

import context  # noqa: F401
import ocscz.fidelity as fid
import ocscz.noise as noise
import ocscz.propagator as prop
import ocscz.pulses as pulses
from ocscz.exceptions import ParameterDomainError


def test_input_states():
    states = fid.input_states()
    assert states.shape == (16, 4, 4)
    assert np.allclose(np.trace(states, axis1=1, axis2=2), 1.0)
    assert np.allclose(states @ states, states)


def test_embed_puts_coupler_in_ground():
    rhos = fid.embed(fid.input_states())
    assert rhos.shape == (16, 8, 8)
    assert np.allclose(rhos[:, 1::2, :], 0.0)
    assert np.allclose(rhos[:, ::2, ::2], fid.input_states())


def test_ideal_channel():
    channel = fid.unitary_channel(pulses.CZ)
    assert fid.entanglement_fidelity(channel, pulses.CZ) == pytest.approx(1.0)


def test_identity_channel():
    F_e = fid.entanglement_fidelity(lambda rhos: rhos, pulses.CZ)
    assert F_e == pytest.approx(9.0 / 16.0)
    assert fid.averaged_gate_fidelity(F_e) == pytest.approx(0.65)


def test_eight_level_channel():
    channel = fid.unitary_channel(np.kron(pulses.CZ, np.eye(2)))
    assert fid.entanglement_fidelity(channel, pulses.CZ) == pytest.approx(1.0)
    leaky = fid.unitary_channel(np.kron(pulses.CZ, pulses.SIGMA_X))
    assert fid.entanglement_fidelity(leaky, pulses.CZ) == pytest.approx(0.0, abs=1e-12)


def test_channel_shape_checked():
    with pytest.raises(ParameterDomainError):
        fid.entanglement_fidelity(lambda rhos: rhos[:4], pulses.CZ)


def test_phase_corrections_restore_cz():
    t00, t01, t10 = 0.3, -0.7, 1.1
    phases = [t00, t01, t10, t10 + t01 - t00 + np.pi]
    U = np.diag(np.exp(1j * np.array(phases)))
    corrections = fid.phase_corrections(prop.conditional_phases(np.array(
        [np.diag([np.exp(1j * p), 1.0]) for p in phases]
    )))  # fmt: skip
    assert np.allclose(corrections @ U, pulses.CZ)
    assert fid.entanglement_fidelity(
        fid.unitary_channel(U), pulses.CZ, corrections
    ) == pytest.approx(1.0)
    assert fid.entanglement_fidelity(fid.unitary_channel(U), pulses.CZ) < 1.0


def test_averaged_gate_fidelity_range():
    assert fid.averaged_gate_fidelity(1.0) == pytest.approx(1.0)
    assert fid.averaged_gate_fidelity(0.0) == pytest.approx(0.2)
    with pytest.raises(ParameterDomainError):
        fid.averaged_gate_fidelity(1.5)


def test_fully_depolarized_channel():
    def depolarize(rhos):
        return np.broadcast_to(np.eye(4) / 4.0, rhos.shape)

    F_e = fid.entanglement_fidelity(depolarize, pulses.CZ)
    assert F_e == pytest.approx(0.25)
    assert fid.averaged_gate_fidelity(F_e) == pytest.approx(0.4)


def test_gaussian_decay(caplog):
    assert fid.gaussian_decay_fidelity(0.01, 10.0) == pytest.approx(0.992)
    with caplog.at_level(logging.WARNING, logger="ocscz.fidelity"):
        fid.gaussian_decay_fidelity(0.1, 10.0)
    assert "perturbative" in caplog.text


def test_gate_report():
    report = fid.GateReport(
        "offres", 0.95, 0.96, np.pi, [0.0, 1e-5, 1e-5, 2e-5],
        {"qubitA": 0.01, "qubitB": 0.02, "coupler": 0.04}, 5.3,
    )  # fmt: skip
    assert report.F == pytest.approx(0.93)
    assert fid.GateReport.csv_header()[:2] == ["scheme", "F"]
    row = report.csv_row()
    assert len(row) == len(fid.GateReport.fields)
    assert row[0] == "offres"
    text = report.to_text()
    assert "scheme = offres" in text
    assert "IF_coupler = 0.04" in text


def test_zero_noise_gate_is_exact(base_config):
    report = fid.total_cz_fidelity(
        base_config,
        noise.NoiseSpec.qubit_base(1e-12),
        noise.NoiseSpec.coupler_base(0.0),
        "offres",
    )
    assert report.F_g > 0.999
    assert report.F > 0.999
    assert abs(prop.wrap_phase(report.theta - np.pi)) < 1e-3
    assert report.t_g == pytest.approx(np.pi * np.sqrt(6.0) / 1.441, rel=0.05)


@pytest.mark.slow
def test_headline_fidelity(base_config):
    report = fid.total_cz_fidelity(
        base_config, noise.NoiseSpec.qubit_base(), noise.NoiseSpec.coupler_base(), "offres"
    )
    assert report.F == pytest.approx(0.91, abs=0.02)
    assert report.IF_breakdown["qubitA"] == pytest.approx(report.IF_breakdown["qubitB"])
    assert np.all(report.per_block_leakage < 1e-3)
