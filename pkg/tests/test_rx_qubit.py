import numpy as np
import pytest

import context  # noqa: F401
import ocscz.rx_qubit as rxq
import ocscz.settings as ocs
from ocscz.exceptions import NumericalDifferentiationError, ParameterDomainError


BASE = rxq.QubitParams.from_ratios(4.0, 0.2, 0.625, 0.013)


def random_qubits(n, seed=11):
    rng = np.random.default_rng(seed)
    qubits = []
    for _ in range(n):
        qubits.append(
            rxq.QubitParams.from_ratios(
                rng.uniform(2.0, 6.0),
                rng.uniform(0.1, 0.3),
                rng.uniform(0.4, 0.8),
                rng.uniform(0.002, 0.02),
            )
        )
    return qubits


def test_from_ratios_converts_mev():
    assert BASE.U == pytest.approx(4.0 * ocs.GHZ_PER_MEV)
    assert BASE.U == pytest.approx(967.1957, rel=1e-6)
    assert BASE.U_C == pytest.approx(0.2 * BASE.U)
    assert BASE.rx_regime


def test_nonzero_eps_rejected():
    with pytest.raises(ParameterDomainError):
        rxq.QubitParams(1000.0, 200.0, 600.0, 10.0, eps=0.1)


def test_negative_hopping_rejected():
    with pytest.raises(ParameterDomainError):
        rxq.QubitParams(1000.0, 200.0, 600.0, -1.0)


def test_subspace_hamiltonian_symmetric():
    hamil = rxq.fh_subspace_hamiltonian(BASE)
    assert np.allclose(hamil, hamil.T)
    assert hamil[2, 2] == pytest.approx(BASE.delta_fh)


def test_closed_form_matches_diagonalization():
    for p in random_qubits(20):
        numeric = rxq.rx_eigensystem(p).energies
        assert np.allclose(numeric, rxq.closed_form_energies(p), atol=1e-9 * p.U)


def test_eigenstates_orthonormal():
    states = rxq.rx_eigensystem(BASE).states
    assert np.allclose(states @ states.T, np.eye(4), atol=1e-12)


def test_qubit_frequency_positive():
    for p in random_qubits(10):
        assert rxq.qubit_frequency(p) > 0


def test_occupations_hold_three_electrons():
    for state in (0, 1):
        assert rxq.dot_occupations(BASE, state).sum() == pytest.approx(3.0)


def test_occupation_state_checked():
    with pytest.raises(ParameterDomainError):
        rxq.dot_occupations(BASE, 2)


def test_dfs_point_equal_charge_distributions():
    # Far below the RX regime both logical states sit in (1,1,1).
    p = BASE.replace(eps_m=0.0)
    difference = rxq.middle_dot_occupation(p, 0) - rxq.middle_dot_occupation(p, 1)
    assert abs(difference) < 5e-3


def test_exchange_energy_formula():
    j = rxq.exchange_energy(BASE)
    expected = 2.0 * BASE.t_hop ** 2 * BASE.U / (BASE.U ** 2 - BASE.eps_m ** 2)
    assert j == pytest.approx(expected)
    assert j < 0.7


def test_exchange_energy_diverges():
    with pytest.raises(ParameterDomainError):
        rxq.exchange_energy(BASE.replace(eps_m=BASE.U))


def test_base_point_sensitivity():
    assert abs(rxq.charge_sensitivity(BASE)) == pytest.approx(0.1039, abs=2e-3)


def test_sensitivity_methods_agree():
    for p in random_qubits(15, seed=3):
        analytic = rxq.charge_sensitivity(p, "analytic")
        occupation = rxq.charge_sensitivity(p, "occupation")
        full = rxq.charge_sensitivity(p, "full8")
        assert occupation == pytest.approx(analytic, abs=1e-9)
        assert full == pytest.approx(analytic, abs=1e-2)


def test_sensitivity_matches_finite_difference_of_closed_form():
    h = 1e-6 * BASE.U
    energies = [
        rxq.closed_form_energies(BASE.replace(eps_m=BASE.eps_m + s * h)) for s in (1.0, -1.0)
    ]
    gaps = [e[1] - e[0] for e in energies]
    slope = (gaps[0] - gaps[1]) / (2.0 * h)
    assert slope == pytest.approx(rxq.charge_sensitivity(BASE), rel=1e-5)


def test_full8_step_underflow():
    with pytest.raises(NumericalDifferentiationError):
        rxq.charge_sensitivity(BASE, "full8", step=1e-20)


def test_unknown_method():
    with pytest.raises(ParameterDomainError):
        rxq.charge_sensitivity(BASE, "spline")


def test_sensitivity_outside_rx_regime():
    # Delta_FH = U - 0.4 U - 3 U
    outside = BASE.replace(eps_m=3.0 * BASE.U)
    assert not outside.rx_regime
    for method in ("analytic", "occupation", "full8"):
        with pytest.raises(ParameterDomainError):
            rxq.charge_sensitivity(outside, method)
    assert np.isfinite(rxq.charge_sensitivity(outside, check_regime=False))


def test_full_hamiltonian_shape_and_low_block():
    h8 = rxq.fh_full_hamiltonian(BASE)
    assert h8.shape == (8, 8)
    assert np.allclose(h8, h8.T)
    low = np.linalg.eigvalsh(h8[:4, :4])
    assert np.allclose(low, rxq.closed_form_energies(BASE), atol=1e-9 * BASE.U)


def test_full_spectrum_lowest_levels_close_to_truncation():
    full = rxq.fh_full_spectrum(BASE)
    low = rxq.closed_form_energies(BASE)
    assert full.size == 8
    assert np.all(np.diff(full) >= -1e-9)
    assert full[1] - full[0] == pytest.approx(low[1] - low[0], rel=0.05)
