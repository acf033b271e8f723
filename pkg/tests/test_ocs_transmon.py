import numpy as np
import pytest

import context  # noqa: F401
import ocscz.ocs_transmon as octr
from ocscz.exceptions import ConvergenceError, InfeasibleBiasError, ParameterDomainError


BASE = octr.TransmonParams(3.0, 3.0)


def test_hamiltonian_tridiagonal():
    hamil = octr.charge_basis_hamiltonian(BASE.replace(n_g=0.1))
    assert hamil.shape == (25, 25)
    assert np.allclose(hamil, hamil.T)
    assert hamil[0, 1] == pytest.approx(-1.5)
    assert np.count_nonzero(np.triu(hamil, 2)) == 0


def test_spectrum_matches_dense_diagonalization():
    p = BASE.replace(n_g=0.31)
    dense = np.linalg.eigvalsh(octr.charge_basis_hamiltonian(p))[:4]
    assert np.allclose(octr.coupler_spectrum(p).levels, dense, atol=1e-9)


def test_dispersion_periodic_and_even():
    n_g = np.array([0.1, 0.3])
    assert np.allclose(octr.dispersion(BASE, n_g), octr.dispersion(BASE, n_g + 1.0), atol=1e-9)
    assert np.allclose(octr.dispersion(BASE, n_g), octr.dispersion(BASE, -n_g), atol=1e-9)


def test_parities_cross():
    n_g = np.linspace(0.0, 0.5, 101)
    split = octr.dispersion(BASE, n_g) - octr.dispersion(BASE, n_g + 0.5)
    assert split[0] > 0 > split[-1]
    assert split[50] == pytest.approx(0.0, abs=1e-9)


def test_cutoff_check():
    assert octr.check_cutoff(BASE) == pytest.approx(octr.transition_frequency(BASE))
    with pytest.raises(ConvergenceError):
        octr.transition_frequency(BASE.replace(cutoff=3))


def test_large_ratio_needs_larger_cutoff():
    with pytest.raises(ConvergenceError):
        octr.check_cutoff(octr.TransmonParams(300.0, 0.3, cutoff=5))


def test_invalid_energies():
    with pytest.raises(ParameterDomainError):
        octr.TransmonParams(3.0, 0.0)


def test_zero_slope_at_symmetry_points():
    for n_g in (0.0, 0.5):
        slope = octr.charge_dispersion_sensitivity(BASE.replace(n_g=n_g))
        assert slope == pytest.approx(0.0, abs=1e-6)


def test_hellmann_feynman_matches_finite_difference():
    rng = np.random.default_rng(5)
    for _ in range(10):
        e_j, e_c, n_g = rng.uniform(2.0, 10.0), rng.uniform(0.5, 3.0), rng.uniform(0.05, 0.45)
        p = octr.TransmonParams(e_j, e_c, n_g)
        hf = octr.charge_dispersion_sensitivity(p)
        fd = octr.charge_dispersion_sensitivity(p, method="finite-difference")
        assert hf == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_unknown_method():
    with pytest.raises(ParameterDomainError):
        octr.charge_dispersion_sensitivity(BASE, method="spline")


def test_parity_aware_bias_hits_target():
    n_g0 = octr.parity_aware_bias(BASE, 1.0)
    assert 0.0 < n_g0 < 0.5
    assert abs(octr.parity_split(BASE, n_g0)) == pytest.approx(1.0, abs=1e-8)
    assert n_g0 == pytest.approx(0.22695, abs=1e-3)


def test_base_coupler_sensitivity():
    n_g0 = octr.parity_aware_bias(BASE, 1.0)
    slope = octr.charge_dispersion_sensitivity(BASE.replace(n_g=n_g0))
    assert abs(slope) == pytest.approx(138.6, rel=0.03)


def test_infeasible_bias_reports_maximum():
    p = octr.TransmonParams(30.0, 0.3)
    with pytest.raises(InfeasibleBiasError) as info:
        octr.parity_aware_bias(p, 1.0)
    assert info.value.max_split == pytest.approx(octr.parity_split(p, 0.0))
    assert info.value.max_split < 1.0


def test_zero_split_sits_at_quarter():
    assert octr.parity_aware_bias(BASE, 0.0) == 0.25


def test_zero_point_fluctuation():
    assert BASE.n_zpf == pytest.approx((1.0 / 32.0) ** 0.25)
