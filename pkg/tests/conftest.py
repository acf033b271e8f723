import numpy as np
import pytest

import context  # noqa: F401
import ocscz.hybrid as hyb
import ocscz.ocs_transmon as octr
import ocscz.pulses as pulses
import ocscz.rx_qubit as rxq


@pytest.fixture(scope="session")
def base_config():
    qubit = rxq.QubitParams.from_ratios(4.0, 0.2, 0.625, 0.013)
    return hyb.HybridConfig.with_parity_bias(qubit, qubit, octr.TransmonParams(3.0, 3.0), 0.2)


@pytest.fixture(scope="session")
def base_ladder(base_config):
    return hyb.conditional_ladder(base_config)


@pytest.fixture(scope="session")
def sqrt_cz(base_ladder):
    """ GaMAM sqrt(CZ) at t_g = 16 / delta_omega_c. """
    return pulses.synthesize_cphase(base_ladder, np.pi / 2.0, seed=0)
