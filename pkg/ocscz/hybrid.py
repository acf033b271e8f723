""" Coupled qubit-coupler quantities and the driven rotating-frame Hamiltonian.

Two-qubit states are ordered |00>, |01>, |10>, |11>, each tensored with the
coupler |g>, |e>. Qubit state |0> has sigma_z = +1.
"""
import logging

import numpy as np
from scipy import linalg

import ocscz.ocs_transmon as octr
import ocscz.rx_qubit as rxq
import ocscz.settings as ocs
from ocscz.exceptions import ParameterDomainError


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

LINEARITY_LIMIT = 0.05
# Ladder steps of the excited level of each block, |00>, |01>, |10>, |11>.
LADDER_STEPS = np.array([2.0, 1.0, 1.0, 0.0])
_SIGMA_Z = {0: 1.0, 1: -1.0}


class HybridConfig:
    """ Two qubits, the coupler and the lever arm alpha at DC bias n_g0. """

    def __init__(self, qubitA, qubitB, transmon, alpha, n_g0, symmetric=True):
        self.qubitA = qubitA
        self.qubitB = qubitB
        self.alpha = float(alpha)
        self.n_g0 = float(n_g0)
        self.transmon = transmon.replace(n_g=self.n_g0)
        self.symmetric = symmetric
        if symmetric and qubitA != qubitB:
            raise ParameterDomainError("symmetric mode needs identical qubits")
        if not 0.0 <= self.alpha < 1.0:
            raise ParameterDomainError(f"alpha must lie in [0, 1), got {self.alpha}")

    @classmethod
    def with_parity_bias(cls, qubitA, qubitB, transmon, alpha, target_split=1.0, **kwargs):
        """ Build with n_g0 from the parity-aware bias rule. """
        n_g0 = octr.parity_aware_bias(transmon, target_split)
        return cls(qubitA, qubitB, transmon, alpha, n_g0, **kwargs)

    def replace(self, **kwargs):
        fields = dict(
            qubitA=self.qubitA,
            qubitB=self.qubitB,
            transmon=self.transmon,
            alpha=self.alpha,
            n_g0=self.n_g0,
            symmetric=self.symmetric,
        )
        fields.update(kwargs)
        return HybridConfig(**fields)

    def __repr__(self):
        return (
            f"HybridConfig(qubitA={self.qubitA!r}, qubitB={self.qubitB!r}, "
            f"transmon={self.transmon!r}, alpha={self.alpha!r}, n_g0={self.n_g0!r})"
        )


class ConditionalLadder:
    """ Conditional coupler frequencies omega_ab (h*GHz) and their spacing.

    delta_omega_c is |omega_11 - omega_10| in rad/ns from the exact ladder;
    delta_omega_c_linear is |d omega_c / d n_g| * delta_n_g. sign is +1 when
    omega_11 < omega_10.
    """

    def __init__(self, omega_ab, n_eff, n_g0, sensitivity, delta_n_g, g):
        self.omega_ab = np.asarray(omega_ab, dtype=float)
        self.n_eff = np.asarray(n_eff, dtype=float)
        self.n_g0 = n_g0
        self.sensitivity = sensitivity
        self.delta_n_g = delta_n_g
        self.g = g
        self.delta_omega_c = ocs.TWO_PI * abs(self.omega_ab[3] - self.omega_ab[2])
        self.delta_omega_c_linear = abs(sensitivity) * delta_n_g
        self.sign = 1 if self.omega_ab[3] < self.omega_ab[2] else -1
        spacing = self.delta_omega_c / ocs.TWO_PI
        if spacing > 0:
            w00, w01, _, w11 = self.omega_ab
            self.linearity_residual = abs((w00 - w01) - (w01 - w11)) / spacing
        else:
            self.linearity_residual = 0.0

    @property
    def omega_11(self):
        """ omega_c of |11> in rad/ns. """
        return ocs.TWO_PI * self.omega_ab[3]

    def block_detunings(self, omega_d):
        """ Excited-level detunings of the four blocks for carrier omega_d (rad/ns). """
        delta = self.omega_11 - omega_d
        return delta + self.sign * LADDER_STEPS * self.delta_omega_c

    def __repr__(self):
        return (
            f"ConditionalLadder(omega_ab={self.omega_ab!r}, "
            f"delta_omega_c={self.delta_omega_c!r}, sign={self.sign!r})"
        )


def _occupation_difference(qubit):
    """ <0|n2|0> - <1|n2|1>. """
    return rxq.middle_dot_occupation(qubit, 0) - rxq.middle_dot_occupation(qubit, 1)


def coupling_strengths(cfg):
    """ Returns (g_A, g_B) in h*GHz. """
    scale = 2.0 * cfg.transmon.E_C * cfg.transmon.n_zpf * cfg.alpha
    return tuple(scale * _occupation_difference(q) for q in (cfg.qubitA, cfg.qubitB))


def coupling_strength(cfg):
    """ g = 2 E_C n_zpf alpha (<0|n2|0> - <1|n2|1>) of qubit A, in h*GHz. """
    return coupling_strengths(cfg)[0]


def _signed_shifts(cfg):
    # Equals g / (4 E_C n_zpf) without dividing by n_zpf.
    return [cfg.alpha * _occupation_difference(q) / 2.0 for q in (cfg.qubitA, cfg.qubitB)]


def gate_charge_shift(cfg):
    """ Delta n_g = |g / (4 E_C n_zpf)| = alpha |Delta<n2>| / 2 of qubit A. """
    return abs(_signed_shifts(cfg)[0])


def effective_gate_charges(cfg):
    """ Effective coupler gate charge for |00>, |01>, |10>, |11>. """
    shift_a, shift_b = _signed_shifts(cfg)
    return np.array(
        [
            cfg.n_g0 - (_SIGMA_Z[a] * shift_a + _SIGMA_Z[b] * shift_b) / 2.0
            for a in (0, 1)
            for b in (0, 1)
        ]
    )


def conditional_ladder(cfg):
    n_eff = effective_gate_charges(cfg)
    omega_ab = [octr.transition_frequency(cfg.transmon.replace(n_g=n)) for n in n_eff]
    sensitivity = octr.charge_dispersion_sensitivity(cfg.transmon)
    ladder = ConditionalLadder(
        omega_ab=omega_ab,
        n_eff=n_eff,
        n_g0=cfg.n_g0,
        sensitivity=sensitivity,
        delta_n_g=gate_charge_shift(cfg),
        g=coupling_strength(cfg),
    )
    logger.debug("omega_ab =\n%s", ladder.omega_ab)
    if ladder.linearity_residual > LINEARITY_LIMIT:
        logger.warning(
            "Conditional ladder not evenly spaced (residual %.3g); gate formulas assume it is.",
            ladder.linearity_residual,
        )
    logger.info("Finished building ladder.")
    return ladder


def assemble_blocks(detunings, omega):
    """ Blocks [[0, W/2], [W*/2, d_ab]] for envelope samples W, shape (T, 4, 2, 2). """
    omega = np.atleast_1d(np.asarray(omega, dtype=complex))
    hamil = np.zeros((omega.size, 4, 2, 2), dtype=complex)
    hamil[:, :, 0, 1] = (omega / 2.0)[:, None]
    hamil[:, :, 1, 0] = (np.conj(omega) / 2.0)[:, None]
    hamil[:, :, 1, 1] = detunings[None, :]
    return hamil


def block_hamiltonians(ladder, pulse, times):
    """ Returns the four 2x2 block Hamiltonians at each time, shape (T, 4, 2, 2), rad/ns. """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return assemble_blocks(ladder.block_detunings(pulse.omega_d), pulse.envelope(times))


def rotating_frame_hamiltonian(ladder, pulse, t):
    """ The 8x8 block-diagonal rotating-frame Hamiltonian at time t (rad/ns). """
    if not -1e-12 * pulse.t_g <= t <= pulse.t_g * (1.0 + 1e-12):
        raise ParameterDomainError(f"t = {t} outside pulse support [0, {pulse.t_g}]")
    blocks = block_hamiltonians(ladder, pulse, [t])[0]
    return linalg.block_diag(*blocks)
