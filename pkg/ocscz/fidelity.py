""" Gate fidelity over the 16 product inputs and the total CZ fidelity budget. """
import logging

import numpy as np

import ocscz.hybrid as hyb
import ocscz.noise as noise
import ocscz.propagator as prop
import ocscz.pulses as pulses
import ocscz.rx_qubit as rxq
from ocscz.exceptions import ParameterDomainError


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

PERTURBATIVE_LIMIT = 0.5
N_INPUTS = 16

_SINGLE = [
    np.array([1.0, 0.0]),
    np.array([0.0, 1.0]),
    np.array([1.0, 1.0]) / np.sqrt(2.0),
    np.array([1.0, 1j]) / np.sqrt(2.0),
]
_GROUND = np.diag([1.0, 0.0]).astype(complex)


def input_states():
    """ The 16 pure inputs {|0>, |1>, |+>, |+i>} x {same} as 4x4 density matrices. """
    states = [np.kron(a, b) for a in _SINGLE for b in _SINGLE]
    return np.array([np.outer(s, np.conj(s)) for s in states], dtype=complex)


def embed(rhos):
    """ Attach the coupler in |g>: (..., 4, 4) -> (..., 8, 8). """
    rhos = np.asarray(rhos, dtype=complex)
    return np.einsum("...ij,kl->...ikjl", rhos, _GROUND).reshape(rhos.shape[:-2] + (8, 8))


def unitary_channel(U):
    """ rho -> U rho U^dag; an 8x8 U receives the inputs with the coupler in |g>. """
    U = np.asarray(U, dtype=complex)

    def channel(rhos):
        rhos = embed(rhos) if U.shape[-1] == 8 else np.asarray(rhos, dtype=complex)
        return U @ rhos @ np.conj(U.T)

    return channel


def phase_corrections(phases):
    """ Virtual-Z correction diag(exp(-i phi_ab)) with
    phi_ab = theta00 + a (theta10 - theta00) + b (theta01 - theta00).
    """
    t00, t01, t10 = phases.theta00, phases.theta01, phases.theta10
    phis = [t00 + a * (t10 - t00) + b * (t01 - t00) for a in (0, 1) for b in (0, 1)]
    return np.diag(np.exp(-1j * np.array(phis)))


def entanglement_fidelity(channel, ideal, corrections=None):
    """ Mean Tr(rho_out rho_ideal) over the 16 product inputs.

    channel maps the (16, 4, 4) inputs to (16, 4, 4) or (16, 8, 8) outputs;
    8-level outputs are compared with the ideal gate times coupler |g>.
    """
    inputs = input_states()
    outputs = np.asarray(channel(inputs), dtype=complex)
    if outputs.ndim != 3 or outputs.shape[0] != N_INPUTS or outputs.shape[1] not in (4, 8):
        raise ParameterDomainError(f"channel must return 16 outputs, got shape {outputs.shape}")
    ideal = np.asarray(ideal, dtype=complex)
    targets = ideal @ inputs @ np.conj(ideal.T)
    if corrections is not None:
        corr = np.asarray(corrections, dtype=complex)
        if outputs.shape[1] == 8:
            corr = np.kron(corr, np.eye(2))
        outputs = corr @ outputs @ np.conj(corr.T)
    if outputs.shape[1] == 8:
        targets = embed(targets)
    overlaps = np.einsum("nij,nji->n", outputs, targets).real
    return float(np.mean(overlaps))


def averaged_gate_fidelity(F_e):
    """ (4 F_e + 1) / 5 for two qubits. """
    if not -1e-12 <= F_e <= 1.0 + 1e-12:
        raise ParameterDomainError(f"entanglement fidelity must lie in [0, 1], got {F_e}")
    return (4.0 * F_e + 1.0) / 5.0


def gaussian_decay_fidelity(gamma2, t_g):
    """ 1 - (4/5)(Gamma_2 t_g)^2 for Gaussian dephasing of both qubits. """
    x = gamma2 * t_g
    if x >= PERTURBATIVE_LIMIT:
        logger.warning("Gamma_2 t_g = %.3g outside the perturbative regime.", x)
    return 1.0 - 0.8 * x ** 2


class GateReport:
    """ Fidelities and infidelity breakdown of one simulated CZ. """

    fields = (
        "scheme",
        "F",
        "F_e",
        "F_g",
        "theta",
        "t_g",
        "IF_qubitA",
        "IF_qubitB",
        "IF_coupler",
        "leakage00",
        "leakage01",
        "leakage10",
        "leakage11",
    )

    def __init__(self, scheme, F_e, F_g, theta, per_block_leakage, IF_breakdown, t_g):
        self.scheme = scheme
        self.F_e = float(F_e)
        self.F_g = float(F_g)
        self.theta = float(theta)
        self.per_block_leakage = np.asarray(per_block_leakage, dtype=float)
        self.IF_breakdown = dict(IF_breakdown)
        self.t_g = float(t_g)

    @property
    def F(self):
        return 1.0 - sum(self.IF_breakdown.values())

    def as_dict(self):
        values = {
            "scheme": self.scheme,
            "F": self.F,
            "F_e": self.F_e,
            "F_g": self.F_g,
            "theta": self.theta,
            "t_g": self.t_g,
        }
        for key in ("qubitA", "qubitB", "coupler"):
            values[f"IF_{key}"] = self.IF_breakdown[key]
        for label, value in zip(("00", "01", "10", "11"), self.per_block_leakage):
            values[f"leakage{label}"] = value
        return values

    def to_text(self):
        """ key = value lines. """
        lines = []
        for key, value in self.as_dict().items():
            text = value if isinstance(value, str) else f"{value:.12g}"
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def csv_header(cls):
        return list(cls.fields)

    def csv_row(self):
        values = self.as_dict()
        return [values[key] for key in self.fields]

    def __repr__(self):
        return f"GateReport(scheme={self.scheme!r}, F={self.F!r}, theta={self.theta!r})"


def _qubit_infidelities(cfg, ladder, noise_q, scheme, rx_time, n_traj, seed, workers, t_g_factor):
    if noise_q.beta == 1.0:
        result = noise.qubit_infidelity(
            noise_q, cfg.alpha, ladder.sensitivity, scheme, t_g=rx_time, t_g_factor=t_g_factor
        )
        return result.per_qubit, result.per_qubit
    # Other exponents have no closed form.
    per_qubit = []
    for index, qubit in enumerate((cfg.qubitA, cfg.qubitB)):
        result = noise.qubit_infidelity_mc(
            noise_q,
            rxq.charge_sensitivity(qubit),
            rx_time,
            dd=scheme == "dd",
            n_traj=n_traj,
            seed=[seed, index],
            workers=workers,
        )
        per_qubit.append(result.per_qubit)
    return tuple(per_qubit)


def total_cz_fidelity(
    cfg,
    noise_q,
    noise_c,
    scheme="offres",
    restarts=20,
    seed=0,
    samples_per_period=prop.SAMPLES_PER_PERIOD,
    mc_trajectories=1000,
    workers=1,
    t_g_factor=pulses.SQRT_CZ_TG_FACTOR,
    refine=True,
):
    """ F = 1 - IF_A - IF_B - IF_C for the chosen scheme.

    IF_C is 1 - F_g of the cumulant channel against the ideal CZ, with
    virtual-Z corrections calibrated on the noiseless run; coherent error and
    leakage land there too.
    """
    ladder = hyb.conditional_ladder(cfg)
    items = pulses.scheme_sequence(
        ladder, scheme, restarts=restarts, seed=seed, t_g_factor=t_g_factor, refine=refine
    )
    evolution = prop.evolve_sequence(ladder, items, samples_per_period)
    blocks = evolution.blocks()
    phases = prop.conditional_phases(blocks)
    corrections = phase_corrections(phases)
    logger.debug("theta =\n%s", phases.theta)

    def channel(rhos):
        return noise.cumulant_evolve(
            ladder, items, noise_c, embed(rhos), evolution=evolution
        )

    F_e = entanglement_fidelity(channel, pulses.CZ, corrections)
    F_g = averaged_gate_fidelity(min(max(F_e, 0.0), 1.0))
    rx_time = sum(item.t_g for item in items if isinstance(item, pulses.PulseSpec))
    if_a, if_b = _qubit_infidelities(
        cfg, ladder, noise_q, scheme, rx_time, mc_trajectories, seed, workers, t_g_factor
    )
    report = GateReport(
        scheme=scheme,
        F_e=F_e,
        F_g=F_g,
        theta=phases.theta,
        per_block_leakage=prop.block_leakage(blocks),
        IF_breakdown={"qubitA": if_a, "qubitB": if_b, "coupler": 1.0 - F_g},
        t_g=evolution.t_grid[-1],
    )
    logger.info("Finished gate fidelity.")
    return report
