""" Module to hold global settings and physical constants reused throughout ocscz. """

__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

import os

from scipy import constants


global defaults
global default_filename


if os.name == "nt":
    default_filename = "config.ini"
else:
    default_filename = ".ocsczrc"

# Energies are carried in h*GHz, dynamic frequencies in rad/ns, times in ns.
GHZ_PER_MEV = constants.milli * constants.e / constants.h / constants.giga  # 241.798935...
GHZ_PER_UEV = GHZ_PER_MEV * 1e-3
TWO_PI = 2.0 * constants.pi

# Base-point noise amplitudes at 1 Hz.
QUBIT_NOISE_BASE = 0.21  # ueV^2/Hz on eps_m
COUPLER_NOISE_BASE = 0.5  # (1e-3 e)^2/Hz on q_g
COUPLER_CHARGE_UNIT = 1e-3  # the coupler amplitude is quoted in (1e-3 e)^2/Hz

# Every config section with its keys and string defaults.
defaults = {
    "qubit": {
        "u_mev": "4.0",
        "uc_ratio": "0.2",
        "eps_m_ratio": "0.625",
        "t_ratio": "0.013",
        "eps": "0.0",
        "j_max_ghz": "0.7",
    },
    "transmon": {
        "ej_ghz": "3.0",
        "ec_ghz": "3.0",
        "cutoff": "12",
        "parity_split_ghz": "1.0",
        "ec_source": "value",
    },
    "coupling": {"alpha": "0.2", "alpha_source": "value"},
    "capnet": {
        "c1_af": "500.0",
        "c2_af": "500.0",
        "c3_af": "500.0",
        "cchi1_af": "0.0",
        "cchi2_af": "100.0",
        "cchi3_af": "0.0",
        "cm12_af": "0.0",
        "cm23_af": "0.0",
        "cc_ff": "6.357",
        "cg1_af": "0.0",
        "cg2_af": "0.0",
        "cg3_af": "0.0",
        "cgc_af": "0.0",
    },
    "noise": {
        "qubit_a": str(QUBIT_NOISE_BASE),
        "qubit_beta": "1.0",
        "coupler_a": str(COUPLER_NOISE_BASE),
        "coupler_beta": "1.0",
        "f_low_hz": "1e4",
        "f_high_hz": "1e11",
        "qubit_ratio": "1.0",
        "coupler_ratio": "1.0",
        "pivot_hz": "1e7",
        "rate_convention": "hz",
    },
    "pulse": {
        "samples_per_period": "400",
        "restarts": "20",
        "sqrt_cz_tg_factor": "16.0",
        "refine": "true",
    },
    "simulation": {
        "scheme": "offres",
        "mc_trajectories": "1000",
        "seed": "0",
        "workers": "1",
    },
    "maps": {
        "eps_m_ratio_min": "0.4",
        "eps_m_ratio_max": "0.8",
        "t_ratio_min": "0.001",
        "t_ratio_max": "0.03",
        "qubit_points": "200",
        "ej_min_ghz": "3.0",
        "ej_max_ghz": "30.0",
        "ec_min_ghz": "0.3",
        "ec_max_ghz": "3.0",
        "coupler_points": "100",
        "ng_points": "201",
    },
    "sweep": {
        "axis1": "noise.ratio:0.1:10:5:log",
        "axis2": "coupling.alpha:0.1:0.4:4:lin",
    },
}

# Allowed ranges per numeric key, (low, high) inclusive; None is unbounded.
ranges = {
    "qubit.u_mev": (1e-6, None),
    "qubit.uc_ratio": (0.0, None),
    "qubit.eps_m_ratio": (0.0, 1.0 - 1e-12),
    "qubit.t_ratio": (0.0, None),
    "qubit.j_max_ghz": (0.0, None),
    "transmon.ej_ghz": (1e-9, None),
    "transmon.ec_ghz": (1e-9, None),
    "transmon.cutoff": (5, None),
    "transmon.parity_split_ghz": (0.0, None),
    "coupling.alpha": (1e-12, 1.0 - 1e-12),
    "noise.qubit_a": (0.0, None),
    "noise.coupler_a": (0.0, None),
    "noise.qubit_beta": (0.6, 1.4),
    "noise.coupler_beta": (0.6, 1.4),
    "noise.f_low_hz": (1e-12, None),
    "noise.f_high_hz": (1e-12, None),
    "noise.qubit_ratio": (0.0, None),
    "noise.coupler_ratio": (0.0, None),
    "noise.pivot_hz": (1e-12, None),
    "pulse.samples_per_period": (200, None),
    "pulse.restarts": (1, None),
    "pulse.sqrt_cz_tg_factor": (1e-6, None),
    "simulation.mc_trajectories": (100, None),
    "simulation.seed": (0, None),
    "simulation.workers": (1, None),
    "maps.qubit_points": (2, None),
    "maps.coupler_points": (2, None),
    "maps.ng_points": (2, None),
}

choices = {
    "transmon.ec_source": ("value", "network"),
    "coupling.alpha_source": ("value", "network"),
    "noise.rate_convention": ("hz", "angular"),
    "pulse.refine": ("true", "false"),
    "simulation.scheme": ("offres", "dd"),
}
