""" Capacitance network of one triple-dot qubit plus the coupler node.

Nodes are ordered dot 1, dot 2, dot 3, coupler. Capacitances are in farads.
The matrix is the Maxwell form Q = C V: every off-diagonal is minus the mutual
capacitance, -C_chi_i between dot i and the coupler included. The lever arms
are taken from the ratios C_chi_i / C_i directly, so this sign never reaches
alpha.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy import constants, linalg

from ocscz.exceptions import NetworkError, ParameterDomainError


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

LeverArms = namedtuple(
    "LeverArms", ["alpha1", "alpha2", "alpha3", "alpha", "longitudinal", "transverse_residual"]
)

MAX_CONDITION = 1e12
_FIELDS = (
    "C1", "C2", "C3", "Cchi1", "Cchi2", "Cchi3", "Cm12", "Cm23", "Cc", "Cg1", "Cg2", "Cg3", "CgC",
)


class CapNetwork:
    """ Ground, coupler, interdot and gate capacitances of one qubit and the coupler. """

    def __init__(
        self,
        C1,
        C2,
        C3,
        Cc,
        Cchi1=0.0,
        Cchi2=0.0,
        Cchi3=0.0,
        Cm12=0.0,
        Cm23=0.0,
        Cg1=0.0,
        Cg2=0.0,
        Cg3=0.0,
        CgC=0.0,
    ):
        self.C1, self.C2, self.C3, self.Cc = float(C1), float(C2), float(C3), float(Cc)
        self.Cchi1, self.Cchi2, self.Cchi3 = float(Cchi1), float(Cchi2), float(Cchi3)
        self.Cm12, self.Cm23 = float(Cm12), float(Cm23)
        self.Cg1, self.Cg2, self.Cg3, self.CgC = float(Cg1), float(Cg2), float(Cg3), float(CgC)
        for name in _FIELDS:
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ParameterDomainError(
                    f"capacitance {name} must be finite and >= 0, got {value}"
                )

    def mirrored(self):
        """ Returns the network with dots 1 and 3 swapped. """
        return CapNetwork(
            C1=self.C3, C2=self.C2, C3=self.C1, Cc=self.Cc,
            Cchi1=self.Cchi3, Cchi2=self.Cchi2, Cchi3=self.Cchi1,
            Cm12=self.Cm23, Cm23=self.Cm12,
            Cg1=self.Cg3, Cg2=self.Cg2, Cg3=self.Cg1, CgC=self.CgC,
        )  # fmt: skip

    def __repr__(self):
        inner = ", ".join(f"{name}={getattr(self, name)!r}" for name in _FIELDS)
        return f"CapNetwork({inner})"


def build_capacitance_matrix(net):
    """ Returns the 4x4 matrix C with Q = C V.

    Diagonals are total node capacitances, gate capacitances included. The
    off-diagonals follow from the node-charge equations: -C_m12, -C_m23 between
    dots and -C_chi_i between dot i and the coupler.
    """
    d1 = net.C1 + net.Cg1 + net.Cchi1 + net.Cm12
    d2 = net.C2 + net.Cg2 + net.Cchi2 + net.Cm12 + net.Cm23
    d3 = net.C3 + net.Cg3 + net.Cchi3 + net.Cm23
    dc = net.Cc + net.Cchi1 + net.Cchi2 + net.Cchi3 + net.CgC
    c = np.array(
        [
            [d1, -net.Cm12, 0.0, -net.Cchi1],
            [-net.Cm12, d2, -net.Cm23, -net.Cchi2],
            [0.0, -net.Cm23, d3, -net.Cchi3],
            [-net.Cchi1, -net.Cchi2, -net.Cchi3, dc],
        ]
    )
    eigenvalues = linalg.eigvalsh(c)
    if eigenvalues[0] <= 0:
        raise NetworkError(
            f"capacitance matrix is not positive definite: eigenvalues {eigenvalues}"
        )
    return c


def _inverse(net):
    c = build_capacitance_matrix(net)
    cond = np.linalg.cond(c)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NetworkError(f"capacitance matrix ill-conditioned (condition number {cond:.3g})")
    lu = linalg.lu_factor(c)
    return linalg.lu_solve(lu, np.eye(4))


def interaction_coefficients(net):
    """ Returns the exact [C^-1]_{i4} for dots i = 1, 2, 3, in 1/F. """
    return _inverse(net)[:3, 3].copy()


def first_order_coefficients(net):
    """ Leading-order C_chi_i / (C_i C_c) for ground-dominated networks. """
    grounds = np.array([net.C1, net.C2, net.C3])
    chis = np.array([net.Cchi1, net.Cchi2, net.Cchi3])
    if np.any(grounds == 0) or net.Cc == 0:
        raise NetworkError("first-order coefficients need non-zero ground capacitances")
    return chis / (grounds * net.Cc)


def electrostatic_energy(net, charges):
    """ Returns Q . C^-1 Q / 2 in joules. """
    q = np.asarray(charges, dtype=float)
    return 0.5 * q @ _inverse(net) @ q


def lever_arms(net):
    if net.C1 == 0 or net.C2 == 0 or net.C3 == 0:
        raise NetworkError("lever arms need non-zero dot ground capacitances")
    a1, a2, a3 = net.Cchi1 / net.C1, net.Cchi2 / net.C2, net.Cchi3 / net.C3
    alpha = a2 - a1
    longitudinal = bool(np.isclose(a1, a3, rtol=1e-9, atol=0.0))
    residual = abs(a1 - a3) / abs(alpha) if alpha != 0 else abs(a1 - a3)
    if not longitudinal:
        logger.info("Lever arms not purely longitudinal; transverse residual %.3g.", residual)
    return LeverArms(a1, a2, a3, alpha, longitudinal, residual)


def transverse_residual(net):
    return lever_arms(net).transverse_residual


def charging_energy(net):
    """ E_C = e^2 / (2 C_sigma) of the coupler node, in h*GHz. """
    c_sigma = build_capacitance_matrix(net)[3, 3]
    return constants.e ** 2 / (2.0 * c_sigma) / constants.h / constants.giga
