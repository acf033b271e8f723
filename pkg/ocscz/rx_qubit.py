""" Module modelling a three-electron exchange-only qubit with the Fermi-Hubbard model.

Energies are in h*GHz. The low-energy basis is ordered |T>, |S>, |L>, |R> where

    |T> = (2|u,d,u> - |u,u,d> - |d,u,u>) / sqrt(6)
    |S> = (|u,u,d> - |d,u,u>) / sqrt(2)
    |L> = |ud,0,u>
    |R> = |u,0,ud>
"""
import logging
from collections import namedtuple
from functools import lru_cache
from functools import reduce

import numpy as np
from scipy import linalg

import ocscz.settings as ocs
from ocscz.exceptions import NumericalDifferentiationError, ParameterDomainError


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

RxSpectrum = namedtuple("RxSpectrum", ["energies", "states"])

# Order of the eight S = S_z = 1/2 states of fh_full_hamiltonian. The first four
# are the low-energy basis above; the rest each hold one doubly occupied dot.
FULL_BASIS_LABELS = ("T", "S", "L", "R", "ud,u,0", "0,u,ud", "u,ud,0", "0,ud,u")

# Middle-dot occupation of |T>, |S>, |L>, |R>.
_N2 = np.array([1.0, 1.0, 0.0, 0.0])
_N1 = np.array([1.0, 1.0, 2.0, 1.0])
_N3 = np.array([1.0, 1.0, 1.0, 2.0])


class QubitParams:
    """ Fermi-Hubbard parameters of one triple-dot qubit, all in h*GHz. """

    def __init__(self, U, U_C, eps_m, t_hop, eps=0.0):
        self.U = float(U)
        self.U_C = float(U_C)
        self.eps_m = float(eps_m)
        self.t_hop = float(t_hop)
        self.eps = float(eps)
        values = (self.U, self.U_C, self.eps_m, self.t_hop, self.eps)
        if not all(np.isfinite(values)):
            raise ParameterDomainError(f"non-finite qubit parameter in {self!r}")
        if self.U <= 0:
            raise ParameterDomainError(f"U must be positive, got {self.U}")
        if self.t_hop < 0:
            raise ParameterDomainError(f"t_hop must be non-negative, got {self.t_hop}")
        if self.eps != 0.0:
            raise ParameterDomainError(f"symmetric detuning eps must be 0, got {self.eps}")

    @classmethod
    def from_ratios(cls, u_mev, uc_ratio, eps_m_ratio, t_ratio, eps=0.0):
        """ Build from U in meV and the other energies as fractions of U. """
        U = u_mev * ocs.GHZ_PER_MEV
        return cls(U, uc_ratio * U, eps_m_ratio * U, t_ratio * U, eps=eps)

    def replace(self, **kwargs):
        fields = dict(U=self.U, U_C=self.U_C, eps_m=self.eps_m, t_hop=self.t_hop, eps=self.eps)
        fields.update(kwargs)
        return QubitParams(**fields)

    @property
    def delta_fh(self):
        return self.U - 2.0 * self.U_C - self.eps_m

    @property
    def rx_regime(self):
        """ True when the four-state truncation holds (|Delta_FH| < U). """
        return abs(self.delta_fh) < self.U

    def __eq__(self, other):
        if not isinstance(other, QubitParams):
            return NotImplemented
        return (self.U, self.U_C, self.eps_m, self.t_hop, self.eps) == (
            other.U,
            other.U_C,
            other.eps_m,
            other.t_hop,
            other.eps,
        )

    def __repr__(self):
        return (
            f"QubitParams(U={self.U!r}, U_C={self.U_C!r}, eps_m={self.eps_m!r}, "
            f"t_hop={self.t_hop!r}, eps={self.eps!r})"
        )


def fh_subspace_hamiltonian(p):
    """ Four-state Hamiltonian in the |T>, |S>, |L>, |R> basis. """
    t = p.t_hop
    a = np.sqrt(6.0) / 2.0 * t
    b = np.sqrt(2.0) / 2.0 * t
    d = p.delta_fh
    return np.array(
        [
            [0.0, 0.0, -a, a],
            [0.0, 0.0, -b, -b],
            [-a, -b, d, 0.0],
            [a, -b, 0.0, d],
        ]
    )


def closed_form_energies(p):
    """ Returns the four eigenenergies in ascending order from their closed forms. """
    d = p.delta_fh
    r12 = np.hypot(d, np.sqrt(12.0) * p.t_hop)
    r4 = np.hypot(d, 2.0 * p.t_hop)
    return np.array([(d - r12) / 2.0, (d - r4) / 2.0, (d + r4) / 2.0, (d + r12) / 2.0])


def rx_eigensystem(p):
    energies, vectors = linalg.eigh(fh_subspace_hamiltonian(p))
    states = vectors.T.copy()
    # Fix the sign so the largest component of each state is positive.
    for k, state in enumerate(states):
        if state[np.argmax(np.abs(state))] < 0:
            states[k] = -state
    return RxSpectrum(energies=energies, states=states)


def qubit_frequency(p):
    energies = rx_eigensystem(p).energies
    return max(energies[1] - energies[0], 0.0)


def dot_occupations(p, state):
    """ Returns <n1>, <n2>, <n3> of eigenstate 0 or 1. """
    if state not in (0, 1):
        raise ParameterDomainError(f"state must be 0 or 1, got {state}")
    weights = rx_eigensystem(p).states[state] ** 2
    return np.array([weights @ _N1, weights @ _N2, weights @ _N3])


def middle_dot_occupation(p, state):
    return dot_occupations(p, state)[1]


def exchange_energy(p):
    """ J = 2 t^2 U / (U^2 - eps_m^2), in h*GHz. """
    if abs(p.eps_m) >= p.U:
        raise ParameterDomainError(
            f"exchange energy diverges for |eps_m| >= U ({p.eps_m} >= {p.U})"
        )
    return 2.0 * p.t_hop ** 2 * p.U / (p.U ** 2 - p.eps_m ** 2)


@lru_cache(maxsize=None)
def _fock_operators():
    """ Jordan-Wigner creation operators on 3 dots x 2 spins, modes ordered 1u,1d,2u,2d,3u,3d. """
    cdag = np.array([[0.0, 0.0], [1.0, 0.0]])
    string = np.diag([1.0, -1.0])
    eye = np.eye(2)
    n_modes = 6
    ops = []
    for mode in range(n_modes):
        chain = [string] * mode + [cdag] + [eye] * (n_modes - mode - 1)
        ops.append(reduce(np.kron, chain))
    return ops


def _mode(dot, spin):
    return 2 * (dot - 1) + (0 if spin == "u" else 1)


def _fock_state(*modes):
    """ Returns c^dag_{m1} c^dag_{m2} ... |vac> for the given (dot, spin) modes. """
    cdag = _fock_operators()
    vac = np.zeros(cdag[0].shape[0])
    vac[0] = 1.0
    state = vac
    for dot, spin in reversed(modes):
        state = cdag[_mode(dot, spin)] @ state
    return state


@lru_cache(maxsize=None)
def _full_basis():
    uud = _fock_state((1, "u"), (2, "u"), (3, "d"))
    udu = _fock_state((1, "u"), (2, "d"), (3, "u"))
    duu = _fock_state((1, "d"), (2, "u"), (3, "u"))
    basis = [
        (2.0 * udu - uud - duu) / np.sqrt(6.0),
        (uud - duu) / np.sqrt(2.0),
        _fock_state((1, "u"), (1, "d"), (3, "u")),
        _fock_state((1, "u"), (3, "u"), (3, "d")),
        _fock_state((1, "u"), (1, "d"), (2, "u")),
        _fock_state((2, "u"), (3, "u"), (3, "d")),
        _fock_state((1, "u"), (2, "u"), (2, "d")),
        _fock_state((2, "u"), (2, "d"), (3, "u")),
    ]
    return np.column_stack(basis)


def fh_full_hamiltonian(p):
    """ Eight-state Hamiltonian over all S = S_z = 1/2 three-electron states.

    Built by second quantization on the 64-dim Fock space of three dots, then
    projected onto FULL_BASIS_LABELS. The (1,1,1) energy is subtracted so the
    |T>, |S> diagonal is zero, as in fh_subspace_hamiltonian.
    """
    cdag = _fock_operators()
    c = [op.T for op in cdag]
    n = [op @ op.T for op in cdag]
    dim = cdag[0].shape[0]
    hamil = np.zeros((dim, dim))

    for i, j in ((1, 2), (2, 3)):
        for spin in ("u", "d"):
            a, b = _mode(i, spin), _mode(j, spin)
            hamil += -p.t_hop * (cdag[a] @ c[b] + cdag[b] @ c[a])
        n_i = n[_mode(i, "u")] + n[_mode(i, "d")]
        n_j = n[_mode(j, "u")] + n[_mode(j, "d")]
        hamil += p.U_C * n_i @ n_j
    for dot in (1, 2, 3):
        hamil += p.U * n[_mode(dot, "u")] @ n[_mode(dot, "d")]
    # Middle-dot potential; outer dots are the reference.
    hamil += p.eps_m * (n[_mode(2, "u")] + n[_mode(2, "d")])

    basis = _full_basis()
    h8 = basis.T @ hamil @ basis
    h8 -= (2.0 * p.U_C + p.eps_m) * np.eye(8)
    logger.debug("h8 =\n%s", h8)
    return h8


def fh_full_spectrum(p):
    """ The eight eigenenergies of fh_full_hamiltonian, ascending. """
    return linalg.eigvalsh(fh_full_hamiltonian(p))


def _full_gap(p):
    energies = fh_full_spectrum(p)
    return energies[1] - energies[0]


def charge_sensitivity(p, method="analytic", step=None, check_regime=True):
    """ Returns d(omega_q)/d(eps_m), dimensionless.

    method is one of "analytic", "occupation" or "full8". full8 takes a
    central difference of the lowest gap of the eight-state Hamiltonian with
    step 1e-6 U unless given. Raises ParameterDomainError outside the RX
    regime unless check_regime is False, as grid scans that mask those
    points afterwards pass.
    """
    if check_regime and not p.rx_regime:
        raise ParameterDomainError(
            f"|Delta_FH| = {abs(p.delta_fh):.4g} GHz is not below U = {p.U:.4g} GHz; "
            "the four-state sensitivity does not apply"
        )
    if method == "analytic":
        d = p.delta_fh
        r12 = np.hypot(d, np.sqrt(12.0) * p.t_hop)
        r4 = np.hypot(d, 2.0 * p.t_hop)
        if r4 == 0.0:
            return 0.0
        return 0.5 * (d / r4 - d / r12)
    if method == "occupation":
        return middle_dot_occupation(p, 1) - middle_dot_occupation(p, 0)
    if method == "full8":
        h = 1e-6 * p.U if step is None else step
        plus, minus = p.eps_m + h, p.eps_m - h
        if h <= 0 or plus == minus or h < 1e-13 * max(abs(p.eps_m), p.U):
            raise NumericalDifferentiationError(
                f"finite-difference step {h} underflows at eps_m={p.eps_m}"
            )
        upper = _full_gap(p.replace(eps_m=plus))
        lower = _full_gap(p.replace(eps_m=minus))
        return (upper - lower) / (plus - minus)
    raise ParameterDomainError(f"unknown sensitivity method {method!r}")
