""" Charge-basis model of the offset-charge-sensitive (OCS) transmon coupler.

Energies in h*GHz; charge sensitivities in Grad/s (rad/ns) per unit of n_g.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy import linalg, optimize

import ocscz.settings as ocs
from ocscz.exceptions import ConvergenceError, InfeasibleBiasError, ParameterDomainError


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

CouplerSpectrum = namedtuple("CouplerSpectrum", ["levels", "omega_c", "n_zpf"])

MIN_CUTOFF = 5
FD_STEP = 1e-5
DEGENERACY_TOL = 1e-9


class TransmonParams:
    """ OCS transmon: E_J, E_C in h*GHz, gate charge n_g in units of 2e, charge cutoff N. """

    def __init__(self, E_J, E_C, n_g=0.0, cutoff=12):
        self.E_J = float(E_J)
        self.E_C = float(E_C)
        self.n_g = float(n_g)
        self.cutoff = int(cutoff)
        if not np.isfinite([self.E_J, self.E_C, self.n_g]).all():
            raise ParameterDomainError(f"non-finite transmon parameter in {self!r}")
        if self.E_J < 0 or self.E_C <= 0:
            raise ParameterDomainError(f"need E_J >= 0 and E_C > 0, got {self!r}")

    def replace(self, **kwargs):
        fields = dict(E_J=self.E_J, E_C=self.E_C, n_g=self.n_g, cutoff=self.cutoff)
        fields.update(kwargs)
        return TransmonParams(**fields)

    @property
    def n_zpf(self):
        return (self.E_J / (32.0 * self.E_C)) ** 0.25

    def __repr__(self):
        return (
            f"TransmonParams(E_J={self.E_J!r}, E_C={self.E_C!r}, n_g={self.n_g!r}, "
            f"cutoff={self.cutoff!r})"
        )


def _tridiagonal(p):
    if p.cutoff < MIN_CUTOFF:
        raise ConvergenceError(f"charge cutoff {p.cutoff} below minimum {MIN_CUTOFF}")
    charges = np.arange(-p.cutoff, p.cutoff + 1)
    diag = 4.0 * p.E_C * (charges - p.n_g) ** 2
    off = np.full(2 * p.cutoff, -p.E_J / 2.0)
    return charges, diag, off


def charge_basis_hamiltonian(p):
    """ Returns the (2N+1)x(2N+1) Hamiltonian 4E_C(n - n_g)^2 - E_J cos(phi). """
    _, diag, off = _tridiagonal(p)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def coupler_spectrum(p, n_levels=4):
    _, diag, off = _tridiagonal(p)
    levels = linalg.eigvalsh_tridiagonal(
        diag, off, select="i", select_range=(0, n_levels - 1), lapack_driver="stebz"
    )
    return CouplerSpectrum(levels=levels, omega_c=levels[1] - levels[0], n_zpf=p.n_zpf)


def transition_frequency(p):
    """ omega_c = E_1 - E_0 in h*GHz. """
    return coupler_spectrum(p, n_levels=2).omega_c


def dispersion(p, n_g):
    """ Returns omega_c over an array of gate charges. """
    return np.array([transition_frequency(p.replace(n_g=n)) for n in np.atleast_1d(n_g)])


def check_cutoff(p, rtol=1e-9):
    """ Raise ConvergenceError unless widening the cutoff by 5 leaves omega_c unchanged. """
    base = transition_frequency(p)
    wide = transition_frequency(p.replace(cutoff=p.cutoff + 5))
    if abs(wide - base) > rtol * abs(wide):
        raise ConvergenceError(
            f"omega_c not converged at cutoff {p.cutoff}: {base!r} vs {wide!r} at {p.cutoff + 5}"
        )
    return base


def _finite_difference(p):
    plus = transition_frequency(p.replace(n_g=p.n_g + FD_STEP))
    minus = transition_frequency(p.replace(n_g=p.n_g - FD_STEP))
    return (plus - minus) / (2.0 * FD_STEP)


def _hellmann_feynman(p):
    charges, diag, off = _tridiagonal(p)
    levels, vectors = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 2))
    gaps = np.diff(levels)
    scale = max(p.E_C, p.E_J)
    if np.any(gaps < DEGENERACY_TOL * scale):
        return None
    # dE_k/dn_g = <8 E_C (n_g - n)>_k
    slopes = [8.0 * p.E_C * (vectors[:, k] ** 2 @ (p.n_g - charges)) for k in (0, 1)]
    return slopes[1] - slopes[0]


def charge_dispersion_sensitivity(p, method="hellmann-feynman"):
    """ Returns d(omega_c)/d(n_g) in Grad/s at p.n_g.

    method "hellmann-feynman" falls back to the finite difference when the
    lowest levels are near-degenerate; "finite-difference" always uses it.
    """
    if method == "finite-difference":
        slope = _finite_difference(p)
    elif method == "hellmann-feynman":
        slope = _hellmann_feynman(p)
        if slope is None:
            logger.warning("Near-degenerate levels at n_g = %s; using finite difference.", p.n_g)
            slope = _finite_difference(p)
    else:
        raise ParameterDomainError(f"unknown sensitivity method {method!r}")
    return ocs.TWO_PI * slope


def parity_split(p, n_g=None):
    """ Returns omega_c(n_g) - omega_c(n_g + 0.5) in h*GHz. """
    n = p.n_g if n_g is None else n_g
    return transition_frequency(p.replace(n_g=n)) - transition_frequency(p.replace(n_g=n + 0.5))


def parity_aware_bias(p, target_split=1.0):
    """ Returns the DC bias n_g0 in (0, 0.5) whose parity partner n_g0 + 0.5 is
    detuned by target_split (h*GHz), picking the root with the larger slope.
    """
    max_split = parity_split(p, 0.0)
    logger.debug("max_split =\n%s", max_split)
    if target_split < 0 or max_split < target_split:
        raise InfeasibleBiasError(
            f"parity splitting {target_split} GHz not reachable; maximum is {max_split:.6g} GHz",
            max_split=max_split,
        )
    if target_split == 0:
        return 0.25
    # The split is antisymmetric about n_g = 0.25 and monotone on [0, 0.25].
    root = optimize.brentq(
        lambda n: parity_split(p, n) - target_split, 0.0, 0.25, xtol=1e-12, rtol=1e-14
    )
    slope_here = abs(charge_dispersion_sensitivity(p.replace(n_g=root)))
    slope_partner = abs(charge_dispersion_sensitivity(p.replace(n_g=root + 0.5)))
    n_g0 = root if slope_here >= slope_partner else 0.5 - root
    logger.debug("n_g0 =\n%s", n_g0)
    return n_g0
