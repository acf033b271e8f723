""" Drive pulses: the off-resonant CZ, the two-stage GaMAM CPhase and the DD sequence.

Frequencies are in rad/ns and times in ns. A pulse is a list of segments
(t0, t1, envelope) on its local time [0, t_g]; each envelope maps local times
to complex Omega(t) = Omega_x + i Omega_y.
"""
import logging
import warnings

import numpy as np
from scipy import integrate, optimize

import ocscz.propagator as prop
from ocscz.exceptions import (
    DegenerateLadderError,
    IntegrationError,
    ParameterDomainError,
    PhaseInfeasibleError,
    SynthesisError,
)


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

SOFT_START = 1e-3
MAGNUS_TOL = 1e-6
PHASE_TOL = 1e-4
SQRT_CZ_TG_FACTOR = 16.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(256)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_XX = np.kron(SIGMA_X, SIGMA_X)
CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
SQRT_CZ = np.diag([1.0, 1.0, 1.0, 1j])


class GamamParams:
    """ Gaussian multitone envelope: amp (rad/ns), sigma (ns), omega1, omega2 (rad/ns). """

    def __init__(self, amp, sigma, omega1, omega2):
        self.amp = float(amp)
        self.sigma = float(sigma)
        self.omega1 = float(omega1)
        self.omega2 = float(omega2)
        if not self.amp > 0 or not self.sigma > 0:
            raise ParameterDomainError(f"need amp > 0 and sigma > 0, got {self!r}")

    def as_tuple(self):
        return (self.amp, self.sigma, self.omega1, self.omega2)

    def __repr__(self):
        return (
            f"GamamParams(amp={self.amp!r}, sigma={self.sigma!r}, "
            f"omega1={self.omega1!r}, omega2={self.omega2!r})"
        )


class ConstantEnvelope:
    """ Omega(t) = value. """

    def __init__(self, value):
        self.value = complex(value)

    def __call__(self, t):
        return np.full(np.shape(t), self.value, dtype=complex)


class TableEnvelope:
    """ Linear interpolation of sampled complex values. """

    def __init__(self, times, values):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=complex)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.times, self.values.real) + 1j * np.interp(
            t, self.times, self.values.imag
        )


class GamamEnvelope:
    """ phase * Omega_0(t - offset). """

    def __init__(self, params, t_g, offset=0.0, phase=1.0):
        self.params = params
        self.t_g = float(t_g)
        self.offset = float(offset)
        self.phase = complex(phase)

    def __call__(self, t):
        return self.phase * gamam_envelope(self.params, self.t_g, np.asarray(t) - self.offset)


class PulseSpec:
    """ Carrier omega_d, gate time t_g, stage-2 phase theta and a piecewise envelope. """

    def __init__(self, kind, omega_d, t_g, segments, theta=0.0, params=None, magnus_params=None):
        self.kind = kind
        self.omega_d = float(omega_d)
        self.t_g = float(t_g)
        self.segments = list(segments)
        self.theta = float(theta)
        self.params = params
        self.magnus_params = magnus_params

    @classmethod
    def from_table(cls, times, omega_x, omega_y, omega_d, theta=0.0, kind="Custom"):
        """ Pulse linearly interpolated from a sampled table starting at t = 0. """
        times = np.asarray(times, dtype=float)
        values = np.asarray(omega_x, dtype=float) + 1j * np.asarray(omega_y, dtype=float)
        if times.ndim != 1 or times.size < 2 or times[0] != 0 or np.any(np.diff(times) <= 0):
            raise ParameterDomainError("table times must start at 0 and increase")

        envelope = TableEnvelope(times, values)
        return cls(kind, omega_d, times[-1], [(0.0, times[-1], envelope)], theta=theta)

    def envelope(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        slack = 1e-12 * self.t_g
        if np.any(t < -slack) or np.any(t > self.t_g + slack):
            raise ParameterDomainError(f"time outside pulse support [0, {self.t_g}]")
        t = np.clip(t, 0.0, self.t_g)
        out = np.zeros(t.shape, dtype=complex)
        for k, (t0, t1, envelope) in enumerate(self.segments):
            last = k == len(self.segments) - 1
            mask = (t >= t0) & ((t <= t1) if last else (t < t1))
            if np.any(mask):
                out[mask] = envelope(t[mask])
        return out

    def sample(self, n_points):
        """ Returns (times, Omega) on a uniform grid of n_points over [0, t_g]. """
        times = np.linspace(0.0, self.t_g, n_points)
        return times, self.envelope(times)

    @property
    def peak(self):
        return float(np.max(np.abs(self.sample(4001)[1])))

    def __repr__(self):
        return (
            f"PulseSpec(kind={self.kind!r}, omega_d={self.omega_d!r}, t_g={self.t_g!r}, "
            f"theta={self.theta!r})"
        )


def off_resonant_cz(ladder):
    """ Constant drive detuned half a ladder step from |11>: every block closes
    a generalized-Rabi loop at t_g = pi sqrt(6) / delta_omega_c.
    """
    delta = ladder.delta_omega_c
    if delta == 0:
        raise DegenerateLadderError("conditional ladder is degenerate (delta_omega_c = 0)")
    amplitude = np.sqrt(5.0 / 12.0) * delta
    t_g = np.pi * np.sqrt(6.0) / delta
    omega_d = ladder.omega_11 + ladder.sign * delta / 2.0

    logger.debug("t_g =\n%s", t_g)
    return PulseSpec("OffResonantCZ", omega_d, t_g, [(0.0, t_g, ConstantEnvelope(amplitude))])


def _gamam_shape(sigma, omega1, omega2, tau):
    return (
        np.exp(-(tau ** 2) / (2.0 * sigma ** 2))
        * (1.0 - np.cos(omega1 * tau))
        * (1.0 - np.cos(omega2 * tau))
    )


def gamam_envelope(p, t_g, t):
    """ Stage-1 envelope Omega_0(t) on [0, t_g / 2]. """
    t = np.asarray(t, dtype=float)
    slack = 1e-12 * t_g
    if np.any(t < -slack) or np.any(t > t_g / 2.0 + slack):
        raise ParameterDomainError(f"time outside stage-1 support [0, {t_g / 2.0}]")
    return p.amp * _gamam_shape(p.sigma, p.omega1, p.omega2, t - t_g / 4.0)


def soft_start_ratio(p, t_g):
    """ Envelope value at the stage edges relative to its peak. """
    grid = np.linspace(0.0, t_g / 2.0, 2001)
    values = gamam_envelope(p, t_g, grid)
    peak = np.max(values)
    return float(max(values[0], values[-1]) / peak) if peak > 0 else 0.0


def _quad(func, t_end, weight=None, wvar=None):
    kwargs = dict(epsabs=1e-10, epsrel=1e-12, limit=400, full_output=1)
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = integrate.quad(func, 0.0, t_end, **kwargs)
    if len(result) > 3:
        raise IntegrationError(f"adaptive quadrature did not converge: {result[3]}")
    return result[0]


def magnus_residuals(p, t_g, delta_omega_c):
    """ Returns (r0, r1, r2): the stage-1 pulse area minus pi and the envelope
    spectrum at one and two ladder steps, by adaptive quadrature.
    """
    t_end = t_g / 2.0

    def func(t):
        return float(gamam_envelope(p, t_g, t))

    r0 = _quad(func, t_end) - np.pi
    residuals = [r0]
    for k in (1, 2):
        w = k * delta_omega_c
        re = _quad(func, t_end, weight="cos", wvar=w)
        im = -_quad(func, t_end, weight="sin", wvar=w)
        residuals.append(complex(re, im))
    return tuple(residuals)


def _stage_one_spectrum(p, t_g, omegas):
    """ |int Omega_0(t) exp(-i w t) dt| over stage 1 for each w, Gauss-Legendre. """
    t = (t_g / 4.0) * (_GL_NODES + 1.0)
    weights = (t_g / 4.0) * _GL_WEIGHTS
    values = gamam_envelope(p, t_g, t) * weights
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    return np.abs(np.exp(-1j * np.outer(omegas, t)) @ values)


def envelope_spectrum(pulse, omegas, magnus=False):
    """ Stage-1 spectrum of a synthesized GaMAM pulse; magnus selects the
    Magnus-converged parameters instead of the refined ones.
    """
    p = pulse.magnus_params if magnus else pulse.params
    if not isinstance(p, GamamParams):
        raise ParameterDomainError(f"{pulse.kind} pulse has no GaMAM parameters")
    return _stage_one_spectrum(p, pulse.t_g, omegas)


def _normalised(sigma, omega1, omega2, t_g):
    """ GamamParams with amp fixed by a stage-1 area of pi, or None. """
    t = (t_g / 4.0) * (_GL_NODES + 1.0)
    area = (t_g / 4.0) * _GL_WEIGHTS @ _gamam_shape(sigma, omega1, omega2, t - t_g / 4.0)
    if not sigma > 0 or not area > 0:
        return None
    return GamamParams(np.pi / area, sigma, omega1, omega2)


def _soft_start_penalty(p, t_g):
    return max(0.0, soft_start_ratio(p, t_g) - SOFT_START) ** 2


def _magnus_objective(x, t_g, delta):
    p = _normalised(x[0], x[1], x[2], t_g)
    if p is None:
        return 1e3
    spectrum = _stage_one_spectrum(p, t_g, [delta, 2.0 * delta])
    return float(spectrum @ spectrum) / np.pi ** 2 + _soft_start_penalty(p, t_g)


def _stage_one(ladder, p, t_g, omega_d, samples_per_period):
    pulse = PulseSpec("GaMAM", omega_d, t_g / 2.0, [(0.0, t_g / 2.0, GamamEnvelope(p, t_g))])
    return prop.evolve_unitary(
        ladder, pulse, samples_per_period=samples_per_period, snapshots=False
    ).final


def _excitation_objective(x, ladder, t_g, omega_d, samples_per_period):
    p = _normalised(x[0], x[1], x[2], t_g)
    if p is None:
        return 1e3
    blocks = _stage_one(ladder, p, t_g, omega_d, samples_per_period)
    excited = np.abs(blocks[:, 1, 0]) ** 2
    # |11> must invert, the rest must return.
    return float(excited[0] + excited[1] + excited[2] + (1.0 - excited[3])) + _soft_start_penalty(
        p, t_g
    )


def _restart_seed(index, seed, t_g, delta):
    base = np.array([t_g / 10.0, 2.9 * delta, 3.1 * delta])
    if index == 0:
        return base
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    return base * np.exp(rng.normal(0.0, 0.15, size=3))


def solve_magnus(delta_omega_c, t_g, restarts=20, seed=0, tol=MAGNUS_TOL):
    """ Simplex search for GamamParams whose first-order Magnus residuals vanish. """
    best = None
    for index in range(restarts):
        x0 = _restart_seed(index, seed, t_g, delta_omega_c)
        result = optimize.minimize(
            _magnus_objective,
            x0,
            args=(t_g, delta_omega_c),
            method="Nelder-Mead",
            options=dict(xatol=1e-12, fatol=1e-24, maxiter=6000, maxfev=12000),
        )
        p = _normalised(*result.x, t_g)
        if p is None:
            continue
        logger.debug("restart %d objective =\n%s", index, result.fun)
        if best is None or result.fun < best[0]:
            best = (result.fun, p)
        if result.fun < (tol / np.pi) ** 2 and soft_start_ratio(p, t_g) <= SOFT_START:
            break
    if best is None:
        raise SynthesisError("no restart produced a valid envelope")
    p = best[1]
    residuals = magnus_residuals(p, t_g, delta_omega_c)
    if max(abs(r) for r in residuals) >= tol:
        raise SynthesisError(
            f"Magnus residuals {residuals} above {tol}", residuals=residuals, params=p
        )
    ratio = soft_start_ratio(p, t_g)
    if ratio > SOFT_START:
        logger.warning("GaMAM envelope edges at %.3g of peak; soft start not met.", ratio)
    return p


def refine_excitation(ladder, p, t_g, omega_d, samples_per_period=prop.SAMPLES_PER_PERIOD):
    """ Simplex search from p on the propagated stage-1 excitation of all blocks. """
    x0 = np.array([p.sigma, p.omega1, p.omega2])
    result = optimize.minimize(
        _excitation_objective,
        x0,
        args=(ladder, t_g, omega_d, samples_per_period),
        method="Nelder-Mead",
        options=dict(xatol=1e-12, fatol=1e-16, maxiter=4000, maxfev=8000),
    )
    refined = _normalised(*result.x, t_g)
    logger.debug("refined objective =\n%s", result.fun)
    if refined is None or result.fun > _excitation_objective(
        x0, ladder, t_g, omega_d, samples_per_period
    ):
        return p
    return refined


def _two_stage_blocks(stage_one, theta):
    """ Full-gate blocks R U1 R^dag U1 with R = diag(exp(i theta/2), exp(-i theta/2)). """
    rot = np.diag([np.exp(0.5j * theta), np.exp(-0.5j * theta)])
    return rot @ stage_one @ np.conj(rot.T) @ stage_one


def _phase_of(stage_one, theta):
    blocks = _two_stage_blocks(stage_one, theta)
    t00, t01, t10, t11 = np.angle(blocks[:, 0, 0])
    return (t11 - t10) - (t01 - t00)


def solve_theta(stage_one, theta_target, n_scan=129):
    """ Stage-2 phase Theta whose full gate has conditional phase theta_target. """

    def mismatch(theta):
        return float(prop.wrap_phase(_phase_of(stage_one, theta) - theta_target))

    grid = np.linspace(-np.pi, np.pi, n_scan)
    values = np.array([mismatch(x) for x in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0 and abs(fa) < np.pi / 2 and abs(fb) < np.pi / 2:
            roots.append(optimize.brentq(mismatch, a, b, xtol=1e-14, rtol=1e-15))
    if not roots:
        raise PhaseInfeasibleError(f"no stage-2 phase reaches theta = {theta_target}")

    def leakage(theta):
        return float(np.sum(np.abs(_two_stage_blocks(stage_one, theta)[:, 1, 0]) ** 2))

    best = min(roots, key=leakage)
    if abs(mismatch(best)) > PHASE_TOL:
        raise PhaseInfeasibleError(f"stage-2 phase {best} misses theta by {mismatch(best):.3g}")
    return best


def synthesize_cphase(
    ladder,
    theta_target,
    t_g=None,
    restarts=20,
    seed=0,
    refine=True,
    samples_per_period=prop.SAMPLES_PER_PERIOD,
):
    """ Resonant two-stage GaMAM pulse with conditional phase theta_target.

    The envelope first solves the Magnus conditions (kept as magnus_params),
    is then refined on the propagated stage-1 populations, and finally Theta
    is solved on the propagated conditional phase.
    """
    delta = ladder.delta_omega_c
    if delta == 0:
        raise DegenerateLadderError("conditional ladder is degenerate (delta_omega_c = 0)")
    t_g = SQRT_CZ_TG_FACTOR / delta if t_g is None else float(t_g)
    omega_d = ladder.omega_11

    magnus = solve_magnus(delta, t_g, restarts=restarts, seed=seed)
    params = magnus
    if refine:
        params = refine_excitation(ladder, magnus, t_g, omega_d, samples_per_period)
    stage_one = _stage_one(ladder, params, t_g, omega_d, samples_per_period)
    logger.debug("stage-1 excitation =\n%s", np.abs(stage_one[:, 1, 0]) ** 2)
    theta = solve_theta(stage_one, theta_target)

    half = t_g / 2.0
    first = GamamEnvelope(params, t_g)
    second = GamamEnvelope(params, t_g, offset=half, phase=np.exp(1j * theta))
    logger.info("Finished synthesis.")
    return PulseSpec(
        "GaMAM",
        omega_d,
        t_g,
        [(0.0, half, first), (half, t_g, second)],
        theta=theta,
        params=params,
        magnus_params=magnus,
    )


def is_unitary(matrix, atol=1e-8):
    matrix = np.asarray(matrix, dtype=complex)
    return np.allclose(np.conj(matrix.T) @ matrix, np.eye(matrix.shape[0]), atol=atol)


def dd_cz_compose(sqrt_cz_unitary):
    """ sigma_xx U sigma_xx U for a 4x4 two-qubit unitary U. """
    u = np.asarray(sqrt_cz_unitary, dtype=complex)
    if u.shape != (4, 4) or not is_unitary(u):
        raise ParameterDomainError("dd_cz_compose needs a 4x4 unitary")
    return SIGMA_XX @ u @ SIGMA_XX @ u


def dd_sequence(sqrt_cz_pulse):
    """ Alternating sqrt(CZ) pulses and ideal X gates on both qubits. """
    return [sqrt_cz_pulse, SIGMA_XX, sqrt_cz_pulse, SIGMA_XX]


def scheme_sequence(
    ladder, scheme, restarts=20, seed=0, t_g_factor=SQRT_CZ_TG_FACTOR, refine=True
):
    """ The gate items of a CZ by "offres" or "dd". """
    if scheme == "offres":
        return [off_resonant_cz(ladder)]
    if scheme == "dd":
        t_g = t_g_factor / ladder.delta_omega_c if ladder.delta_omega_c else None
        sqrt_cz = synthesize_cphase(
            ladder, np.pi / 2.0, t_g=t_g, restarts=restarts, seed=seed, refine=refine
        )
        return dd_sequence(sqrt_cz)
    raise ParameterDomainError(f"unknown scheme {scheme!r}")
