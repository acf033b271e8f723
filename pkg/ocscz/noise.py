""" 1/f^beta charge noise: spectra, analytic qubit dephasing, the second-order
cumulant solver for coupler dephasing and a Monte-Carlo trajectory oracle.

Spectral densities are double sided, S[w] = A_w (2 pi)^beta / |w|^beta, with
A_w in rad^2/s^2 and w in rad/s. Autocorrelations S(t) come back in rad^2/s^2
for t in seconds; the solvers work in ns.
"""
import logging
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import integrate, special

import ocscz.propagator as prop
import ocscz.settings as ocs
from ocscz.exceptions import (
    FormulaDomainError,
    IntegrationError,
    ParameterDomainError,
    UnitError,
    UnsupportedAnalyticError,
)


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

QubitInfidelity = namedtuple("QubitInfidelity", ["per_qubit", "total"])
QubitMonteCarlo = namedtuple("QubitMonteCarlo", ["per_qubit", "total", "stderr", "coherence"])
MonteCarloResult = namedtuple("MonteCarloResult", ["rho", "batches"])

BETA_RANGE = (0.6, 1.4)
PIVOT_HZ = 1e7
COMPONENTS_PER_DECADE = 20
KERNEL_CHUNK = 256
POSITIVITY_TOL = 1e-3
TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-12
NS = 1e-9
# Excited coupler level of every block, basis |00g>, |00e>, ..., |11e>.
P_E = np.diag([0.0, 1.0] * 4).astype(complex)


class NoiseSpec:
    """ Double-sided 1/f^beta spectrum of one noise source.

    A is the amplitude at 1 Hz in the source's own units: ueV^2/Hz on eps_m for
    kind "qubit", (1e-3 e)^2/Hz on the coupler gate charge for kind "coupler".
    omega_l and omega_h are the angular cutoffs in rad/s.
    """

    def __init__(
        self,
        A,
        beta=1.0,
        omega_l=ocs.TWO_PI * 1e4,
        omega_h=ocs.TWO_PI * 1e11,
        kind="qubit",
        rate_convention="hz",
    ):
        self.A = float(A)
        self.beta = float(beta)
        self.omega_l = float(omega_l)
        self.omega_h = float(omega_h)
        self.kind = kind
        self.rate_convention = rate_convention
        if not np.isfinite(self.A) or self.A < 0:
            raise ParameterDomainError(f"noise amplitude must be >= 0, got {self.A}")
        if not BETA_RANGE[0] <= self.beta <= BETA_RANGE[1]:
            raise ParameterDomainError(f"beta must lie in {BETA_RANGE}, got {self.beta}")
        if not 0 < self.omega_l < self.omega_h:
            raise ParameterDomainError(f"need 0 < omega_l < omega_h, got {self!r}")
        if kind not in ("qubit", "coupler"):
            raise UnitError(f"unknown noise kind {kind!r}")
        if rate_convention not in ("hz", "angular"):
            raise ParameterDomainError(f"unknown rate convention {rate_convention!r}")

    @classmethod
    def qubit_base(cls, ratio=1.0, **kwargs):
        """ ratio times the base eps_m noise of 0.21 ueV^2/Hz. """
        return cls(ratio * ocs.QUBIT_NOISE_BASE, kind="qubit", **kwargs)

    @classmethod
    def coupler_base(cls, ratio=1.0, **kwargs):
        """ ratio times the base gate-charge noise of 0.5 (1e-3 e)^2/Hz. """
        return cls(ratio * ocs.COUPLER_NOISE_BASE, kind="coupler", **kwargs)

    def replace(self, **kwargs):
        fields = dict(
            A=self.A,
            beta=self.beta,
            omega_l=self.omega_l,
            omega_h=self.omega_h,
            kind=self.kind,
            rate_convention=self.rate_convention,
        )
        fields.update(kwargs)
        return NoiseSpec(**fields)

    def __repr__(self):
        return (
            f"NoiseSpec(A={self.A!r}, beta={self.beta!r}, omega_l={self.omega_l!r}, "
            f"omega_h={self.omega_h!r}, kind={self.kind!r})"
        )


def pivot_amplitude(A, beta, f_pivot=PIVOT_HZ):
    """ Amplitude at 1 Hz giving the beta = 1 power at f_pivot. """
    return A * f_pivot ** (beta - 1.0)


def _energy_rate(spec):
    """ s^-1 per ueV under spec.rate_convention (h or hbar). """
    rate = ocs.GHZ_PER_UEV * 1e9
    return rate if spec.rate_convention == "hz" else ocs.TWO_PI * rate


def frequency_noise_power(spec, sensitivity, kind):
    """ A_w of the frequency noise in rad^2/s^2.

    qubit: sensitivity is d(omega_q)/d(eps_m), dimensionless.
    coupler: sensitivity is d(omega_c)/d(n_g) in rad/ns.
    """
    if kind != spec.kind:
        raise UnitError(f"{spec.kind} noise passed as {kind}")
    if kind == "qubit":
        return sensitivity ** 2 * spec.A * _energy_rate(spec) ** 2
    # n_g counts pairs, the amplitude counts 1e-3 e.
    charge = ocs.COUPLER_CHARGE_UNIT / 2.0
    return (sensitivity / NS) ** 2 * spec.A * charge ** 2


def qubit_dephasing_rate(a_omega, dd, t, omega_l=ocs.TWO_PI * 1e4):
    """ Gamma_2 in 1/ns after t ns, with or without the echo. """
    if dd:
        return np.sqrt(a_omega * np.log(2.0)) * NS
    x = omega_l * t * NS
    if x >= 1:
        raise FormulaDomainError(f"omega_l t = {x:.3g} >= 1")
    return np.sqrt(a_omega * np.log(1.0 / x)) * NS


def _sqrt_log_average(x):
    """ Time average of sqrt(ln(1 / omega_l t)) over (0, t_g], x = omega_l t_g. """
    if x >= 1:
        raise FormulaDomainError(f"omega_l t_g = {x:.3g} >= 1")
    log = np.log(1.0 / x)
    value, _ = integrate.quad(lambda s: np.sqrt(log + s) * np.exp(-s), 0.0, np.inf)
    return value


def _coupler_rate(alpha, coupler_sensitivity):
    scale = alpha * coupler_sensitivity / NS
    if scale == 0:
        raise ParameterDomainError("qubit infidelity needs alpha * d(omega_c)/d(n_g) != 0")
    return scale


def qubit_infidelity(spec, alpha, coupler_sensitivity, scheme, t_g=None, t_g_factor=16.0):
    """ Summed and per-qubit dephasing infidelity of the two RX qubits.

    offres needs the gate time t_g (ns) for the time-averaged logarithm. dd
    integrates over two sqrt(CZ) gates of t_g_factor / delta_omega_c each.
    """
    if spec.kind != "qubit":
        raise UnitError(f"{spec.kind} noise passed as qubit noise")
    if spec.beta != 1.0:
        raise UnsupportedAnalyticError(f"closed forms need beta = 1, got {spec.beta}")
    a_rate = spec.A * _energy_rate(spec) ** 2
    scale = _coupler_rate(alpha, coupler_sensitivity)
    if scheme == "offres":
        if t_g is None:
            raise ParameterDomainError("offres infidelity needs the gate time")
        average = _sqrt_log_average(spec.omega_l * t_g * NS)
        total = (96.0 * np.pi ** 2 / 5.0) * a_rate / scale ** 2 * average ** 2
    elif scheme == "dd":
        # 16384 / 5 at the default factor of 16.
        total = (64.0 / 5.0) * t_g_factor ** 2 * a_rate / scale ** 2 * np.log(2.0)
    else:
        raise ParameterDomainError(f"unknown scheme {scheme!r}")
    return QubitInfidelity(total / 2.0, total)


def spectral_density(spec, a_omega, omega):
    omega = np.abs(np.asarray(omega, dtype=float))
    return a_omega * ocs.TWO_PI ** spec.beta / omega ** spec.beta


def _band_integral(spec, a_omega):
    """ S(0) = 2 int S[w] dw / 2 pi over the band. """
    if spec.beta == 1.0:
        return 2.0 * a_omega * np.log(spec.omega_h / spec.omega_l)
    power = 1.0 - spec.beta
    span = (spec.omega_h ** power - spec.omega_l ** power) / power
    return a_omega * ocs.TWO_PI ** spec.beta * span / np.pi


def _decades(spec):
    edges = np.geomspace(
        spec.omega_l, spec.omega_h, int(np.ceil(np.log10(spec.omega_h / spec.omega_l))) + 1
    )
    return list(zip(edges[:-1], edges[1:]))


def _quad_autocorrelation(spec, a_omega, t):
    if t == 0:
        return _band_integral(spec, a_omega)
    total = 0.0
    for lo, hi in _decades(spec):
        value, _ = integrate.quad(
            lambda w: w ** -spec.beta, lo, hi, weight="cos", wvar=t, limit=400
        )
        total += value
    return a_omega * ocs.TWO_PI ** spec.beta * total / np.pi


def autocorrelation(spec, a_omega=None):
    """ Returns S(t) for t >= 0 in seconds, rad^2/s^2.

    beta = 1 uses the cosine integral of the band-limited spectrum,
    2 A_w (Ci(omega_h t) - Ci(omega_l t)), which tends to -2 A_w Ci(omega_l t)
    once omega_h t >> 1; t = 0 takes the band integral. Other exponents
    integrate the spectrum. a_omega defaults to spec.A taken as an angular
    amplitude.
    """
    a = spec.A if a_omega is None else a_omega
    if spec.beta != 1.0:
        return np.vectorize(lambda t: _quad_autocorrelation(spec, a, float(t)), otypes=[float])

    def evaluate(t):
        t = np.abs(np.asarray(t, dtype=float))
        out = np.full(t.shape, _band_integral(spec, a))
        positive = t > 0
        if np.any(positive):
            ci_high = special.sici(spec.omega_h * t[positive])[1]
            ci_low = special.sici(spec.omega_l * t[positive])[1]
            out[positive] = 2.0 * a * (ci_high - ci_low)
        return out

    return evaluate


def _kernel(spec, a_omega, t_max):
    """ Autocorrelation in rad^2/ns^2 over lags up to t_max ns. """
    correlation = autocorrelation(spec, a_omega)
    if spec.beta == 1.0:
        return lambda lag: correlation(np.asarray(lag) * NS) * NS ** 2
    table_t = np.linspace(0.0, t_max, 2049)
    table = correlation(table_t * NS) * NS ** 2
    return lambda lag: np.interp(lag, table_t, table)


def dephasing_exponent(spec, a_omega, t):
    """ chi(t) = int_0^t int_0^t' S(t' - t1) dt1 dt' = <phi^2> / 2 after t ns. """
    ts = np.atleast_1d(np.asarray(t, dtype=float)) * NS
    prefactor = 2.0 * a_omega * ocs.TWO_PI ** spec.beta / ocs.TWO_PI
    out = []
    for time in ts:
        if time == 0:
            out.append(0.0)
            continue
        split = min(spec.omega_h, 10.0 / time)
        # 2 (1 - cos wt) / w^(beta + 2), in log w below the split.
        low, _ = integrate.quad(
            lambda u: 4.0 * np.sin(np.exp(u) * time / 2.0) ** 2 * np.exp(-(spec.beta + 1.0) * u),
            np.log(spec.omega_l),
            np.log(split),
            limit=400,
        )
        high = 0.0
        if split < spec.omega_h:
            power = -(spec.beta + 1.0)
            smooth = 2.0 * (spec.omega_h ** power - split ** power) / power
            oscillating, _ = integrate.quad(
                lambda w: 2.0 * w ** -(spec.beta + 2.0), split, spec.omega_h,
                weight="cos", wvar=time, limit=400,
            )  # fmt: skip
            high = smooth - oscillating
        out.append(0.5 * prefactor * (low + high))
    out = np.array(out)
    return out if np.ndim(t) else float(out[0])


def noise_components(spec, a_omega, omega_max=None):
    """ Log-spaced sinusoid frequencies (rad/s) and amplitudes (rad/s) whose sum
    reproduces the double-sided autocorrelation.
    """
    top = spec.omega_h if omega_max is None else min(spec.omega_h, omega_max)
    if top <= spec.omega_l:
        raise ParameterDomainError("noise band is empty below the sampling limit")
    n = max(int(np.ceil(COMPONENTS_PER_DECADE * np.log10(top / spec.omega_l))), 1)
    edges = np.geomspace(spec.omega_l, top, n + 1)
    omegas = np.sqrt(edges[:-1] * edges[1:])
    power = spectral_density(spec, a_omega, omegas) * np.diff(edges) / ocs.TWO_PI
    amplitudes = np.sqrt(4.0 * power)
    return omegas, amplitudes


def noise_realisation(omegas, amplitudes, rng, batch):
    """ Returns zeta(times) -> sum_k a_k cos(w_k t + phi_k), shape (batch, len(times)),
    with the random phases fixed at creation. Units follow the inputs.
    """
    phases = rng.uniform(0.0, ocs.TWO_PI, size=(batch, omegas.size))
    cos_part = amplitudes * np.cos(phases)
    sin_part = amplitudes * np.sin(phases)

    def zeta(times):
        arg = np.outer(np.asarray(times, dtype=float), omegas)
        return cos_part @ np.cos(arg).T - sin_part @ np.sin(arg).T

    return zeta


def _generators(seed, n_batches):
    children = np.random.SeedSequence(seed).spawn(n_batches)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _batch_sizes(n_traj, batch_size):
    full, rest = divmod(n_traj, batch_size)
    return [batch_size] * full + ([rest] if rest else [])


def _map(func, jobs, workers):
    if workers <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, jobs))


def _qubit_batch(job):
    omegas, amplitudes, duration, dd, rng, batch = job
    phases = rng.uniform(0.0, ocs.TWO_PI, size=(batch, omegas.size))
    # product forms; the differences of sines cancel for omega * t << 1
    if dd:
        half = duration / 2.0
        shape = 4.0 * np.sin(omegas * half / 2.0) ** 2 * np.sin(omegas * half + phases)
    else:
        shape = 2.0 * np.cos(omegas * duration / 2.0 + phases) * np.sin(omegas * duration / 2.0)
    phi = shape @ (amplitudes / omegas)
    return float(np.mean(np.cos(phi)))


def qubit_infidelity_mc(
    spec, sensitivity, t_g, dd=False, n_traj=1000, seed=0, batch_size=100, workers=1
):
    """ Monte-Carlo qubit dephasing over t_g ns of RX operation.

    The phase is the integral of the sampled frequency noise, sign-flipped
    at t_g / 2 under the echo. Each qubit loses (2/5)(1 - coherence).
    """
    if n_traj < 100:
        raise ParameterDomainError(f"need at least 100 trajectories, got {n_traj}")
    a_omega = frequency_noise_power(spec, sensitivity, "qubit")
    omegas, amplitudes = noise_components(spec, a_omega)
    duration = t_g * NS
    sizes = _batch_sizes(n_traj, batch_size)
    jobs = [
        (omegas, amplitudes, duration, dd, rng, size)
        for rng, size in zip(_generators(seed, len(sizes)), sizes)
    ]
    coherences = np.array(_map(_qubit_batch, jobs, workers))
    weights = np.array(sizes, dtype=float)
    coherence = float(weights @ coherences / weights.sum())
    per_batch = 0.4 * (1.0 - coherences)
    stderr = float(np.std(per_batch, ddof=1) / np.sqrt(len(sizes))) if len(sizes) > 1 else 0.0
    per_qubit = 0.4 * (1.0 - coherence)
    logger.debug("coherence =\n%s", coherence)
    return QubitMonteCarlo(per_qubit, 2.0 * per_qubit, stderr, coherence)


def check_density_matrix(rho, trace_tol=TRACE_TOL, hermitian_tol=HERMITIAN_TOL):
    """ Raise unless rho (or a batch) is Hermitian with unit trace; warn on negativity. """
    rho = np.asarray(rho, dtype=complex)
    traces = np.trace(rho, axis1=-2, axis2=-1)
    if np.any(np.abs(traces - 1.0) > trace_tol):
        off = np.max(np.abs(traces - 1.0))
        raise ParameterDomainError(f"density matrix trace off by {off:.3g}")
    skew = np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))))
    if skew > hermitian_tol:
        raise ParameterDomainError(f"density matrix not Hermitian ({skew:.3g})")
    lowest = float(np.min(np.linalg.eigvalsh(rho)))
    if lowest < -POSITIVITY_TOL:
        logger.warning("Density matrix eigenvalue %.3g below zero.", lowest)
    return lowest


def _items(pulse):
    return list(pulse) if isinstance(pulse, (list, tuple)) else [pulse]


def _pair_indices(evolution):
    """ Start indices of RK4 double steps; every segment holds an even step count. """
    starts = []
    first = 0
    for segment in evolution.segments:
        if segment.steps % 2:
            raise IntegrationError("cumulant stepping needs an even step count per segment")
        starts.extend(range(first, first + segment.steps, 2))
        first += segment.steps
    return np.array(starts, dtype=int)


def _averaged_operators(t_grid, v, kernel):
    """ V_avg(t_i) = int_0^t_i S(t_i - t1) V(t1) dt1 by the trapezoid rule. """
    n = t_grid.size
    dt = np.diff(t_grid)
    left = np.concatenate([dt, [0.0]]) / 2.0
    right = np.concatenate([[0.0], dt]) / 2.0
    cols = np.arange(n)
    flat = v.reshape(n, -1)
    out = np.empty_like(flat)
    for first in range(0, n, KERNEL_CHUNK):
        rows = np.arange(first, min(first + KERNEL_CHUNK, n))
        weights = left[None, :] * (cols[None, :] < rows[:, None]) + right[None, :] * (
            (cols[None, :] >= 1) & (cols[None, :] <= rows[:, None])
        )
        lags = np.clip(t_grid[rows][:, None] - t_grid[None, :], 0.0, None)
        out[rows] = (weights * kernel(lags)) @ flat
    return out.reshape(v.shape)


def _drift(v, v_avg, rho):
    inner = v_avg @ rho - rho @ v_avg
    return -(v @ inner - inner @ v)


def cumulant_evolve(
    ladder,
    pulse,
    spec_coupler,
    rho0,
    a_omega=None,
    samples_per_period=prop.SAMPLES_PER_PERIOD,
    steps=None,
    evolution=None,
):
    """ Second-order cumulant evolution of rho0 under coupler frequency noise.

    pulse is a PulseSpec or a gate sequence. rho0 is 8x8 or a batch (B, 8, 8)
    in the rotating frame; the result has the same shape. In the interaction
    picture d(rho)/dt = -[V, [V_avg, rho]] with V = U0^dag P_e U0, stepped with
    RK4 over pairs of grid intervals so the midpoint reuses a grid snapshot.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    single = rho0.ndim == 2
    rho = rho0[None] if single else rho0.copy()
    check_density_matrix(rho)
    if evolution is None:
        evolution = prop.evolve_sequence(ladder, _items(pulse), samples_per_period, steps)
    if a_omega is None:
        a_omega = frequency_noise_power(spec_coupler, ladder.sensitivity, "coupler")

    t_grid = evolution.t_grid
    u0 = evolution.snapshots
    final = evolution.final
    if a_omega > 0:
        v = np.conj(np.swapaxes(u0, -1, -2)) @ P_E @ u0
        v_avg = _averaged_operators(t_grid, v, _kernel(spec_coupler, a_omega, t_grid[-1]))
        for k in _pair_indices(evolution):
            step = t_grid[k + 2] - t_grid[k]
            k1 = _drift(v[k], v_avg[k], rho)
            k2 = _drift(v[k + 1], v_avg[k + 1], rho + 0.5 * step * k1)
            k3 = _drift(v[k + 1], v_avg[k + 1], rho + 0.5 * step * k2)
            k4 = _drift(v[k + 2], v_avg[k + 2], rho + step * k3)
            rho = rho + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    out = final @ rho @ np.conj(final.T)
    lowest = float(np.min(np.linalg.eigvalsh(out)))
    if lowest < -POSITIVITY_TOL:
        logger.warning("Density matrix eigenvalue %.3g below zero.", lowest)
    logger.info("Finished cumulant evolution.")
    return out[0] if single else out


def _mc_batch(job):
    ladder, items, omegas, amplitudes, rho0, rng, batch, samples_per_period, steps = job
    zeta = noise_realisation(omegas, amplitudes, rng, batch)
    finals = prop.evolve_noisy(ladder, items, zeta, batch, samples_per_period, steps)
    rho = np.einsum("bij,njk,blk->nil", finals, rho0, np.conj(finals), optimize=True)
    return rho / batch


def mc_dephasing_oracle(
    ladder,
    pulse,
    spec,
    rho0,
    n_traj=1000,
    seed=0,
    a_omega=None,
    batch_size=50,
    workers=1,
    samples_per_period=prop.SAMPLES_PER_PERIOD,
    steps=None,
):
    """ Average of unitary evolutions under sampled coupler frequency noise.

    Noise components above a quarter of the integration sampling rate are
    dropped. Batches draw from spawned Philox streams, so the result does not
    depend on the worker count. Returns MonteCarloResult(rho, batches).
    """
    if n_traj < 100:
        raise ParameterDomainError(f"need at least 100 trajectories, got {n_traj}")
    rho0 = np.asarray(rho0, dtype=complex)
    single = rho0.ndim == 2
    inputs = rho0[None] if single else rho0
    items = _items(pulse)
    if a_omega is None:
        a_omega = frequency_noise_power(spec, ladder.sensitivity, "coupler")

    layout, _ = prop.plan(ladder, items, samples_per_period, steps)
    h_min = min((s.t1 - s.t0) / s.steps for s in layout if isinstance(s, prop.Segment))
    # Nodes sit h / 2 apart; a quarter of that rate is pi / h.
    omegas, amplitudes = noise_components(spec, a_omega, omega_max=np.pi / (h_min * NS))
    omegas = omegas * NS
    amplitudes = amplitudes * NS

    sizes = _batch_sizes(n_traj, batch_size)
    jobs = [
        (ladder, items, omegas, amplitudes, inputs, rng, size, samples_per_period, steps)
        for rng, size in zip(_generators(seed, len(sizes)), sizes)
    ]
    batches = np.array(_map(_mc_batch, jobs, workers))
    weights = np.array(sizes, dtype=float)
    rho = np.tensordot(weights / weights.sum(), batches, axes=1)
    logger.info("Finished Monte-Carlo oracle.")
    if single:
        return MonteCarloResult(rho[0], batches[:, 0])
    return MonteCarloResult(rho, batches)
