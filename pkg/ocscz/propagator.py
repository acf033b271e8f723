""" Time-ordered evolution of the block-diagonal driven system.

Each block is integrated with fixed-step fourth-order Runge-Kutta. For the
linear equation dU/dt = -iH(t)U one RK4 step is a fixed 2x2 matrix, so the
steps are built for the whole grid at once and then chained.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy import linalg

import ocscz.hybrid as hyb
import ocscz.settings as ocs
from ocscz.exceptions import IntegrationError, LeakageError, ParameterDomainError


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

SAMPLES_PER_PERIOD = 400
MIN_SEGMENT_STEPS = 250
REFINEMENT_TOL = 1e-7
LEAKAGE_LIMIT = 1e-2
CHUNK = 512

ConditionalPhases = namedtuple(
    "ConditionalPhases", ["theta00", "theta01", "theta10", "theta11", "theta"]
)
# A pulse piece on one grid: absolute start, local support [t0, t1], step count.
Segment = namedtuple("Segment", ["start", "t0", "t1", "steps", "envelope", "omega_d"])

_EYE2 = np.eye(2, dtype=complex)


def wrap_phase(phi):
    """ Wrap to (-pi, pi]. """
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), ocs.TWO_PI)


class BlockUnitary:
    """ Block propagators of |00>, |01>, |10>, |11> on a time grid.

    snapshots has shape (n + 1, 4, 2, 2); snapshots[k] is U(t_grid[k], 0).
    """

    def __init__(self, t_grid, snapshots):
        self.t_grid = np.asarray(t_grid, dtype=float)
        self.snapshots = np.asarray(snapshots, dtype=complex)

    @property
    def final(self):
        return self.snapshots[-1]

    @property
    def blocks(self):
        return self.final

    def to_dense(self, index=-1):
        return linalg.block_diag(*self.snapshots[index])

    def unitarity_defect(self):
        eye = np.eye(2)
        gram = np.conj(np.swapaxes(self.snapshots, -1, -2)) @ self.snapshots
        return float(np.max(np.linalg.norm(gram - eye, ord=2, axis=(-2, -1))))

    def __repr__(self):
        return f"BlockUnitary(steps={self.t_grid.size - 1}, t_end={self.t_grid[-1]!r})"


class SequenceEvolution:
    """ Dense 8x8 propagators of a gate sequence on one global time grid. """

    def __init__(self, t_grid, snapshots, segments):
        self.t_grid = np.asarray(t_grid, dtype=float)
        self.snapshots = np.asarray(snapshots, dtype=complex)
        self.segments = segments

    @property
    def final(self):
        return self.snapshots[-1]

    def blocks(self):
        """ The four diagonal 2x2 blocks of the final propagator. """
        return np.array([self.final[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] for k in range(4)])

    def __repr__(self):
        return f"SequenceEvolution(steps={self.t_grid.size - 1}, t_end={self.t_grid[-1]!r})"


def _blocks_to_dense(blocks):
    """ (..., 4, 2, 2) -> (..., 8, 8). """
    dense = np.zeros(blocks.shape[:-3] + (8, 8), dtype=complex)
    for k in range(4):
        dense[..., 2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = blocks[..., k, :, :]
    return dense


def _segment_steps(ladder, envelope, omega_d, t0, t1, samples_per_period):
    samples = np.linspace(t0, t1, 257)
    peak = float(np.max(np.abs(envelope(samples))))
    detune = float(np.max(np.abs(ladder.block_detunings(omega_d))))
    omega_max = max(peak, ladder.delta_omega_c, detune)
    steps = int(np.ceil(samples_per_period * (t1 - t0) * omega_max / ocs.TWO_PI))
    steps = max(steps, MIN_SEGMENT_STEPS)
    return steps + steps % 2


def plan(ladder, items, samples_per_period=SAMPLES_PER_PERIOD, steps=None):
    """ Lay pulses and instantaneous two-qubit gates out on one time line.

    Returns (plan, duration); plan holds Segment entries and dense 8x8 gates.
    """
    layout = []
    start = 0.0
    for item in items:
        if hasattr(item, "segments"):
            for t0, t1, envelope in item.segments:
                n = steps
                if n is None:
                    n = _segment_steps(ladder, envelope, item.omega_d, t0, t1, samples_per_period)
                layout.append(Segment(start, t0, t1, int(n), envelope, item.omega_d))
            start += item.t_g
        else:
            gate = np.asarray(item, dtype=complex)
            if gate.shape != (4, 4):
                raise ParameterDomainError(f"instantaneous gates must be 4x4, got {gate.shape}")
            layout.append(np.kron(gate, np.eye(2)))
    return layout, start


def segment_nodes(segment):
    """ Absolute times of the RK4 nodes (ends and midpoints), 2 * steps + 1 of them. """
    local = np.linspace(segment.t0, segment.t1, 2 * segment.steps + 1)
    return segment.start + local


def step_matrices(ladder, segment, zeta=None):
    """ RK4 step matrices of one segment.

    zeta, if given, is noise on the coupler excited level at the RK4 nodes,
    shape (B, 2 * steps + 1) in rad/ns; the result then has shape
    (B, steps, 4, 2, 2), otherwise (steps, 4, 2, 2).
    """
    n = segment.steps
    h = (segment.t1 - segment.t0) / n
    local = np.linspace(segment.t0, segment.t1, 2 * n + 1)

    hamil = hyb.assemble_blocks(ladder.block_detunings(segment.omega_d), segment.envelope(local))
    if zeta is not None:
        zeta = np.asarray(zeta, dtype=float)
        hamil = np.broadcast_to(hamil, zeta.shape[:1] + hamil.shape).copy()
        hamil[..., 1, 1] += zeta[:, :, None]
    a = -1j * hamil
    a1 = a[..., 0 : 2 * n : 2, :, :, :]
    a2 = a[..., 1 : 2 * n : 2, :, :, :]
    a3 = a[..., 2 : 2 * n + 1 : 2, :, :, :]
    k1 = a1
    k2 = a2 @ (_EYE2 + 0.5 * h * k1)
    k3 = a2 @ (_EYE2 + 0.5 * h * k2)
    k4 = a3 @ (_EYE2 + h * k3)
    return _EYE2 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def chain(steps_, axis=-4):
    """ Ordered product P[n-1] ... P[1] P[0] along the step axis by pairwise reduction. """
    mats = np.moveaxis(steps_, axis, 0)
    while mats.shape[0] > 1:
        n = mats.shape[0]
        paired = mats[1 : n - n % 2 : 2] @ mats[0 : n - n % 2 : 2]
        mats = np.concatenate([paired, mats[n - 1 :]], axis=0) if n % 2 else paired
    return mats[0]


def cumulative(steps_, initial=None):
    """ Returns [U_0, P_0 U_0, P_1 P_0 U_0, ...] along the leading axis. """
    out = np.empty((steps_.shape[0] + 1,) + steps_.shape[1:], dtype=complex)
    out[0] = np.broadcast_to(_EYE2, steps_.shape[1:]) if initial is None else initial
    for k in range(steps_.shape[0]):
        out[k + 1] = steps_[k] @ out[k]
    return out


def evolve_unitary(
    ladder,
    pulse,
    steps=None,
    samples_per_period=SAMPLES_PER_PERIOD,
    snapshots=True,
    check_convergence=False,
):
    """ Integrate dU/dt = -iH(t)U for the four blocks over the pulse.

    steps fixes the step count of every pulse segment. With check_convergence
    the run is repeated at half the step size and IntegrationError raised if
    the final blocks move by more than 1e-7.
    """
    layout, _ = plan(ladder, [pulse], samples_per_period, steps)
    grids = []
    snaps = []
    current = np.broadcast_to(_EYE2, (4, 2, 2)).copy()
    for segment in layout:
        mats = step_matrices(ladder, segment)
        nodes = segment_nodes(segment)[0::2]
        if snapshots:
            seg_snaps = cumulative(mats, initial=current)
            current = seg_snaps[-1]
            snaps.append(seg_snaps if not snaps else seg_snaps[1:])
            grids.append(nodes if not grids else nodes[1:])
        else:
            current = chain(mats, axis=0) @ current
    if not snapshots:
        grids = [np.array([0.0, pulse.t_g])]
        snaps = [np.array([np.broadcast_to(_EYE2, (4, 2, 2)), current])]
    result = BlockUnitary(np.concatenate(grids), np.concatenate(snaps))

    if check_convergence:
        fine_steps = [2 * segment.steps for segment in layout]
        fine = np.broadcast_to(_EYE2, (4, 2, 2)).copy()
        for segment, n in zip(layout, fine_steps):
            fine = chain(step_matrices(ladder, segment._replace(steps=n)), axis=0) @ fine
        change = float(np.max(np.abs(fine - result.final)))
        logger.debug("refinement change =\n%s", change)
        if change > REFINEMENT_TOL:
            raise IntegrationError(f"halving the step changed the propagator by {change:.3g}")
    return result


def evolve_sequence(ladder, items, samples_per_period=SAMPLES_PER_PERIOD, steps=None):
    """ Propagate pulses and instantaneous 4x4 gates as dense 8x8 snapshots.

    A gate acts at the end of the preceding segment; the grid point there
    holds the post-gate propagator.
    """
    layout, _ = plan(ladder, items, samples_per_period, steps)
    current = np.eye(8, dtype=complex)
    grids = [np.array([0.0])]
    snaps = [current[None]]
    segments = []
    for entry in layout:
        if isinstance(entry, Segment):
            mats = step_matrices(ladder, entry)
            blocks = cumulative(mats)[1:]
            seg_snaps = _blocks_to_dense(blocks) @ current
            grids.append(segment_nodes(entry)[2::2])
            snaps.append(seg_snaps)
            current = seg_snaps[-1]
            segments.append(entry)
        else:
            current = entry @ current
            snaps[-1] = snaps[-1].copy()
            snaps[-1][-1] = current
    return SequenceEvolution(np.concatenate(grids), np.concatenate(snaps), segments)


def evolve_noisy(
    ladder, items, zeta_fn, batch, samples_per_period=SAMPLES_PER_PERIOD, steps=None
):
    """ Final dense propagators of a batch of noise realisations.

    zeta_fn(times) returns coupler-frequency noise of shape (batch, len(times))
    in rad/ns at absolute times. Steps are chained in chunks to bound memory.
    """
    layout, _ = plan(ladder, items, samples_per_period, steps)
    current = np.broadcast_to(np.eye(8, dtype=complex), (batch, 8, 8)).copy()
    for entry in layout:
        if not isinstance(entry, Segment):
            current = entry @ current
            continue
        nodes = segment_nodes(entry)
        h = (entry.t1 - entry.t0) / entry.steps
        blocks = np.broadcast_to(_EYE2, (batch, 4, 2, 2)).copy()
        for first in range(0, entry.steps, CHUNK):
            count = min(CHUNK, entry.steps - first)
            piece = entry._replace(
                t0=entry.t0 + first * h,
                t1=entry.t0 + (first + count) * h,
                steps=count,
            )
            zeta = zeta_fn(nodes[2 * first : 2 * (first + count) + 1])
            mats = step_matrices(ladder, piece, zeta=zeta)
            blocks = chain(mats, axis=1) @ blocks
        current = _blocks_to_dense(blocks) @ current
    return current


def block_leakage(blocks):
    """ Residual coupler excitation |<e|U|g>|^2 of each block. """
    blocks = blocks.final if isinstance(blocks, BlockUnitary) else np.asarray(blocks)
    return np.abs(blocks[:, 1, 0]) ** 2


def conditional_phases(U):
    """ Returns theta_ab = arg <g|U_ab|g> and theta = (t11 - t10) - (t01 - t00) in (-pi, pi]. """
    blocks = U.final if isinstance(U, BlockUnitary) else np.asarray(U)
    populations = block_leakage(blocks)
    if np.any(populations > LEAKAGE_LIMIT):
        raise LeakageError(
            f"residual excitation {populations} above {LEAKAGE_LIMIT}", populations=populations
        )
    t00, t01, t10, t11 = np.angle(blocks[:, 0, 0])
    theta = float(wrap_phase((t11 - t10) - (t01 - t00)))
    return ConditionalPhases(t00, t01, t10, t11, theta)


def bloch_trajectory(snapshots, block):
    """ Returns (n, 3) of <sx>, <sy>, <sz> for the block started in |g>. """
    snaps = snapshots.snapshots if isinstance(snapshots, BlockUnitary) else np.asarray(snapshots)
    psi = snaps[:, block, :, 0]
    a, b = psi[:, 0], psi[:, 1]
    cross = np.conj(a) * b
    return np.column_stack([2.0 * cross.real, 2.0 * cross.imag, np.abs(a) ** 2 - np.abs(b) ** 2])
