import numpy as np
import pytest

import context  # noqa: F401
import ocscz.propagator as prop
import ocscz.pulses as pulses
from ocscz.exceptions import LeakageError, ParameterDomainError


@pytest.fixture(scope="module")
def offres(base_ladder):
    return pulses.off_resonant_cz(base_ladder)


@pytest.fixture(scope="module")
def evolution(base_ladder, offres):
    return prop.evolve_unitary(base_ladder, offres)


def test_wrap_phase():
    assert prop.wrap_phase(3.0 * np.pi) == pytest.approx(np.pi)
    assert prop.wrap_phase(-np.pi) == pytest.approx(np.pi)
    assert prop.wrap_phase(-0.5) == pytest.approx(-0.5)


def test_unitary(evolution):
    assert evolution.unitarity_defect() < 1e-8
    assert evolution.snapshots.shape[1:] == (4, 2, 2)
    assert evolution.t_grid[0] == 0.0
    assert np.allclose(evolution.snapshots[0], np.eye(2))


def test_offres_cz_phase_and_leakage(evolution):
    phases = prop.conditional_phases(evolution)
    assert abs(prop.wrap_phase(phases.theta - np.pi)) < 1e-3
    assert np.all(prop.block_leakage(evolution) < 1e-4)


def test_step_halving_converged(base_ladder, offres):
    result = prop.evolve_unitary(base_ladder, offres, snapshots=False, check_convergence=True)
    assert result.t_grid.size == 2


def test_fixed_steps_even(base_ladder, offres):
    layout, duration = prop.plan(base_ladder, [offres])
    assert duration == pytest.approx(offres.t_g)
    assert all(segment.steps % 2 == 0 for segment in layout)
    assert all(segment.steps >= prop.MIN_SEGMENT_STEPS for segment in layout)
    assert prop.segment_nodes(layout[0]).size == 2 * layout[0].steps + 1


def test_plan_rejects_bad_gate(base_ladder, offres):
    with pytest.raises(ParameterDomainError):
        prop.plan(base_ladder, [offres, np.eye(2)])


def test_chain_matches_cumulative(base_ladder, offres):
    layout, _ = prop.plan(base_ladder, [offres], steps=50)
    mats = prop.step_matrices(base_ladder, layout[0])
    assert np.allclose(prop.chain(mats), prop.cumulative(mats)[-1], atol=1e-12)


def test_sequence_matches_blocks(base_ladder, offres):
    blocks = prop.evolve_unitary(base_ladder, offres, steps=300)
    sequence = prop.evolve_sequence(base_ladder, [offres], steps=300)
    assert np.allclose(sequence.final, blocks.to_dense(), atol=1e-10)
    assert np.allclose(sequence.blocks(), blocks.final, atol=1e-10)
    assert sequence.t_grid.size == sequence.snapshots.shape[0]


def test_instantaneous_gate_applied(base_ladder, offres):
    plain = prop.evolve_sequence(base_ladder, [offres], steps=300)
    gated = prop.evolve_sequence(base_ladder, [offres, pulses.SIGMA_XX], steps=300)
    expected = np.kron(pulses.SIGMA_XX, np.eye(2)) @ plain.final
    assert np.allclose(gated.final, expected)
    assert np.allclose(gated.t_grid, plain.t_grid)


def test_noiseless_batch_matches_sequence(base_ladder, offres):
    sequence = prop.evolve_sequence(base_ladder, [offres], steps=300)
    finals = prop.evolve_noisy(
        base_ladder, [offres], lambda t: np.zeros((3, np.size(t))), 3, steps=300
    )
    assert finals.shape == (3, 8, 8)
    assert np.allclose(finals, sequence.final[None], atol=1e-10)


def test_leakage_error():
    blocks = np.array([np.eye(2), np.eye(2), np.eye(2), pulses.SIGMA_X])
    with pytest.raises(LeakageError) as info:
        prop.conditional_phases(blocks)
    assert info.value.populations[3] == pytest.approx(1.0)


def test_conditional_phase_of_ideal_blocks():
    blocks = np.array([np.diag([np.exp(1j * a), 1.0]) for a in (0.1, 0.3, 0.2, 0.4 + np.pi)])
    theta = prop.conditional_phases(blocks).theta
    assert abs(prop.wrap_phase(theta - np.pi)) < 1e-12


def test_bloch_trajectory(evolution):
    path = prop.bloch_trajectory(evolution, 3)
    assert path.shape == (evolution.t_grid.size, 3)
    assert np.allclose(path[0], [0.0, 0.0, 1.0])
    assert np.allclose(np.linalg.norm(path, axis=1), 1.0, atol=1e-8)
    # |11> sits half a step off resonance and closes its loop.
    assert np.allclose(path[-1], [0.0, 0.0, 1.0], atol=1e-3)
    assert path[:, 2].min() < 0.5
