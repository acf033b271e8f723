import pathlib

import numpy as np
import pytest

import context  # noqa: F401
import ocscz.sweep as sweep
from ocscz.config import GateConfig, load_config
from ocscz.exceptions import ConfigError


TEST_ROOT = pathlib.Path(__file__).parent.resolve()


@pytest.fixture
def test_config():
    return load_config(str(TEST_ROOT.joinpath("test_config.ini")))


def test_parse_axis():
    axis = sweep.parse_axis("coupling.alpha:0.1:0.4:4:lin")
    assert axis.keys == ("coupling.alpha",)
    assert np.allclose(axis.values(), [0.1, 0.2, 0.3, 0.4])
    ratio = sweep.parse_axis(" noise.ratio : 0.1 : 10 : 3 : LOG ")
    assert ratio.keys == ("noise.qubit_ratio", "noise.coupler_ratio")
    assert np.allclose(ratio.values(), [0.1, 1.0, 10.0])


@pytest.mark.parametrize(
    "text",
    [
        "noise.ratio:0.1:10:5",
        "qubit.bogus:0:1:3:lin",
        "coupling.alpha:low:0.3:3:lin",
        "coupling.alpha:0.1:0.3:2.5:lin",
        "coupling.alpha:0.1:0.3:1:lin",
        "coupling.alpha:0.1:0.3:3:cubic",
        "coupling.alpha:0:0.3:3:log",
    ],
)
def test_parse_axis_rejects(text):
    with pytest.raises(ConfigError):
        sweep.parse_axis(text)


def test_sweep_config_from_file(test_config):
    cfg = sweep.SweepConfig.from_config(test_config)
    assert len(cfg.axes) == 1
    assert cfg.seed == 7
    assert cfg.scheme == "offres"
    assert len(cfg.grid()) == 2
    assert cfg.header()[:3] == ["noise.ratio", "scheme", "F"]
    diff = sweep.SweepConfig.from_config(test_config, difference=True)
    assert diff.header() == ["noise.ratio", "F_offres", "F_dd", "difference"]


def test_sweep_config_validation():
    axis = sweep.parse_axis("coupling.alpha:0.1:0.4:4:lin")
    with pytest.raises(ConfigError):
        sweep.SweepConfig([])
    with pytest.raises(ConfigError):
        sweep.SweepConfig([axis], scheme="echo")
    with pytest.raises(ConfigError):
        sweep.SweepConfig([axis], workers=0)


def test_grid_order():
    cfg = sweep.SweepConfig(
        [
            sweep.parse_axis("coupling.alpha:0.1:0.2:2:lin"),
            sweep.parse_axis("noise.ratio:1:2:2:lin"),
        ]
    )
    assert cfg.grid() == [(0.1, 1.0), (0.1, 2.0), (0.2, 1.0), (0.2, 2.0)]


def test_point_config():
    axes = [sweep.parse_axis("noise.ratio:0.5:2:2:log")]
    overrides = GateConfig(filename=None).as_dict()
    overrides["simulation"]["workers"] = "4"
    config = sweep.point_config(overrides, axes, (2.0,))
    assert config.get_float("noise", "qubit_ratio") == pytest.approx(2.0)
    assert config.get_float("noise", "coupler_ratio") == pytest.approx(2.0)
    assert config.get_int("simulation", "workers") == 1


def test_qubit_map_coarse():
    smap = sweep.qubit_sensitivity_map(points=21)
    assert smap.values.shape == (21, 21)
    assert smap.mask.any()
    assert 0.09 < abs(smap.best.value) < 0.105
    assert smap.mask[np.searchsorted(smap.y, smap.best.y), np.searchsorted(smap.x, smap.best.x)]


def test_qubit_map_independent_of_workers():
    serial = sweep.qubit_sensitivity_map(points=6)
    pooled = sweep.qubit_sensitivity_map(points=6, workers=2)
    assert np.array_equal(serial.values, pooled.values)
    assert np.array_equal(serial.mask, pooled.mask)


@pytest.mark.slow
def test_qubit_map_best():
    smap = sweep.qubit_sensitivity_map()
    assert abs(smap.best.value) == pytest.approx(0.104, abs=0.002)


def test_coupler_map_best():
    smap = sweep.coupler_sensitivity_map(points=5)
    assert smap.values.shape == (5, 5)
    assert abs(smap.best.value) == pytest.approx(138.6, rel=0.03)


def test_map_rows():
    smap = sweep.qubit_sensitivity_map(points=3)
    rows = sweep.map_rows(smap)
    assert len(rows) == 9
    assert rows[1][:2] == [smap.x[1], smap.y[0]]
    assert isinstance(rows[0][3], bool)


@pytest.mark.slow
def test_run_sweep_noise_ratio(test_config):
    header, rows = sweep.run_sweep(sweep.SweepConfig.from_config(test_config))
    assert header[0] == "noise.ratio"
    assert [row[0] for row in rows] == pytest.approx([0.5, 2.0])
    column = header.index("IF_qubitA")
    assert rows[1][column] == pytest.approx(4.0 * rows[0][column], rel=1e-6)
    f = header.index("F")
    assert rows[0][f] > rows[1][f]


def _scheme_difference(qubit_beta):
    overrides = GateConfig(filename=None).as_dict()
    overrides["noise"]["qubit_beta"] = qubit_beta
    overrides["noise"]["coupler_ratio"] = "1e-3"
    overrides["simulation"]["mc_trajectories"] = "20000"
    cfg = sweep.SweepConfig(
        [
            sweep.parse_axis("noise.qubit_ratio:1:10:2:log"),
            sweep.parse_axis("coupling.alpha:0.2:0.3:2:lin"),
        ],
        overrides=overrides,
        difference=True,
    )
    header, rows = sweep.run_sweep(cfg)
    assert header[-1] == "difference"
    assert len(rows) == 4
    return [row[-1] for row in rows]


@pytest.mark.slow
def test_echo_overtakes_off_resonant_under_steeper_qubit_noise():
    assert any(value < 0 for value in _scheme_difference("1.1"))


@pytest.mark.slow
def test_off_resonant_ahead_under_flat_noise():
    assert all(value > 0 for value in _scheme_difference("1.0"))
