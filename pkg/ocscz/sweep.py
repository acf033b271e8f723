""" Parameter grids: qubit and coupler sensitivity maps and fidelity sweeps.

Grid points are independent jobs run on a process pool; results come back in
submission order and are written in grid order.
"""
import itertools
import logging
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import ocscz.config as occonf
import ocscz.ocs_transmon as octr
import ocscz.rx_qubit as rxq
import ocscz.settings as ocs
import ocscz.util as ocu
from ocscz.exceptions import ConfigError, InfeasibleBiasError
from ocscz.fidelity import GateReport


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

SensitivityMap = namedtuple("SensitivityMap", ["x", "y", "values", "mask", "best"])
BestPoint = namedtuple("BestPoint", ["x", "y", "value"])

# Pseudo keys that set several config keys at once.
PSEUDO_KEYS = {"noise.ratio": ("noise.qubit_ratio", "noise.coupler_ratio")}
SCALES = ("lin", "log")


class SweepAxis:
    """ One grid axis over a config key, "section.key". """

    def __init__(self, name, low, high, points, scale="lin"):
        self.name = name
        self.low = float(low)
        self.high = float(high)
        self.points = int(points)
        self.scale = scale
        if name not in PSEUDO_KEYS:
            section, _, key = name.partition(".")
            if section not in ocs.defaults or key not in ocs.defaults[section]:
                raise ConfigError(f"sweep axis over unknown key {name}", key=name)
        if self.points < 2:
            raise ConfigError(f"sweep axis {name} needs at least 2 points", key=name)
        if scale not in SCALES:
            raise ConfigError(f"axis scale must be one of {SCALES}, got {scale!r}", key=name)
        if scale == "log" and (self.low <= 0 or self.high <= 0):
            raise ConfigError(f"log axis {name} needs positive bounds", key=name)

    @property
    def keys(self):
        """ The real config keys the axis writes. """
        return PSEUDO_KEYS.get(self.name, (self.name,))

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.low, self.high, self.points)
        return np.linspace(self.low, self.high, self.points)

    def __repr__(self):
        return (
            f"SweepAxis({self.name!r}, {self.low!r}, {self.high!r}, {self.points!r}, "
            f"{self.scale!r})"
        )


def parse_axis(text):
    """ Parse "section.key:min:max:points:lin|log". """
    parts = [part.strip() for part in text.split(":")]
    if len(parts) != 5:
        raise ConfigError(f"sweep axis {text!r} is not name:min:max:points:scale")
    name, low, high, points, scale = parts
    try:
        low, high, points = float(low), float(high), float(points)
    except ValueError:
        raise ConfigError(f"sweep axis {text!r} has a non-numeric bound", key=name)
    if points != int(points):
        raise ConfigError(f"sweep axis {text!r} needs an integer point count", key=name)
    return SweepAxis(name, low, high, int(points), scale.lower())


class SweepConfig:
    """ Axes, fixed overrides (nested config dict), scheme, output path, seed and workers. """

    def __init__(
        self, axes, overrides=None, scheme="offres", out=None, seed=0, workers=1, difference=False
    ):
        self.axes = list(axes)
        self.overrides = dict(overrides or {})
        self.scheme = scheme
        self.out = out
        self.seed = int(seed)
        self.workers = int(workers)
        self.difference = difference
        if not self.axes:
            raise ConfigError("a sweep needs at least one axis")
        if scheme not in ("offres", "dd"):
            raise ConfigError(f"unknown scheme {scheme!r}", key="simulation.scheme")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1", key="simulation.workers")

    @classmethod
    def from_config(
        cls, config, out=None, seed=None, workers=None, scheme=None, difference=False
    ):
        """ Axes from [sweep] axis1, axis2; empty entries are skipped. """
        axes = [
            parse_axis(config.get("sweep", key))
            for key in ("axis1", "axis2")
            if config.get("sweep", key).strip()
        ]
        return cls(
            axes,
            overrides=config.as_dict(),
            scheme=scheme or config.get("simulation", "scheme").lower(),
            out=out,
            seed=config.get_int("simulation", "seed") if seed is None else seed,
            workers=config.get_int("simulation", "workers") if workers is None else workers,
            difference=difference,
        )

    def grid(self):
        """ Grid points as tuples of axis values, last axis fastest. """
        return list(itertools.product(*[axis.values() for axis in self.axes]))

    def header(self):
        names = [axis.name for axis in self.axes]
        if self.difference:
            return names + ["F_offres", "F_dd", "difference"]
        return names + list(GateReport.fields)

    def __repr__(self):
        return f"SweepConfig(axes={self.axes!r}, scheme={self.scheme!r}, seed={self.seed!r})"


def _run(func, jobs, workers):
    if workers <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, job) for job in jobs]
        return [future.result() for future in futures]


def point_config(overrides, axes, point):
    """ GateConfig of the overrides with the axis values of one grid point set. """
    config = occonf.GateConfig.from_dict(overrides)
    for axis, value in zip(axes, point):
        for name in axis.keys:
            section, key = name.split(".")
            config.set(section, key, repr(float(value)))
    # Parallelism is spent on grid points.
    config.set("simulation", "workers", "1")
    return config


def _sweep_point(job):
    overrides, axes, point, schemes, seed = job
    setup = ocu.assemble(point_config(overrides, axes, point))
    return [setup.simulate(scheme=scheme, seed=seed, workers=1) for scheme in schemes]


def run_sweep(sweep_cfg):
    """ Returns (header, rows) over the sweep grid in grid order. """
    schemes = ("offres", "dd") if sweep_cfg.difference else (sweep_cfg.scheme,)
    points = sweep_cfg.grid()
    jobs = [
        (sweep_cfg.overrides, sweep_cfg.axes, point, schemes, sweep_cfg.seed) for point in points
    ]
    results = _run(_sweep_point, jobs, sweep_cfg.workers)
    rows = []
    for point, reports in zip(points, results):
        if sweep_cfg.difference:
            offres, dd = reports
            rows.append(list(point) + [offres.F, dd.F, offres.F - dd.F])
        else:
            rows.append(list(point) + reports[0].csv_row())
    logger.info("Finished sweep over %d points.", len(points))
    return sweep_cfg.header(), rows


def _best(x, y, values, mask):
    masked = np.where(mask, np.abs(values), -np.inf)
    if not np.any(np.isfinite(masked)):
        return BestPoint(np.nan, np.nan, np.nan)
    i, j = np.unravel_index(np.argmax(masked), masked.shape)
    return BestPoint(x[j], y[i], values[i, j])


def _qubit_row(job):
    u_mev, uc_ratio, eps_ratios, t_ratio, j_max, method = job
    values, allowed = [], []
    for eps_ratio in eps_ratios:
        p = rxq.QubitParams.from_ratios(u_mev, uc_ratio, eps_ratio, t_ratio)
        values.append(rxq.charge_sensitivity(p, method=method, check_regime=False))
        allowed.append(p.rx_regime and rxq.exchange_energy(p) <= j_max)
    return values, allowed


def qubit_sensitivity_map(
    u_mev=4.0,
    uc_ratio=0.2,
    eps_m_ratios=(0.4, 0.8),
    t_ratios=(0.001, 0.03),
    points=200,
    j_max=0.7,
    method="analytic",
    workers=1,
):
    """ d(omega_q)/d(eps_m) over eps_m / U (x) and t / U (y).

    The mask keeps points in the RX regime with J/h <= j_max GHz; best is the
    masked point of largest |sensitivity|.
    """
    x = np.linspace(eps_m_ratios[0], eps_m_ratios[1], points)
    y = np.linspace(t_ratios[0], t_ratios[1], points)
    jobs = [(u_mev, uc_ratio, x, t_ratio, j_max, method) for t_ratio in y]
    rows = _run(_qubit_row, jobs, workers)
    values = np.array([row[0] for row in rows])
    mask = np.array([row[1] for row in rows], dtype=bool)
    best = _best(x, y, values, mask)
    logger.debug("best =\n%s", best)
    logger.info("Finished qubit sensitivity map.")
    return SensitivityMap(x, y, values, mask, best)


def _coupler_row(job):
    e_js, e_c, target_split, cutoff = job
    values = []
    for e_j in e_js:
        p = octr.TransmonParams(e_j, e_c, cutoff=cutoff)
        try:
            n_g0 = octr.parity_aware_bias(p, target_split)
        except InfeasibleBiasError:
            values.append(np.nan)
            continue
        values.append(octr.charge_dispersion_sensitivity(p.replace(n_g=n_g0)))
    return values


def coupler_sensitivity_map(
    e_j=(3.0, 30.0),
    e_c=(0.3, 3.0),
    points=100,
    target_split=1.0,
    cutoff=12,
    workers=1,
):
    """ d(omega_c)/d(n_g) in Grad/s over E_J (x) and E_C (y) at the parity-aware bias.

    Points where the parity splitting cannot reach target_split are NaN and
    masked out.
    """
    x = np.linspace(e_j[0], e_j[1], points)
    y = np.linspace(e_c[0], e_c[1], points)
    jobs = [(x, e_c_value, target_split, cutoff) for e_c_value in y]
    values = np.array(_run(_coupler_row, jobs, workers), dtype=float)
    mask = np.isfinite(values)
    best = _best(x, y, values, mask)
    logger.debug("best =\n%s", best)
    logger.info("Finished coupler sensitivity map.")
    return SensitivityMap(x, y, values, mask, best)


def map_rows(smap):
    """ Long-format (x, y, value, allowed) rows, y outer. """
    rows = []
    for i, y_value in enumerate(smap.y):
        for j, x_value in enumerate(smap.x):
            rows.append([x_value, y_value, smap.values[i, j], bool(smap.mask[i, j])])
    return rows
