""" Command line: spectra, sensitivity maps, pulse export, gate simulation and
fidelity sweeps, each writing a CSV plus a run manifest.
"""
import argparse
import logging
import os
import sys

import numpy as np

import ocscz.config as occonf
import ocscz.ocs_transmon as octr
import ocscz.propagator as prop
import ocscz.pulses as pulses
import ocscz.rx_qubit as rxq
import ocscz.sweep as ocsw
import ocscz.util as ocu
from ocscz.exceptions import ConfigError, OcsczError
from ocscz.fidelity import GateReport
from ocscz.version import __pkgname__, __version__


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Setup module level logging.
logger = logging.getLogger(__name__)

VERBOSITY = (logging.WARNING, logging.INFO, logging.DEBUG)
SPECTRUM_POINTS = 401
RX_EPS_RANGE = (0.0, 0.95)
BLOCK_LABELS = ("00", "01", "10", "11")


def _common():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="INI config file (defaults if omitted)")
    parent.add_argument("--out", metavar="PATH", help="output CSV (default <subcommand>.csv)")
    parent.add_argument("--seed", type=int, help="random seed, overrides simulation.seed")
    parent.add_argument("--workers", type=int, help="process count, overrides simulation.workers")
    parent.add_argument(
        "--scheme", choices=("offres", "dd"), help="CZ scheme, overrides simulation.scheme"
    )
    parent.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    return parent


def build_parser():
    parent = _common()
    parser = argparse.ArgumentParser(
        prog=__pkgname__, description="Microwave CZ between RX qubits through an OCS transmon."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    rx = sub.add_parser("rx-spectrum", parents=[parent], help="RX levels and dot occupations")
    rx.add_argument("--points", type=int, help="eps_m / U samples (default maps.qubit_points)")

    disp = sub.add_parser(
        "transmon-dispersion", parents=[parent], help="coupler frequency of both parities"
    )
    disp.add_argument("--points", type=int, help="gate charge samples (default maps.ng_points)")

    smap = sub.add_parser("sensitivity-map", parents=[parent], help="sensitivity grids")
    smap.add_argument("--target", choices=("qubit", "coupler"), default="qubit")
    smap.add_argument("--points", type=int, help="grid points per axis")

    synth = sub.add_parser("synth-pulse", parents=[parent], help="pulse table and Bloch paths")
    synth.add_argument("--theta", type=float, help="conditional phase of a GaMAM pulse")
    synth.add_argument("--points", type=int, default=1001, help="table rows")

    sub.add_parser("simulate-gate", parents=[parent], help="one noisy CZ")

    sweep = sub.add_parser("sweep-fidelity", parents=[parent], help="fidelity over [sweep] axes")
    sweep.add_argument(
        "--difference", action="store_true", help="write F_offres - F_dd per point"
    )
    return parser


def _apply_flags(config, args):
    if args.seed is not None:
        config.set("simulation", "seed", str(args.seed))
    if args.workers is not None:
        config.set("simulation", "workers", str(args.workers))
    if args.scheme is not None:
        config.set("simulation", "scheme", args.scheme)
    return config


def _sibling(out, suffix):
    root, ext = os.path.splitext(out)
    return f"{root}_{suffix}{ext or '.csv'}"


def _rx_spectrum(args, setup, meta):
    points = args.points or setup.config.get_int("maps", "qubit_points")
    qubit = setup.qubit
    rows = []
    for ratio in np.linspace(RX_EPS_RANGE[0], RX_EPS_RANGE[1], points):
        p = qubit.replace(eps_m=ratio * qubit.U)
        energies = rxq.rx_eigensystem(p).energies
        occupations = [rxq.dot_occupations(p, state) for state in (0, 1)]
        rows.append(
            [ratio, *energies, rxq.qubit_frequency(p), *occupations[0], *occupations[1]]
            + [rxq.charge_sensitivity(p, check_regime=False)]
        )
    header = ["eps_m_ratio", "E0_ghz", "E1_ghz", "E2_ghz", "E3_ghz", "omega_q_ghz"]
    header += [f"n{dot}_{state}" for state in (0, 1) for dot in (1, 2, 3)]
    header += ["domega_q_deps_m"]
    meta.update(u_ghz=qubit.U, uc_ghz=qubit.U_C, t_ghz=qubit.t_hop)
    ocu.write_csv(args.out, header, rows, meta)


def _transmon_dispersion(args, setup, meta):
    points = args.points or setup.config.get_int("maps", "ng_points")
    n_g = np.linspace(-1.0, 1.0, points)
    transmon = setup.transmon
    even = octr.dispersion(transmon, n_g)
    odd = octr.dispersion(transmon, n_g + 0.5)
    meta.update(ej_ghz=transmon.E_J, ec_ghz=transmon.E_C, n_g0=setup.hybrid.n_g0)
    rows = np.column_stack([n_g, even, odd])
    ocu.write_csv(args.out, ["n_g", "omega_c_even_ghz", "omega_c_odd_ghz"], rows, meta)


def _sensitivity_map(args, setup, meta):
    config = setup.config
    get = config.get_float
    workers = config.get_int("simulation", "workers")
    if args.target == "qubit":
        smap = ocsw.qubit_sensitivity_map(
            u_mev=get("qubit", "u_mev"),
            uc_ratio=get("qubit", "uc_ratio"),
            eps_m_ratios=(get("maps", "eps_m_ratio_min"), get("maps", "eps_m_ratio_max")),
            t_ratios=(get("maps", "t_ratio_min"), get("maps", "t_ratio_max")),
            points=args.points or config.get_int("maps", "qubit_points"),
            j_max=get("qubit", "j_max_ghz"),
            workers=workers,
        )
        header = ["eps_m_ratio", "t_ratio", "domega_q_deps_m", "allowed"]
    else:
        smap = ocsw.coupler_sensitivity_map(
            e_j=(get("maps", "ej_min_ghz"), get("maps", "ej_max_ghz")),
            e_c=(get("maps", "ec_min_ghz"), get("maps", "ec_max_ghz")),
            points=args.points or config.get_int("maps", "coupler_points"),
            target_split=get("transmon", "parity_split_ghz"),
            cutoff=config.get_int("transmon", "cutoff"),
            workers=workers,
        )
        header = ["ej_ghz", "ec_ghz", "domega_c_dn_g", "allowed"]
    meta.update(target=args.target, best_x=smap.best.x, best_y=smap.best.y, best=smap.best.value)
    ocu.write_csv(args.out, header, ocsw.map_rows(smap), meta)


def _synth_pulse(args, setup, meta):
    ladder = setup.ladder
    if setup.scheme == "offres":
        pulse = pulses.off_resonant_cz(ladder)
    else:
        theta = np.pi / 2.0 if args.theta is None else args.theta
        pulse = pulses.synthesize_cphase(
            ladder,
            theta,
            t_g=setup.t_g_factor / ladder.delta_omega_c,
            restarts=setup.restarts,
            seed=setup.seed,
            refine=setup.refine,
            samples_per_period=setup.samples_per_period,
        )
    meta.update(ocu.pulse_metadata(pulse))
    evolution = prop.evolve_unitary(ladder, pulse, samples_per_period=setup.samples_per_period)
    meta["theta_cphase"] = prop.conditional_phases(evolution).theta
    table = ocu.gate_table(pulse, args.points)
    ocu.write_csv(args.out, ["time_ns", "omega_x", "omega_y"], table, meta)

    keep = np.unique(np.linspace(0, evolution.t_grid.size - 1, args.points).astype(int))
    columns = [evolution.t_grid[keep]]
    header = ["time_ns"]
    for block, label in enumerate(BLOCK_LABELS):
        columns.append(prop.bloch_trajectory(evolution.snapshots[keep], block))
        header += [f"sx{label}", f"sy{label}", f"sz{label}"]
    ocu.write_csv(_sibling(args.out, "bloch"), header, np.column_stack(columns), meta)

    if isinstance(pulse.params, pulses.GamamParams):
        omegas = np.linspace(0.0, 4.0 * ladder.delta_omega_c, SPECTRUM_POINTS)
        rows = np.column_stack(
            [
                omegas,
                pulses.envelope_spectrum(pulse, omegas),
                pulses.envelope_spectrum(pulse, omegas, magnus=True),
            ]
        )
        header = ["omega_rad_ns", "refined", "magnus"]
        ocu.write_csv(_sibling(args.out, "spectrum"), header, rows, meta)


def _simulate_gate(args, setup, meta):
    report = setup.simulate()
    sys.stdout.write(report.to_text())
    ocu.write_csv(args.out, GateReport.csv_header(), [report.csv_row()], meta)


def _sweep_fidelity(args, setup, meta):
    sweep_cfg = ocsw.SweepConfig.from_config(
        setup.config, out=args.out, difference=args.difference
    )
    header, rows = ocsw.run_sweep(sweep_cfg)
    meta.update(axes=" ".join(setup.config.get("sweep", k) for k in ("axis1", "axis2")))
    ocu.write_csv(args.out, header, rows, meta)


HANDLERS = {
    "rx-spectrum": _rx_spectrum,
    "transmon-dispersion": _transmon_dispersion,
    "sensitivity-map": _sensitivity_map,
    "synth-pulse": _synth_pulse,
    "simulate-gate": _simulate_gate,
    "sweep-fidelity": _sweep_fidelity,
}


def _configure_logging(args):
    level = VERBOSITY[min(args.verbose, len(VERBOSITY) - 1)]
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def run_subcommand(argv, setup_logging=None):
    """ Run one subcommand; returns 0 on success, 2 on usage or config errors
    and 1 on numerical failures.
    """
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    if setup_logging is not None:
        setup_logging(args)
    args.out = args.out or f"{args.subcommand}.csv"

    try:
        config = _apply_flags(occonf.load_config(args.config), args)
        setup = ocu.assemble(config)
        meta = {
            "command": " ".join([__pkgname__] + argv),
            "seed": setup.seed,
            "scheme": setup.scheme,
        }
        HANDLERS[args.subcommand](args, setup, meta)
        manifest = ocu.manifest_path(args.out)
        derived = setup.derived()
        ocu.write_manifest(manifest, args.subcommand, argv, setup.seed, config, derived)
    except ConfigError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{__pkgname__}: error: {e}\n")
        return 2
    except OcsczError as e:
        sys.stderr.write(f"{__pkgname__}: {type(e).__name__}: {e}\n")
        return 1
    logger.info("Finished %s.", args.subcommand)
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    return run_subcommand(argv, setup_logging=_configure_logging)


if __name__ == "__main__":
    sys.exit(main())
