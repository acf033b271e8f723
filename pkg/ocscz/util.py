""" A set of utility functions for the ocscz module: the configured-object
factory and the CSV and manifest writers used by the command line.
"""
import logging

import numpy as np
from lxml import etree
from lxml.builder import E

import ocscz.capnet as capnet
import ocscz.config as occonf
import ocscz.fidelity as fid
import ocscz.hybrid as hyb
import ocscz.noise as noise
import ocscz.ocs_transmon as octr
import ocscz.pulses as pulses
import ocscz.rx_qubit as rxq
import ocscz.settings as ocs
from ocscz.version import __version__


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

# Set module level logger.
logger = logging.getLogger(__name__)

AF = 1e-18
FF = 1e-15


class Setup:
    """ Configured hybrid system, noise sources and simulation settings. """

    def __init__(self, config, hybrid, noise_qubit, noise_coupler, network):
        self.config = config
        self.hybrid = hybrid
        self.noise_qubit = noise_qubit
        self.noise_coupler = noise_coupler
        self.network = network
        self._ladder = None

    @property
    def qubit(self):
        return self.hybrid.qubitA

    @property
    def transmon(self):
        return self.hybrid.transmon

    @property
    def alpha(self):
        return self.hybrid.alpha

    @property
    def ladder(self):
        if self._ladder is None:
            self._ladder = hyb.conditional_ladder(self.hybrid)
        return self._ladder

    @property
    def scheme(self):
        return self.config.get("simulation", "scheme").lower()

    @property
    def seed(self):
        return self.config.get_int("simulation", "seed")

    @property
    def workers(self):
        return self.config.get_int("simulation", "workers")

    @property
    def samples_per_period(self):
        return self.config.get_int("pulse", "samples_per_period")

    @property
    def restarts(self):
        return self.config.get_int("pulse", "restarts")

    @property
    def t_g_factor(self):
        return self.config.get_float("pulse", "sqrt_cz_tg_factor")

    @property
    def refine(self):
        return self.config.get_bool("pulse", "refine")

    def simulate(self, scheme=None, seed=None, workers=None):
        """ Returns the GateReport of one CZ under the configured noise. """
        return fid.total_cz_fidelity(
            self.hybrid,
            self.noise_qubit,
            self.noise_coupler,
            scheme=scheme or self.scheme,
            restarts=self.restarts,
            seed=self.seed if seed is None else seed,
            samples_per_period=self.samples_per_period,
            mc_trajectories=self.config.get_int("simulation", "mc_trajectories"),
            workers=self.workers if workers is None else workers,
            t_g_factor=self.t_g_factor,
            refine=self.refine,
        )

    def gate_time(self, scheme=None):
        """ Total pulse time in ns of a CZ by scheme. """
        delta = self.ladder.delta_omega_c
        if (scheme or self.scheme) == "dd":
            return 2.0 * self.t_g_factor / delta
        return np.pi * np.sqrt(6.0) / delta

    def derived(self):
        """ Derived physical quantities as name -> (value, unit). """
        ladder = self.ladder
        values = {
            "omega_q": (rxq.qubit_frequency(self.qubit), "GHz"),
            "domega_q_deps_m": (rxq.charge_sensitivity(self.qubit), "1"),
            "exchange_J": (rxq.exchange_energy(self.qubit), "GHz"),
            "domega_c_dn_g": (ladder.sensitivity, "rad/ns"),
            "g": (ladder.g, "GHz"),
            "delta_n_g": (ladder.delta_n_g, "2e"),
            "delta_omega_c": (ladder.delta_omega_c, "rad/ns"),
            "n_g0": (self.hybrid.n_g0, "2e"),
            "E_C": (self.transmon.E_C, "GHz"),
            "alpha": (self.alpha, "1"),
            "t_g": (self.gate_time(), "ns"),
        }
        for label, omega in zip(("00", "01", "10", "11"), ladder.omega_ab):
            values[f"omega_c{label}"] = (omega, "GHz")
        return values

    def __repr__(self):
        return (
            f"Setup(hybrid={self.hybrid!r}, noise_qubit={self.noise_qubit!r}, "
            f"noise_coupler={self.noise_coupler!r})"
        )


def build_network(config):
    """ CapNetwork from the [capnet] section (aF, coupler node in fF). """
    get = config.get_float
    return capnet.CapNetwork(
        C1=get("capnet", "c1_af") * AF,
        C2=get("capnet", "c2_af") * AF,
        C3=get("capnet", "c3_af") * AF,
        Cc=get("capnet", "cc_ff") * FF,
        Cchi1=get("capnet", "cchi1_af") * AF,
        Cchi2=get("capnet", "cchi2_af") * AF,
        Cchi3=get("capnet", "cchi3_af") * AF,
        Cm12=get("capnet", "cm12_af") * AF,
        Cm23=get("capnet", "cm23_af") * AF,
        Cg1=get("capnet", "cg1_af") * AF,
        Cg2=get("capnet", "cg2_af") * AF,
        Cg3=get("capnet", "cg3_af") * AF,
        CgC=get("capnet", "cgc_af") * AF,
    )


def build_qubit(config):
    get = config.get_float
    qubit = rxq.QubitParams.from_ratios(
        get("qubit", "u_mev"),
        get("qubit", "uc_ratio"),
        get("qubit", "eps_m_ratio"),
        get("qubit", "t_ratio"),
        eps=get("qubit", "eps"),
    )
    if not qubit.rx_regime:
        logger.warning(
            "Delta_FH = %.3g GHz leaves the RX regime (U = %.3g GHz).", qubit.delta_fh, qubit.U
        )
    j_max = get("qubit", "j_max_ghz")
    exchange = rxq.exchange_energy(qubit)
    if exchange > j_max:
        logger.warning("Exchange %.3g GHz above the %.3g GHz limit.", exchange, j_max)
    return qubit


def build_noise(config, kind):
    """ NoiseSpec of kind "qubit" or "coupler" with the amplitude re-pivoted for beta. """
    get = config.get_float
    beta = get("noise", f"{kind}_beta")
    amplitude = noise.pivot_amplitude(
        get("noise", f"{kind}_a") * get("noise", f"{kind}_ratio"), beta, get("noise", "pivot_hz")
    )
    return noise.NoiseSpec(
        amplitude,
        beta=beta,
        omega_l=ocs.TWO_PI * get("noise", "f_low_hz"),
        omega_h=ocs.TWO_PI * get("noise", "f_high_hz"),
        kind=kind,
        rate_convention=config.get("noise", "rate_convention").lower(),
    )


def assemble(config_file=None):
    """ Return a Setup built from a config file, a GateConfig or the defaults. """
    if isinstance(config_file, occonf.GateConfig):
        config = config_file
    else:
        config = occonf.load_config(config_file)

    network = build_network(config)
    qubit = build_qubit(config)

    if config.get("transmon", "ec_source").lower() == "network":
        E_C = capnet.charging_energy(network)
    else:
        E_C = config.get_float("transmon", "ec_ghz")
    transmon = octr.TransmonParams(
        config.get_float("transmon", "ej_ghz"), E_C, cutoff=config.get_int("transmon", "cutoff")
    )

    if config.get("coupling", "alpha_source").lower() == "network":
        alpha = capnet.lever_arms(network).alpha
    else:
        alpha = config.get_float("coupling", "alpha")

    split = config.get_float("transmon", "parity_split_ghz")
    hybrid = hyb.HybridConfig.with_parity_bias(qubit, qubit, transmon, alpha, target_split=split)
    noise_qubit = build_noise(config, "qubit")
    noise_coupler = build_noise(config, "coupler")
    setup = Setup(config, hybrid, noise_qubit, noise_coupler, network)
    logger.debug("setup =\n%s", setup)
    logger.info("Finished building setup.")
    return setup


def _format(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{value:.12g}"


def write_csv(path, header, rows, metadata=None):
    """ Write rows under a '#' metadata block and one header line.

    Floats keep 12 significant digits; string cells are written as is.
    """
    metadata = dict(metadata or {})
    metadata.setdefault("version", __version__)
    data = np.array([[_format(v) for v in row] for row in rows], dtype=object)
    data = data.reshape(-1, len(header))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, value in metadata.items():
            handle.write(f"# {key} = {_format(value)}\n")
        np.savetxt(handle, data, fmt="%s", delimiter=",", header=",".join(header), comments="")
    logger.info("Finished writing %s.", path)
    return path


def read_csv(path):
    """ Returns (metadata, header, rows as strings) of a file from write_csv. """
    metadata = {}
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key.strip()] = value.strip()
        elif line:
            body.append(line.split(","))
    return metadata, body[0], body[1:]


def manifest_path(out):
    return f"{out}.manifest.xml"


def write_manifest(path, subcommand, argv, seed, config, derived=None):
    """ Run manifest: command, seed, version, every config key and the derived quantities. """
    sections = [
        E.section(*[E.key(value, name=key) for key, value in items.items()], name=section)
        for section, items in config.as_dict().items()
    ]
    quantities = [
        E.quantity(_format(value), name=name, unit=unit)
        for name, (value, unit) in (derived or {}).items()
    ]
    root = E.manifest(
        E.subcommand(subcommand),
        E.argv(*[E.arg(str(a)) for a in argv]),
        E.seed(str(seed)),
        E.version(__version__),
        E.config(*sections),
        E.derived(*quantities),
        program="ocscz",
    )
    with open(path, "wb") as handle:
        handle.write(
            etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="utf-8")
        )
    logger.info("Finished writing %s.", path)
    return path


def gate_table(pulse, n_points):
    """ (time_ns, omega_x, omega_y) rows of a pulse envelope in rad/ns. """
    times, values = pulse.sample(n_points)
    return np.column_stack([times, values.real, values.imag])


def pulse_metadata(pulse):
    return {
        "kind": pulse.kind,
        "omega_d": pulse.omega_d,
        "t_g": pulse.t_g,
        "Theta": pulse.theta,
        "peak": pulse.peak,
    }


def pulse_from_csv(path):
    """ PulseSpec from a table written with pulse_metadata and gate_table. """
    metadata, _, rows = read_csv(path)
    table = np.array(rows, dtype=float)
    return pulses.PulseSpec.from_table(
        table[:, 0],
        table[:, 1],
        table[:, 2],
        float(metadata["omega_d"]),
        theta=float(metadata.get("Theta", 0.0)),
        kind=metadata.get("kind", "Custom"),
    )
