"""Experiment configuration: dataclass, INI-style file format, presets.

The on-disk format is flat ``key = value`` text with four sections
([network], [system], [selection], [experiment]); see README for the full
key list. Parsing is strict: unknown keys, missing keys, and out-of-range
values are rejected with a diagnostic naming the offending field.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields

from .estimation import SystemParams
from .geometry import NetworkConfig
from .selection import Scheme


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkConfig
    params: SystemParams
    epsilon: float
    min_cluster: int
    failure_range: tuple[float, float]
    alpha_values: tuple[float, ...]
    schemes: tuple[Scheme, ...]
    num_snapshots: int
    blocks_per_snapshot: int
    failure_draws_per_block: int
    master_seed: int
    output_path: str


def validate_config(config: ExperimentConfig) -> None:
    """Raise ConfigError naming the first invalid experiment-level field."""
    if not 0.0 < config.epsilon < 1.0:
        raise ConfigError(f"epsilon = {config.epsilon} outside (0, 1)")
    if config.min_cluster < 1:
        raise ConfigError(f"min_cluster = {config.min_cluster} must be >= 1")
    low, high = config.failure_range
    if not 0.0 <= low <= high <= 1.0:
        raise ConfigError(
            f"failure_range = ({low}, {high}) must satisfy 0 <= low <= high <= 1"
        )
    if not config.alpha_values:
        raise ConfigError("alpha_values must not be empty")
    for i, alpha in enumerate(config.alpha_values):
        if not 0.0 <= alpha <= 1.0:
            raise ConfigError(f"alpha_values[{i}] = {alpha} outside [0, 1]")
    if not config.schemes:
        raise ConfigError("schemes must not be empty")
    if len(set(config.schemes)) != len(config.schemes):
        raise ConfigError("schemes contains duplicates")
    for name, value in (
        ("num_snapshots", config.num_snapshots),
        ("blocks_per_snapshot", config.blocks_per_snapshot),
        ("failure_draws_per_block", config.failure_draws_per_block),
    ):
        if value < 1:
            raise ConfigError(f"{name} = {value} must be >= 1")
    if not config.output_path:
        raise ConfigError("output_path must not be empty")


_NETWORK_KEYS = {
    "area_side": float,
    "num_aps": int,
    "antennas_per_ap": int,
    "num_ues": int,
    "ap_height": float,
    "pathloss_intercept_db": float,
    "pathloss_exponent_coeff": float,
    "shadow_std_db": float,
    "asd_deg": float,
}

_SYSTEM_KEYS = {
    "tau_c": int,
    "tau_p": int,
    "tau_u": int,
    "uplink_power_w": float,
    "bandwidth_hz": float,
    "noise_figure_db": float,
    "noise_power_w": float,
}


def _parse_section(parser, section: str, keys: dict, required: set[str]):
    if not parser.has_section(section):
        raise ConfigError(f"missing section [{section}]")
    out = {}
    for key in parser.options(section):
        if key not in keys:
            raise ConfigError(f"unknown key {section}.{key}")
    for key, cast in keys.items():
        if not parser.has_option(section, key):
            if key in required:
                raise ConfigError(f"missing key {section}.{key}")
            continue
        raw = parser.get(section, key)
        try:
            out[key] = cast(raw)
        except ValueError:
            raise ConfigError(
                f"{section}.{key} = {raw!r} is not a valid {cast.__name__}"
            ) from None
    return out


def _parse_float_list(raw: str, field: str) -> tuple[float, ...]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{field} must not be empty")
    try:
        return tuple(float(s) for s in items)
    except ValueError:
        raise ConfigError(f"{field} = {raw!r} is not a comma-separated float list") from None


def _parse_schemes(raw: str) -> tuple[Scheme, ...]:
    items = [s.strip().lower() for s in raw.split(",") if s.strip()]
    out = []
    for item in items:
        try:
            out.append(Scheme(item))
        except ValueError:
            valid = ", ".join(s.value for s in Scheme)
            raise ConfigError(
                f"experiment.schemes contains unknown scheme {item!r} (valid: {valid})"
            ) from None
    return tuple(out)


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse configuration text; see :func:`load_config` for the file form."""
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    net_kwargs = _parse_section(
        parser,
        "network",
        _NETWORK_KEYS,
        required={"area_side", "num_aps", "antennas_per_ap", "num_ues"},
    )
    sys_kwargs = _parse_section(parser, "system", _SYSTEM_KEYS, required=set())

    sel_keys = {
        "epsilon": float,
        "min_cluster": int,
        "failure_prob_low": float,
        "failure_prob_high": float,
    }
    sel = _parse_section(parser, "selection", sel_keys, required=set(sel_keys))

    exp_keys = {
        "alpha_values": str,
        "schemes": str,
        "num_snapshots": int,
        "blocks_per_snapshot": int,
        "failure_draws_per_block": int,
        "master_seed": int,
        "output_path": str,
    }
    exp = _parse_section(parser, "experiment", exp_keys, required=set(exp_keys))

    try:
        network = NetworkConfig(**net_kwargs)
        params = SystemParams(**sys_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    config = ExperimentConfig(
        network=network,
        params=params,
        epsilon=sel["epsilon"],
        min_cluster=sel["min_cluster"],
        failure_range=(sel["failure_prob_low"], sel["failure_prob_high"]),
        alpha_values=_parse_float_list(exp["alpha_values"], "experiment.alpha_values"),
        schemes=_parse_schemes(exp["schemes"]),
        num_snapshots=exp["num_snapshots"],
        blocks_per_snapshot=exp["blocks_per_snapshot"],
        failure_draws_per_block=exp["failure_draws_per_block"],
        master_seed=exp["master_seed"],
        output_path=exp["output_path"],
    )
    validate_config(config)
    return config


def load_config(path: str) -> ExperimentConfig:
    """Load and validate an experiment configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: ExperimentConfig) -> str:
    """Round-trippable text form of a configuration."""
    buf = io.StringIO()
    buf.write("[network]\n")
    for f in fields(NetworkConfig):
        buf.write(f"{f.name} = {_format_value(getattr(config.network, f.name))}\n")
    buf.write("\n[system]\n")
    for f in fields(SystemParams):
        buf.write(f"{f.name} = {_format_value(getattr(config.params, f.name))}\n")
    buf.write("\n[selection]\n")
    buf.write(f"epsilon = {_format_value(config.epsilon)}\n")
    buf.write(f"min_cluster = {config.min_cluster}\n")
    buf.write(f"failure_prob_low = {_format_value(config.failure_range[0])}\n")
    buf.write(f"failure_prob_high = {_format_value(config.failure_range[1])}\n")
    buf.write("\n[experiment]\n")
    buf.write(
        "alpha_values = " + ", ".join(_format_value(a) for a in config.alpha_values) + "\n"
    )
    buf.write("schemes = " + ", ".join(s.value for s in config.schemes) + "\n")
    buf.write(f"num_snapshots = {config.num_snapshots}\n")
    buf.write(f"blocks_per_snapshot = {config.blocks_per_snapshot}\n")
    buf.write(f"failure_draws_per_block = {config.failure_draws_per_block}\n")
    buf.write(f"master_seed = {config.master_seed}\n")
    buf.write(f"output_path = {config.output_path}\n")
    return buf.getvalue()


_ALL_SCHEMES = (Scheme.FAAS, Scheme.AGNOSTIC, Scheme.ALL_APS)
_ALPHA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def preset(name: str) -> ExperimentConfig:
    """Ready-made configurations.

    ``paper-fig2-a``: 400 single-antenna APs, 100 UEs, 2 x 2 km.
    ``paper-fig2-b``: 100 four-antenna APs, same density.
    ``desk``: scaled-down run (100 single-antenna APs, 20 UEs, 1 x 1 km)
    that finishes in minutes on a laptop.
    """
    if name == "paper-fig2-a":
        network = NetworkConfig(area_side=2000.0, num_aps=400, antennas_per_ap=1, num_ues=100)
        counts = dict(num_snapshots=100, blocks_per_snapshot=4, failure_draws_per_block=25)
        out = "results/fig2a"
    elif name == "paper-fig2-b":
        network = NetworkConfig(area_side=2000.0, num_aps=100, antennas_per_ap=4, num_ues=100)
        counts = dict(num_snapshots=100, blocks_per_snapshot=4, failure_draws_per_block=25)
        out = "results/fig2b"
    elif name == "desk":
        network = NetworkConfig(area_side=1000.0, num_aps=100, antennas_per_ap=1, num_ues=20)
        counts = dict(num_snapshots=10, blocks_per_snapshot=1, failure_draws_per_block=200)
        out = "results/desk"
    else:
        raise ConfigError(
            f"unknown preset {name!r} (valid: paper-fig2-a, paper-fig2-b, desk)"
        )
    return ExperimentConfig(
        network=network,
        params=SystemParams(),
        epsilon=0.9,
        min_cluster=2,
        failure_range=(0.01, 0.1),
        alpha_values=_ALPHA_GRID,
        schemes=_ALL_SCHEMES,
        master_seed=1,
        output_path=out,
        **counts,
    )
