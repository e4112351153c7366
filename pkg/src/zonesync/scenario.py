"""Scenario configuration: JSON schema, presets, and assembly.

A scenario file is a single JSON document. Distances are meters, powers
dBm (converted to watts once at parse), bandwidths Hz, compute cycles/s.
``load_config`` returns a normalized dict (defaults filled in), so
parse -> serialize -> parse is the identity on normalized configs.

Two presets ship with the package: ``desk`` (small feasible twin
workloads, the runnable default) and ``reference`` (full-scale constants
with 10 Mb twin payloads whose deadlines no plausible uplink can meet;
run it with the report policy to see them flagged).
"""

from __future__ import annotations

import copy
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .channel import ChannelModel, RadioParams, db_to_linear, dbm_to_watts
from .errors import ConfigError
from .geometry import DensitySpec, build_grid, make_density, sample_points
from .solver import Scenario, SolverOptions
from .sync import DigitalTwin, EdgeServer, MetaverseParams

_SOLVER_DEFAULTS = {
    "tol": 1e-6,
    "max_iter": 500,
    "damping": 1.0,
    "alpha_floor": 1e-6,
    "infeasible_policy": "report",
    "exhausted_policy": "drop",
}

_SENSING_DEFAULTS = {
    "density_bps_per_m3": 50.0,
    "sensor_count": 25000,
    "slot_s": 1e-3,
    "sensor_volume_m3": 0.01,
    "topo_complexity_cycles_per_bit": 5000.0,
}

_CHANNEL_DEFAULTS = {
    "reference_gain_db": -30.0,
    "reference_distance_m": 1.0,
    "pathloss_exponent": 3.0,
    "min_distance_m": 1.0,
}


def load_config(path) -> dict:
    """Read and normalize a scenario file; missing files or bad JSON raise
    ConfigError. Bare preset names resolve to the bundled presets."""
    resolved = resolve_config_path(path)
    try:
        raw = json.loads(resolved.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{resolved}: not valid JSON ({exc})") from exc
    return normalize_config(raw)


def resolve_config_path(path) -> Path:
    p = Path(path)
    if p.is_file():
        return p
    candidates = [p.name, p.name + ".json"] if not p.is_absolute() else []
    preset_dir = resources.files("zonesync") / "presets"
    for name in candidates:
        preset = preset_dir / name
        if preset.is_file():
            return Path(str(preset))
    raise ConfigError(f"config file not found: {path}")


def normalize_config(raw: dict) -> dict:
    """Validate the schema and fill every default; idempotent."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    cfg = copy.deepcopy(raw)
    for key in ("zone", "servers", "radio"):
        if key not in cfg:
            raise ConfigError(f"config is missing required section {key!r}")
    zone = cfg["zone"]
    for key in ("extent_m", "resolution"):
        if key not in zone:
            raise ConfigError(f"zone is missing {key!r}")
    if not cfg["servers"]:
        raise ConfigError("at least one server is required")
    for i, server in enumerate(cfg["servers"]):
        for key in ("position_m", "compute_hz", "bandwidth_hz"):
            if key not in server:
                raise ConfigError(f"servers[{i}] is missing {key!r}")
    radio = cfg["radio"]
    for key in ("sensor_tx_power_dbm", "noise_spectral_density_dbm_per_hz"):
        if key not in radio:
            raise ConfigError(f"radio is missing {key!r}")
    radio["channel"] = {**_CHANNEL_DEFAULTS, **radio.get("channel", {})}
    sensing = {**_SENSING_DEFAULTS, **cfg.get("sensing", {})}
    sensing.setdefault("distribution", {"kind": "uniform"})
    cfg["sensing"] = sensing
    dts = cfg.get("dts", {})
    dts.setdefault("count", 0)
    dts.setdefault("types", [])
    dts.setdefault("type_mix", None)
    dts.setdefault("placement", {"kind": "uniform"})
    cfg["dts"] = dts
    cfg["solver"] = {**_SOLVER_DEFAULTS, **cfg.get("solver", {})}
    cfg.setdefault("method", "ot")
    cfg.setdefault("seed", 0)
    dts.setdefault("placement_seed", cfg["seed"])
    if cfg["method"] not in ("ot", "snr"):
        raise ConfigError(f"method must be 'ot' or 'snr', got {cfg['method']!r}")
    if dts["count"] > 0 and not dts["types"]:
        raise ConfigError("dts.count > 0 requires at least one twin type")
    return cfg


def serialize_config(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True)


def apply_overrides(cfg: dict, assignments) -> dict:
    """Apply dotted-path overrides such as ``dts.count=60``; values parse
    as JSON literals, falling back to strings."""
    cfg = copy.deepcopy(cfg)
    for item in assignments or []:
        if "=" not in item:
            raise ConfigError(f"override must look like path=value, got {item!r}")
        path, _, text = item.partition("=")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = cfg
        keys = path.split(".")
        for key in keys[:-1]:
            node = _descend(node, key, path)
        leaf = keys[-1]
        if isinstance(node, list):
            node[_list_index(node, leaf, path)] = value
        elif isinstance(node, dict):
            node[leaf] = value
        else:
            raise ConfigError(f"override path {path!r} hits a scalar")
    return normalize_config(cfg)


def _descend(node, key, path):
    if isinstance(node, list):
        return node[_list_index(node, key, path)]
    if isinstance(node, dict):
        if key not in node:
            node[key] = {}
        return node[key]
    raise ConfigError(f"override path {path!r} hits a scalar at {key!r}")


def _list_index(node, key, path):
    try:
        idx = int(key)
    except ValueError:
        raise ConfigError(f"override path {path!r}: {key!r} is not a list index")
    if not -len(node) <= idx < len(node):
        raise ConfigError(f"override path {path!r}: index {idx} out of range")
    return idx


def type_sequence(n: int, n_types: int, proportions=None) -> list[int]:
    """Deterministic twin-type stream: round-robin by default, or the
    smoothest sequence matching the given proportions. Prefixes of a
    longer stream equal the shorter stream, keeping swept counts nested."""
    if n_types <= 0:
        raise ConfigError("at least one twin type is required")
    if proportions is None:
        return [k % n_types for k in range(n)]
    p = np.asarray(proportions, dtype=float)
    if len(p) != n_types or np.any(p < 0) or p.sum() <= 0:
        raise ConfigError("type_mix must be non-negative with a positive sum")
    p = p / p.sum()
    counts = np.zeros(n_types)
    out = []
    for k in range(n):
        deficits = p * (k + 1) - counts
        t = int(np.argmax(deficits))
        counts[t] += 1
        out.append(t)
    return out


def build_scenario(cfg: dict) -> Scenario:
    """Turn a normalized config dict into a runtime Scenario."""
    cfg = normalize_config(cfg)
    zone = cfg["zone"]
    grid = build_grid(zone["extent_m"], zone["resolution"])
    sensing_cfg = cfg["sensing"]
    g = make_density(grid, DensitySpec.from_dict(sensing_cfg["distribution"]), normalize=True)
    metaverse = MetaverseParams(
        slot=sensing_cfg["slot_s"],
        sensor_volume=sensing_cfg["sensor_volume_m3"],
        total_sensors=sensing_cfg["sensor_count"],
        topo_complexity=sensing_cfg["topo_complexity_cycles_per_bit"],
        sensing_density=sensing_cfg["density_bps_per_m3"],
    )
    servers = [
        EdgeServer(
            id=i,
            position=np.asarray(s["position_m"], dtype=float),
            compute_budget=float(s["compute_hz"]),
            metaverse_bandwidth=float(s["bandwidth_hz"]),
        )
        for i, s in enumerate(cfg["servers"])
    ]
    radio_cfg = cfg["radio"]
    radio = RadioParams(
        sensor_tx_power=dbm_to_watts(radio_cfg["sensor_tx_power_dbm"]),
        noise_spectral_density=dbm_to_watts(radio_cfg["noise_spectral_density_dbm_per_hz"]),
    )
    ch = radio_cfg["channel"]
    channel = ChannelModel(
        reference_gain=db_to_linear(ch["reference_gain_db"]),
        reference_distance=ch["reference_distance_m"],
        pathloss_exponent=ch["pathloss_exponent"],
        min_distance=ch["min_distance_m"],
    )
    dts_cfg = cfg["dts"]
    count = int(dts_cfg["count"])
    dts: list[DigitalTwin] = []
    pt_field = None
    if count > 0:
        pt_field = make_density(
            grid, DensitySpec.from_dict(dts_cfg["placement"]), normalize=True
        )
        positions = sample_points(pt_field, count, int(dts_cfg["placement_seed"]))
        types = dts_cfg["types"]
        order = type_sequence(count, len(types), dts_cfg["type_mix"])
        for k in range(count):
            t = types[order[k]]
            dts.append(
                DigitalTwin(
                    id=k,
                    position=positions[k],
                    type_index=order[k],
                    sync_intensity=float(t["sync_intensity_per_s"]),
                    data_size=float(t["data_size_bits"]),
                    twin_complexity=float(t["twin_complexity_cycles_per_bit"]),
                    tx_power=dbm_to_watts(float(t["tx_power_dbm"])),
                    bandwidth=float(t["bandwidth_hz"]),
                )
            )
    sol = cfg["solver"]
    options = SolverOptions(
        tol=float(sol["tol"]),
        max_iter=int(sol["max_iter"]),
        damping=float(sol["damping"]),
        alpha_floor=float(sol["alpha_floor"]),
        infeasible_policy=sol["infeasible_policy"],
        exhausted_policy=sol["exhausted_policy"],
    )
    return Scenario(
        grid=grid,
        sensing=g,
        servers=servers,
        dts=dts,
        radio=radio,
        channel=channel,
        metaverse=metaverse,
        options=options,
        pt_field=pt_field,
        seed=int(cfg["seed"]),
    )


def density_sigma(cfg: dict) -> float:
    """Standard deviation of the sensing hotspot, for metrics; NaN when
    the sensing distribution has no single spread parameter."""
    dist = cfg["sensing"]["distribution"]
    if dist.get("kind") == "truncated-gaussian":
        std = np.atleast_1d(np.asarray(dist["std_m"], dtype=float))
        return float(std.flat[0])
    return float("nan")
