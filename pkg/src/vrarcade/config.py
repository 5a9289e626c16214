"""Scenario configuration: defaults, validation, and deterministic layout."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import AntennaPattern

SCHEMES = ("Proposed", "Baseline1", "Baseline2")

# Defaults for the arcade: 4 APs, 4 servers, 16 players, 100 actions, z = 0.8,
# 10 dBm transmit power, 60 GHz carrier. Everything is overridable from the
# scenario file.
DEFAULTS: dict = {
    "arena_width": 10.0,          # m
    "arena_depth": 10.0,          # m
    "pod_grid": [4, 4],           # rows x cols of player pods
    "pod_size": 2.0,              # m, side of the square a player roams in
    "ceiling_height": 3.0,        # m, AP mounting height
    "player_height": 1.7,         # m, head/antenna height
    "n_aps": 4,
    "ap_positions": None,         # list of [x, y, z]; default ceiling grid
    "n_servers": 4,
    "server_rate": 150.0,         # HD frames per second per server
    "cache_capacity": 64,         # frames
    "n_players": 16,
    "n_actions": 100,
    "zipf_z": 0.8,
    "action_intensity": 1.0,      # impulse actions per player per second
    "impact_density": 0.2,        # P(action affects a given player)
    "popularity_alpha": 1.0,      # additive smoothing of the learned popularity
    "top_k_actions": 3,           # popular-action variants prefetched per pose
    "carrier_freq": 60e9,         # Hz
    "bandwidth": 2.16e9,          # Hz
    "tx_power": 10.0,             # dBm
    "noise_figure": 9.0,          # dB
    "antenna": {"mainlobe_gain_db": 10.0, "sidelobe_gain_db": -10.0, "beamwidth_deg": 30.0},
    "blockage_loss": 30.0,        # dB, body attenuation in [20, 35]
    "body_radius": 0.3,           # m, blocking cylinder radius
    "self_block_cone": 120.0,     # degrees, rear self-blockage cone
    "rate_requirement": 2e9,      # bit/s per player
    "mc_rate_threshold": None,    # bit/s; default = rate_requirement
    "mc_min_gain_db": 1.5,        # minimum combined-SINR gain to accept a second AP
    "latency": {"d_th": 0.020, "epsilon": 0.01},
    "reliability_threshold": 10e-3,   # s, communication-delay reliability bound
    "fps": 120.0,                 # frame cadence per player
    "hd_size": None,              # bits per HD frame; default rate_requirement / fps
    "prediction_window": 40,      # slots of exact pose look-ahead
    "pose_grid": 0.1,             # m, cache-key position quantization
    "azimuth_bin_deg": 5.0,       # cache-key azimuth quantization
    "max_speed": 1.0,             # m/s inside the pod
    "azimuth_sigma_deg": 10.0,    # head-azimuth random-walk step per slot
    "avg_rate_smoothing": 0.1,    # EMA factor for the per-player average rate
    "slot_duration": 0.5e-3,      # s
    "sim_duration": 1.0,          # s per replication
    "warmup_frac": 0.1,           # leading fraction of slots excluded from records
    "n_replications": 50,
    "scheme": "Proposed",
    "seed": 1234,
}

_ANTENNA_KEYS = frozenset(DEFAULTS["antenna"])
_LATENCY_KEYS = frozenset(DEFAULTS["latency"])


class ConfigError(ValueError):
    """A scenario field violated its constraint; the message names the field."""


@dataclass(frozen=True)
class Scenario:
    """Fully-defaulted, invariant-checked experiment parameterization."""

    arena_width: float
    arena_depth: float
    pod_grid: tuple[int, int]
    pod_size: float
    ceiling_height: float
    player_height: float
    n_aps: int
    ap_positions: np.ndarray          # (n_aps, 3)
    pod_centers: np.ndarray           # (rows*cols, 2)
    n_servers: int
    server_rate: float
    cache_capacity: int
    n_players: int
    n_actions: int
    zipf_z: float
    action_intensity: float
    impact_density: float
    popularity_alpha: float
    top_k_actions: int
    carrier_freq: float
    bandwidth: float
    tx_power: float
    noise_figure: float
    antenna: AntennaPattern
    blockage_loss: float
    body_radius: float
    self_block_cone: float
    rate_requirement: float
    mc_rate_threshold: float
    mc_min_gain_db: float
    d_th: float
    epsilon: float
    reliability_threshold: float
    fps: float
    hd_size: float
    prediction_window: int
    pose_grid: float
    azimuth_bin_deg: float
    max_speed: float
    azimuth_sigma_deg: float
    avg_rate_smoothing: float
    slot_duration: float
    sim_duration: float
    warmup_frac: float
    n_replications: int
    scheme: str
    seed: int

    @property
    def compute_demand(self) -> float:
        """Seconds of one server needed to render one HD frame."""
        return 1.0 / self.server_rate

    @property
    def n_slots(self) -> int:
        return int(round(self.sim_duration / self.slot_duration))

    @property
    def warmup_slots(self) -> int:
        return int(self.n_slots * self.warmup_frac)

    @property
    def frame_period_slots(self) -> int:
        """Slots between periodic frame requests of one player."""
        return max(1, int(round(1.0 / (self.fps * self.slot_duration))))

    def replace(self, **overrides) -> "Scenario":
        """Re-validate with some raw fields overridden."""
        raw = self.to_raw_dict()
        raw.update(overrides)
        return validate_config(raw)

    def to_raw_dict(self) -> dict:
        """Raw (pre-materialization) field dict, re-loadable via validate_config."""
        d = {k: getattr(self, k) for k in DEFAULTS if k not in ("antenna", "latency", "ap_positions", "hd_size", "mc_rate_threshold")}
        d["pod_grid"] = list(self.pod_grid)
        d["ap_positions"] = self.ap_positions.tolist()
        d["antenna"] = {"mainlobe_gain_db": self.antenna.mainlobe_gain_db,
                        "sidelobe_gain_db": self.antenna.sidelobe_gain_db,
                        "beamwidth_deg": self.antenna.beamwidth_deg}
        d["latency"] = {"d_th": self.d_th, "epsilon": self.epsilon}
        d["hd_size"] = self.hd_size
        d["mc_rate_threshold"] = self.mc_rate_threshold
        return d

    def to_resolved_dict(self) -> dict:
        """Everything resolved, for the results JSON sidecar."""
        d = self.to_raw_dict()
        d["pod_centers"] = self.pod_centers.tolist()
        d["compute_demand"] = self.compute_demand
        d["n_slots"] = self.n_slots
        d["frame_period_slots"] = self.frame_period_slots
        return d


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{field_name}: {message}")


def _as_int(value, field_name: str) -> int:
    if isinstance(value, bool) or (not isinstance(value, int) and not (isinstance(value, float) and value.is_integer())):
        raise ConfigError(f"{field_name}: expected an integer, got {value!r}")
    return int(value)


def default_ap_positions(n_aps: int, arena_width: float, arena_depth: float,
                         ceiling_height: float) -> np.ndarray:
    """Ceiling-mounted ring around the arena center.

    The ring keeps access points pairwise comparable in distance from every pod
    (for 4 APs it is the N/E/S/W cross), which is what makes a second serving
    link worth combining when the primary one is body-blocked.
    """
    cx, cy = arena_width / 2.0, arena_depth / 2.0
    if n_aps == 1:
        return np.array([[cx, cy, ceiling_height]], dtype=np.float64)
    radius = min(arena_width, arena_depth) / 3.0
    pos = []
    for k in range(n_aps):
        theta = -math.pi / 2.0 + 2.0 * math.pi * k / n_aps
        pos.append([cx + radius * math.cos(theta), cy + radius * math.sin(theta), ceiling_height])
    return np.array(pos, dtype=np.float64)


def pod_center_grid(pod_grid: tuple[int, int], arena_width: float, arena_depth: float) -> np.ndarray:
    rows, cols = pod_grid
    centers = []
    for r in range(rows):
        for c in range(cols):
            centers.append([(c + 0.5) * arena_width / cols, (r + 0.5) * arena_depth / rows])
    return np.array(centers, dtype=np.float64)


def validate_config(raw: dict) -> Scenario:
    """Apply defaults over a parsed scenario document, check every invariant,
    and materialize AP/pod positions deterministically.

    Unknown fields are rejected so typos in sweep scripts fail loudly.
    """
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(unknown))}")

    cfg = dict(DEFAULTS)
    cfg.update({k: v for k, v in raw.items() if k not in ("antenna", "latency")})
    for group, allowed in (("antenna", _ANTENNA_KEYS), ("latency", _LATENCY_KEYS)):
        merged = dict(DEFAULTS[group])
        if group in raw:
            sub = raw[group]
            if not isinstance(sub, dict):
                raise ConfigError(f"{group}: expected an object")
            bad = set(sub) - allowed
            if bad:
                raise ConfigError(f"{group}: unknown field(s): {', '.join(sorted(bad))}")
            merged.update(sub)
        cfg[group] = merged

    for name in ("n_aps", "n_servers", "n_players", "n_actions", "n_replications"):
        cfg[name] = _as_int(cfg[name], name)
        _require(cfg[name] >= 1, name, f"must be >= 1, got {cfg[name]}")
    for name in ("cache_capacity", "prediction_window", "top_k_actions"):
        cfg[name] = _as_int(cfg[name], name)
        _require(cfg[name] >= 0, name, f"must be >= 0, got {cfg[name]}")
    cfg["seed"] = _as_int(cfg["seed"], "seed")
    _require(0 <= cfg["seed"] < 2 ** 64, "seed", "must fit in 64 bits")

    grid = cfg["pod_grid"]
    _require(isinstance(grid, (list, tuple)) and len(grid) == 2, "pod_grid", "expected [rows, cols]")
    rows, cols = (_as_int(grid[0], "pod_grid"), _as_int(grid[1], "pod_grid"))
    _require(rows >= 1 and cols >= 1, "pod_grid", "rows and cols must be >= 1")
    _require(rows * cols >= cfg["n_players"], "pod_grid",
             f"{rows}x{cols} pods cannot hold {cfg['n_players']} players")

    _require(cfg["zipf_z"] >= 0, "zipf_z", f"must be >= 0, got {cfg['zipf_z']}")
    _require(0 < cfg["latency"]["epsilon"] < 1, "epsilon",
             f"must be in the open interval (0, 1), got {cfg['latency']['epsilon']}")
    _require(cfg["latency"]["d_th"] > 0, "d_th", f"must be > 0, got {cfg['latency']['d_th']}")
    _require(20.0 <= cfg["blockage_loss"] <= 35.0, "blockage_loss",
             f"must be in [20, 35] dB, got {cfg['blockage_loss']}")
    _require(cfg["slot_duration"] > 0, "slot_duration", "must be > 0")
    _require(cfg["sim_duration"] >= 0, "sim_duration", "must be >= 0")
    _require(cfg["action_intensity"] >= 0, "action_intensity", "must be >= 0")
    _require(0 <= cfg["impact_density"] <= 1, "impact_density", "must be in [0, 1]")
    _require(cfg["popularity_alpha"] >= 0, "popularity_alpha", "must be >= 0")
    _require(0 <= cfg["warmup_frac"] < 1, "warmup_frac", "must be in [0, 1)")
    _require(0 < cfg["avg_rate_smoothing"] <= 1, "avg_rate_smoothing", "must be in (0, 1]")
    for name in ("arena_width", "arena_depth", "pod_size", "ceiling_height", "player_height",
                 "server_rate", "carrier_freq", "bandwidth", "rate_requirement", "fps",
                 "reliability_threshold", "pose_grid", "azimuth_bin_deg", "body_radius",
                 "max_speed"):
        _require(cfg[name] > 0, name, f"must be > 0, got {cfg[name]}")
    _require(0 < cfg["self_block_cone"] < 360, "self_block_cone", "must be in (0, 360) degrees")
    _require(cfg["azimuth_sigma_deg"] >= 0, "azimuth_sigma_deg", "must be >= 0")
    _require(cfg["scheme"] in SCHEMES, "scheme",
             f"must be one of {', '.join(SCHEMES)}, got {cfg['scheme']!r}")

    try:
        pattern = AntennaPattern(**cfg["antenna"])
    except ValueError as e:
        raise ConfigError(f"antenna: {e}") from e

    hd_size = cfg["hd_size"] if cfg["hd_size"] is not None else cfg["rate_requirement"] / cfg["fps"]
    _require(hd_size > 0, "hd_size", f"must be > 0, got {hd_size}")
    mc_thr = cfg["mc_rate_threshold"] if cfg["mc_rate_threshold"] is not None else cfg["rate_requirement"]
    _require(mc_thr >= 0, "mc_rate_threshold", f"must be >= 0, got {mc_thr}")
    _require(cfg["mc_min_gain_db"] >= 0, "mc_min_gain_db", "must be >= 0")

    if cfg["ap_positions"] is not None:
        ap_pos = np.asarray(cfg["ap_positions"], dtype=np.float64)
        _require(ap_pos.ndim == 2 and ap_pos.shape == (cfg["n_aps"], 3), "ap_positions",
                 f"expected {cfg['n_aps']} [x, y, z] triples")
    else:
        ap_pos = default_ap_positions(cfg["n_aps"], cfg["arena_width"], cfg["arena_depth"],
                                      cfg["ceiling_height"])
    pods = pod_center_grid((rows, cols), cfg["arena_width"], cfg["arena_depth"])

    return Scenario(
        arena_width=float(cfg["arena_width"]), arena_depth=float(cfg["arena_depth"]),
        pod_grid=(rows, cols), pod_size=float(cfg["pod_size"]),
        ceiling_height=float(cfg["ceiling_height"]), player_height=float(cfg["player_height"]),
        n_aps=cfg["n_aps"], ap_positions=ap_pos, pod_centers=pods,
        n_servers=cfg["n_servers"], server_rate=float(cfg["server_rate"]),
        cache_capacity=cfg["cache_capacity"], n_players=cfg["n_players"],
        n_actions=cfg["n_actions"], zipf_z=float(cfg["zipf_z"]),
        action_intensity=float(cfg["action_intensity"]), impact_density=float(cfg["impact_density"]),
        popularity_alpha=float(cfg["popularity_alpha"]), top_k_actions=cfg["top_k_actions"],
        carrier_freq=float(cfg["carrier_freq"]), bandwidth=float(cfg["bandwidth"]),
        tx_power=float(cfg["tx_power"]), noise_figure=float(cfg["noise_figure"]),
        antenna=pattern, blockage_loss=float(cfg["blockage_loss"]),
        body_radius=float(cfg["body_radius"]), self_block_cone=float(cfg["self_block_cone"]),
        rate_requirement=float(cfg["rate_requirement"]), mc_rate_threshold=float(mc_thr),
        mc_min_gain_db=float(cfg["mc_min_gain_db"]),
        d_th=float(cfg["latency"]["d_th"]), epsilon=float(cfg["latency"]["epsilon"]),
        reliability_threshold=float(cfg["reliability_threshold"]), fps=float(cfg["fps"]),
        hd_size=float(hd_size), prediction_window=cfg["prediction_window"],
        pose_grid=float(cfg["pose_grid"]), azimuth_bin_deg=float(cfg["azimuth_bin_deg"]),
        max_speed=float(cfg["max_speed"]), azimuth_sigma_deg=float(cfg["azimuth_sigma_deg"]),
        avg_rate_smoothing=float(cfg["avg_rate_smoothing"]),
        slot_duration=float(cfg["slot_duration"]), sim_duration=float(cfg["sim_duration"]),
        warmup_frac=float(cfg["warmup_frac"]), n_replications=cfg["n_replications"],
        scheme=cfg["scheme"], seed=cfg["seed"],
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read a UTF-8 JSON scenario document and validate it."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"scenario file {path}: invalid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"scenario file {path}: top level must be an object")
    return validate_config(raw)
