"""Directional 60 GHz indoor link model.

Free-space reference at 1 m plus log-distance decay (LOS exponent 2), flat-top
sectored antenna gains, geometric body/self blockage in the horizontal plane, and
non-coherent power combining across serving access points. No small-scale fading:
blockage is the dominant impairment at these frequencies.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0
REFERENCE_DISTANCE_M = 1.0
PATH_LOSS_EXPONENT = 2.0
THERMAL_NOISE_DBM_HZ = -174.0


def wrap_angle(a):
    """Normalize angle(s) to (-pi, pi]."""
    w = -((-np.asarray(a) + np.pi) % (2 * np.pi) - np.pi)
    return w


@dataclass(frozen=True)
class AntennaPattern:
    """Flat-top sectored beam: mainlobe gain inside the beamwidth, sidelobe outside."""

    mainlobe_gain_db: float
    sidelobe_gain_db: float
    beamwidth_deg: float

    def __post_init__(self) -> None:
        if self.mainlobe_gain_db <= self.sidelobe_gain_db:
            raise ValueError("mainlobe_gain_db must exceed sidelobe_gain_db")
        if not 0 < self.beamwidth_deg < 360:
            raise ValueError(f"beamwidth_deg must be in (0, 360), got {self.beamwidth_deg}")


@dataclass(frozen=True)
class LinkGeometry:
    """Geometry of one AP-player link; angles normalized to (-pi, pi]."""

    ap_position: np.ndarray        # (3,) meters
    player_position: np.ndarray    # (3,) meters
    head_azimuth: float            # radians

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(self.ap_position - self.player_position))

    @property
    def azimuth_player_to_ap(self) -> float:
        d = self.ap_position - self.player_position
        return float(wrap_angle(math.atan2(d[1], d[0])))

    @property
    def azimuth_ap_to_player(self) -> float:
        return float(wrap_angle(self.azimuth_player_to_ap + math.pi))


@dataclass(frozen=True)
class LinkBudget:
    """Resolved budget of one link for one slot."""

    blocked: bool
    path_loss_db: float
    tx_gain_db: float
    rx_gain_db: float
    rx_power_dbm: float
    sinr_db: float
    rate_bps: float


def path_loss_db(distance_m, carrier_hz: float, blocked=False, blockage_loss_db: float = 0.0):
    """Log-distance path loss in dB; distances below the 1 m reference are clamped.

    Accepts scalars or arrays. Blocked links take the full blockage penalty on top
    of the LOS loss, so path_loss(blocked) - path_loss(LOS) == blockage_loss exactly.
    """
    d = np.asarray(distance_m, dtype=np.float64)
    clamped = d < REFERENCE_DISTANCE_M
    if np.any(clamped):
        log.debug("clamping %d sub-reference link distance(s) to %g m",
                  int(np.count_nonzero(clamped)), REFERENCE_DISTANCE_M)
        d = np.maximum(d, REFERENCE_DISTANCE_M)
    wavelength = SPEED_OF_LIGHT / carrier_hz
    fspl_ref = 20.0 * np.log10(4.0 * np.pi * REFERENCE_DISTANCE_M / wavelength)
    pl = fspl_ref + 10.0 * PATH_LOSS_EXPONENT * np.log10(d / REFERENCE_DISTANCE_M)
    pl = pl + np.where(np.asarray(blocked), blockage_loss_db, 0.0)
    return float(pl) if pl.ndim == 0 else pl


def antenna_gain_db(offset_rad, pattern: AntennaPattern):
    """Sectored gain: mainlobe iff |offset| <= beamwidth/2 (closed boundary).

    The boundary carries a 1e-12 rad tolerance so angle normalization round-off
    cannot flip an exactly-on-edge offset to the sidelobe.
    """
    half = math.radians(pattern.beamwidth_deg) / 2.0
    off = np.abs(wrap_angle(offset_rad))
    g = np.where(off <= half + 1e-12, pattern.mainlobe_gain_db, pattern.sidelobe_gain_db)
    return float(g) if g.ndim == 0 else g


def bodies_block_segments(starts_xy: np.ndarray, ends_xy: np.ndarray, bodies_xy: np.ndarray,
                          body_radius: float, exclude: np.ndarray | None = None) -> np.ndarray:
    """Whether each 2D segment is cut by any body disc.

    starts_xy, ends_xy: (L, 2); bodies_xy: (B, 2); exclude: optional (L, B) bool mask
    of bodies to ignore per segment (a player never blocks their own link).
    Returns (L,) bool.
    """
    starts = np.atleast_2d(starts_xy).astype(np.float64)
    ends = np.atleast_2d(ends_xy).astype(np.float64)
    bodies = np.atleast_2d(bodies_xy).astype(np.float64)
    if bodies.shape[0] == 0:
        return np.zeros(starts.shape[0], dtype=bool)
    seg = ends - starts                                    # (L, 2)
    seg_len2 = np.einsum("ld,ld->l", seg, seg)             # (L,)
    rel = bodies[None, :, :] - starts[:, None, :]          # (L, B, 2)
    t = np.einsum("lbd,ld->lb", rel, seg)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(seg_len2[:, None] > 0, t / np.where(seg_len2[:, None] == 0, 1, seg_len2[:, None]), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = starts[:, None, :] + t[..., None] * seg[:, None, :]
    dist = np.linalg.norm(bodies[None, :, :] - closest, axis=-1)   # (L, B)
    hit = dist < body_radius
    if exclude is not None:
        hit = hit & ~exclude
    return hit.any(axis=1)


def self_blockage(players_xy: np.ndarray, aps_xy: np.ndarray, head_azimuth: np.ndarray,
                  cone_deg: float) -> np.ndarray:
    """Whether each AP falls inside each player's rear self-blockage cone.

    players_xy: (U, 2); aps_xy: (A, 2); head_azimuth: (U,). Returns (U, A) bool.
    An AP directly overhead (no horizontal offset) is never self-blocked.
    """
    players = np.atleast_2d(players_xy)
    aps = np.atleast_2d(aps_xy)
    d = aps[None, :, :] - players[:, None, :]              # (U, A, 2)
    horiz = np.linalg.norm(d, axis=-1)
    to_ap = np.arctan2(d[..., 1], d[..., 0])
    rear = wrap_angle(np.asarray(head_azimuth)[:, None] + np.pi)
    off = np.abs(wrap_angle(to_ap - rear))
    return (off <= math.radians(cone_deg) / 2.0) & (horiz > 1e-9)


def blockage_state(link: LinkGeometry, others_xy: np.ndarray, body_radius: float,
                   self_block_cone_deg: float) -> bool:
    """Blocked iff another player's body cuts the 2D AP-player segment or the AP
    sits in the player's rear self-blockage cone."""
    p = link.player_position[:2][None, :]
    a = link.ap_position[:2][None, :]
    others = np.asarray(others_xy, dtype=np.float64).reshape(-1, 3)[:, :2] \
        if np.asarray(others_xy).size else np.zeros((0, 2))
    body = bool(bodies_block_segments(p, a, others, body_radius)[0])
    selfb = bool(self_blockage(p, a, np.array([link.head_azimuth]), self_block_cone_deg)[0, 0])
    return body or selfb


def noise_power_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise floor over the given bandwidth plus receiver noise figure."""
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def _dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=np.float64) / 10.0)


def sinr_db(serving_dbm, interferer_dbm, noise_dbm: float) -> float:
    """Non-coherent combining: serving powers add in the numerator, active
    interferers plus noise in the denominator. No phase alignment is assumed."""
    serving = np.atleast_1d(serving_dbm)
    if serving.size == 0:
        raise ValueError("serving set must be non-empty")
    signal = _dbm_to_mw(serving).sum()
    interference = _dbm_to_mw(np.atleast_1d(interferer_dbm)).sum() if np.asarray(interferer_dbm).size else 0.0
    noise = float(_dbm_to_mw(noise_dbm))
    return 10.0 * math.log10(signal / (noise + interference))


def achievable_rate(sinr_db_value: float, bandwidth_hz: float) -> float:
    """Shannon rate bandwidth * log2(1 + snr) in bit/s."""
    if bandwidth_hz <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth_hz}")
    return bandwidth_hz * math.log2(1.0 + 10.0 ** (sinr_db_value / 10.0))
