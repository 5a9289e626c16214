"""Back-of-envelope bitrate calculator for head-mounted displays."""

from __future__ import annotations


def pixel_rate(fov_h_deg: float, fov_v_deg: float, ppd: float, eyes: float, fps: float) -> float:
    """Raw pixels per second for a display covering fov_h x fov_v degrees at ppd pixels/degree."""
    for name, v in (("fov_h_deg", fov_h_deg), ("fov_v_deg", fov_v_deg), ("ppd", ppd),
                    ("eyes", eyes), ("fps", fps)):
        if v <= 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return (fov_h_deg * ppd) * (fov_v_deg * ppd) * eyes * fps


def required_bitrate(fov_h_deg: float, fov_v_deg: float, ppd: float, eyes: float,
                     fps: float, bits_per_pixel: float, compression: float) -> float:
    """Bit rate in bit/s needed to stream the display after compression.

    fov_h*ppd * fov_v*ppd * eyes * fps * bits_per_pixel / compression.
    """
    if bits_per_pixel <= 0:
        raise ValueError(f"bits_per_pixel must be positive, got {bits_per_pixel}")
    if compression <= 0:
        raise ValueError(f"compression must be positive, got {compression}")
    return pixel_rate(fov_h_deg, fov_v_deg, ppd, eyes, fps) * bits_per_pixel / compression
