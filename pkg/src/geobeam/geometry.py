"""Ground-plane PPP sampling and GEO satellite geometry.

Users live on the tangent plane below the satellite; the planar offset
``(x, y)`` from the nadir point determines the slant distance, the
elevation-derived ``sin(theta)`` and the UPA direction cosines.
All lengths are meters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RegionTooDenseError, VectorCapError

GEO_ALTITUDE = 3.5786e7
SPEED_OF_LIGHT = 299_792_458.0
KA_BAND_FC = 20e9

DENSE_POINT_CAP = 1e8
VECTOR_CAP = 2**20


@dataclass(frozen=True)
class SystemConfig:
    """Array size, satellite altitude, carrier and transmit SNR."""

    M: int = 64
    H: float = GEO_ALTITUDE
    f_c: float = KA_BAND_FC
    c0: float = SPEED_OF_LIGHT
    P: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M!r}")
        if not self.H > 0:
            raise ValueError(f"H must be positive, got {self.H!r}")
        if not self.f_c > 0:
            raise ValueError(f"f_c must be positive, got {self.f_c!r}")
        if not self.c0 > 0:
            raise ValueError(f"c0 must be positive, got {self.c0!r}")
        if not self.P > 0:
            raise ValueError(f"P must be positive, got {self.P!r}")


@dataclass(frozen=True)
class PppConfig:
    intensity: float
    region_radius: float
    seed: int = 0
    point_cap: float = DENSE_POINT_CAP

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError(f"intensity must be positive, got {self.intensity!r}")
        if not self.region_radius > 0:
            raise ValueError(f"region_radius must be positive, got {self.region_radius!r}")
        if not math.isfinite(self.expected_count):
            raise ValueError("expected point count is not finite")

    @property
    def expected_count(self) -> float:
        return self.intensity * math.pi * self.region_radius**2


@dataclass(frozen=True)
class UserPosition:
    """A ground user and its derived spherical geometry."""

    x: float
    y: float
    r: float
    phi: float
    sin_theta: float
    d: float
    vx: float = field(repr=False)
    vy: float = field(repr=False)

    @property
    def direction(self) -> tuple[float, float]:
        return self.vx, self.vy


def position_from_polar(r: float, phi: float, cfg: SystemConfig) -> UserPosition:
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r!r}")
    d = math.hypot(r, cfg.H)
    sin_theta = r / d
    c, s = math.cos(phi), math.sin(phi)
    return UserPosition(
        x=r * c, y=r * s, r=r, phi=phi, sin_theta=sin_theta, d=d,
        vx=sin_theta * c, vy=sin_theta * s,
    )


def position_from_xy(x: float, y: float, cfg: SystemConfig) -> UserPosition:
    r = math.hypot(x, y)
    phi = math.atan2(y, x)
    d = math.hypot(r, cfg.H)
    sin_theta = r / d
    # direction cosines straight from (x, y) avoid a cos(atan2) round trip
    return UserPosition(
        x=x, y=y, r=r, phi=phi, sin_theta=sin_theta, d=d,
        vx=x / d, vy=y / d,
    )


def sin_theta_of(r, H):
    """Vectorized ``r / sqrt(r^2 + H^2)``."""
    r = np.asarray(r, dtype=float)
    return r / np.hypot(r, H)


def direction_cosines(r, phi, H):
    st = sin_theta_of(r, H)
    return st * np.cos(phi), st * np.sin(phi)


def sample_disk(rng: np.random.Generator, intensity: float, radius: float,
                point_cap: float = DENSE_POINT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Draw one PPP realization on a disk; returns polar arrays ``(r, phi)``."""
    mean = intensity * math.pi * radius**2
    if mean > point_cap:
        raise RegionTooDenseError(
            f"region too dense: expected {mean:.3g} points exceeds cap {point_cap:.3g}; "
            "shrink the region or use the order-statistic sampler"
        )
    n = rng.poisson(mean)
    r = radius * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return r, phi


def sample_ppp(cfg: PppConfig, sys: SystemConfig | None = None) -> list[UserPosition]:
    """Homogeneous PPP on the disk ``|x| < region_radius``, deterministic in ``cfg.seed``."""
    sys = sys or SystemConfig()
    rng = np.random.default_rng(cfg.seed)
    r, phi = sample_disk(rng, cfg.intensity, cfg.region_radius, cfg.point_cap)
    return [position_from_polar(float(ri), float(pi), sys) for ri, pi in zip(r, phi)]


def large_scale_fading(d, cfg: SystemConfig):
    """Free-space path gain ``(c0 / (4 pi f_c d))^2``."""
    return (cfg.c0 / (4.0 * math.pi * cfg.f_c * d)) ** 2


def build_channel(u: UserPosition, cfg: SystemConfig, cap: int = VECTOR_CAP) -> np.ndarray:
    """Explicit LoS channel ``sqrt(L) * M * (v(vx) kron v(vy))``; small-M oracle only."""
    from .array import steering_vector

    M = cfg.M
    if M * M > cap:
        raise VectorCapError(f"M^2 = {M * M} exceeds explicit vector cap {cap}; use closed-form path")
    L = large_scale_fading(u.d, cfg)
    return math.sqrt(L) * M * np.kron(steering_vector(u.vx, M), steering_vector(u.vy, M))
