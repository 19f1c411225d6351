"""UPA steering vectors and fixed-beam gains.

The closed-form gain is the product of two per-axis Fejer kernels in the
direction-cosine differences between the user and the beam center.  Explicit
steering vectors are only used as a small-M oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import VectorCapError
from .geometry import VECTOR_CAP, GEO_ALTITUDE, UserPosition, direction_cosines

SINGULAR_EPS = 1e-12
GAIN_FLOOR = 1e-300


@dataclass(frozen=True)
class SteeringDirection:
    vx: float
    vy: float

    def __post_init__(self):
        if self.vx**2 + self.vy**2 > 1 + 1e-12:
            raise ValueError(f"direction cosines ({self.vx}, {self.vy}) lie outside the unit disk")


@dataclass(frozen=True)
class BeamConfig:
    """A fixed beam on the ``(2n/M^l, 2m/M^l)`` direction-cosine grid."""

    grid_n: int
    grid_m: int
    ell: float
    direction: SteeringDirection

    @classmethod
    def grid(cls, n: int, m: int, ell: float, M: int) -> "BeamConfig":
        spacing = 2.0 / M**ell
        return cls(n, m, ell, SteeringDirection(n * spacing, m * spacing))

    @classmethod
    def nadir(cls, ell: float = 1.0) -> "BeamConfig":
        return cls(0, 0, ell, SteeringDirection(0.0, 0.0))

    @property
    def is_nadir(self) -> bool:
        return self.grid_n == 0 and self.grid_m == 0


NADIR = BeamConfig.nadir()


def steering_vector(x: float, M: int, cap: int = VECTOR_CAP) -> np.ndarray:
    if M < 1:
        raise ValueError("M must be >= 1")
    if M > cap:
        raise VectorCapError(f"M = {M} exceeds explicit vector cap {cap}")
    return np.exp(-1j * math.pi * np.arange(M) * x) / math.sqrt(M)


def dirichlet_ratio(delta, M):
    """Signed ``sin(pi M d / 2) / (M sin(pi d / 2))``, exactly +-1 at the removable singularity."""
    delta = np.asarray(delta, dtype=float)
    den = np.sin(0.5 * math.pi * delta)
    num = np.sin(0.5 * math.pi * M * delta)
    singular = np.abs(den) < SINGULAR_EPS
    safe = np.where(singular, 1.0, den)
    # limit of the ratio at d = 2k is (-1)^{k(M-1)}
    k = np.rint(0.5 * delta)
    limit = np.where((k * (M - 1)) % 2 == 0, 1.0, -1.0)
    return np.where(singular, limit, num / (M * safe))


def fejer_factor(delta, M):
    """Normalized per-axis Fejer kernel in ``[0, 1]``."""
    f = dirichlet_ratio(delta, M) ** 2
    f = np.minimum(f, 1.0)
    return np.where(f < GAIN_FLOOR, 0.0, f)


def beam_gain(vx, vy, bx, by, M):
    """Vectorized closed-form gain for user cosines ``(vx, vy)`` and beam cosines ``(bx, by)``."""
    return fejer_factor(np.subtract(vx, bx), M) * fejer_factor(np.subtract(vy, by), M)


def beam_gain_closed_form(direction: SteeringDirection, beam: BeamConfig, M: int) -> float:
    b = beam.direction
    return float(beam_gain(direction.vx, direction.vy, b.vx, b.vy, M))


def beam_gain_oracle(direction: SteeringDirection, beam: BeamConfig, M: int) -> float:
    """Explicit ``|v_user^H f_k|^2`` with Kronecker steering vectors."""
    b = beam.direction
    vu = np.kron(steering_vector(direction.vx, M), steering_vector(direction.vy, M))
    fk = np.kron(steering_vector(b.vx, M), steering_vector(b.vy, M))
    return float(abs(np.vdot(vu, fk)) ** 2)


def beam_gain_user(u: UserPosition, beam: BeamConfig, M: int) -> float:
    b = beam.direction
    return float(beam_gain(u.vx, u.vy, b.vx, b.vy, M))


def interference_gain(u: UserPosition, beam_j: BeamConfig, M: int, ell: float) -> float:
    """Power-split leakage ``M^(2-2l) f_j`` of beam ``j`` onto user ``u``."""
    if not 0 < ell <= 1:
        raise ValueError(f"ell must lie in (0, 1], got {ell!r}")
    return M ** (2 - 2 * ell) * beam_gain_user(u, beam_j, M)


def nadir_gain_curve(r, phi: float, M: int, H: float = GEO_ALTITUDE):
    """``f(r, phi)`` of the nadir beam along a ray of fixed azimuth."""
    vx, vy = direction_cosines(r, phi, H)
    return beam_gain(vx, vy, 0.0, 0.0, M)


def first_null_radius(M: int, phi: float, H: float = GEO_ALTITUDE) -> float:
    """Radius where the dominant axis first hits ``(pi M / 2) sin(theta) |cos|`` = pi."""
    c = max(abs(math.cos(phi)), abs(math.sin(phi)))
    s = 2.0 / (M * c)
    if s >= 1:
        return math.inf
    return H * s / math.sqrt(1.0 - s * s)


def find_first_null(M: int, phi: float, H: float = GEO_ALTITUDE, n_scan: int = 4096) -> float:
    """Locate the first main-lobe null numerically.

    The first null belongs to the axis with the larger direction-cosine
    component; its signed Dirichlet ratio has a simple zero there, which is
    bracketed by an outward scan and refined with Brent's method.
    """
    use_x = abs(math.cos(phi)) >= abs(math.sin(phi))

    def amplitude(r):
        vx, vy = direction_cosines(r, phi, H)
        return dirichlet_ratio(vx if use_x else vy, M)

    # the null lies inside sin(theta) = 4/M for any azimuth
    s_max = min(4.0 / M, 0.999)
    r_max = H * s_max / math.sqrt(1.0 - s_max * s_max)
    grid = np.linspace(0.0, r_max, n_scan)
    a = amplitude(grid)
    idx = np.nonzero(np.sign(a[1:]) != np.sign(a[:-1]))[0]
    if idx.size == 0:
        raise ValueError("no null found in scan range")
    i = int(idx[0])
    if a[i + 1] == 0.0:
        return float(grid[i + 1])
    return brentq(lambda r: float(amplitude(r)), grid[i], grid[i + 1], xtol=1e-9 * r_max, rtol=1e-14)
