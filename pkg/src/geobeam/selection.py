"""Multicast user selection within a radius and the law of the decisive distance r_N.

``lambda * pi * r_N^2`` of the N-th nearest PPP point is Gamma(N, 1); this lets
the Monte Carlo layer draw ``r_N`` directly without instantiating the PPP.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientUsersError
from .geometry import UserPosition
from .special import regularized_incomplete_gamma

EXPONENTIAL_SUM_MAX_N = 32


class Policy(str, enum.Enum):
    NEAREST_N = "NEAREST_N"
    RANDOM_WITHIN_R = "RANDOM_WITHIN_R"


@dataclass(frozen=True)
class SelectionConfig:
    """``R=None`` lets the estimators derive the radius from the scaling exponents."""

    N: int
    R: float | None = None
    policy: Policy = Policy.NEAREST_N

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if self.R is not None and not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R!r}")
        object.__setattr__(self, "policy", Policy(self.policy))


@dataclass(frozen=True)
class SelectedSet:
    users: tuple[UserPosition, ...]

    @property
    def r_N(self) -> float:
        return self.users[-1].r

    @property
    def phi_N(self) -> float:
        return self.users[-1].phi

    def __len__(self):
        return len(self.users)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def select_indices(r: np.ndarray, cfg: SelectionConfig, rng: np.random.Generator) -> np.ndarray:
    """Indices of the selected users, distance-sorted; array-level core of :func:`select`."""
    inside = np.flatnonzero(r < (math.inf if cfg.R is None else cfg.R))
    if inside.size < cfg.N:
        raise InsufficientUsersError(int(inside.size), cfg.N)
    if cfg.policy is Policy.NEAREST_N:
        if inside.size > cfg.N:
            part = np.argpartition(r[inside], cfg.N - 1)[: cfg.N]
            chosen = inside[part]
        else:
            chosen = inside
    else:
        chosen = rng.choice(inside, size=cfg.N, replace=False) if inside.size > cfg.N else inside
    return chosen[np.argsort(r[chosen], kind="stable")]


def select(users: list[UserPosition], cfg: SelectionConfig, seed=None) -> SelectedSet:
    r = np.fromiter((u.r for u in users), dtype=float, count=len(users))
    idx = select_indices(r, cfg, _rng(seed))
    return SelectedSet(tuple(users[i] for i in idx))


def nth_distance_cdf(r, N: int, lam: float) -> float:
    """``P[r_N < r] = P(N, lambda pi r^2)``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return regularized_incomplete_gamma(N, lam * math.pi * r * r)


def nth_distance_interval_prob(R_a: float, R_b: float, N: int, lam: float) -> float:
    if not 0 <= R_a <= R_b:
        raise ValueError(f"need 0 <= R_a <= R_b, got {R_a}, {R_b}")
    if R_a == R_b:
        return 0.0
    hi = 1.0 if math.isinf(R_b) else nth_distance_cdf(R_b, N, lam)
    return min(1.0, max(0.0, hi - nth_distance_cdf(R_a, N, lam)))


def sample_gamma(rng: np.random.Generator, N: int, size) -> np.ndarray:
    """Gamma(N, 1) draws: exact exponential sums for small N, rejection sampling above."""
    if N <= EXPONENTIAL_SUM_MAX_N:
        shape = (size, N) if np.ndim(size) == 0 else (*size, N)
        return rng.standard_exponential(shape).sum(axis=-1)
    return rng.standard_gamma(N, size)


def sample_nth_distance(N: int, lam: float, seed=None, size=None):
    """Draw the N-th nearest-neighbor distance of a PPP of intensity ``lam``."""
    if N < 1 or not lam > 0:
        raise ValueError("need N >= 1 and lam > 0")
    rng = _rng(seed)
    x = sample_gamma(rng, N, 1 if size is None else size)
    r = np.sqrt(x / (lam * math.pi))
    return float(r[0]) if size is None else r


def sample_random_within_r(N: int, R: float, rng: np.random.Generator, size) -> np.ndarray:
    """r_N of a uniform N-subset of in-radius users.

    Conditional on the in-radius count, PPP points are iid uniform on the disk,
    so r_N is the maximum of N iid disk radii: ``R * U^(1/(2N))``.
    """
    return R * rng.random(size) ** (0.5 / N)


def insufficient_probability(N: int, lam: float, R: float) -> float:
    """``P[Poisson(lambda pi R^2) < N]``: chance that selection is impossible."""
    if math.isinf(R):
        return 0.0
    return 1.0 - regularized_incomplete_gamma(N, lam * math.pi * R * R)
