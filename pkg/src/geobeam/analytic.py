"""Closed-form radii, probabilities and rate bounds of the fixed-beam multicast model.

Rates are in nats.  ``lam`` is the PPP intensity in users per square meter;
with the scaling normalization ``lam = M^q / (pi H^2)`` the grouped term
``lam * pi * H^2`` equals ``M^q``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .errors import DomainError
from .geometry import GEO_ALTITUDE
from .selection import nth_distance_interval_prob
from .special import (kummer_1f1_bound_form, regularized_incomplete_gamma,
                      standard_normal_cdf)

PHI_ZERO_EPS = 1e-9


class ParameterWarning(UserWarning):
    """Scaling exponents lie outside a theorem's admissible range."""


@dataclass(frozen=True)
class ScalingParams:
    q: float = 1.8
    t: float = 0.3
    p: float = 0.4
    eps: float = 0.1
    s: float = 0.3
    ell: float = 0.5

    def theorem2_violations(self) -> list[str]:
        out = []
        if not 0 < self.t < 1:
            out.append(f"t={self.t} not in (0, 1)")
        if not 0 < self.p < 1:
            out.append(f"p={self.p} not in (0, 1)")
        if not self.eps > 0:
            out.append(f"eps={self.eps} must be > 0")
        lo = self.p + self.t + 1 + self.eps / 2
        hi = 2 + self.t + self.eps / 2
        if not lo < self.q < hi:
            out.append(f"q={self.q} not in ({lo:.6g}, {hi:.6g})")
        return out

    def theorem3_violations(self) -> list[str]:
        out = []
        if not 0 < self.s < 1:
            out.append(f"s={self.s} not in (0, 1)")
        if not 0 < self.ell < 1:
            out.append(f"ell={self.ell} not in (0, 1)")
        if not self.s + self.ell < 1:
            out.append(f"s + ell = {self.s + self.ell} not < 1")
        return out

    def check_theorem2(self) -> bool:
        """Warn (never raise) when outside the rate-scaling regime."""
        bad = self.theorem2_violations()
        for msg in bad:
            warnings.warn(f"outside rate-scaling range: {msg}", ParameterWarning, stacklevel=2)
        return not bad

    def check_theorem3(self) -> bool:
        bad = self.theorem3_violations()
        for msg in bad:
            warnings.warn(f"outside interference range: {msg}", ParameterWarning, stacklevel=2)
        return not bad


def density(M: float, q: float, H: float = GEO_ALTITUDE) -> float:
    """PPP intensity normalized so that ``lam * pi * H^2 = M^q``."""
    return M**q / (math.pi * H * H)


def group_size(M: float, t: float) -> int:
    """Multicast group size ``round(M^t)``, at least 1."""
    return max(1, round(M**t))


class Branch(str, enum.Enum):
    GENERAL_PHI = "GENERAL_PHI"
    PHI_ZERO = "PHI_ZERO"


@dataclass(frozen=True)
class SufficientInterval:
    r_lo: float
    r_hi: float
    branch: Branch
    alpha: float | None = None

    @property
    def is_empty(self) -> bool:
        return not self.r_lo < self.r_hi

    def __contains__(self, r: float) -> bool:
        return self.r_lo < r < self.r_hi


@dataclass(frozen=True)
class GaussianApproxBounds:
    U_N: float
    L_N: float


def _radius(H: float, denom_sq: float, what: str) -> float:
    if not denom_sq > 0:
        raise DomainError(f"{what}: denominator {denom_sq:.6g} is not positive (M too small)")
    return H / math.sqrt(denom_sq)


def max_radius(M: float, p: float, eps: float, H: float = GEO_ALTITUDE) -> float:
    """Largest selection radius ``H / sqrt(pi^2/4 M^(2p+eps) - 1)``."""
    return _radius(H, math.pi**2 / 4 * M ** (2 * p + eps) - 1, "max_radius")


def alpha_of(phi: float) -> float:
    return math.pi / 4 * math.sqrt(abs(math.sin(phi) * math.cos(phi)))


def sufficient_interval(M: float, p: float, eps: float, phi: float,
                        H: float = GEO_ALTITUDE) -> SufficientInterval:
    """Radius interval claimed to guarantee ``M^2 f(r, phi) > M^(2p)``."""
    if abs(math.sin(phi) * math.cos(phi)) < PHI_ZERO_EPS:
        lo = _radius(H, math.pi**2 / 16 * M ** (2 + eps / 2) - 1, "phi=0 lower radius")
        hi = _radius(H, math.pi**2 / 4 * M ** (2 * p + eps / 2) - 1, "phi=0 upper radius")
        return SufficientInterval(lo, hi, Branch.PHI_ZERO)
    a = alpha_of(phi)
    lo = _radius(H, a * a * M ** (2 + eps / 2) - 1, "lower radius")
    hi = _radius(H, 4 * a * a * M ** ((p + 1) + eps / 2) - 1, "upper radius")
    return SufficientInterval(lo, hi, Branch.GENERAL_PHI, a)


def theorem1_probability_lower_bound(params: ScalingParams, M: float, lam: float, N: int,
                                     phi: float, H: float = GEO_ALTITUDE) -> float:
    """``P[r_lo < r_N < r_hi]`` over the sufficient interval, via the N-th neighbor law."""
    iv = sufficient_interval(M, params.p, params.eps, phi, H)
    if iv.is_empty:
        return 0.0
    return nth_distance_interval_prob(iv.r_lo, iv.r_hi, N, lam)


def gaussian_approx_bounds(params: ScalingParams, M: float, lam: float, N: int,
                           phi: float, H: float = GEO_ALTITUDE) -> GaussianApproxBounds:
    """Standardized limits of the Gamma(N, 1) integral under its normal approximation."""
    iv = sufficient_interval(M, params.p, params.eps, phi, H)
    x_hi = lam * math.pi * iv.r_hi**2
    x_lo = lam * math.pi * iv.r_lo**2
    sd = math.sqrt(N)
    return GaussianApproxBounds(U_N=(x_hi - N) / sd, L_N=(x_lo - N) / sd)


def gaussian_mass(b: GaussianApproxBounds) -> float:
    return max(0.0, standard_normal_cdf(b.U_N) - standard_normal_cdf(b.L_N))


def gaussian_approx_probability(params: ScalingParams, M: float, lam: float, N: int,
                                phi: float, H: float = GEO_ALTITUDE) -> float:
    return gaussian_mass(gaussian_approx_bounds(params, M, lam, N, phi, H))


def scaling_fraction(q: float, t: float = 0.0) -> float:
    """Asymptotic fraction ``q - t - 1`` of the ideal rate (``t = 0`` is unicast)."""
    if not q - t - 1 > 0 or q - t > 2:
        warnings.warn(f"q - t = {q - t:.6g} outside (1, 2): fraction not in (0, 1)",
                      ParameterWarning, stacklevel=2)
    return q - t - 1


def rate_bounds(q: float, t: float, eps: float, M: float, P: float = 1.0) -> tuple[float, float]:
    """Large-M lower and upper forms ``2(q-t-1 -+ eps) log M + log P`` in nats."""
    centre = 2 * (q - t - 1) * math.log(M) + math.log(P)
    half = 2 * eps * math.log(M)
    return centre - half, centre + half


def ideal_rate(M: float, P: float = 1.0) -> float:
    return math.log1p(P * M * M)


def theorem3_argument(lam: float, H: float, M: float, ell: float) -> float:
    g = M ** (2 * ell) - 1
    if not g > 0:
        raise DomainError(f"M^(2 ell) = {g + 1:.6g} must exceed 1")
    return lam * math.pi * H * H / g


def theorem3_interference_bound(N: int, lam: float, H: float, M: float, ell: float,
                                method: str = "gamma") -> float:
    """Lower bound on ``P[M^(2-2l) f_j(r_N, phi_N) < M^(-2s)]``."""
    x = theorem3_argument(lam, H, M, ell)
    if method == "gamma":
        return regularized_incomplete_gamma(N, x)
    if method == "kummer":
        return kummer_1f1_bound_form(N, x)
    raise ValueError(f"unknown method {method!r}")
