"""Deterministic Monte Carlo estimators for the decisive user N.

Sample ``i`` belongs to chunk ``i // chunk_size`` and every chunk draws from
its own Philox stream keyed by ``(seed, chunk)``.  Chunks are merged in index
order, so estimates are bit-identical for any worker count.
"""
from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic
from .analytic import ScalingParams, density, group_size, ideal_rate, max_radius
from .array import NADIR, BeamConfig, beam_gain
from .errors import InsufficientUsersError, NumericError, RegionTooDenseError
from .geometry import DENSE_POINT_CAP, SystemConfig, direction_cosines, sample_disk
from .selection import (Policy, SelectionConfig, insufficient_probability,
                        sample_gamma, sample_random_within_r, select_indices)

DEFAULT_CHUNK = 4096
MAX_RESAMPLE_ROUNDS = 10_000
SEED_MASK = (1 << 64) - 1


class Conditioning(str, enum.Enum):
    RESAMPLE_ON_INSUFFICIENT = "RESAMPLE_ON_INSUFFICIENT"
    COUNT_AS_FAILURE = "COUNT_AS_FAILURE"


class Sampler(str, enum.Enum):
    FULL_PPP = "FULL_PPP"
    ORDER_STATISTIC = "ORDER_STATISTIC"


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 10_000
    seed: int = 0
    workers: int = 1
    conditioning: Conditioning = Conditioning.RESAMPLE_ON_INSUFFICIENT
    sampler: Sampler = Sampler.ORDER_STATISTIC
    chunk_size: int = DEFAULT_CHUNK
    point_cap: float = DENSE_POINT_CAP

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        object.__setattr__(self, "conditioning", Conditioning(self.conditioning))
        object.__setattr__(self, "sampler", Sampler(self.sampler))


@dataclass(frozen=True)
class RateEstimate:
    mean: float
    std_error: float
    n_effective: int
    conditioning_rate: float
    n_attempts: int


@dataclass(frozen=True)
class BoundReport:
    analytic: float
    empirical: float
    mc_std_error: float
    satisfied: bool

    @classmethod
    def lower(cls, analytic_value: float, empirical: float, se: float) -> "BoundReport":
        return cls(analytic_value, empirical, se, bool(analytic_value <= empirical + 3 * se))


@dataclass(frozen=True)
class Draws:
    """Decisive-user samples; ``valid`` is False where selection failed (COUNT_AS_FAILURE)."""

    r: np.ndarray
    phi: np.ndarray
    valid: np.ndarray
    n_attempts: int

    @property
    def conditioning_rate(self) -> float:
        failed = self.n_attempts - int(self.valid.sum())
        return failed / self.n_attempts if self.n_attempts else 0.0


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & SEED_MASK, chunk])))


def resolve_selection(sys: SystemConfig, params: ScalingParams, sel: SelectionConfig) -> SelectionConfig:
    """Fill in ``R`` from the maximum-radius rule when the caller left it unset."""
    if sel.R is not None:
        return sel
    return replace(sel, R=max_radius(sys.M, params.p, params.eps, sys.H))


def _order_statistic_chunk(rng, n, lam, sel, conditioning, fixed_phi):
    N, R = sel.N, sel.R
    if sel.policy is Policy.NEAREST_N:
        def draw(k):
            r = np.sqrt(sample_gamma(rng, N, k) / (lam * math.pi))
            return r, r < R
    else:
        if math.isinf(R):
            raise ValueError("RANDOM_WITHIN_R needs a finite selection radius")
        p_fail = insufficient_probability(N, lam, R)

        def draw(k):
            ok = rng.random(k) >= p_fail
            return sample_random_within_r(N, R, rng, k), ok

    r, ok = draw(n)
    attempts = n
    if conditioning is Conditioning.RESAMPLE_ON_INSUFFICIENT:
        rounds = 0
        while not ok.all():
            bad = np.flatnonzero(~ok)
            r_new, ok_new = draw(bad.size)
            r[bad] = r_new
            ok[bad] = ok_new
            attempts += bad.size
            rounds += 1
            if rounds > MAX_RESAMPLE_ROUNDS:
                raise NumericError("selection almost never succeeds; enlarge R or the density")
    phi = np.full(n, float(fixed_phi)) if fixed_phi is not None else 2 * math.pi * rng.random(n)
    return r, phi, ok, attempts


def _full_ppp_chunk(rng, n, lam, sel, conditioning, fixed_phi, point_cap):
    r_out = np.empty(n)
    phi_out = np.empty(n)
    ok = np.ones(n, dtype=bool)
    attempts = 0
    for i in range(n):
        for _ in range(MAX_RESAMPLE_ROUNDS):
            attempts += 1
            r, phi = sample_disk(rng, lam, sel.R, point_cap)
            try:
                idx = select_indices(r, sel, rng)
            except InsufficientUsersError:
                if conditioning is Conditioning.COUNT_AS_FAILURE:
                    ok[i] = False
                    r_out[i] = phi_out[i] = math.nan
                    break
                continue
            r_out[i] = r[idx[-1]]
            phi_out[i] = phi[idx[-1]]
            break
        else:
            raise NumericError("selection almost never succeeds; enlarge R or the density")
    if fixed_phi is not None:
        phi_out[:] = fixed_phi
    return r_out, phi_out, ok, attempts


def draw_decisive_users(sys: SystemConfig, lam: float, sel: SelectionConfig, mc: McConfig,
                        fixed_phi: float | None = None) -> Draws:
    """Draw ``(r_N, phi_N)`` for ``mc.n_samples`` independent realizations.

    ``fixed_phi`` pins the azimuth of user N (isotropy makes r_N independent of it).
    """
    if sel.R is None:
        raise ValueError("selection radius unresolved; call resolve_selection first")
    if mc.sampler is Sampler.FULL_PPP:
        if math.isinf(sel.R):
            raise ValueError("FULL_PPP needs a finite selection radius")
        expected = lam * math.pi * sel.R**2
        if expected > mc.point_cap:
            raise RegionTooDenseError(
                f"FULL_PPP would draw {expected:.3g} points per sample (cap {mc.point_cap:.3g}); "
                "switch to sampler=ORDER_STATISTIC"
            )

    n_chunks = -(-mc.n_samples // mc.chunk_size)

    def run(c):
        n = min(mc.chunk_size, mc.n_samples - c * mc.chunk_size)
        rng = chunk_rng(mc.seed, c)
        if mc.sampler is Sampler.ORDER_STATISTIC:
            return _order_statistic_chunk(rng, n, lam, sel, mc.conditioning, fixed_phi)
        return _full_ppp_chunk(rng, n, lam, sel, mc.conditioning, fixed_phi, mc.point_cap)

    if mc.workers == 1 or n_chunks == 1:
        parts = [run(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    r = np.concatenate([p[0] for p in parts])
    phi = np.concatenate([p[1] for p in parts])
    valid = np.concatenate([p[2] for p in parts])
    return Draws(r, phi, valid, sum(p[3] for p in parts))


def nadir_array_gain(draws: Draws, sys: SystemConfig) -> np.ndarray:
    """``Z = M^2 f(r_N, phi_N)``; zero where selection failed."""
    vx, vy = direction_cosines(np.nan_to_num(draws.r), draws.phi, sys.H)
    z = sys.M**2 * beam_gain(vx, vy, 0.0, 0.0, sys.M)
    return np.where(draws.valid, z, 0.0)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = float(values.mean())
    if n < 2 or values.min() == values.max():
        return mean, 0.0
    se = float(values.std(ddof=1) / math.sqrt(n))
    return mean, se


def _proportion(hits: np.ndarray) -> tuple[float, float]:
    p = float(hits.mean())
    return p, math.sqrt(p * (1 - p) / hits.size)


def estimate_rate(sys: SystemConfig, params: ScalingParams, sel: SelectionConfig,
                  mc: McConfig) -> RateEstimate:
    """Ergodic rate ``E[log(1 + P M^2 f(r_N, phi_N))]`` in nats."""
    lam = density(sys.M, params.q, sys.H)
    sel = resolve_selection(sys, params, sel)
    draws = draw_decisive_users(sys, lam, sel, mc)
    values = np.log1p(sys.P * nadir_array_gain(draws, sys))
    mean, se = _mean_se(values)
    return RateEstimate(mean, se, int(draws.valid.sum()), draws.conditioning_rate, draws.n_attempts)


def _phi_averaged_theorem1(params, M, lam, N, H, n_phi=360):
    # r_N and phi_N are independent, so averaging the conditional bound over phi bounds the marginal
    phis = (np.arange(n_phi) + 0.5) * (math.pi / 2) / n_phi
    total = 0.0
    for phi in phis:
        try:
            total += analytic.theorem1_probability_lower_bound(params, M, lam, N, float(phi), H)
        except analytic.DomainError:
            pass
    return total / n_phi


def estimate_event_probability(sys: SystemConfig, params: ScalingParams, sel: SelectionConfig,
                               mc: McConfig, phi: float | None = None) -> BoundReport:
    """Empirical ``P[Z > M^(2p)]`` against its sufficient-interval lower bound.

    With ``phi`` given the azimuth of user N is pinned and the bound is the
    conditional one; otherwise the bound is averaged over a uniform azimuth.
    """
    lam = density(sys.M, params.q, sys.H)
    sel = resolve_selection(sys, params, sel)
    draws = draw_decisive_users(sys, lam, sel, mc, fixed_phi=phi)
    hits = nadir_array_gain(draws, sys) > sys.M ** (2 * params.p)
    empirical, se = _proportion(hits)
    if phi is None:
        bound = _phi_averaged_theorem1(params, sys.M, lam, sel.N, sys.H)
    else:
        try:
            bound = analytic.theorem1_probability_lower_bound(params, sys.M, lam, sel.N, phi, sys.H)
        except analytic.DomainError:
            bound = 0.0
    return BoundReport.lower(bound, empirical, se)


def interference_values(draws: Draws, sys: SystemConfig, beam_j: BeamConfig, ell: float) -> np.ndarray:
    vx, vy = direction_cosines(np.nan_to_num(draws.r), draws.phi, sys.H)
    b = beam_j.direction
    return sys.M ** (2 - 2 * ell) * beam_gain(vx, vy, b.vx, b.vy, sys.M)


def estimate_interference_probability(sys: SystemConfig, params: ScalingParams, beam_j: BeamConfig,
                                      sel: SelectionConfig, mc: McConfig) -> BoundReport:
    """Empirical ``P[M^(2-2l) f_j(r_N, phi_N) < M^(-2s)]`` against its incomplete-gamma bound."""
    if beam_j.is_nadir:
        raise ValueError("beam_j must differ from the serving nadir beam")
    params.check_theorem3()
    lam = density(sys.M, params.q, sys.H)
    sel = resolve_selection(sys, params, sel)
    draws = draw_decisive_users(sys, lam, sel, mc)
    leak = interference_values(draws, sys, beam_j, params.ell)
    hits = (leak < sys.M ** (-2 * params.s)) & draws.valid
    empirical, se = _proportion(hits)
    bound = analytic.theorem3_interference_bound(sel.N, lam, sys.H, sys.M, params.ell)
    return BoundReport.lower(bound, empirical, se)


def sweep_point_params(q: float, t: float, eps: float) -> ScalingParams:
    """Exponents for one sweep point; ``p = q - t - 1 - eps`` as in the lower-bound argument."""
    p = min(max(q - t - 1 - eps, 0.0), 1.0)
    return ScalingParams(q=q, t=t, p=p, eps=eps)


def sweep_fraction_vs_q(sys: SystemConfig, t_values, q_grid, mc: McConfig,
                        policies=(Policy.NEAREST_N,), eps: float = 0.1,
                        R: float | None = None) -> list[dict]:
    """Rate fraction ``R_N / log(1 + P M^2)`` over a ``(t, q)`` grid.

    ``q_grid`` is either one sequence shared by every ``t`` or a mapping
    ``t -> sequence``.  ``R=None`` derives the selection radius per point.
    """
    ideal = ideal_rate(sys.M, sys.P)
    rows = []
    for policy in policies:
        policy = Policy(policy)
        for t in t_values:
            qs = q_grid[t] if isinstance(q_grid, dict) else q_grid
            for q in qs:
                params = sweep_point_params(q, t, eps)
                sel = SelectionConfig(N=group_size(sys.M, t), R=R, policy=policy)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", analytic.ParameterWarning)
                    est = estimate_rate(sys, params, sel, mc)
                rows.append({
                    "t": t, "q": q,
                    "ratio": est.mean / ideal,
                    "std_error": est.std_error / ideal,
                    "predicted": q - t - 1,
                    "policy": policy.value,
                })
    return rows


def admissible_q_grid(t: float, eps: float = 0.1, n: int = 8, p_min: float = 0.0) -> np.ndarray:
    """``n`` points strictly inside ``(p_min + t + 1 + eps/2, 2 + t + eps/2)``."""
    lo = p_min + t + 1 + eps / 2
    hi = 2 + t + eps / 2
    return np.linspace(lo, hi, n + 2)[1:-1]
