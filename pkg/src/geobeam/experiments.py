"""Preset experiments; each returns ``(columns, rows)`` for CSV emission."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import analytic
from .analytic import ScalingParams, density, group_size, rate_bounds
from .array import BeamConfig, nadir_gain_curve
from .config import ConfigValidationError, Experiment, ResolvedConfig
from .geometry import SystemConfig
from .montecarlo import (McConfig, Sampler, admissible_q_grid, chunk_rng, draw_decisive_users,
                         estimate_event_probability, estimate_interference_probability,
                         estimate_rate, nadir_array_gain, sweep_fraction_vs_q)
from .selection import Policy, SelectionConfig
from .special import regularized_incomplete_gamma

COLUMNS = {
    Experiment.BEAM_GAIN: ["M", "phi", "r", "gain"],
    Experiment.FIG2_SWEEP: ["t", "q", "ratio", "std_error", "predicted", "policy"],
    Experiment.LEMMA1_VALIDATE: ["sampler", "N", "lam_pi_R2", "n_draws", "ks_statistic", "p_value"],
    Experiment.THEOREM1_CHECK: ["M", "phi", "branch", "r_lo", "r_hi", "n_radii", "violations",
                                "analytic", "empirical", "mc_std_error", "satisfied"],
    Experiment.THEOREM3_CHECK: ["M", "ell", "s", "N", "q", "n", "m", "analytic", "analytic_kummer",
                                "empirical", "mc_std_error", "satisfied"],
    Experiment.RATE_BOUNDS: ["M", "q", "t", "eps", "N", "lower", "estimate", "std_error", "upper",
                             "within", "ratio", "predicted"],
}


@dataclass(frozen=True)
class Built:
    experiment: Experiment
    system: SystemConfig
    params: ScalingParams
    selection: SelectionConfig | None
    mc: McConfig


def _build(section, factory, **kw):
    try:
        return factory(**kw)
    except ValueError as exc:
        raise ConfigValidationError(f"{section}: {exc}") from None


def build(cfg: ResolvedConfig) -> Built:
    """Validate every embedded config before anything runs."""
    v = cfg.values
    system = _build("system", SystemConfig, M=v["system.M"], H=v["system.H"], f_c=v["system.f_c"],
                    c0=v["system.c0"], P=v["system.P"])
    params = ScalingParams(q=v["params.q"], t=v["params.t"], p=v["params.p"], eps=v["params.eps"],
                           s=v["params.s"], ell=v["params.ell"])
    if not params.eps > 0:
        raise ConfigValidationError("params.eps: must be > 0")
    N = v["selection.N"] if v["selection.N"] is not None else group_size(system.M, params.t)
    selection = _build("selection", SelectionConfig, N=N, R=v["selection.R"],
                       policy=v["selection.policy"])
    mc = _build("mc", McConfig, n_samples=v["mc.n_samples"], seed=v["mc.seed"],
                workers=v["mc.workers"], conditioning=v["mc.conditioning"], sampler=v["mc.sampler"])
    for key in ("beam_gain.n_points", "theorem1.n_radii", "lemma1.N", "sweep.n_q"):
        if v[key] < 1:
            raise ConfigValidationError(f"{key}: must be >= 1")
    for key in ("beam_gain.M_values", "theorem1.M_values", "rate_bounds.M_values"):
        if any(m < 1 for m in v[key]):
            raise ConfigValidationError(f"{key}: every M must be >= 1")
    if not v["lemma1.lam_pi_R2"] > 0:
        raise ConfigValidationError("lemma1.lam_pi_R2: must be > 0")
    if not v["beam_gain.r_max"] > 0:
        raise ConfigValidationError("beam_gain.r_max: must be > 0")
    if v["experiment"] is Experiment.THEOREM3_CHECK and any(b == (0, 0) for b in v["theorem3.beams"]):
        raise ConfigValidationError("theorem3.beams: (0, 0) is the serving beam")
    return Built(v["experiment"], system, params, selection, mc)


def beam_gain_rows(cfg, built):
    v = cfg.values
    r = np.linspace(0.0, v["beam_gain.r_max"], v["beam_gain.n_points"])
    rows = []
    for M in v["beam_gain.M_values"]:
        for phi in v["beam_gain.phi_values"]:
            g = nadir_gain_curve(r, phi, M, built.system.H)
            rows += [{"M": M, "phi": phi, "r": float(ri), "gain": float(gi)} for ri, gi in zip(r, g)]
    return rows


def fig2_rows(cfg, built):
    v = cfg.values
    t_values = v["sweep.t_values"]
    if v["sweep.q_grid"] == "admissible":
        grid = {t: [float(q) for q in admissible_q_grid(t, built.params.eps, v["sweep.n_q"])]
                for t in t_values}
    else:
        grid = v["sweep.q_grid"]
    return sweep_fraction_vs_q(built.system, t_values, grid, built.mc,
                               policies=v["sweep.policies"], eps=built.params.eps,
                               R=v["selection.R"])


def _gamma_cdf(N):
    return np.vectorize(lambda x: regularized_incomplete_gamma(N, x))


def lemma1_rows(cfg, built):
    v = cfg.values
    N, mass = v["lemma1.N"], v["lemma1.lam_pi_R2"]
    # unit disk: lam * pi * R^2 = mass with R = 1 m
    lam, R = mass / math.pi, 1.0
    rows = []
    for sampler, radius in ((Sampler.FULL_PPP, R), (Sampler.ORDER_STATISTIC, math.inf)):
        mc = McConfig(n_samples=built.mc.n_samples, seed=built.mc.seed, workers=built.mc.workers,
                      sampler=sampler)
        draws = draw_decisive_users(built.system, lam, SelectionConfig(N=N, R=radius), mc)
        x = lam * math.pi * draws.r[draws.valid] ** 2
        res = stats.kstest(x, _gamma_cdf(N))
        rows.append({"sampler": sampler.value, "N": N, "lam_pi_R2": mass, "n_draws": int(x.size),
                     "ks_statistic": float(res.statistic), "p_value": float(res.pvalue)})
    return rows


def sufficiency_violations(M, p, eps, phi, H, n, rng):
    """Count radii drawn uniformly in the sufficient interval where ``Z <= M^(2p)``."""
    iv = analytic.sufficient_interval(M, p, eps, phi, H)
    if iv.is_empty:
        return iv, 0
    r = rng.uniform(iv.r_lo, iv.r_hi, n)
    z = M**2 * nadir_gain_curve(r, phi, M, H)
    return iv, int(np.count_nonzero(z <= M ** (2 * p)))


def theorem1_rows(cfg, built):
    v = cfg.values
    rows = []
    for i, M in enumerate(v["theorem1.M_values"]):
        system = SystemConfig(M=M, H=built.system.H, P=built.system.P)
        N = v["selection.N"] if v["selection.N"] is not None else group_size(M, built.params.t)
        sel = SelectionConfig(N=N, R=v["selection.R"], policy=built.selection.policy)
        for j, phi in enumerate(v["theorem1.phi_values"]):
            rng = chunk_rng(built.mc.seed, 1_000_000 + 1000 * i + j)
            iv, bad = sufficiency_violations(M, built.params.p, built.params.eps, phi, system.H,
                                             v["theorem1.n_radii"], rng)
            rep = estimate_event_probability(system, built.params, sel, built.mc, phi=phi)
            rows.append({"M": M, "phi": phi, "branch": iv.branch.value, "r_lo": iv.r_lo,
                         "r_hi": iv.r_hi, "n_radii": v["theorem1.n_radii"], "violations": bad,
                         "analytic": rep.analytic, "empirical": rep.empirical,
                         "mc_std_error": rep.mc_std_error, "satisfied": rep.satisfied})
    return rows


def theorem3_rows(cfg, built):
    v = cfg.values
    p = built.params
    rows = []
    for n, m in v["theorem3.beams"]:
        beam = BeamConfig.grid(n, m, p.ell, built.system.M)
        rep = estimate_interference_probability(built.system, p, beam, built.selection, built.mc)
        lam = density(built.system.M, p.q, built.system.H)
        kummer = analytic.theorem3_interference_bound(built.selection.N, lam, built.system.H,
                                                      built.system.M, p.ell, method="kummer")
        rows.append({"M": built.system.M, "ell": p.ell, "s": p.s, "N": built.selection.N, "q": p.q,
                     "n": n, "m": m, "analytic": rep.analytic, "analytic_kummer": kummer,
                     "empirical": rep.empirical, "mc_std_error": rep.mc_std_error,
                     "satisfied": rep.satisfied})
    return rows


def rate_bounds_rows(cfg, built):
    v = cfg.values
    p = built.params
    rows = []
    for M in v["rate_bounds.M_values"]:
        system = SystemConfig(M=M, H=built.system.H, P=built.system.P)
        N = v["selection.N"] if v["selection.N"] is not None else group_size(M, p.t)
        sel = SelectionConfig(N=N, R=v["selection.R"], policy=built.selection.policy)
        est = estimate_rate(system, p, sel, built.mc)
        lo, hi = rate_bounds(p.q, p.t, p.eps, M, system.P)
        ideal = analytic.ideal_rate(M, system.P)
        rows.append({"M": M, "q": p.q, "t": p.t, "eps": p.eps, "N": N, "lower": lo,
                     "estimate": est.mean, "std_error": est.std_error, "upper": hi,
                     "within": bool(lo - 3 * est.std_error <= est.mean <= hi + 3 * est.std_error),
                     "ratio": est.mean / ideal, "predicted": p.q - p.t - 1})
    return rows


RUNNERS = {
    Experiment.BEAM_GAIN: beam_gain_rows,
    Experiment.FIG2_SWEEP: fig2_rows,
    Experiment.LEMMA1_VALIDATE: lemma1_rows,
    Experiment.THEOREM1_CHECK: theorem1_rows,
    Experiment.THEOREM3_CHECK: theorem3_rows,
    Experiment.RATE_BOUNDS: rate_bounds_rows,
}


def run_experiment(cfg: ResolvedConfig, built: Built | None = None):
    built = built or build(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", analytic.ParameterWarning)
        rows = RUNNERS[built.experiment](cfg, built)
    return COLUMNS[built.experiment], rows
