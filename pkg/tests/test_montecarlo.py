import math

import numpy as np
import pytest

from geobeam.analytic import ScalingParams, group_size, ideal_rate, max_radius
from geobeam.array import BeamConfig
from geobeam.errors import RegionTooDenseError
from geobeam.geometry import SystemConfig
from geobeam.montecarlo import (BoundReport, Conditioning, Draws, McConfig, Sampler, admissible_q_grid,
                                draw_decisive_users, estimate_event_probability,
                                estimate_interference_probability, estimate_rate, interference_values,
                                nadir_array_gain, sweep_fraction_vs_q)
from geobeam.selection import Policy, SelectionConfig

PARAMS = ScalingParams(q=1.8, t=0.3, p=0.4, eps=0.1)


def test_single_antenna_rate_is_exact():
    est = estimate_rate(SystemConfig(M=1, P=2.0), PARAMS, SelectionConfig(N=1, R=math.inf),
                        McConfig(n_samples=500))
    assert est.mean == pytest.approx(math.log(3.0), abs=1e-15)
    assert est.std_error == 0.0


def test_vanishing_power_gives_zero_rate():
    est = estimate_rate(SystemConfig(M=256, P=1e-300), PARAMS, SelectionConfig(N=2),
                        McConfig(n_samples=500))
    assert 0.0 <= est.mean < 1e-290


def test_full_ppp_matches_order_statistic():
    s = SystemConfig(M=2**12)
    sel = SelectionConfig(N=group_size(2**12, 0.3))
    a = estimate_rate(s, PARAMS, sel, McConfig(n_samples=4000, seed=3, sampler=Sampler.FULL_PPP))
    b = estimate_rate(s, PARAMS, sel, McConfig(n_samples=20000, seed=4))
    assert abs(a.mean - b.mean) < 3 * math.hypot(a.std_error, b.std_error)


def test_full_ppp_matches_order_statistic_random_policy():
    s = SystemConfig(M=2**12)
    sel = SelectionConfig(N=group_size(2**12, 0.3), policy=Policy.RANDOM_WITHIN_R)
    a = estimate_rate(s, PARAMS, sel, McConfig(n_samples=4000, seed=5, sampler=Sampler.FULL_PPP))
    b = estimate_rate(s, PARAMS, sel, McConfig(n_samples=20000, seed=6))
    assert abs(a.mean - b.mean) < 3 * math.hypot(a.std_error, b.std_error)


def test_full_ppp_refuses_dense_region():
    s = SystemConfig(M=10_000)
    with pytest.raises(RegionTooDenseError, match="ORDER_STATISTIC"):
        estimate_rate(s, ScalingParams(q=3.0, t=0.3, p=0.1, eps=0.1), SelectionConfig(N=16),
                      McConfig(n_samples=10, sampler=Sampler.FULL_PPP))


def test_beam_center_always_exceeds_threshold():
    s = SystemConfig(M=256)
    draws = Draws(np.zeros(100), np.linspace(0, 6, 100), np.ones(100, bool), 100)
    z = nadir_array_gain(draws, s)
    assert np.all(z == 256.0**2) and np.all(z > 256 ** (2 * 1e-9))


def test_dense_users_make_event_certain():
    rep = estimate_event_probability(SystemConfig(M=256), ScalingParams(q=6.0, t=0.0, p=1e-6, eps=0.1),
                                     SelectionConfig(N=1), McConfig(n_samples=2000))
    assert rep.empirical == 1.0 and rep.satisfied


@pytest.mark.xfail(strict=True, reason="finite-M lower bound overshoots the event frequency; see acceptance criterion 4")
def test_event_bound_holds_for_random_admissible_tuples():
    rng = np.random.default_rng(99)
    M = 2**10
    s = SystemConfig(M=M)
    failures = []
    for _ in range(20):
        t = rng.uniform(0.0, 0.5)
        eps = rng.uniform(0.05, 0.2)
        p = rng.uniform(0.1, 0.6)
        q = rng.uniform(p + t + 1 + eps / 2, 2 + t + eps / 2)
        params = ScalingParams(q=q, t=t, p=p, eps=eps)
        rep = estimate_event_probability(s, params, SelectionConfig(N=group_size(M, t), R=math.inf),
                                         McConfig(n_samples=10_000, seed=7), phi=float(rng.uniform(0, math.pi / 2)))
        if not rep.satisfied:
            failures.append((q, t, p, eps, rep))
    assert failures == []


def test_event_probability_vanishes_below_range():
    params = ScalingParams(q=1.3, t=0.3, p=0.4, eps=0.1)
    vals = []
    for M in (2**10, 2**12, 2**14):
        rep = estimate_event_probability(SystemConfig(M=M), params, SelectionConfig(N=group_size(M, 0.3), R=math.inf),
                                         McConfig(n_samples=20_000))
        vals.append(rep.empirical)
    assert vals[0] > vals[1] > vals[2]
    assert vals[-1] < 0.01


def test_bound_report_consistency():
    assert BoundReport.lower(0.5, 0.49, 0.01).satisfied
    assert not BoundReport.lower(0.5, 0.46, 0.01).satisfied


def test_degenerate_interference_draw():
    M = 64
    s = SystemConfig(M=M)
    beam = BeamConfig.grid(1, 0, 1.0, M)
    draws = Draws(np.zeros(10), np.zeros(10), np.ones(10, bool), 10)
    leak = interference_values(draws, s, beam, 1.0)
    # the adjacent beam places a null on the serving-beam centre
    assert np.all(leak < 1e-20)
    hits = leak < M ** (-2 * 0.3)
    assert hits.all() or not hits.any()


def test_interference_bound_at_diagonal_neighbour():
    params = ScalingParams(q=1.8, t=0.3, p=0.4, eps=0.1, s=0.3, ell=0.5)
    rep = estimate_interference_probability(SystemConfig(M=1024), params, BeamConfig.grid(1, 1, 0.5, 1024),
                                            SelectionConfig(N=4), McConfig(n_samples=20_000))
    assert rep.satisfied


def test_nearer_beam_leaks_more():
    params = ScalingParams(q=1.8, t=0.3, p=0.4, eps=0.1, s=0.3, ell=0.5)
    s, sel, mc = SystemConfig(M=1024), SelectionConfig(N=4), McConfig(n_samples=20_000)
    near = estimate_interference_probability(s, params, BeamConfig.grid(1, 0, 0.5, 1024), sel, mc)
    far = estimate_interference_probability(s, params, BeamConfig.grid(2, 0, 0.5, 1024), sel, mc)
    assert 1 - near.empirical > 1 - far.empirical


def test_interference_rejects_serving_beam():
    with pytest.raises(ValueError):
        estimate_interference_probability(SystemConfig(M=64), ScalingParams(), BeamConfig.nadir(),
                                          SelectionConfig(N=1), McConfig(n_samples=10))


@pytest.mark.parametrize("sampler", [Sampler.ORDER_STATISTIC, Sampler.FULL_PPP])
def test_bit_identical_across_workers(sampler):
    s = SystemConfig(M=2**10)
    sel = SelectionConfig(N=4, R=max_radius(2**10, 0.4, 0.1))
    out = []
    for w in (1, 4, 16):
        mc = McConfig(n_samples=10_000, seed=2024, workers=w, sampler=sampler, chunk_size=512)
        d = draw_decisive_users(s, 2.0**18 / (math.pi * s.H**2), sel, mc)
        out.append((d.r.tobytes(), d.phi.tobytes(), d.valid.tobytes(), d.n_attempts))
    assert out[0] == out[1] == out[2]


def test_count_as_failure_reports_failures():
    s = SystemConfig(M=10_000)
    params = ScalingParams(q=2.0, t=0.5, p=0.65, eps=0.1)
    sel = SelectionConfig(N=100)
    est_fail = estimate_rate(s, params, sel, McConfig(n_samples=5000, conditioning=Conditioning.COUNT_AS_FAILURE))
    est_res = estimate_rate(s, params, sel, McConfig(n_samples=5000))
    assert 0 < est_fail.conditioning_rate < 1
    assert est_fail.n_effective < 5000 and est_fail.n_attempts == 5000
    assert est_res.n_effective == 5000 and est_res.n_attempts > 5000
    assert est_fail.mean < est_res.mean


@pytest.mark.parametrize("t,target", [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)])
def test_sweep_endpoints(t, target):
    rows = sweep_fraction_vs_q(SystemConfig(M=10_000), [t], [2.0], McConfig(n_samples=10_000, seed=1))
    assert abs(rows[0]["ratio"] - target) <= 0.1


def test_sweep_schema():
    rows = sweep_fraction_vs_q(SystemConfig(M=1024), [0.0, 0.5], {0.0: [1.5], 0.5: [2.0, 2.2]},
                               McConfig(n_samples=200), policies=(Policy.NEAREST_N, Policy.RANDOM_WITHIN_R))
    assert len(rows) == 6
    assert set(rows[0]) == {"t", "q", "ratio", "std_error", "predicted", "policy"}
    assert rows[0]["predicted"] == pytest.approx(0.5)
    assert {r["policy"] for r in rows} == {"NEAREST_N", "RANDOM_WITHIN_R"}


def test_admissible_grid_inside_range():
    g = admissible_q_grid(0.5, 0.1)
    assert len(g) == 8 and g[0] > 1.55 and g[-1] < 2.55


def test_ratio_normalisation():
    s = SystemConfig(M=1024)
    rows = sweep_fraction_vs_q(s, [0.3], [1.8], McConfig(n_samples=300, seed=2))
    est = estimate_rate(s, ScalingParams(q=1.8, t=0.3, p=0.4, eps=0.1), SelectionConfig(N=group_size(1024, 0.3)),
                        McConfig(n_samples=300, seed=2))
    assert rows[0]["ratio"] == est.mean / ideal_rate(1024, 1.0)
