import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geobeam import analytic
from geobeam.analytic import (Branch, GaussianApproxBounds, ParameterWarning, ScalingParams,
                              density, gaussian_approx_probability, gaussian_mass, group_size,
                              max_radius, rate_bounds, scaling_fraction, sufficient_interval,
                              theorem1_probability_lower_bound, theorem3_interference_bound)
from geobeam.array import nadir_gain_curve
from geobeam.errors import DomainError
from geobeam.geometry import GEO_ALTITUDE
from geobeam.special import regularized_incomplete_gamma

H = GEO_ALTITUDE


def test_density_normalization():
    assert density(1e4, 1.8) * math.pi * H**2 == pytest.approx(1e4**1.8, rel=1e-14)
    assert group_size(1e4, 0.5) == 100 and group_size(5, 0.0) == 1 and group_size(2, 0.01) == 1


def test_max_radius_unit_denominator():
    p, eps = 0.5, 0.1
    # pi^2/4 M^(2p+eps) = 2
    M = (8 / math.pi**2) ** (1 / (2 * p + eps))
    assert max_radius(M, p, eps) == pytest.approx(H, rel=1e-12)


def test_max_radius_frozen_value():
    # 40-digit mpmath evaluation
    assert max_radius(2**12, 0.5, 0.1) == pytest.approx(234857.62333908643637, rel=1e-12)


def test_max_radius_monotone_and_domain():
    assert max_radius(2**12, 0.5, 0.1) < max_radius(2**10, 0.5, 0.1)
    assert max_radius(2**12, 0.6, 0.1) < max_radius(2**12, 0.5, 0.1)
    with pytest.raises(DomainError):
        max_radius(0.1, 0.5, 0.1)


def test_interval_formulas_and_branch():
    M, p, eps, phi = 2**12, 0.5, 0.1, math.pi / 8
    iv = sufficient_interval(M, p, eps, phi)
    a = math.pi / 4 * math.sqrt(abs(math.sin(phi) * math.cos(phi)))
    assert iv.branch is Branch.GENERAL_PHI and iv.alpha == pytest.approx(a)
    assert iv.r_lo == pytest.approx(H / math.sqrt(a * a * M ** (2 + eps / 2) - 1), rel=1e-14)
    assert iv.r_hi == pytest.approx(H / math.sqrt(4 * a * a * M ** (p + 1 + eps / 2) - 1), rel=1e-14)
    z = sufficient_interval(M, p, eps, 1e-12)
    assert z.branch is Branch.PHI_ZERO
    assert z.r_lo == pytest.approx(H / math.sqrt(math.pi**2 / 16 * M ** (2 + eps / 2) - 1), rel=1e-14)
    assert z.r_hi == pytest.approx(H / math.sqrt(math.pi**2 / 4 * M ** (2 * p + eps / 2) - 1), rel=1e-14)
    assert sufficient_interval(M, p, eps, math.pi / 2).branch is Branch.PHI_ZERO


@pytest.mark.xfail(strict=True, reason="r_hi decreases as alpha grows, so pi/4 gives the smallest reach")
def test_widest_reach_at_quarter_pi():
    a = sufficient_interval(2**12, 0.5, 0.1, math.pi / 4)
    b = sufficient_interval(2**12, 0.5, 0.1, math.pi / 8)
    assert a.r_hi >= b.r_hi


def test_reach_shrinks_as_alpha_grows():
    a = sufficient_interval(2**12, 0.5, 0.1, math.pi / 4)
    b = sufficient_interval(2**12, 0.5, 0.1, math.pi / 8)
    assert a.alpha > b.alpha and a.r_hi < b.r_hi


def test_general_branch_reach_below_phi_zero_for_large_m():
    M = 2**14
    for phi in (math.pi / 4, math.pi / 8, 0.3):
        assert sufficient_interval(M, 0.5, 0.1, phi).r_hi < sufficient_interval(M, 0.5, 0.1, 0.0).r_hi


def test_interval_domain_error():
    with pytest.raises(DomainError):
        sufficient_interval(1.0, 0.5, 0.1, math.pi / 4)


def _small_argument_part(iv, M, phi):
    c = max(abs(math.cos(phi)), abs(math.sin(phi)))
    s = 1.895 / (math.pi * M / 2 * c)  # |sin x| > |x|/2 holds for |x| < 1.895
    return iv.r_lo, min(iv.r_hi, H * s / math.sqrt(1 - s * s))


@pytest.mark.parametrize("phi", [math.pi / 4, 0.0])
@pytest.mark.parametrize("M", [2**10, 2**12, 2**14])
def test_interval_sufficient_where_small_argument_bound_holds(M, phi):
    iv = sufficient_interval(M, 0.5, 0.1, phi)
    lo, hi = _small_argument_part(iv, M, phi)
    assert hi > lo
    r = np.linspace(lo, hi, 10_001)[1:-1]
    assert np.all(M**2 * nadir_gain_curve(r, phi, M) > M ** (2 * 0.5))


@pytest.mark.xfail(strict=True, reason="interval reaches sidelobe nulls; see acceptance criterion 4")
@pytest.mark.parametrize("phi", [math.pi / 4, 0.0])
def test_interval_implication_full_range(phi):
    M = 2**12
    iv = sufficient_interval(M, 0.5, 0.1, phi)
    r = np.random.default_rng(0).uniform(iv.r_lo, iv.r_hi, 10_000)
    assert np.all(M**2 * nadir_gain_curve(r, phi, M) > M)


def test_theorem1_degenerate_interval_is_zero():
    params = ScalingParams(q=1.8, t=0.3, p=0.5, eps=0.1)
    assert sufficient_interval(4, 0.5, 0.1, math.pi / 4).is_empty
    assert theorem1_probability_lower_bound(params, 4, density(4, 1.8), 1, math.pi / 4, H) == 0.0


def test_theorem1_bound_approaches_one():
    params = ScalingParams(q=2.0, t=0.3, p=0.3, eps=0.1)
    assert params.check_theorem2()
    vals = []
    for M in (2**10, 2**12, 2**14):
        vals.append(theorem1_probability_lower_bound(params, M, density(M, params.q), group_size(M, params.t),
                                                     math.pi / 4, H))
    assert vals[0] <= vals[1] <= vals[2]
    assert vals[-1] > 0.99


def test_theorem1_matches_interval_gamma():
    params = ScalingParams(q=2.0, t=0.3, p=0.3, eps=0.1)
    M, phi = 2**12, math.pi / 8
    lam, N = density(M, 2.0), group_size(M, 0.3)
    iv = sufficient_interval(M, 0.3, 0.1, phi)
    expected = (regularized_incomplete_gamma(N, lam * math.pi * iv.r_hi**2)
                - regularized_incomplete_gamma(N, lam * math.pi * iv.r_lo**2))
    assert theorem1_probability_lower_bound(params, M, lam, N, phi, H) == pytest.approx(expected, abs=1e-15)


def test_gaussian_symmetric_limits():
    for u in (0.1, 1.0, 2.5):
        assert gaussian_mass(GaussianApproxBounds(u, -u)) == pytest.approx(
            2 * analytic.standard_normal_cdf(u) - 1, abs=1e-15)
    assert gaussian_mass(GaussianApproxBounds(math.inf, -math.inf)) == 1.0


def test_gaussian_limits_follow_standardization():
    params = ScalingParams(q=2.0, t=0.5, p=0.3, eps=0.1)
    M = 2**14
    lam, N = density(M, 2.0), group_size(M, 0.5)
    b = analytic.gaussian_approx_bounds(params, M, lam, N, math.pi / 4, H)
    iv = sufficient_interval(M, 0.3, 0.1, math.pi / 4)
    a = iv.alpha
    assert b.U_N == pytest.approx((M**2.0 / (4 * a * a * M ** (1.3 + 0.05) - 1) - N) / math.sqrt(N), rel=1e-10)
    assert b.L_N == pytest.approx((M**2.0 / (a * a * M ** (2.05) - 1) - N) / math.sqrt(N), rel=1e-10)


def test_gaussian_goes_to_one_deep_in_range():
    params = ScalingParams(q=2.2, t=0.5, p=0.2, eps=0.1)
    M = 2.0**30
    assert gaussian_approx_probability(params, M, density(M, 2.2), group_size(M, 0.5), math.pi / 4, H) > 1 - 1e-12


def test_gaussian_close_to_gamma_for_large_n():
    params = ScalingParams(q=1.95, t=0.6, p=0.3, eps=0.1)
    M = 2**14
    lam, N = density(M, params.q), group_size(M, params.t)
    assert N >= 100
    exact = theorem1_probability_lower_bound(params, M, lam, N, 0.6, H)
    assert abs(gaussian_approx_probability(params, M, lam, N, 0.6, H) - exact) < 0.02


def test_scaling_fraction_values():
    assert scaling_fraction(2.0, 0.0) == 1.0
    assert scaling_fraction(2.0, 0.5) == 0.5
    with pytest.warns(ParameterWarning):
        assert scaling_fraction(1.5, 0.5) == 0.0


@given(st.floats(1.0, 3.0), st.floats(0.0, 1.0), st.floats(-0.5, 0.5))
def test_scaling_fraction_offset(q, t, delta):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterWarning)
        assert scaling_fraction(q + delta, t + delta) == pytest.approx(scaling_fraction(q, t), abs=1e-12)


def test_rate_bounds():
    lo, hi = rate_bounds(1.8, 0.3, 0.0, 4096, 2.0)
    assert lo == hi == pytest.approx(2 * 0.5 * math.log(4096) + math.log(2.0))
    lo, hi = rate_bounds(1.8, 0.3, 0.1, 4096)
    assert lo < hi
    assert lo == pytest.approx(0.8 * math.log(4096)) and hi == pytest.approx(1.2 * math.log(4096))


def test_theorem3_closed_form_n1_and_paths():
    M, ell, q = 1024, 0.5, 1.8
    lam = density(M, q)
    x = lam * math.pi * H**2 / (M ** (2 * ell) - 1)
    assert theorem3_interference_bound(1, lam, H, M, ell) == pytest.approx(-math.expm1(-x), abs=1e-14)
    small_lam = lam * 1e-3
    for N in (1, 4, 16):
        g = theorem3_interference_bound(N, small_lam, H, M, ell)
        k = theorem3_interference_bound(N, small_lam, H, M, ell, method="kummer")
        assert abs(g - k) < 1e-10


def test_theorem3_monotone_in_m():
    lam = density(1024, 1.8)
    vals = [theorem3_interference_bound(4, lam * 1e-3, H, M, 0.5) for M in (256, 512, 1024, 2048)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_theorem3_domain():
    with pytest.raises(DomainError):
        theorem3_interference_bound(4, 1.0, H, 1.0, 0.5)
    with pytest.raises(ValueError):
        theorem3_interference_bound(4, 1e-9, H, 64, 0.5, method="bogus")


def test_parameter_checks_warn_not_fail():
    p = ScalingParams(q=5.0, t=0.3, p=0.4, eps=0.1, s=0.7, ell=0.5)
    with pytest.warns(ParameterWarning):
        assert p.check_theorem2() is False
    with pytest.warns(ParameterWarning):
        assert p.check_theorem3() is False
    assert ScalingParams().theorem2_violations() == [] and ScalingParams().theorem3_violations() == []


def test_probabilities_in_unit_interval_fuzz():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(10_000):
        M = 2.0 ** rng.uniform(4, 14)
        t, p = rng.uniform(0.01, 0.99, 2)
        eps = rng.uniform(0.01, 0.3)
        q = rng.uniform(0.5, 3.5)
        phi = rng.uniform(0, 2 * math.pi)
        params = ScalingParams(q=q, t=t, p=p, eps=eps)
        lam, N = density(M, q), group_size(M, t)
        vals = [theorem3_interference_bound(N, lam, H, M, rng.uniform(0.05, 0.95))]
        try:
            vals.append(theorem1_probability_lower_bound(params, M, lam, N, phi, H))
            vals.append(gaussian_approx_probability(params, M, lam, N, phi, H))
        except DomainError:
            pass
        assert all(0.0 <= v <= 1.0 for v in vals)
        checked += 1
    assert checked == 10_000
