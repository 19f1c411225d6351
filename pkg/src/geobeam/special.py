"""Special functions behind the order-statistic and interference bounds.

``regularized_incomplete_gamma`` uses the power series below ``x = a + 1`` and
a modified-Lentz continued fraction above it.  ``kummer_1f1_bound_form``
evaluates ``x^N / N! * 1F1(N, N+1; -x)`` independently through the confluent
hypergeometric series, so the two can be checked against each other.
"""
from __future__ import annotations

import math

from .errors import NumericError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 1_000_000
_KUMMER_MAX_TERMS = 10_000_000
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log1pmx(d: float) -> float:
    """``log(1 + d) - d`` without cancellation for small ``d``."""
    term = d
    total = 0.0
    for k in range(2, 200):
        term *= -d
        inc = term / k
        total += inc
        if abs(inc) <= 1e-17 * abs(total):
            break
    return total


def _stirling_tail(a: float) -> float:
    """``lgamma(a) - ((a - 1/2) log a - a + log(2 pi)/2)`` for ``a >= 30``."""
    a2 = a * a
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - 1.0 / (1680 * a2)) / a2) / a2) / a


def _log_prefactor(a: float, x: float) -> float:
    """``log(x^a e^-x / Gamma(a))``.

    For large shapes the direct form cancels two O(a log a) terms; the
    Stirling form keeps only ``a * (log(1 + d) - d)`` with ``d = x/a - 1``.
    """
    if a < 30:
        return a * math.log(x) - x - math.lgamma(a)
    d = (x - a) / a
    if abs(d) < 0.3:
        core = _log1pmx(d)
    else:
        ratio = x / a
        core = (math.log(ratio) if ratio > 0 else math.log(x) - math.log(a)) - d
    return a * core + 0.5 * math.log(a) - _HALF_LOG_2PI - _stirling_tail(a)


def _lower_series(a: float, x: float) -> float:
    """P(a, x) by the series ``sum x^k / (a (a+1) ... (a+k))``."""
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return math.exp(_log_prefactor(a, x)) * total
    raise NumericError(f"incomplete gamma series failed to converge (a={a}, x={x})")


def _upper_cf(a: float, x: float) -> float:
    """Q(a, x) by the Legendre continued fraction, modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(_log_prefactor(a, x)) * h
    raise NumericError(f"incomplete gamma continued fraction failed to converge (a={a}, x={x})")


def regularized_incomplete_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x) = gamma(a, x) / Gamma(a)``."""
    if not a > 0:
        raise ValueError(f"shape must be positive, got {a!r}")
    if x < 0 or math.isnan(x):
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        p = _lower_series(a, x)
    else:
        p = 1.0 - _upper_cf(a, x)
    return min(1.0, max(0.0, p))


def regularized_upper_gamma(a: float, x: float) -> float:
    """``Q(a, x) = 1 - P(a, x)``, accurate in the upper tail."""
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - regularized_incomplete_gamma(a, x)
    return min(1.0, max(0.0, _upper_cf(a, x)))


def hyp1f1_series(a: float, b: float, z: float, tol: float = 1e-15,
                  max_terms: int = 100_000) -> float:
    """Direct Kummer series ``sum (a)_k / (b)_k z^k / k!``; stable only for moderate ``|z|``."""
    term = total = 1.0
    for k in range(max_terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if abs(term) < tol * abs(total):
            return total
    raise NumericError(f"1F1 series failed to converge (a={a}, b={b}, z={z})")


def kummer_1f1_bound_form(N: int, x: float) -> float:
    """``x^N / N! * 1F1(N, N+1; -x)``, which equals ``P(N, x)``.

    For ``x <= 1`` the alternating series is summed as is.  Beyond that the
    alternating terms cancel catastrophically, so Kummer's transformation
    ``1F1(N, N+1; -x) = e^-x 1F1(1, N+1; x)`` turns it into a positive series,
    accumulated with running rescaling so neither ``e^-x`` nor the partial
    sums leave double range.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if x < 0 or math.isnan(x):
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_pref = N * math.log(x) - math.lgamma(N + 1)
    if x <= 1.0:
        return min(1.0, math.exp(log_pref) * hyp1f1_series(N, N + 1, -x))

    log_pref = _log_prefactor(N, x) - math.log(N)
    term = total = 1.0
    for k in range(_KUMMER_MAX_TERMS):
        term *= x / (N + 1 + k)
        total += term
        if total > _RESCALE:
            term /= _RESCALE
            total /= _RESCALE
            log_pref += _LOG_RESCALE
        # past the peak the terms decay geometrically
        if N + 1 + k > x and term < 1e-15 * total:
            return min(1.0, math.exp(log_pref + math.log(total)))
    raise NumericError(f"Kummer series failed to converge (N={N}, x={x})")


def standard_normal_cdf(z: float) -> float:
    if z == math.inf:
        return 1.0
    if z == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-z / math.sqrt(2.0))
