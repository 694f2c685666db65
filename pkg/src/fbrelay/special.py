"""Scalar special functions used by the outage formulas.

Everything here is a pure function of its arguments. The incomplete gamma
functions use the usual split between the power series (``x < a + 1``) and
the Lentz continued fraction (``x >= a + 1``); the confluent hypergeometric
function is summed as a Taylor series, with Kummer's transformation applied
for negative arguments so the summed terms stay positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .errors import ConvergenceError, DomainError

__all__ = [
    "Accuracy",
    "DEFAULT_ACCURACY",
    "ln_gamma",
    "upper_incomplete_gamma",
    "regularized_gamma_p",
    "regularized_gamma_q",
    "q_function",
    "q_inverse",
    "hyp1f1_regularized",
    "log_hyp1f1_regularized",
]

_MAX_ITER = 100_000
_TINY = 1e-300
_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class Accuracy:
    """Stopping tolerances for the iterative kernels."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")


DEFAULT_ACCURACY = Accuracy()
# Series and continued fractions run to machine precision; the public
# Accuracy object documents the guaranteed targets, not the stop rule.
_EPS = 1e-16


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _check_gamma_args(a, x):
    if not a > 0:
        raise DomainError(f"shape a must be positive, got {a!r}")
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")


def _log_prefactor(a, x):
    # log of x^a e^{-x} / Gamma(a)
    return a * math.log(x) - x - math.lgamma(a)


def _p_series(a, x):
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(_log_prefactor(a, x))
    raise ConvergenceError(f"incomplete gamma series failed for a={a}, x={x}")


def _q_continued_fraction(a, x):
    # modified Lentz evaluation of the continued fraction for Q(a, x)
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
            return h * math.exp(_log_prefactor(a, x))
    raise ConvergenceError(f"incomplete gamma continued fraction failed for a={a}, x={x}")


def regularized_gamma_p(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    _check_gamma_args(a, x)
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _p_series(a, x))
    return max(0.0, 1.0 - _q_continued_fraction(a, x))


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _p_series(a, x))
    return min(1.0, _q_continued_fraction(a, x))


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Gamma(a, x), the integral of t^(a-1) e^(-t) from x to infinity."""
    _check_gamma_args(a, x)
    if x == 0:
        return math.exp(math.lgamma(a))
    return regularized_gamma_q(a, x) * math.exp(math.lgamma(a))


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(N(0, 1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"q_inverse requires 0 < p < 1, got {p!r}")
    # Q^{-1}(p) = -Phi^{-1}(p), evaluated at p directly to keep tail precision
    return -_STD_NORMAL.inv_cdf(p)


_ASYMPTOTIC_Z = 2000.0


def _log_asymptotic(a, b, z):
    """log(Gamma(a) 1F1(a; b; z) / (Gamma(b) e^z z^(a-b))) for large positive z,
    or None when the divergent expansion does not reach full precision."""
    total, term = 1.0, 1.0
    for k in range(200):
        nxt = term * (b - a + k) * (1 - a + k) / ((k + 1) * z)
        if abs(nxt) >= abs(term) and k > 0:
            return None
        term = nxt
        total += term
        if abs(term) < _EPS * abs(total):
            return math.log(total) if total > 0 else None
    return None


def _log_positive_series(a, b, z):
    """log of sum_k (a)_k / (b)_k z^k / k! when every term is positive."""
    return _log_positive_series_scaled(a, b, z) + z


def _log_positive_series_scaled(a, b, z):
    # same sum times e^-z, with the e^z of the large-z expansion cancelled exactly
    if z > _ASYMPTOTIC_Z:
        # the e^{i pi a} z^-a Gamma(b)/Gamma(b-a) branch is smaller by e^-z
        tail = _log_asymptotic(a, b, z)
        if tail is not None:
            return (a - b) * math.log(z) + math.lgamma(b) - math.lgamma(a) + tail
    return _log_series(a, b, z) - z


def _log_series(a, b, z):
    total = 1.0
    term = 1.0
    log_scale = 0.0
    k = 0
    while k < _MAX_ITER:
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        k += 1
        if total > 1e250:
            total *= 1e-250
            term *= 1e-250
            log_scale += 250.0 * math.log(10.0)
        # past the peak term the remainder is bounded by a geometric tail
        if term < total * _EPS and (a + k) * z < (b + k) * (k + 1):
            return math.log(total) + log_scale
    raise ConvergenceError(f"1F1 series failed for a={a}, b={b}, z={z}")


def _signed_series(a, b, z):
    # Neumaier-compensated running sum
    total, comp, term = 1.0, 0.0, 1.0
    for k in range(_MAX_ITER):
        term *= (a + k) * z / ((b + k) * (k + 1))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        if term == 0.0 or (abs(term) < _EPS * abs(total + comp) and k > abs(z)):
            return total + comp
    raise ConvergenceError(f"1F1 series failed for a={a}, b={b}, z={z}")


def log_hyp1f1_regularized(a: float, b: float, z: float) -> float:
    """Natural log of the regularized 1F1(a; b; z) / Gamma(b).

    Valid where the value is guaranteed positive: ``a > 0`` for ``z >= 0``
    and ``b - a > 0`` for ``z < 0``. Use this form when 1F1 itself would
    overflow, as it does for the sum-of-SNRs density at strong links.
    """
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    if z >= 0:
        if not a > 0:
            raise DomainError("log form needs a > 0 for z >= 0")
        if z == 0:
            return -math.lgamma(b)
        return _log_positive_series(a, b, z) - math.lgamma(b)
    if not b - a > 0:
        raise DomainError("log form needs b > a for z < 0")
    return z + _log_positive_series(b - a, b, -z) - math.lgamma(b)


def log_hyp1f1_regularized_scaled(a: float, b: float, z: float) -> float:
    """``log(e^-z 1F1(a; b; z) / Gamma(b))`` for ``a > 0`` and ``z >= 0``.

    Unlike ``log_hyp1f1_regularized(a, b, z) - z`` this keeps full relative
    precision when z is huge.
    """
    if not (b > 0 and a > 0):
        raise DomainError("scaled log form needs a > 0 and b > 0")
    if z < 0:
        raise DomainError("scaled log form needs z >= 0")
    if z == 0:
        return -math.lgamma(b)
    return _log_positive_series_scaled(a, b, z) - math.lgamma(b)


def hyp1f1_regularized(a: float, b: float, z: float) -> float:
    """Regularized confluent hypergeometric function 1F1(a; b; z) / Gamma(b).

    Only ``b > 0`` is supported.
    """
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    if z == 0:
        return 1.0 / math.gamma(b) if b < 171 else math.exp(-math.lgamma(b))
    if (z > 0 and a > 0) or (z < 0 and b - a > 0):
        return math.exp(log_hyp1f1_regularized(a, b, z))
    if z < 0:
        # Kummer: 1F1(a; b; z) = e^z 1F1(b - a; b; -z)
        return math.exp(z - math.lgamma(b)) * _signed_series(b - a, b, -z)
    return math.exp(-math.lgamma(b)) * _signed_series(a, b, z)
