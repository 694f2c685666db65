"""Finite-blocklength rate quantities and the piecewise-linear Q approximation.

The integration variable throughout is the instantaneous SNR ``x`` (linear),
so the pivot of the linearization is the SNR at which capacity equals the
coding rate, ``theta = 2**R - 1``. The average SNR of a link already carries
the transmit power, so no extra division by the power appears here.

Two slope conventions are supported:

``consistent``
    ``mu = sqrt(n) / sqrt(2**(2R) - 1)``, the magnitude of ``g'(theta)`` where
    ``g(x) = sqrt(n) (C(x) - R) / (sqrt(V(x)) log2(e))``. The line is then the
    tangent of ``Q(g(x))`` at the pivot.

``paper_literal``
    ``mu = sqrt(n / (2 pi)) / sqrt(e**(2R) - 1)``, the widely quoted form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import DomainError
from .special import q_function, q_inverse

LOG2E = 1.0 / math.log(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
HALF_WIDTH = math.sqrt(math.pi / 2.0)  # (upper - pivot) * mu
MIN_BLOCKLENGTH = 100


class Mode(str, enum.Enum):
    CONSISTENT = "consistent"
    PAPER_LITERAL = "paper_literal"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).replace("-", "_").lower())
        except ValueError:
            raise DomainError(f"unknown linearization mode {value!r}") from None


@dataclass(frozen=True)
class CodeSpec:
    """Blocklength ``n`` and payload ``k`` bits of one transmission."""

    n: int
    k: float

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise DomainError(f"blocklength must be an integer, got {self.n!r}")
        if self.n < MIN_BLOCKLENGTH:
            raise DomainError(f"blocklength must be >= {MIN_BLOCKLENGTH}, got {self.n}")
        if not self.k > 0:
            raise DomainError(f"payload must be positive, got {self.k!r}")

    @property
    def rate(self) -> float:
        return self.k / self.n


@dataclass(frozen=True)
class LinearizationParams:
    """Pivot, slope and break points of the linearized Q(g(x))."""

    theta: float
    mu: float
    rho_lo: float
    rho_hi: float
    mode: Mode = Mode.CONSISTENT

    @classmethod
    def from_pivot(cls, theta: float, mu: float, mode: Mode = Mode.CONSISTENT):
        if not (theta > 0 and mu > 0):
            raise DomainError("pivot and slope must be positive")
        half = HALF_WIDTH / mu
        return cls(theta, mu, theta - half, theta + half, mode)

    def with_slope(self, mu: float) -> "LinearizationParams":
        """Same pivot with a different slope; break points follow."""
        return LinearizationParams.from_pivot(self.theta, mu, self.mode)

    def shifted(self, offset: float) -> "LinearizationParams":
        """Parameters of ``x -> K(x + offset)``, without positivity checks."""
        return replace(
            self,
            theta=self.theta - offset,
            rho_lo=self.rho_lo - offset,
            rho_hi=self.rho_hi - offset,
        )

    @property
    def lower(self) -> float:
        """Lower break point clamped to the SNR support."""
        return max(0.0, self.rho_lo)


def _check_snr(rho):
    if not rho >= 0:
        raise DomainError(f"SNR must be nonnegative, got {rho!r}")


def capacity(rho: float) -> float:
    """Shannon capacity log2(1 + rho) in bits per channel use."""
    _check_snr(rho)
    return math.log1p(rho) * LOG2E


def dispersion(rho: float) -> float:
    """Channel dispersion rho (2 + rho) / (1 + rho)^2 (nats^2)."""
    _check_snr(rho)
    return rho * (2.0 + rho) / (1.0 + rho) ** 2


def max_rate(n: int, eps: float, rho: float) -> float:
    """Normal-approximation maximum coding rate in bits per channel use."""
    if n < MIN_BLOCKLENGTH:
        raise DomainError(f"blocklength must be >= {MIN_BLOCKLENGTH}, got {n}")
    return capacity(rho) - math.sqrt(dispersion(rho) / n) * q_inverse(eps) * LOG2E


def g_argument(x: float, code: CodeSpec) -> float:
    """sqrt(n) (C(x) - R) / (sqrt(V(x)) log2 e), the argument of Q."""
    _check_snr(x)
    if x == 0:
        return -math.inf
    return (
        math.sqrt(code.n)
        * (capacity(x) - code.rate)
        / (math.sqrt(dispersion(x)) * LOG2E)
    )


def outage_awgn(code: CodeSpec, rho: float) -> float:
    """Block error probability Q(g(rho)) at a fixed SNR."""
    return q_function(g_argument(rho, code))


def linearization_params(code: CodeSpec, mode=Mode.CONSISTENT) -> LinearizationParams:
    mode = Mode.parse(mode)
    r = code.rate
    theta = math.expm1(r * math.log(2.0))
    if mode is Mode.CONSISTENT:
        mu = math.sqrt(code.n) / math.sqrt(math.expm1(2.0 * r * math.log(2.0)))
    else:
        mu = math.sqrt(code.n / (2.0 * math.pi)) / math.sqrt(math.expm1(2.0 * r))
    return LinearizationParams.from_pivot(theta, mu, mode)


def k_approx(x: float, p: LinearizationParams) -> float:
    """Piecewise-linear stand-in for Q(g(x)): 1, then a ramp, then 0."""
    if x <= p.rho_lo:
        return 1.0
    if x >= p.rho_hi:
        return 0.0
    return min(1.0, max(0.0, 0.5 - p.mu / SQRT_2PI * (x - p.theta)))
