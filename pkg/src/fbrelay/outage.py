"""Outage probability of direct, selection-combining and MRC relaying.

Single-link outage is the expectation of the linearized error probability
``K(x)`` under the link's Gamma SNR density. It is available three ways:

* :func:`outage_closed_form`, in terms of incomplete gamma functions;
* :func:`outage_quadrature`, by adaptive quadrature of ``K(x) f(x)``;
* :func:`outage_exact_mc`, a Monte Carlo mean of the exact ``Q(g(x))``.

The relay schemes combine per-link outages. The S-D, S-R and R-D links are
called Z, X and Y.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, special as sp

from .channel import FadingLink, SnrSampleStream, SumSnrDensity, sample_snr, snr_cdf, snr_pdf
from .errors import ConvergenceError, DomainError, MethodMismatchError
from .fbl import (
    LOG2E,
    SQRT_2PI,
    CodeSpec,
    LinearizationParams,
    Mode,
    linearization_params,
)
from .special import regularized_gamma_p, regularized_gamma_q

log = logging.getLogger(__name__)

CLAMP_WARN = 1e-9


class Scheme(str, enum.Enum):
    DT = "DT"
    SC = "SC"
    MRC = "MRC"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise DomainError(f"unknown scheme {value!r}") from None


class OutageMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


class SrdBlocklength(str, enum.Enum):
    """Which blocklength builds the linearization of the combined signal."""

    SOURCE = "source"  # n_s
    TOTAL = "total"  # n_s + n_r


@dataclass(frozen=True)
class OutageResult:
    value: float
    method: OutageMethod
    ci_halfwidth: float = 0.0
    samples: int = 0

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"outage {self.value!r} outside [0, 1]")
        if (self.method is OutageMethod.MONTE_CARLO) != (self.samples > 0):
            raise DomainError("samples are reported for Monte Carlo results only")
        if self.method is not OutageMethod.MONTE_CARLO and self.ci_halfwidth != 0.0:
            raise DomainError("only Monte Carlo results carry a confidence interval")


def _clamp(value: float, where: str) -> float:
    if value < -CLAMP_WARN or value > 1.0 + CLAMP_WARN:
        log.warning("%s: clamped outage %.3e into [0, 1]", where, value)
    return min(1.0, max(0.0, value))


def _params(code, mode, params):
    return params if params is not None else linearization_params(code, mode)


# -- single link --------------------------------------------------------------


def window_outage(m: float, avg_snr: float, p: LinearizationParams) -> float:
    """Unclamped E[K(X)] for X ~ Gamma(m, avg_snr/m), in closed form.

    With ``a = m lo/avg_snr``, ``b = m hi/avg_snr`` (lo clamped at 0) this is::

        mu/sqrt(2 pi) [theta (G(m,a) - G(m,b)) / G(m)
                       + avg_snr (G(1+m,b) - G(1+m,a)) / G(1+m)]
        + (P(m,b) + P(m,a)) / 2

    with ``G(s, x)`` the upper incomplete gamma function, written here through
    the regularized P and Q.
    """
    if p.rho_hi <= 0:
        return 0.0
    rate = m / avg_snr
    a, b = rate * p.lower, rate * p.rho_hi
    pa, pb = regularized_gamma_p(m, a), regularized_gamma_p(m, b)
    if pa > 0.5:
        d0 = regularized_gamma_q(m, a) - regularized_gamma_q(m, b)
    else:
        d0 = pb - pa
    p1a, p1b = regularized_gamma_p(m + 1.0, a), regularized_gamma_p(m + 1.0, b)
    if p1a > 0.5:
        d1 = regularized_gamma_q(m + 1.0, a) - regularized_gamma_q(m + 1.0, b)
    else:
        d1 = p1b - p1a
    slope = p.mu / SQRT_2PI
    return 0.5 * (pa + pb) + slope * (p.theta * d0 - avg_snr * d1)


def rayleigh_closed_form(avg_snr: float, p: LinearizationParams) -> float:
    """Unclamped m = 1 outage with the incomplete gammas written as exponentials."""
    if p.rho_hi <= 0:
        return 0.0
    a, b = p.lower / avg_snr, p.rho_hi / avg_snr
    d = b - a
    ea = math.exp(-a)
    slope = p.mu / SQRT_2PI
    # G(1,a) - G(1,b) = e^-a (1 - e^-d)
    # G(2,b) - G(2,a) = e^-a (a (e^-d - 1) - (1 - (1 + d) e^-d))
    g1 = -ea * math.expm1(-d)
    g2 = ea * (a * math.expm1(-d) - _erlang2_cdf(d))
    return slope * (p.theta * g1 + avg_snr * g2) - 0.5 * (math.expm1(-b) + math.expm1(-a))


def _erlang2_cdf(x):
    """1 - (1 + x) e^-x without cancellation at small x."""
    if x > 0.5:
        return -math.expm1(-x) - x * math.exp(-x)
    term, total = x * x / 2.0, 0.0
    j = 2
    while abs(term) > 1e-18 * max(total, 1e-300):
        total += term
        term *= -x * j / ((j - 1) * (j + 1))
        j += 1
    return total


def outage_closed_form(link: FadingLink, code: CodeSpec, mode=Mode.CONSISTENT,
                       params: LinearizationParams | None = None) -> float:
    p = _params(code, mode, params)
    return _clamp(window_outage(link.m, link.avg_snr, p), "closed form")


def _quad(f, a, b, epsabs, points=None):
    val, err, info, *msg = integrate.quad(
        f, a, b, epsabs=epsabs, epsrel=1e-12, limit=200, points=points, full_output=1
    )
    if msg and err > 100 * epsabs:
        raise ConvergenceError(f"quadrature on [{a}, {b}] failed: {msg[0]}")
    return val


def outage_quadrature(link: FadingLink, code: CodeSpec, mode=Mode.CONSISTENT,
                      params: LinearizationParams | None = None,
                      epsabs: float = 1e-10) -> float:
    p = _params(code, mode, params)
    lo = p.lower
    slope = p.mu / SQRT_2PI

    def ramp(x):
        return (0.5 - slope * (x - p.theta)) * snr_pdf(link, x) if x > 0 else 0.0

    flat = snr_cdf(link, lo)
    val = flat
    for a, b in ((lo, p.theta), (p.theta, p.rho_hi)):
        val += _quad(ramp, a, b, epsabs)
    return _clamp(val, "quadrature")


def exact_outage_integrand(x: np.ndarray, code: CodeSpec) -> np.ndarray:
    """Vectorized Q(g(x)) with the unlinearized normal approximation."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.log1p(x) * LOG2E
        disp = x * (2.0 + x) / (1.0 + x) ** 2
        g = math.sqrt(code.n) * (cap - code.rate) / (np.sqrt(disp) * LOG2E)
    g = np.where(x > 0, g, -np.inf)
    return 0.5 * sp.erfc(g / math.sqrt(2.0))


def _mc_result(values: np.ndarray) -> OutageResult:
    n = values.size
    mean = float(values.mean())
    half = 3.0 * float(values.std(ddof=1)) / math.sqrt(n)
    return OutageResult(min(1.0, max(0.0, mean)), OutageMethod.MONTE_CARLO, half, n)


def outage_exact_mc(link: FadingLink, code: CodeSpec, samples: int, seed: int) -> OutageResult:
    """Monte Carlo outage with a 3-sigma confidence half-width."""
    if samples < 10_000:
        raise DomainError("Monte Carlo needs at least 1e4 samples")
    x = sample_snr(link, SnrSampleStream(seed, samples))
    return _mc_result(exact_outage_integrand(x, code))


# -- relay system -------------------------------------------------------------


@dataclass(frozen=True)
class RelaySystem:
    """Three-node decode-and-forward scenario.

    ``total_power`` is P/N0-style linear power; the source radiates
    ``eta * total_power`` and the relay the rest. Average link SNRs are
    ``gain * power / noise`` with unit mean-square fading by default. ``beta``
    (relay distance to the destination) is carried along but not applied as a
    path loss.
    """

    total_power: float
    eta: float = 0.5
    n_s: int = 500
    n_r: int = 500
    k: float = 250.0
    m_sd: float = 1.0
    m_sr: float = 1.0
    m_rd: float = 1.0
    noise: float = 1.0
    gain_sd: float = 1.0
    gain_sr: float = 1.0
    gain_rd: float = 1.0
    beta: float = 0.5
    mode: Mode = Mode.CONSISTENT
    srd_blocklength: SrdBlocklength = SrdBlocklength.TOTAL

    def __post_init__(self):
        if not (self.total_power > 0 and math.isfinite(self.total_power)):
            raise DomainError(f"total power must be positive, got {self.total_power!r}")
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not self.noise > 0:
            raise DomainError("noise power must be positive")
        if not 0.0 < self.beta < 1.0:
            raise DomainError("relay position beta must lie in (0, 1)")
        if min(self.gain_sd, self.gain_sr, self.gain_rd) <= 0:
            raise DomainError("mean-square channel gains must be positive")
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        object.__setattr__(self, "srd_blocklength", SrdBlocklength(self.srd_blocklength))
        # validates blocklengths and payload
        self.code_s, self.code_r  # noqa: B018
        FadingLink(self.m_sd, 1.0), FadingLink(self.m_sr, 1.0), FadingLink(self.m_rd, 1.0)

    def replace(self, **changes) -> "RelaySystem":
        return replace(self, **changes)

    @property
    def source_power(self) -> float:
        return self.eta * self.total_power

    @property
    def relay_power(self) -> float:
        return (1.0 - self.eta) * self.total_power

    @property
    def link_sd(self) -> FadingLink:
        return FadingLink(self.m_sd, self.gain_sd * self.source_power / self.noise)

    @property
    def link_sr(self) -> FadingLink:
        return FadingLink(self.m_sr, self.gain_sr * self.source_power / self.noise)

    @property
    def link_rd(self) -> FadingLink | None:
        """R-D link, or None when the relay gets no power (eta = 1)."""
        if self.relay_power <= 0:
            return None
        return FadingLink(self.m_rd, self.gain_rd * self.relay_power / self.noise)

    @property
    def code_s(self) -> CodeSpec:
        return CodeSpec(self.n_s, self.k)

    @property
    def code_r(self) -> CodeSpec:
        return CodeSpec(self.n_r, self.k)

    @property
    def code_srd(self) -> CodeSpec:
        if self.srd_blocklength is SrdBlocklength.SOURCE:
            return self.code_s
        return CodeSpec(self.n_s + self.n_r, self.k)


def sc_combine(eps_z: float, eps_x: float, eps_y: float) -> float:
    return eps_z * (eps_x + (1.0 - eps_x) * eps_y)


def mrc_combine(eps_z: float, eps_x: float, eps_srd: float) -> float:
    # eps_z (eps_x + (1 - eps_x) eps_srd / eps_z), free of the 0/0 at eps_z = 0
    return eps_z * eps_x + (1.0 - eps_x) * eps_srd


def _link_outage(link, code, mode):
    if link is None:
        return 1.0
    return outage_closed_form(link, code, mode)


def outage_dt(sys: RelaySystem) -> float:
    return outage_closed_form(sys.link_sd, sys.code_s, sys.mode)


def outage_sc(sys: RelaySystem) -> float:
    ez = outage_closed_form(sys.link_sd, sys.code_s, sys.mode)
    ex = outage_closed_form(sys.link_sr, sys.code_s, sys.mode)
    ey = _link_outage(sys.link_rd, sys.code_r, sys.mode)
    return sc_combine(ez, ex, ey)


@lru_cache(maxsize=65536)
def _srd_quadrature(link_z: FadingLink, link_y: FadingLink, p: LinearizationParams) -> float:
    density = SumSnrDensity(link_z, link_y)
    lo = p.lower
    slope = p.mu / SQRT_2PI

    def ramp(w):
        return (0.5 - slope * (w - p.theta)) * density.pdf(w) if w > 0 else 0.0

    val = _quad(lambda w: density.pdf(w) if w > 0 else 0.0, 0.0, lo, 1e-12) if lo > 0 else 0.0
    for a, b in ((lo, p.theta), (p.theta, p.rho_hi)):
        val += _quad(ramp, a, b, 1e-12)
    return val


def _srd_closed_m1(avg_z: float, avg_y: float, p: LinearizationParams) -> float:
    lz, ly = 1.0 / avg_z, 1.0 / avg_y
    if abs(ly - lz) <= 1e-6 * max(lz, ly):
        # equal rates: W ~ Gamma(2, 1/rate)
        return window_outage(2.0, 2.0 * 2.0 / (lz + ly), p)
    # hypoexponential density is a signed mix of the two exponentials
    ez = rayleigh_closed_form(avg_z, p)
    ey = rayleigh_closed_form(avg_y, p)
    return (ly * ez - lz * ey) / (ly - lz)


def outage_srd(sys: RelaySystem, method: str = "quadrature") -> float:
    """Outage of the MRC-combined S-D plus R-D signal."""
    p = linearization_params(sys.code_srd, sys.mode)
    if method == "closed_m1" and not (sys.m_sd == 1 and sys.m_rd == 1):
        raise MethodMismatchError("closed_m1 needs m = 1 on the S-D and R-D links")
    link_y = sys.link_rd
    if link_y is None:
        # nothing to combine: the destination holds only the source copy
        return outage_closed_form(sys.link_sd, sys.code_s, sys.mode)
    if method == "quadrature":
        val = _srd_quadrature(sys.link_sd, link_y, p)
    elif method == "closed_m1":
        val = _srd_closed_m1(sys.link_sd.avg_snr, link_y.avg_snr, p)
    else:
        raise DomainError(f"unknown SRD method {method!r}")
    return _clamp(val, "combined outage")


def srd_conditional_oracle(sys: RelaySystem) -> float:
    """Combined outage as E_Z[E_Y[K(Z + Y)]], never forming the sum density.

    The inner expectation is the closed-form window outage of Y with the
    linearization shifted by Z; the outer one is adaptive quadrature.
    """
    p = linearization_params(sys.code_srd, sys.mode)
    link_z, link_y = sys.link_sd, sys.link_rd
    if link_y is None:
        return outage_closed_form(link_z, sys.code_s, sys.mode)

    def inner(z):
        if z <= 0:
            return 0.0
        return snr_pdf(link_z, z) * window_outage(link_y.m, link_y.avg_snr, p.shifted(z))

    pts = [x for x in (p.lower, p.theta) if 0 < x < p.rho_hi]
    val = 0.0
    edges = [0.0, *pts, p.rho_hi]
    for a, b in zip(edges[:-1], edges[1:]):
        val += _quad(inner, a, b, 1e-13)
    return _clamp(val, "conditional oracle")


def outage_mrc(sys: RelaySystem, srd_method: str = "quadrature") -> float:
    ez = outage_closed_form(sys.link_sd, sys.code_s, sys.mode)
    ex = outage_closed_form(sys.link_sr, sys.code_s, sys.mode)
    return mrc_combine(ez, ex, outage_srd(sys, srd_method))


def scheme_outage(sys: RelaySystem, scheme) -> float:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.DT:
        return outage_dt(sys)
    if scheme is Scheme.SC:
        return outage_sc(sys)
    return outage_mrc(sys)


def scheme_outage_mc(sys: RelaySystem, scheme, samples: int, seed: int) -> OutageResult:
    """Monte Carlo estimate of a scheme's outage with the exact Q integrand.

    The three link SNRs are drawn from streams seeded ``seed``, ``seed + 1``
    and ``seed + 2``; per-sample link error probabilities are combined with
    the same algebra as the analytic schemes.
    """
    scheme = Scheme.parse(scheme)
    if samples < 10_000:
        raise DomainError("Monte Carlo needs at least 1e4 samples")
    z = sample_snr(sys.link_sd, SnrSampleStream(seed, samples))
    qz = exact_outage_integrand(z, sys.code_s)
    if scheme is Scheme.DT:
        return _mc_result(qz)
    qx = exact_outage_integrand(sample_snr(sys.link_sr, SnrSampleStream(seed + 1, samples)), sys.code_s)
    link_y = sys.link_rd
    y = (sample_snr(link_y, SnrSampleStream(seed + 2, samples))
         if link_y is not None else np.zeros(samples))
    if scheme is Scheme.SC:
        qy = exact_outage_integrand(y, sys.code_r)
        return _mc_result(qz * (qx + (1.0 - qx) * qy))
    qw = exact_outage_integrand(z + y, sys.code_srd) if link_y is not None else qz
    return _mc_result(qz * qx + (1.0 - qx) * qw)
