"""Nakagami-m links described by their Gamma-distributed instantaneous SNR.

A link with fading figure ``m`` and average SNR ``avg_snr`` has SNR
``X ~ Gamma(shape=m, scale=avg_snr/m)``. Samples come from NumPy's
``Generator(PCG64)`` seeded explicitly; ``Generator.gamma`` uses the
Marsaglia-Tsang method for shape >= 1 (and its boosted form below 1), so a
given seed and count reproduce the same samples bit for bit on one platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError
from .special import log_hyp1f1_regularized_scaled, regularized_gamma_p

MIN_FADING_FIGURE = 0.5
_EQUAL_SCALE_RTOL = 1e-12


@dataclass(frozen=True)
class FadingLink:
    m: float
    avg_snr: float

    def __post_init__(self):
        if not self.m >= MIN_FADING_FIGURE:
            raise DomainError(f"fading figure must be >= 0.5, got {self.m!r}")
        if not (self.avg_snr > 0 and math.isfinite(self.avg_snr)):
            raise DomainError(f"average SNR must be positive, got {self.avg_snr!r}")

    @property
    def scale(self) -> float:
        return self.avg_snr / self.m

    @property
    def rate(self) -> float:
        """Inverse Gamma scale."""
        return self.m / self.avg_snr


@dataclass(frozen=True)
class SnrSampleStream:
    seed: int
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise DomainError("sample count must be >= 1")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


def _check_x(x):
    if not x >= 0:
        raise DomainError(f"SNR must be nonnegative, got {x!r}")


def _log_gamma_pdf(link, x):
    m, lam = link.m, link.rate
    return m * math.log(lam) + (m - 1.0) * math.log(x) - lam * x - math.lgamma(m)


def snr_pdf(link: FadingLink, x: float) -> float:
    _check_x(x)
    if x == 0:
        if link.m < 1:
            return math.inf
        return link.rate if link.m == 1 else 0.0
    return math.exp(_log_gamma_pdf(link, x))


def snr_cdf(link: FadingLink, x: float) -> float:
    _check_x(x)
    return regularized_gamma_p(link.m, link.rate * x)


def sample_snr(link: FadingLink, stream: SnrSampleStream) -> np.ndarray:
    return stream.generator().gamma(link.m, link.scale, stream.count)


def sum_snr_pdf(link_z: FadingLink, link_y: FadingLink, w: float) -> float:
    """Density of Z + Y for independent link SNRs Z and Y.

    With rates ``lz = m_z/avg_z`` and ``ly = m_y/avg_y``::

        f(w) = lz^m_z ly^m_y w^(m_z+m_y-1) e^(-ly w)
               * 1F1~(m_z; m_z+m_y; (ly - lz) w)

    where ``1F1~`` is the regularized confluent hypergeometric function.
    Equal rates reduce to a Gamma(m_z+m_y) density.
    """
    _check_x(w)
    mz, my = link_z.m, link_y.m
    lz, ly = link_z.rate, link_y.rate
    shape = mz + my
    if w == 0:
        if shape < 1:
            return math.inf
        if shape == 1:
            # only reachable with m_z = m_y = 0.5
            return math.exp(mz * math.log(lz) + my * math.log(ly) - math.lgamma(shape))
        return 0.0
    log_common = mz * math.log(lz) + my * math.log(ly) + (shape - 1.0) * math.log(w)
    if abs(ly - lz) <= _EQUAL_SCALE_RTOL * max(ly, lz):
        return math.exp(log_common - lz * w - math.lgamma(shape))
    # orient the argument to be positive; e^-ly w e^x (ly > lz) collapses to e^-lz w
    if ly > lz:
        return math.exp(log_common - lz * w + log_hyp1f1_regularized_scaled(mz, shape, (ly - lz) * w))
    return math.exp(log_common - ly * w + log_hyp1f1_regularized_scaled(my, shape, (lz - ly) * w))


def sum_snr_pdf_oracle(link_z: FadingLink, link_y: FadingLink, w: float) -> float:
    """Convolution of the two Gamma densities by adaptive quadrature."""
    _check_x(w)
    if w == 0:
        return sum_snr_pdf(link_z, link_y, 0.0)
    mz, my = link_z.m, link_y.m
    lz, ly = link_z.rate, link_y.rate
    log_c = (
        mz * math.log(lz) + my * math.log(ly) - math.lgamma(mz) - math.lgamma(my)
    )
    scale_exp = -min(lz, ly) * w

    # t^(mz-1) (w-t)^(my-1) is handled exactly by the algebraic weight
    def smooth(t):
        return math.exp(log_c - lz * t - ly * (w - t) - scale_exp)

    val, err, *rest = integrate.quad(
        smooth, 0.0, w, weight="alg", wvar=(mz - 1.0, my - 1.0),
        epsabs=0.0, epsrel=1e-12, limit=200, full_output=1,
    )
    if len(rest) > 1 and rest[1]:
        if not err <= 1e-8 * max(abs(val), 1e-300):
            raise ConvergenceError(f"convolution quadrature did not converge at w={w}")
    return val * math.exp(scale_exp)


@lru_cache(maxsize=4096)
def _unit_mass(link_z: FadingLink, link_y: FadingLink) -> float:
    mean = link_z.avg_snr + link_y.avg_snr
    shape = link_z.m + link_y.m
    # W is stochastically below Gamma(shape, 1/min rate); its mass past this is < 1e-15
    upper = (shape + 50.0 + 10.0 * math.sqrt(shape)) / min(link_z.rate, link_y.rate)
    f = lambda w: sum_snr_pdf(link_z, link_y, w) if w > 0 else 0.0  # noqa: E731
    # extra break at the weaker link's scale, where the density rises from 0
    weak = 20.0 * min(link_z.avg_snr, link_y.avg_snr)
    edges = sorted({0.0, min(weak, mean), mean, upper})
    return sum(integrate.quad(f, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
               for lo, hi in zip(edges, edges[1:]))


class SumSnrDensity:
    """Density of the MRC-combined SNR, checked for unit mass on creation."""

    def __init__(self, link_z: FadingLink, link_y: FadingLink, mass_tol: float = 1e-6):
        self.link_z = link_z
        self.link_y = link_y
        self.mass = _unit_mass(link_z, link_y)
        if abs(self.mass - 1.0) > mass_tol:
            raise ConvergenceError(
                f"sum-SNR density integrates to {self.mass:.9g}, not 1 "
                f"(links {link_z}, {link_y})"
            )

    @property
    def mean(self) -> float:
        return self.link_z.avg_snr + self.link_y.avg_snr

    def pdf(self, w: float) -> float:
        return sum_snr_pdf(self.link_z, self.link_y, w)

    def __call__(self, w: float) -> float:
        return self.pdf(w)
