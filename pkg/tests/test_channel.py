import math

import numpy as np
import pytest
from scipy import integrate, stats

from fbrelay.channel import (
    FadingLink,
    SnrSampleStream,
    SumSnrDensity,
    sample_snr,
    snr_cdf,
    snr_pdf,
    sum_snr_pdf,
    sum_snr_pdf_oracle,
)
from fbrelay.errors import DomainError
from fbrelay.special import regularized_gamma_p

# mpmath convolution of Gamma(2, 3) and Exp(rate 1/2) densities at w = 4
SUM_PDF_AT_4 = 0.094939141062740870402


def test_link_validation():
    with pytest.raises(DomainError):
        FadingLink(0.4, 1.0)
    with pytest.raises(DomainError):
        FadingLink(1.0, 0.0)
    link = FadingLink(4.0, 10.0)
    assert link.scale == 2.5 and link.rate == 0.4


class TestPdfCdf:
    @pytest.mark.parametrize("x", [0.0, 0.3, 2.0, 9.0])
    def test_exponential_case(self, x):
        link = FadingLink(1.0, 1.0)
        assert snr_pdf(link, x) == pytest.approx(math.exp(-x), rel=1e-14)
        assert snr_cdf(link, x) == pytest.approx(-math.expm1(-x), rel=1e-13, abs=0)

    def test_origin(self):
        assert snr_pdf(FadingLink(2.0, 1.0), 0.0) == 0.0
        assert snr_pdf(FadingLink(0.5, 1.0), 0.0) == math.inf
        assert snr_cdf(FadingLink(3.0, 2.0), 0.0) == 0.0

    def test_unit_mass(self):
        link = FadingLink(3.5, 4.0)
        mass, _ = integrate.quad(lambda x: snr_pdf(link, x), 0, np.inf, epsabs=1e-13)
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_cdf_matches_quadrature(self):
        link = FadingLink(2.0, 3.0)
        q, _ = integrate.quad(lambda x: snr_pdf(link, x), 0, 3.0, epsabs=1e-14)
        assert snr_cdf(link, 3.0) == pytest.approx(q, abs=1e-12)
        assert snr_cdf(link, 3.0) == pytest.approx(regularized_gamma_p(2.0, 2.0), rel=1e-15)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            snr_pdf(FadingLink(1.0, 1.0), -1e-3)
        with pytest.raises(DomainError):
            snr_cdf(FadingLink(1.0, 1.0), -1.0)

    @pytest.mark.parametrize("m, omega", [(0.5, 1.0), (1.0, 10.0), (3.0, 2.0), (6.5, 40.0)])
    def test_cdf_derivative_is_pdf(self, m, omega):
        link = FadingLink(m, omega)
        for x in np.logspace(-2, 0.5, 12) * omega:
            h = 1e-5 * x
            fd = (snr_cdf(link, x + h) - snr_cdf(link, x - h)) / (2 * h)
            assert fd == pytest.approx(snr_pdf(link, x), rel=1e-5)


class TestSampling:
    def test_mean(self):
        x = sample_snr(FadingLink(1.0, 1.0), SnrSampleStream(11, 10**6))
        assert abs(x.mean() - 1.0) < 0.005

    def test_variance(self):
        x = sample_snr(FadingLink(4.0, 10.0), SnrSampleStream(12, 10**6))
        # sd of the sample variance for Gamma(4, 2.5): sqrt((mu4 - sigma^4) / N)
        sigma2 = 25.0
        mu4 = sigma2**2 * (3 + 6 / 4.0)
        sd = math.sqrt((mu4 - sigma2**2) / 10**6)
        assert abs(x.var() - sigma2) < 3 * sd

    def test_reproducible(self):
        link = FadingLink(2.3, 5.0)
        a = sample_snr(link, SnrSampleStream(99, 1000))
        b = sample_snr(link, SnrSampleStream(99, 1000))
        c = sample_snr(link, SnrSampleStream(100, 1000))
        assert a.tobytes() == b.tobytes()
        assert a.tobytes() != c.tobytes()

    @pytest.mark.parametrize("m, omega", [(0.5, 2.0), (1.0, 1.0), (2.7, 8.0)])
    def test_ks_against_own_cdf(self, m, omega):
        link = FadingLink(m, omega)
        x = sample_snr(link, SnrSampleStream(5, 10**5))
        res = stats.kstest(x, lambda v: np.array([snr_cdf(link, t) for t in np.atleast_1d(v)]))
        assert res.statistic < 1.63 / math.sqrt(10**5)

    def test_stream_validation(self):
        with pytest.raises(DomainError):
            SnrSampleStream(1, 0)


class TestSumPdf:
    @pytest.mark.parametrize("w", [0.0, 0.2, 1.0, 5.0, 30.0])
    def test_two_unit_exponentials(self, w):
        one = FadingLink(1.0, 1.0)
        assert sum_snr_pdf(one, one, w) == pytest.approx(w * math.exp(-w), rel=1e-13, abs=0)
        assert sum_snr_pdf_oracle(one, one, w) == pytest.approx(w * math.exp(-w), abs=1e-8)

    def test_origin(self):
        assert sum_snr_pdf(FadingLink(2.0, 2.0), FadingLink(3.0, 3.0), 0.0) == 0.0

    def test_convolution_oracle_value(self):
        z, y = FadingLink(2.0, 6.0), FadingLink(1.0, 2.0)
        assert sum_snr_pdf(z, y, 4.0) == pytest.approx(SUM_PDF_AT_4, rel=1e-12)
        assert sum_snr_pdf_oracle(z, y, 4.0) == pytest.approx(SUM_PDF_AT_4, abs=1e-8)

    def test_random_draws_match_oracle(self):
        rng = np.random.Generator(np.random.PCG64(2718))
        for _ in range(100):
            mz, my = rng.uniform(0.5, 6.0, 2)
            oz, oy = rng.uniform(0.2, 50.0, 2)
            z, y = FadingLink(mz, oz), FadingLink(my, oy)
            w = rng.uniform(0.01, 3.0) * (oz + oy)
            assert abs(sum_snr_pdf(z, y, w) - sum_snr_pdf_oracle(z, y, w)) < 1e-6

    def test_oracle_unit_mass(self):
        rng = np.random.Generator(np.random.PCG64(31))
        for _ in range(10):
            z = FadingLink(*rng.uniform([0.5, 0.5], [4.0, 10.0]))
            y = FadingLink(*rng.uniform([0.5, 0.5], [4.0, 10.0]))
            upper = 40 * (z.avg_snr + y.avg_snr)
            mass, _ = integrate.quad(lambda w: sum_snr_pdf_oracle(z, y, w), 0, upper, limit=200)
            assert mass == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("zy", [((2.0, 6.0), (1.0, 2.0)), ((0.5, 1.0), (3.0, 30.0)), ((4.0, 2.0), (4.0, 2.0))])
    def test_commutative(self, zy):
        z, y = FadingLink(*zy[0]), FadingLink(*zy[1])
        for w in np.linspace(0.01, 20.0, 40):
            assert abs(sum_snr_pdf(z, y, w) - sum_snr_pdf(y, z, w)) < 1e-10

    @pytest.mark.parametrize("zy", [((2.0, 6.0), (1.0, 2.0)), ((0.5, 1.0), (3.0, 30.0)), ((1.5, 4.0), (2.5, 0.3))])
    def test_mean(self, zy):
        z, y = FadingLink(*zy[0]), FadingLink(*zy[1])
        upper = 60 * (z.avg_snr + y.avg_snr)
        mean, _ = integrate.quad(lambda w: w * sum_snr_pdf(z, y, w), 0, upper, limit=400, epsabs=1e-12)
        assert mean == pytest.approx(z.avg_snr + y.avg_snr, rel=1e-6)

    def test_equal_scale_short_circuit(self):
        z, y = FadingLink(2.0, 4.0), FadingLink(3.0, 6.0)  # both scales 2
        for w in (0.5, 3.0, 12.0):
            ref = stats.gamma(5.0, scale=2.0).pdf(w)
            assert sum_snr_pdf(z, y, w) == pytest.approx(ref, rel=1e-13)

    def test_density_object_checks_mass(self):
        d = SumSnrDensity(FadingLink(2.0, 5.0), FadingLink(2.0, 5.0))
        assert d.mass == pytest.approx(1.0, abs=1e-9)
        assert d(2.0) == sum_snr_pdf(d.link_z, d.link_y, 2.0)
        assert d.mean == 10.0

    def test_strong_link_no_overflow(self):
        # argument of 1F1 far beyond the exp overflow limit
        z, y = FadingLink(2.0, 1e-3), FadingLink(2.0, 100.0)
        val = sum_snr_pdf(z, y, 0.5)
        assert math.isfinite(val) and val > 0
        assert val == pytest.approx(sum_snr_pdf_oracle(z, y, 0.5), rel=1e-8)

    def test_extreme_scale_ratio(self):
        # W is Z plus a vanishing Y: density approaches Z's Gamma(2, 2.5) law
        z, y = FadingLink(2.0, 5.0), FadingLink(2.0, 5e-9)
        d = SumSnrDensity(z, y)
        assert d.mass == pytest.approx(1.0, abs=1e-10)
        for w in (1.0, 5.0, 20.0):
            assert d(w) == pytest.approx(stats.gamma(2.0, scale=2.5).pdf(w), rel=1e-8)
            assert d(w) == sum_snr_pdf(y, z, w)
