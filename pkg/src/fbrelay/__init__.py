"""Finite-blocklength outage analysis of decode-and-forward relaying under Nakagami-m fading."""

from .channel import FadingLink, SnrSampleStream, SumSnrDensity, sample_snr, snr_cdf, snr_pdf, sum_snr_pdf
from .fbl import CodeSpec, LinearizationParams, Mode, linearization_params
from .optimize import DelayPlan, EtaSweepResult, optimize_blocklengths, optimize_eta, reliability_contour
from .outage import (
    OutageResult,
    RelaySystem,
    Scheme,
    outage_closed_form,
    outage_dt,
    outage_exact_mc,
    outage_mrc,
    outage_quadrature,
    outage_sc,
    outage_srd,
    scheme_outage,
)

__version__ = "0.1.0"
