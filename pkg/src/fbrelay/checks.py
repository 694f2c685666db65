"""Self-checks run by ``fbrelay validate``.

Each check compares two independent routes to the same quantity and reports
the worst deviation against a fixed tolerance. They are sized to finish in
seconds; the full grids live in the test suite.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .channel import FadingLink, sum_snr_pdf, sum_snr_pdf_oracle
from .config import RunConfig, db_to_linear, linear_to_db
from .fbl import CodeSpec, Mode, linearization_params
from .outage import (
    Scheme,
    outage_closed_form,
    outage_exact_mc,
    outage_quadrature,
    outage_srd,
    rayleigh_closed_form,
    scheme_outage,
    srd_conditional_oracle,
)
from .special import (
    hyp1f1_regularized,
    q_function,
    q_inverse,
    upper_incomplete_gamma,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    runtime_s: float = 0.0


def _special_identities(cfg, mu_scale):
    worst = 0.0
    for a in (0.5, 1.5, 3.0, 7.5):
        for x in (0.0, 0.3, 2.0, 11.0, 40.0):
            lhs = upper_incomplete_gamma(a + 1, x)
            rhs = a * upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    for a, b, z in ((0.5, 2.0, 3.0), (2.0, 5.0, -7.0), (3.0, 4.5, 20.0)):
        lhs = hyp1f1_regularized(a, b, z)
        rhs = math.exp(z) * hyp1f1_regularized(b - a, b, -z)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    for p in (1e-9, 1e-5, 0.3, 0.5, 0.9):
        worst = max(worst, abs(q_function(q_inverse(p)) - p) / p)
    return worst, 1e-8


def _closed_vs_quadrature(cfg, mu_scale):
    worst = 0.0
    for mode in Mode:
        for m, omega, n, r in itertools.product((0.5, 2.0, 5.0), (1.0, 10.0, 100.0), (100, 500), (0.25, 1.0)):
            link, code = FadingLink(m, omega), CodeSpec(n, r * n)
            cf = outage_closed_form(link, code, mode)
            qd = outage_quadrature(link, code, mode)
            worst = max(worst, abs(cf - qd))
    return worst, 1e-7


def _rayleigh_reduction(cfg, mu_scale):
    worst = 0.0
    for omega, n, r in itertools.product((1.0, 10.0, 100.0), (100, 500, 2000), (0.25, 0.5, 1.0)):
        code = CodeSpec(n, r * n)
        p = linearization_params(code)
        worst = max(worst, abs(outage_closed_form(FadingLink(1.0, omega), code) - rayleigh_closed_form(omega, p)))
    return worst, 1e-12


def _sum_pdf(cfg, mu_scale):
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    worst = 0.0
    for _ in range(4):
        mz, my = rng.uniform(0.5, 4.0, 2)
        oz, oy = rng.uniform(0.5, 20.0, 2)
        lz, ly = FadingLink(mz, oz), FadingLink(my, oy)
        for w in np.linspace(0.2, 3.0 * (oz + oy), 8):
            worst = max(worst, abs(sum_snr_pdf(lz, ly, w) - sum_snr_pdf_oracle(lz, ly, w)))
    return worst, 1e-6


def _closed_vs_mc(cfg, mu_scale):
    samples = max(cfg.mc_samples, 200_000)
    worst_excess = -math.inf
    for i, (m, omega) in enumerate(itertools.product((1.0, 2.0), (1.0, 5.0))):
        link, code = FadingLink(m, omega), CodeSpec(cfg.n_s, cfg.k)
        p = linearization_params(code, Mode.CONSISTENT)
        p = p.with_slope(p.mu * mu_scale)
        cf = outage_closed_form(link, code, params=p)
        mc = outage_exact_mc(link, code, samples, cfg.seed + i)
        excess = abs(cf - mc.value) - max(mc.ci_halfwidth, 2e-3)
        worst_excess = max(worst_excess, excess)
    # measured: how far the worst point exceeds its allowed band
    return worst_excess, 0.0


def _srd_vs_conditional(cfg, mu_scale):
    worst = 0.0
    for m in cfg.m:
        for eta in (0.3, 0.5, 0.8):
            sys = cfg.system(m, eta=eta)
            worst = max(worst, abs(outage_srd(sys) - srd_conditional_oracle(sys)))
    return worst, 1e-8


def _dominance(cfg, mu_scale):
    # largest violation of eps_MRC <= eps_SC <= eps_DT over the power sweep
    worst = 0.0
    for m in cfg.m:
        for p_db in np.arange(cfg.p_min_db, cfg.p_max_db + 1e-9, cfg.p_step_db):
            sys = cfg.system(m, total_power=db_to_linear(float(p_db)))
            dt, sc, mrc = (scheme_outage(sys, s) for s in Scheme)
            worst = max(worst, sc - dt, mrc - sc)
    return worst, 0.0


def _monotone_power(cfg, mu_scale):
    worst = 0.0
    for m in cfg.m:
        for s in Scheme:
            prev = None
            for p_db in np.arange(cfg.p_min_db, cfg.p_max_db + 1e-9, cfg.p_step_db):
                eps = scheme_outage(cfg.system(m, total_power=db_to_linear(float(p_db))), s)
                if prev is not None:
                    worst = max(worst, eps - prev)
                prev = eps
    return worst, 0.0


def _db_round_trip(cfg, mu_scale):
    worst = max(abs(linear_to_db(db_to_linear(x)) - x) for x in np.linspace(-30, 40, 29))
    return worst, 1e-12


CHECKS = [
    ("special_function_identities", _special_identities),
    ("closed_form_vs_quadrature", _closed_vs_quadrature),
    ("rayleigh_reduction", _rayleigh_reduction),
    ("sum_pdf_vs_convolution", _sum_pdf),
    ("closed_form_vs_monte_carlo", _closed_vs_mc),
    ("srd_vs_conditional_oracle", _srd_vs_conditional),
    ("scheme_dominance", _dominance),
    ("outage_monotone_in_power", _monotone_power),
    ("db_round_trip", _db_round_trip),
]


def run_checks(cfg: RunConfig | None = None, mu_scale: float = 1.0) -> list:
    """Run every check; ``mu_scale`` perturbs the slope used in the MC check."""
    cfg = cfg or RunConfig()
    results = []
    for name, fn in CHECKS:
        start = time.perf_counter()
        measured, tol = fn(cfg, mu_scale)
        results.append(CheckResult(name, bool(measured <= tol), float(measured), tol,
                                   time.perf_counter() - start))
    return results
