import math

import numpy as np
import pytest

from fbrelay.errors import DomainError, InfeasibleError
from fbrelay.optimize import (
    ETA_MAX,
    ETA_MIN,
    SplitSearch,
    eta_grid,
    golden_section,
    optimize_blocklengths,
    optimize_eta,
    reliability_contour,
)
from fbrelay.outage import RelaySystem, scheme_outage

TS = 8.33e-6


def system(**kw):
    base = dict(total_power=10.0, eta=0.5, n_s=500, n_r=500, k=250.0, m_sd=2, m_sr=2, m_rd=2)
    base.update(kw)
    return RelaySystem(**base)


class TestGoldenSection:
    def test_quadratic(self):
        x, fx = golden_section(lambda t: (t - 0.3217) ** 2 + 1.0, 0.0, 1.0, tol=1e-8)
        assert x == pytest.approx(0.3217, abs=1e-7)
        assert fx == pytest.approx(1.0, abs=1e-13)

    def test_boundary_minimum(self):
        x, _ = golden_section(lambda t: t, 0.2, 0.9, tol=1e-6)
        assert x == pytest.approx(0.2, abs=1e-5)


class TestEta:
    def test_grid(self):
        g = eta_grid(0.01)
        assert g[0] == ETA_MIN and g[-1] == ETA_MAX
        assert len(g) == 95
        assert eta_grid(0.1)[-1] == ETA_MAX

    @pytest.mark.parametrize("scheme", ["SC", "MRC"])
    def test_argmin_beats_grid(self, scheme):
        res = optimize_eta(system(), scheme)
        assert ETA_MIN <= res.eta_star <= ETA_MAX
        assert res.outage_star <= min(res.outages) + 1e-15
        assert res.outage_star == pytest.approx(scheme_outage(system(eta=res.eta_star), scheme), rel=1e-12)
        # local optimality on a fine neighbourhood
        for d in (-5e-3, 5e-3):
            eta = min(ETA_MAX, max(ETA_MIN, res.eta_star + d))
            assert scheme_outage(system(eta=eta), scheme) >= res.outage_star - 1e-15

    def test_useless_relay_gives_all_power_to_source(self):
        res = optimize_eta(system(gain_rd=1e-9, gain_sr=1e-9), "SC", 0.05)
        assert res.eta_star == pytest.approx(ETA_MAX, abs=1e-3)

    def test_sweep_lengths(self):
        res = optimize_eta(system(), "SC", 0.05)
        assert len(res.eta_grid) == len(res.outages)
        assert all(0 <= v <= 1 for v in res.outages)

    def test_bad_step(self):
        with pytest.raises(DomainError):
            optimize_eta(system(), "SC", 0.0)


class TestBlocklengths:
    @pytest.mark.parametrize("scheme, eq", [("SC", True), ("SC", False), ("MRC", True), ("MRC", False)])
    def test_plan_is_minimal(self, scheme, eq):
        sys = system()
        target = 1e-3
        plan = optimize_blocklengths(sys, scheme, target, TS, eq)
        assert plan.achieved_outage <= target
        assert plan.achieved_outage == pytest.approx(
            scheme_outage(sys.replace(n_s=plan.n_s, n_r=plan.n_r), scheme), rel=1e-12)
        assert plan.delta == pytest.approx(TS * plan.total_uses)
        if eq:
            assert plan.n_s == plan.n_r
        search = SplitSearch(sys, scheme, target, eq)
        assert search.feasible(plan.total_uses - 2) is None

    def test_feasibility_monotone_in_budget(self):
        search = SplitSearch(system(), "SC", 1e-3, True)
        flags = [search.feasible(n) is not None for n in range(200, 2001, 50)]
        first = flags.index(True)
        assert all(flags[first:])

    def test_unequal_not_worse(self):
        for scheme in ("SC", "MRC"):
            for target in (1e-3, 1e-4):
                eq = optimize_blocklengths(system(), scheme, target, TS, True)
                uneq = optimize_blocklengths(system(), scheme, target, TS, False)
                assert uneq.delta <= eq.delta + 1e-15

    def test_symbol_time_scales_delay(self):
        a = optimize_blocklengths(system(), "SC", 1e-3, TS, True)
        b = optimize_blocklengths(system(), "SC", 1e-3, 2 * TS, True)
        assert (a.n_s, a.n_r) == (b.n_s, b.n_r)
        assert b.delta == pytest.approx(2 * a.delta)

    def test_tighter_target_needs_more_time(self):
        a = optimize_blocklengths(system(), "MRC", 1e-3, TS)
        b = optimize_blocklengths(system(), "MRC", 1e-4, TS)
        assert b.delta >= a.delta

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimize_blocklengths(system(total_power=0.05), "SC", 1e-4, TS, True)

    def test_domain(self):
        with pytest.raises(DomainError):
            optimize_blocklengths(system(), "SC", 0.2, TS)
        with pytest.raises(DomainError):
            optimize_blocklengths(system(), "SC", 1e-3, 0.0)
        with pytest.raises(DomainError):
            SplitSearch(system(), "DT", 1e-3)

    def test_split_enumeration(self):
        s = SplitSearch(system(), "SC", 1e-3)
        splits = list(s.splits(400))
        assert splits[0] == (100, 300) and splits[-1] == (300, 100) and len(splits) == 201
        assert list(SplitSearch(system(), "SC", 1e-3, True).splits(400)) == [(200, 200)]
        assert list(SplitSearch(system(), "SC", 1e-3, True).splits(401)) == []


class TestContour:
    def test_shape_and_range(self):
        mat = reliability_contour(system(m_sd=1, m_sr=1, m_rd=1), "SC", [200, 400], [10, 50, 100])
        assert mat.shape == (2, 3)
        assert np.all((mat >= 0) & (mat <= 1))

    @pytest.mark.parametrize("scheme", ["SC", "MRC"])
    def test_monotone(self, scheme):
        n_grid, k_grid = [100, 300, 600], [10, 60, 120, 240]
        mat = reliability_contour(system(), scheme, n_grid, k_grid)
        assert np.all(np.diff(mat, axis=1) <= 1e-15)  # harder with more bits
        assert np.all(np.diff(mat, axis=0) >= -1e-15)  # easier with longer codes

    def test_entries_match_outage(self):
        mat = reliability_contour(system(), "MRC", [300], [45])
        assert mat[0, 0] == pytest.approx(1 - scheme_outage(system(n_s=300, n_r=300, k=45.0), "MRC"))

    def test_empty_grid(self):
        with pytest.raises(DomainError):
            reliability_contour(system(), "SC", [], [10])


def test_delta_in_seconds():
    plan = optimize_blocklengths(system(), "SC", 1e-3, TS, True)
    assert 1e-4 < plan.delta < 0.1
    assert math.isclose(plan.delta / TS, plan.total_uses)
