"""Power-allocation and blocklength-split optimization for the relay schemes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError
from .fbl import MIN_BLOCKLENGTH
from .outage import RelaySystem, Scheme, scheme_outage

ETA_MIN, ETA_MAX = 0.05, 0.99
MAX_BLOCKLENGTH = 3000
SPLIT_RESOLUTION = 2

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo: float, hi: float, tol: float = 1e-4, max_iter: int = 200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


@dataclass(frozen=True)
class EtaSweepResult:
    scheme: Scheme
    eta_grid: tuple
    outages: tuple
    eta_star: float
    outage_star: float


def eta_grid(step: float) -> np.ndarray:
    count = int(math.floor((ETA_MAX - ETA_MIN) / step + 1e-9))
    grid = ETA_MIN + step * np.arange(count + 1)
    if grid[-1] < ETA_MAX - 1e-12:
        grid = np.append(grid, ETA_MAX)
    return np.round(grid, 12)


def optimize_eta(sys: RelaySystem, scheme, grid_step: float = 0.01) -> EtaSweepResult:
    """Grid sweep of eta followed by golden-section refinement at the argmin."""
    scheme = Scheme.parse(scheme)
    if not 0.0 < grid_step <= 0.1:
        raise DomainError("grid step must lie in (0, 0.1]")

    def f(eta):
        return scheme_outage(sys.replace(eta=float(eta)), scheme)

    grid = eta_grid(grid_step)
    values = [f(e) for e in grid]
    i = int(np.argmin(values))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    eta_star, best = golden_section(f, lo, hi, tol=1e-4)
    if values[i] < best:
        eta_star, best = float(grid[i]), values[i]
    return EtaSweepResult(scheme, tuple(float(g) for g in grid), tuple(values),
                          float(eta_star), float(best))


@dataclass(frozen=True)
class DelayPlan:
    n_s: int
    n_r: int
    delta: float
    achieved_outage: float
    target_outage: float
    symbol_time: float

    @property
    def total_uses(self) -> int:
        return self.n_s + self.n_r


class SplitSearch:
    """Feasibility of a total channel-use budget for one scheme and target."""

    def __init__(self, sys: RelaySystem, scheme, target: float, equal_split: bool = False):
        self.sys = sys
        self.scheme = Scheme.parse(scheme)
        if self.scheme is Scheme.DT:
            raise DomainError("blocklength splitting applies to relay schemes only")
        self.target = target
        self.equal_split = equal_split
        self._cache = {}

    def outage(self, n_s: int, n_r: int) -> float:
        key = (n_s, n_r)
        if key not in self._cache:
            self._cache[key] = scheme_outage(self.sys.replace(n_s=n_s, n_r=n_r), self.scheme)
        return self._cache[key]

    def splits(self, total: int):
        if self.equal_split:
            if total % 2 == 0 and MIN_BLOCKLENGTH <= total // 2 <= MAX_BLOCKLENGTH:
                yield total // 2, total // 2
            return
        lo = max(MIN_BLOCKLENGTH, total - MAX_BLOCKLENGTH)
        hi = min(MAX_BLOCKLENGTH, total - MIN_BLOCKLENGTH)
        for n_s in range(lo, hi + 1):
            yield n_s, total - n_s

    def best_split(self, total: int):
        """Split of ``total`` with the lowest outage, or None if none exists."""
        best = None
        for n_s, n_r in self.splits(total):
            eps = self.outage(n_s, n_r)
            if best is None or eps < best[2]:
                best = (n_s, n_r, eps)
        return best

    def feasible(self, total: int):
        best = self.best_split(total)
        if best is not None and best[2] <= self.target:
            return best
        return None


def optimize_blocklengths(sys: RelaySystem, scheme, target_outage: float,
                          symbol_time: float, equal_split: bool = False) -> DelayPlan:
    """Smallest ``T_s (n_s + n_r)`` whose best split meets the outage target.

    Bisection runs on the even total budget N; for each N the inner search
    scans every admissible split (only ``n_s = n_r`` with ``equal_split``).
    """
    if not 0.0 < target_outage < 0.1:
        raise DomainError(f"target outage must lie in (0, 0.1), got {target_outage!r}")
    if not symbol_time > 0:
        raise DomainError("symbol time must be positive")
    search = SplitSearch(sys, scheme, target_outage, equal_split)
    step = SPLIT_RESOLUTION
    lo, hi = 2 * MIN_BLOCKLENGTH, 2 * MAX_BLOCKLENGTH
    best = search.feasible(hi)
    if best is None:
        raise InfeasibleError(
            f"{search.scheme.value} cannot reach outage {target_outage:g} within {hi} channel uses"
        )
    first = search.feasible(lo)
    if first is not None:
        best, hi = first, lo
    else:
        # invariant: lo infeasible, hi feasible
        while hi - lo > step:
            mid = lo + ((hi - lo) // (2 * step)) * step
            found = search.feasible(mid)
            if found is None:
                lo = mid
            else:
                hi, best = mid, found
    n_s, n_r, eps = best
    return DelayPlan(n_s, n_r, symbol_time * (n_s + n_r), eps, target_outage, symbol_time)


def reliability_contour(sys_template: RelaySystem, scheme, n_grid, k_grid) -> np.ndarray:
    """Success probability ``1 - eps`` with rows over n (n_s = n_r = n) and columns over k."""
    scheme = Scheme.parse(scheme)
    n_grid, k_grid = list(n_grid), list(k_grid)
    if not n_grid or not k_grid:
        raise DomainError("contour grids must be nonempty")
    out = np.empty((len(n_grid), len(k_grid)))
    for i, n in enumerate(n_grid):
        for j, k in enumerate(k_grid):
            sys = sys_template.replace(n_s=int(n), n_r=int(n), k=float(k))
            out[i, j] = 1.0 - scheme_outage(sys, scheme)
    return out
