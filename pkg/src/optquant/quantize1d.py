"""Optimal quantization of piecewise-constant densities on an interval.

Two routes that must agree: a 1D Lloyd iteration, and an exact case
enumeration.  The enumeration places every interior density breakpoint in
each feasible slot of the ordered chain ``a1 < m1 < a2 < ... < a_n``
(sites interleaved with cell midpoints), solves the resulting polynomial
stationarity system per slot pattern by damped Newton, and also picks up
boundary minima where a site is pinned at a breakpoint.  Patterns that
would force every site to one side of the mean are pruned, mirroring the
centroid-balance argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .distortion import evaluate
from .errors import (DuplicateSitesError, EmptyCellError, NoConvergenceError,
                     NoFeasibleCaseError)
from .measures import PiecewiseConstant1D, segment_moments
from .numerics import newton_system
from .results import Candidate, SolveReport

ORDER_TOL = 1e-12       # strict site ordering
PATTERN_SLACK = 1e-12   # boundary-sitting solutions are attributed to the pattern
DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class Config1D:
    """Strictly increasing quantizer sites on the support interval."""

    sites: tuple

    def __post_init__(self):
        sites = tuple(float(s) for s in self.sites)
        if not sites:
            raise ValueError("need at least one site")
        for a, b in zip(sites, sites[1:]):
            if b - a <= ORDER_TOL:
                raise DuplicateSitesError("sites must increase with gap > 1e-12")
        object.__setattr__(self, "sites", sites)

    @property
    def n(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class CasePattern:
    """Placement of the interior density breakpoints along the site chain.

    ``slots[j]`` counts the chain unknowns (sites and midpoints, in order)
    strictly below breakpoint j.  ``pins`` lists sites held exactly at a
    breakpoint and ``midpoint_pins`` cell boundaries held there, both for
    constrained boundary minima of the pattern's region.
    """

    n: int
    slots: tuple
    pins: tuple = ()           # (site_index, breakpoint_index) pairs
    midpoint_pins: tuple = ()  # (midpoint_index, breakpoint_index) pairs

    def breakpoint_cells(self) -> tuple:
        return tuple(s // 2 for s in self.slots)

    def piece_of_chain(self, rank: int) -> int:
        return sum(1 for s in self.slots if s <= rank)

    def site_pieces(self) -> tuple:
        return tuple(self.piece_of_chain(2 * i) for i in range(self.n))

    def midpoint_pieces(self) -> tuple:
        return tuple(self.piece_of_chain(2 * i + 1) for i in range(self.n - 1))

    def label(self) -> str:
        pin = "".join(f";a{i + 1}=t{j + 1}" for i, j in self.pins)
        pin += "".join(f";m{i + 1}=t{j + 1}" for i, j in self.midpoint_pins)
        return "slots" + ",".join(str(s) for s in self.slots) + pin


def rational_label(x: float, max_denominator: int = 1000,
                   tol: float = 1e-12) -> str | None:
    """Small-denominator rational form of x, when one matches to 1e-12."""
    fr = Fraction(x).limit_denominator(max_denominator)
    if abs(float(fr) - x) <= tol:
        return f"{fr.numerator}/{fr.denominator}" if fr.denominator != 1 \
            else str(fr.numerator)
    return None


def _cell_bounds(sites, m: PiecewiseConstant1D, i: int):
    lo = m.lo if i == 0 else 0.5 * (sites[i - 1] + sites[i])
    hi = m.hi if i == len(sites) - 1 else 0.5 * (sites[i] + sites[i + 1])
    return lo, hi


def lloyd1d(config, m: PiecewiseConstant1D, settings=None,
            rng: np.random.Generator | None = None) -> SolveReport:
    """Midpoint-partition / centroid iteration until sites stop moving.

    Stops when the largest displacement falls below 1e-13 (or the settings'
    move tolerance); distortion is non-increasing along the way.
    """
    from .optimize2d import LloydSettings  # shared settings container
    settings = settings or LloydSettings(max_iters=20000, move_tol=1e-13)
    if not isinstance(config, Config1D):
        config = Config1D(tuple(config))
    sites = list(config.sites)
    n = len(sites)
    iters = 0
    converged = False
    for iters in range(1, settings.max_iters + 1):
        move = 0.0
        new_sites = []
        repaired = False
        for i in range(n):
            lo, hi = _cell_bounds(sites, m, i)
            seg = segment_moments(m, lo, hi, 0.0)
            if seg.mass <= 0.0:
                if rng is None:
                    rng = np.random.default_rng(0)
                new_sites.append(float(m.sample(rng, 1)[0]))
                repaired = True
                continue
            c = seg.moment1 / seg.mass
            move = max(move, abs(c - sites[i]))
            new_sites.append(c)
        new_sites.sort()
        sites = new_sites
        if repaired:
            continue
        if move <= settings.move_tol:
            converged = True
            break
    best = Config1D(tuple(sites))
    value, _ = evaluate(best, m)
    report = SolveReport(best=best, value=value, method="lloyd1d",
                         iterations=iters, converged=converged)
    if not converged:
        raise NoConvergenceError(report)
    return report


# --------------------------------------------------------------------------
# Case enumeration.

def _branch_moments(sites, m: PiecewiseConstant1D, cells_of_bp, i: int):
    """Mass and first moment of cell i with the pattern's forced splits.

    The split points are the breakpoints the pattern assigns to this cell
    and the density of each sub-segment follows the pattern, not the
    position of the iterate, so the system stays polynomial.
    """
    lo, hi = _cell_bounds(sites, m, i)
    inner = [m.breakpoints[j + 1] for j, c in enumerate(cells_of_bp) if c == i]
    base = sum(1 for c in cells_of_bp if c < i)
    bounds = [lo] + inner + [hi]
    mass = m1 = 0.0
    for k in range(len(bounds) - 1):
        h = m.heights[base + k]
        s, e = bounds[k], bounds[k + 1]
        mass += h * (e - s)
        m1 += h * 0.5 * (e * e - s * s)
    return mass, m1


def _branch_fixed_point(m: PiecewiseConstant1D, n: int, cells_of_bp,
                        sites0, pinned, iters: int = 150):
    """Iterate sites -> branch centroids; tracks an attracting root."""
    sites = list(sites0)
    for _ in range(iters):
        new = []
        for i in range(n):
            if i in pinned:
                new.append(pinned[i])
                continue
            mass, m1 = _branch_moments(sites, m, cells_of_bp, i)
            if mass <= 1e-15:
                return sites
            new.append(m1 / mass)
        if any(b - a <= 0.0 for a, b in zip(new, new[1:])):
            return sites
        delta = max(abs(a - b) for a, b in zip(new, sites))
        sites = new
        if delta < 1e-12:
            break
    return sites


def _pattern_roots(m: PiecewiseConstant1D, n: int, slots, pins):
    """All reachable roots of one pattern's stationarity system.

    The polynomial system can have several roots (an interior one plus
    boundary-sitting ones shared with neighbouring patterns), so Newton is
    run both from the raw inits and from fixed-point-refined ones.
    """
    cells_of_bp = tuple(s // 2 for s in slots)
    tvals = m.breakpoints[1:-1]
    pinned = {site: tvals[j] for site, j in pins}
    free = [i for i in range(n) if i not in pinned]
    if not free:
        sites = [pinned[i] for i in range(n)]
        return [sites] if all(b - a > ORDER_TOL
                              for a, b in zip(sites, sites[1:])) else []

    def assemble(x):
        sites = []
        k = 0
        for i in range(n):
            if i in pinned:
                sites.append(pinned[i])
            else:
                sites.append(float(x[k]))
                k += 1
        return sites

    def residual(x):
        sites = assemble(x)
        out = []
        for i in free:
            mass, m1 = _branch_moments(sites, m, cells_of_bp, i)
            out.append(mass * sites[i] - m1)
        return out

    starts = []
    for init in _pattern_inits(m, n, slots, pinned):
        raw = [init[i] for i in range(n)]
        starts.append(raw)
        starts.append(_branch_fixed_point(m, n, cells_of_bp, raw, pinned))
    roots = []
    for s0 in starts:
        sol = newton_system(residual, [s0[i] for i in free])
        if sol is None:
            continue
        sites = assemble(sol)
        if any(max(abs(a - b) for a, b in zip(sites, r)) < DEDUP_TOL
               for r in roots):
            continue
        roots.append(sites)
    return roots


def _pattern_inits(m: PiecewiseConstant1D, n: int, slots, pinned):
    """Initial guesses: slot-respecting equal spacing, then mass quantiles."""
    tvals = m.breakpoints[1:-1]
    fixed = [m.lo] + list(tvals) + [m.hi]
    # interval index per chain rank: number of breakpoints at or below it
    chain = [0.0] * (2 * n - 1)
    interval_of = [sum(1 for s in slots if s <= r) for r in range(2 * n - 1)]
    for f in range(len(fixed) - 1):
        ranks = [r for r in range(2 * n - 1) if interval_of[r] == f]
        for idx, r in enumerate(ranks):
            frac = (idx + 1.0) / (len(ranks) + 1.0)
            chain[r] = fixed[f] + frac * (fixed[f + 1] - fixed[f])
    init1 = {i: (pinned[i] if i in pinned else chain[2 * i]) for i in range(n)}
    yield init1
    qs = _mass_quantiles(m, n)
    yield {i: (pinned[i] if i in pinned else qs[i]) for i in range(n)}


def _mass_quantiles(m: PiecewiseConstant1D, n: int):
    out = []
    bp, hs = m.breakpoints, m.heights
    masses = [h * (b1 - b0) for h, b0, b1 in zip(hs, bp, bp[1:])]
    for i in range(n):
        target = (i + 0.5) / n
        acc = 0.0
        x = bp[-1]
        for k, mk in enumerate(masses):
            if mk <= 0.0:
                continue
            if acc + mk >= target:
                x = bp[k] + (target - acc) / hs[k]
                break
            acc += mk
        out.append(x)
    return out


def _pattern_feasible(sites, m: PiecewiseConstant1D, slots) -> bool:
    for a, b in zip(sites, sites[1:]):
        if b - a <= ORDER_TOL:
            return False
    if sites[0] < m.lo - PATTERN_SLACK or sites[-1] > m.hi + PATTERN_SLACK:
        return False
    chain = []
    for i, s in enumerate(sites):
        chain.append(s)
        if i + 1 < len(sites):
            chain.append(0.5 * (s + sites[i + 1]))
    tvals = m.breakpoints[1:-1]
    for j, slot in enumerate(slots):
        t = tvals[j]
        for r, u in enumerate(chain):
            if r < slot and u > t + PATTERN_SLACK:
                return False
            if r >= slot and u < t - PATTERN_SLACK:
                return False
    return True


def _pin_is_binding(sites, m: PiecewiseConstant1D, site_idx: int,
                    t: float, lower: bool) -> bool:
    """True when the cell centroid pulls the pinned site out of the region."""
    lo, hi = _cell_bounds(sites, m, site_idx)
    seg = segment_moments(m, lo, hi, 0.0)
    if seg.mass <= 0.0:
        return False
    pull = seg.moment1 / seg.mass
    return pull <= t + PATTERN_SLACK if lower else pull >= t - PATTERN_SLACK


def enumerate_cases(n: int, m: PiecewiseConstant1D):
    """All stationary configurations per breakpoint-placement pattern.

    Returns (pattern, configuration, value) triples sorted by value.  Each
    pattern is solved for its interior stationary point; when that point
    violates the pattern, the boundary minima with one site pinned at a
    breakpoint are solved instead (with the pull-direction check that makes
    them genuine constrained minima).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(m.heights) > 4:
        raise ValueError("case enumeration supports at most 4 density pieces")
    mean = m.mean()
    tvals = m.breakpoints[1:-1]
    nbp = len(tvals)
    length = 2 * n - 1
    results = []

    def consider(slots, pins, sites):
        if sites is None or not _pattern_feasible(sites, m, slots):
            return
        for site_idx, j in pins:
            slot = slots[j]
            lower = slot % 2 == 0  # pinned at the region's lower boundary
            if not _pin_is_binding(sites, m, site_idx, tvals[j], lower):
                return
        cfg = Config1D(tuple(sites))
        value, _ = evaluate(cfg, m)
        results.append((CasePattern(n, tuple(slots), tuple(pins)), cfg, value))

    if nbp == 0:
        for sites in _pattern_roots(m, n, (), ()):
            consider((), (), sites)
    for combo in combinations_with_replacement(range(length + 1), nbp):
        if nbp == 0:
            break
        slots = tuple(combo)
        pruned = False
        for j, s in enumerate(slots):
            if s == length and tvals[j] <= mean:
                pruned = True
            if s == 0 and tvals[j] >= mean:
                pruned = True
        if pruned:
            continue
        any_feasible = False
        for sites in _pattern_roots(m, n, slots, ()):
            if _pattern_feasible(sites, m, slots):
                any_feasible = True
                consider(slots, (), sites)
        if any_feasible:
            continue
        for j, s in enumerate(slots):
            if s % 2 == 0 and s <= length - 1:
                pins = ((s // 2, j),)
            elif s % 2 == 1:
                pins = (((s - 1) // 2, j),)
            else:
                continue
            for sites in _pattern_roots(m, n, slots, pins):
                consider(slots, pins, sites)

    deduped = []
    for pat, cfg, value in sorted(results, key=lambda r: (r[2], r[1].sites)):
        if any(max(abs(a - b) for a, b in zip(cfg.sites, other.sites)) < DEDUP_TOL
               for _, other, _ in deduped):
            continue
        deduped.append((pat, cfg, value))
    if not deduped:
        raise NoFeasibleCaseError("no feasible case pattern produced a solution")
    return deduped


def solve1d(n: int, m: PiecewiseConstant1D, seed: int = 0,
            starts: int = 16) -> SolveReport:
    """Best of the case enumeration, cross-checked by Lloyd multistart.

    The two routes must agree to 1e-9 or the report carries a divergence
    flag (and the smaller value wins).
    """
    cases = enumerate_cases(n, m)
    candidates = [Candidate(f"case:{pat.label()}", value, cfg.sites)
                  for pat, cfg, value in cases]
    best_pat, best_cfg, best_value = cases[0]

    lloyd_best = None
    rng_master = np.random.SeedSequence([seed, 31])
    start_list = [_mass_quantiles(m, n)]
    rng = np.random.default_rng(rng_master)
    while len(start_list) < starts:
        xs = sorted(float(x) for x in m.sample(rng, n))
        if all(b - a > 10 * ORDER_TOL for a, b in zip(xs, xs[1:])):
            start_list.append(xs)
    total_iters = 0
    for xs in start_list:
        try:
            rep = lloyd1d(Config1D(tuple(xs)), m, rng=rng)
        except (NoConvergenceError, DuplicateSitesError):
            continue
        total_iters += rep.iterations
        if lloyd_best is None or rep.value < lloyd_best.value:
            lloyd_best = rep
    if lloyd_best is not None:
        candidates.append(Candidate("lloyd1d", lloyd_best.value,
                                    lloyd_best.best.sites))

    diverged = lloyd_best is None or \
        abs(lloyd_best.value - best_value) > 1e-9
    method = "case_enumeration"
    if lloyd_best is not None and lloyd_best.value < best_value - 1e-12:
        best_cfg, best_value = lloyd_best.best, lloyd_best.value
        method = "lloyd1d"

    from .reference import oracle_delta
    return SolveReport(best=best_cfg, value=best_value, method=method,
                       starts_used=len(start_list), iterations=total_iters,
                       seed=seed, candidates=tuple(candidates),
                       oracle_delta=oracle_delta(m, n, best_value),
                       diverged=diverged)
