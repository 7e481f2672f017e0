"""Optimal n-means on 2D supports.

Three candidate generators, all compared by a single driver: Lloyd
fixed-point iteration from many seeded starts, an annealed random-shift
descent (perturb one site, keep strict improvements, shrink the amplitude
when a batch stalls), and constrained symmetric families whose one or two
parameters are minimized by golden section or a damped Newton solve of the
equidistance stationarity system.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distortion import Configuration, evaluate
from .errors import (DuplicateSitesError, EmptyCellError, NoConvergenceError,
                     NoRootError)
from .geometry import (COINCIDENCE_TOL, ConvexPolygon, Disc, Point2, as_point,
                       regular_gon_sites)
from .measures import UniformMeasure2D
from .numerics import golden_min, newton_system
from .results import Candidate, SolveReport

@dataclass(frozen=True)
class LloydSettings:
    max_iters: int = 1000
    move_tol: float = 1e-10   # max site displacement per sweep
    value_tol: float = 1e-15  # relative distortion change (positive changes only)

    def __post_init__(self):
        if self.max_iters < 1 or self.move_tol <= 0.0 or self.value_tol <= 0.0:
            raise ValueError("Lloyd settings must be positive")


@dataclass(frozen=True)
class AnnealSettings:
    initial_amplitude: float | None = None  # default: support diameter / 4
    decay: float = 0.95
    batch: int = 50
    floor_amplitude: float = 1e-9
    rng_seed: int = 0
    presample: int = 32  # random starts relaxed once; best seeds the descent

    def __post_init__(self):
        if not (0.0 < self.decay < 1.0):
            raise ValueError("decay must lie in (0, 1)")
        if self.batch < 1 or self.presample < 1:
            raise ValueError("batch and presample must be at least 1")
        if self.initial_amplitude is not None and \
                self.floor_amplitude >= self.initial_amplitude:
            raise ValueError("floor amplitude must be below the initial amplitude")


@dataclass(frozen=True)
class SymmetricFamily:
    """A symmetry-restricted candidate family with at most two parameters."""

    kind: str
    n: int
    parameters: tuple = ()


def _sorted_config(sites) -> Configuration:
    return Configuration(tuple(sorted(as_point(s) for s in sites)))


def sample_configuration(n: int, m: UniformMeasure2D,
                         rng: np.random.Generator) -> Configuration:
    """n i.i.d. draws from the measure, re-drawn until pairwise distinct."""
    for _ in range(64):
        pts = m.sample(rng, n)
        try:
            return Configuration(tuple(pts))
        except DuplicateSitesError:
            continue
    raise RuntimeError("could not draw distinct sites")


def lloyd_step(config, m: UniformMeasure2D) -> Configuration:
    """Replace every site by the centroid of its Voronoi cell.

    Raises :class:`EmptyCellError` when some cell carries no mass; the
    caller decides how to repair.
    """
    _, cells = evaluate(config, m)
    sites = []
    for rep in cells:
        if rep.mass <= 0.0:
            raise EmptyCellError(rep.site_index)
        sites.append(rep.centroid)
    return Configuration(tuple(sites))


def lloyd_run(config, m: UniformMeasure2D,
              settings: LloydSettings | None = None,
              rng: np.random.Generator | None = None,
              strict: bool = False) -> SolveReport:
    """Iterate Lloyd steps until the sweep displacement is below tolerance.

    Empty cells are repaired by respawning the orphaned site from the
    measure (or abort when ``strict``).  Exhausting ``max_iters`` raises
    :class:`NoConvergenceError` with the last iterate attached.
    """
    settings = settings or LloydSettings()
    if not isinstance(config, Configuration):
        config = Configuration(tuple(config))
    value, cells = evaluate(config, m)
    iters = 0
    converged = False
    for iters in range(1, settings.max_iters + 1):
        new_sites = []
        move = 0.0
        repaired = False
        for site, rep in zip(config.sites, cells):
            if rep.mass <= 0.0:
                if strict:
                    raise EmptyCellError(rep.site_index)
                if rng is None:
                    rng = np.random.default_rng(0)
                new_sites.append(m.sample(rng, 1)[0])
                repaired = True
                continue
            new_sites.append(rep.centroid)
            move = max(move, site.dist(rep.centroid))
        try:
            new_config = Configuration(tuple(new_sites))
        except DuplicateSitesError:
            # collapsed after a repair; jitter and continue
            if rng is None:
                rng = np.random.default_rng(0)
            new_config = sample_configuration(config.n, m, rng)
            repaired = True
        new_value, new_cells = evaluate(new_config, m)
        dv = value - new_value
        config, value, cells = new_config, new_value, new_cells
        if repaired:
            continue
        if move <= settings.move_tol:
            converged = True
            break
        if 0.0 < dv <= settings.value_tol * max(value, 1e-300):
            converged = True
            break
    report = SolveReport(best=_sorted_config(config.sites), value=value,
                         method="lloyd", iterations=iters, converged=converged)
    if not converged:
        raise NoConvergenceError(report)
    return report


def anneal_search(n: int, m: UniformMeasure2D,
                  settings: AnnealSettings | None = None) -> SolveReport:
    """Random-shift descent with a geometrically decaying shift amplitude.

    One site is shifted by a uniform vector of the current amplitude;
    strictly better configurations are kept; the amplitude decays after
    each batch without improvement; the final iterate is polished by a
    Lloyd run.
    """
    settings = settings or AnnealSettings()
    amp = settings.initial_amplitude
    if amp is None:
        amp = m.diameter() / 4.0
    if settings.floor_amplitude >= amp:
        raise ValueError("floor amplitude must be below the initial amplitude")
    rng = np.random.default_rng(np.random.SeedSequence([settings.rng_seed, 7]))
    relax = LloydSettings(max_iters=40, move_tol=1e-6)

    def _relax(pts, v):
        # descend to the nearby centroidal configuration; never increases value
        try:
            rep = lloyd_run(Configuration(tuple(pts)), m, relax, rng=rng)
        except NoConvergenceError as e:
            rep = e.report
        return (list(rep.best.sites), rep.value) if rep.value <= v else (pts, v)

    sites, value = None, math.inf
    for _ in range(settings.presample):
        cfg = sample_configuration(n, m, rng)
        v0, _ = evaluate(cfg, m)
        cand_sites, cand_value = _relax(list(cfg.sites), v0)
        if cand_value < value:
            sites, value = cand_sites, cand_value
    proposals = 0
    while amp > settings.floor_amplitude:
        improved = False
        for _ in range(settings.batch):
            proposals += 1
            i = int(rng.integers(n))
            r = amp * math.sqrt(rng.random())
            th = 2.0 * math.pi * rng.random()
            cand = sites.copy()
            cand[i] = Point2(sites[i].x + r * math.cos(th),
                             sites[i].y + r * math.sin(th))
            try:
                cfg = Configuration(tuple(cand))
            except DuplicateSitesError:
                continue
            v, _ = evaluate(cfg, m)
            if v < value:
                sites, value = _relax(cand, v)
                improved = True
        if not improved:
            amp *= settings.decay
    try:
        polished = lloyd_run(Configuration(tuple(sites)), m,
                             LloydSettings(max_iters=2000, move_tol=1e-11),
                             rng=rng)
    except NoConvergenceError as e:
        polished = e.report
    return SolveReport(best=polished.best, value=polished.value,
                       method="anneal", iterations=proposals,
                       seed=settings.rng_seed, final_amplitude=amp,
                       converged=polished.converged)


# --------------------------------------------------------------------------
# Symmetric families.

def _square_frame(support):
    """Return (origin, u, v) spanning a square support, else None."""
    if not isinstance(support, ConvexPolygon) or len(support.vertices) != 4:
        return None
    v = support.vertices
    e = [v[(i + 1) % 4] - v[i] for i in range(4)]
    side = e[0].norm()
    if side <= 0.0:
        return None
    for k in range(4):
        if abs(e[k].norm() - side) > 1e-9 * side:
            return None
        if abs(e[k].dot(e[(k + 1) % 4])) > 1e-9 * side * side:
            return None
    return v[0], e[0], v[3] - v[0]


def _frame_point(frame, a: float, b: float) -> Point2:
    o, u, w = frame
    return Point2(o.x + a * u.x + b * w.x, o.y + a * u.y + b * w.y)


def _disc_params(support):
    if isinstance(support, Disc):
        return support.center, support.radius
    return None


def _family_sites(family: SymmetricFamily, m: UniformMeasure2D, params):
    """Concrete sites for a family at the given parameter values."""
    kind, n = family.kind, family.n
    disc = _disc_params(m.support)
    frame = None if disc else _square_frame(m.support)
    if kind == "regular_gon":
        center, radius = disc
        return regular_gon_sites(n, params[0] * radius, center)
    if kind == "center_plus_gon":
        center, radius = disc
        return [center] + regular_gon_sites(n - 1, params[0] * radius, center)
    if frame is None:
        raise ValueError(f"family {kind} needs a square support")
    a = params[0]
    if kind == "axis_pair":
        coords = [(0.5 - a, 0.5), (0.5 + a, 0.5)]
    elif kind == "diagonal_pair":
        coords = [(a, a), (1.0 - a, 1.0 - a)]
    elif kind == "diagonal_quad":
        coords = [(a, a), (1 - a, 1 - a), (1 - a, a), (a, 1 - a)]
    elif kind == "axis_quad":
        coords = [(0.5, a), (0.5, 1 - a), (a, 0.5), (1 - a, 0.5)]
    elif kind == "center_plus_diagonal_quad":
        coords = [(0.5, 0.5), (a, a), (1 - a, 1 - a), (1 - a, a), (a, 1 - a)]
    elif kind == "center_plus_axis_quad":
        coords = [(0.5, 0.5), (0.5 - a, 0.5), (0.5 + a, 0.5),
                  (0.5, 0.5 - a), (0.5, 0.5 + a)]
    elif kind == "bisector_trio":
        al, be = params
        p = (0.5, (al * al + al * be + be * be - 3.0) / (3.0 * (al + be - 2.0)))
        q = ((al + 2.0 * be) / (6.0 * (al + be)),
             (al * al + al * be + be * be) / (3.0 * (al + be)))
        coords = [p, q, (1.0 - q[0], q[1])]
    elif kind == "diagonal_trio":
        al, be = params
        t = (6.0 - al - 2.0 * be) / 6.0
        denom = 3.0 * al * be - 3.0
        qx = -(al * al * be + al * (be - 3.0) * be + 1.0) / denom
        qy = -(al * (be - 3.0) * be + 2.0) / denom
        coords = [(t, t), (qx, qy), (qy, qx)]
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    return [_frame_point(frame, x, y) for x, y in coords]


_FAMILY_BOUNDS = {
    "regular_gon": (0.05, 0.98),
    "center_plus_gon": (0.05, 0.98),
    "axis_pair": (0.02, 0.49),
    "diagonal_pair": (0.05, 0.49),
    "diagonal_quad": (0.02, 0.49),
    "axis_quad": (0.02, 0.49),
    "center_plus_diagonal_quad": (0.52, 0.98),
    "center_plus_axis_quad": (0.02, 0.49),
}

_NEWTON_FAMILIES = ("bisector_trio", "diagonal_trio")


def families_for(m: UniformMeasure2D, n: int) -> list[SymmetricFamily]:
    """Symmetric families applicable to this support and site count."""
    disc = _disc_params(m.support)
    if disc is not None:
        fams = []
        if n >= 2:
            fams.append(SymmetricFamily("regular_gon", n))
        if n >= 4:
            fams.append(SymmetricFamily("center_plus_gon", n))
        return fams
    if _square_frame(m.support) is None:
        return []
    table = {
        2: ["axis_pair", "diagonal_pair"],
        3: ["bisector_trio", "diagonal_trio"],
        4: ["diagonal_quad", "axis_quad"],
        5: ["center_plus_diagonal_quad", "center_plus_axis_quad"],
    }
    return [SymmetricFamily(kind, n) for kind in table.get(n, [])]


def _rho(p, q) -> float:
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def _trio_residual(kind: str):
    if kind == "bisector_trio":
        def residual(x):
            al, be = float(x[0]), float(x[1])
            p = (0.5, (al * al + al * be + be * be - 3.0) / (3.0 * (al + be - 2.0)))
            q = ((al + 2.0 * be) / (6.0 * (al + be)),
                 (al * al + al * be + be * be) / (3.0 * (al + be)))
            dpt = (0.0, al)
            mpt = (0.5, be)
            return (_rho(p, dpt) - _rho(q, dpt), _rho(p, mpt) - _rho(q, mpt))
        return residual

    def residual(x):
        al, be = float(x[0]), float(x[1])
        t = (6.0 - al - 2.0 * be) / 6.0
        p = (t, t)
        denom = 3.0 * al * be - 3.0
        q = (-(al * al * be + al * (be - 3.0) * be + 1.0) / denom,
             -(al * (be - 3.0) * be + 2.0) / denom)
        dpt = (1.0 - al, 1.0)
        mpt = (1.0 - be, 1.0 - be)
        return (_rho(p, dpt) - _rho(q, dpt), _rho(p, mpt) - _rho(q, mpt))
    return residual


def solve_family(family: SymmetricFamily, m: UniformMeasure2D) -> SolveReport:
    """Minimize distortion within one symmetric family.

    One-parameter families use golden section on the exactly evaluated
    distortion; two-parameter families solve the two equidistance
    conditions by damped Newton from a 5x5 start grid.
    """
    kind = family.kind
    if kind in _NEWTON_FAMILIES:
        residual = _trio_residual(kind)
        roots = []
        for a0 in np.linspace(0.15, 0.85, 5):
            for b0 in np.linspace(0.15, 0.85, 5):
                sol = newton_system(residual, (a0, b0))
                if sol is None:
                    continue
                al, be = float(sol[0]), float(sol[1])
                if not (0.01 < al < 0.99 and 0.01 < be < 0.99):
                    continue
                if any(abs(al - r[0]) < 1e-9 and abs(be - r[1]) < 1e-9
                       for r in roots):
                    continue
                roots.append((al, be))
        best = None
        for al, be in roots:
            try:
                sites = _family_sites(family, m, (al, be))
                cfg = Configuration(tuple(sites))
            except (ValueError, DuplicateSitesError):
                continue
            if not all(m.contains(s) for s in cfg.sites):
                continue
            v, _ = evaluate(cfg, m)
            if best is None or v < best[0]:
                best = (v, cfg, (al, be))
        if best is None:
            raise NoRootError(f"no stationary point found for {kind}")
        value, cfg, params = best
    else:
        lo, hi = _FAMILY_BOUNDS[kind]

        def f(param: float) -> float:
            sites = _family_sites(family, m, (param,))
            try:
                v, _ = evaluate(Configuration(tuple(sites)), m)
            except DuplicateSitesError:
                return math.inf
            return v

        param, value = golden_min(f, lo, hi)
        cfg = Configuration(tuple(_family_sites(family, m, (param,))))
        params = (param,)
    try:
        polished = lloyd_run(cfg, m, LloydSettings(max_iters=500, move_tol=1e-12))
    except NoConvergenceError as e:
        polished = e.report
    if polished.value <= value:
        cfg, value = polished.best, polished.value
    return SolveReport(best=_sorted_config(cfg.sites), value=value,
                       method=f"family:{kind}", iterations=polished.iterations,
                       converged=True, family_parameters=tuple(params))


_CONJECTURE_DISC_N = frozenset({2, 3, 4, 5, 6})
_CONJECTURE_SQUARE_N = frozenset({3, 5})


def _conjecture_flag(m: UniformMeasure2D, n: int) -> bool:
    if _disc_params(m.support) is not None:
        return n in _CONJECTURE_DISC_N
    if _square_frame(m.support) is not None:
        return n in _CONJECTURE_SQUARE_N
    return False


def solve(n: int, m: UniformMeasure2D, strategy: str = "auto", seed: int = 0,
          starts: int = 64, threads: int = 1,
          lloyd_settings: LloydSettings | None = None,
          anneal_settings: AnnealSettings | None = None) -> SolveReport:
    """Find an optimal set of n-means; compare every applicable generator.

    ``strategy`` picks the generators: "families", "lloyd_multistart",
    "anneal", or "auto" for all of them.  The report's candidate list keeps
    each generator's optimum so family competitions stay visible.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if strategy not in ("auto", "lloyd_multistart", "anneal", "families"):
        raise ValueError(f"unknown strategy {strategy!r}")
    candidates: list[Candidate] = []
    iterations = 0
    starts_used = 0

    if n == 1:
        mu = m.mean()
        cfg = Configuration((mu,))
        value, _ = evaluate(cfg, m)
        cand = Candidate("centroid", value, cfg.sites)
        from .reference import oracle_delta  # local import to avoid cycle
        return SolveReport(best=cfg, value=value, method="centroid",
                           starts_used=1, seed=seed,
                           candidates=(cand,),
                           conjecture_conditional=_conjecture_flag(m, 1),
                           oracle_delta=oracle_delta(m, 1, value))

    run_families = strategy in ("auto", "families")
    run_multistart = strategy in ("auto", "lloyd_multistart")
    run_anneal = strategy in ("auto", "anneal")

    if run_families:
        for fam in families_for(m, n):
            try:
                rep = solve_family(fam, m)
            except NoRootError:
                continue
            candidates.append(Candidate(f"family:{fam.kind}", rep.value,
                                        rep.best.sites))
            iterations += rep.iterations

    if run_multistart:
        coarse = LloydSettings(max_iters=200, move_tol=1e-6)

        def one_start(idx: int):
            rng = np.random.default_rng(np.random.SeedSequence([seed, 100 + idx]))
            cfg = sample_configuration(n, m, rng)
            try:
                rep = lloyd_run(cfg, m, coarse, rng=rng)
            except NoConvergenceError as e:
                rep = e.report
            return rep

        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                reports = list(pool.map(one_start, range(starts)))
        else:
            reports = [one_start(i) for i in range(starts)]
        starts_used += starts
        iterations += sum(r.iterations for r in reports)
        reports.sort(key=lambda r: r.value)
        polished_best = None
        seen_values: list[float] = []
        for rep in reports:
            if len(seen_values) >= 3:
                break
            if any(abs(rep.value - v) < 1e-7 for v in seen_values):
                continue
            seen_values.append(rep.value)
            rng = np.random.default_rng(np.random.SeedSequence([seed, 999]))
            try:
                fine = lloyd_run(rep.best, m,
                                 LloydSettings(max_iters=3000, move_tol=1e-11),
                                 rng=rng)
            except NoConvergenceError as e:
                fine = e.report
            iterations += fine.iterations
            if polished_best is None or fine.value < polished_best.value:
                polished_best = fine
        if polished_best is not None:
            candidates.append(Candidate("lloyd_multistart", polished_best.value,
                                        polished_best.best.sites))

    if run_anneal:
        a_settings = anneal_settings or AnnealSettings(rng_seed=seed)
        rep = anneal_search(n, m, a_settings)
        starts_used += 1
        iterations += rep.iterations
        candidates.append(Candidate("anneal", rep.value, rep.best.sites))

    if not candidates:
        raise NoRootError("no candidate generator applies; use another strategy")

    candidates.sort(key=lambda c: (c.value, c.label))
    best_value = candidates[0].value
    near = [c for c in candidates if c.value <= best_value + 1e-10]
    winner = next((c for c in near if c.label.startswith("family")), near[0])

    cfg = Configuration(winner.sites)
    try:
        final = lloyd_run(cfg, m, LloydSettings(max_iters=2000, move_tol=1e-11))
        cfg, value = final.best, final.value
    except NoConvergenceError as e:
        cfg, value = e.report.best, e.report.value
    if value > winner.value + 1e-12:
        cfg, value = Configuration(winner.sites), winner.value

    from .reference import oracle_delta  # local import to avoid cycle
    return SolveReport(best=_sorted_config(cfg.sites), value=value,
                       method=winner.label, starts_used=max(starts_used, 1),
                       iterations=iterations, seed=seed,
                       candidates=tuple(candidates),
                       conjecture_conditional=_conjecture_flag(m, n),
                       oracle_delta=oracle_delta(m, n, value))
