"""Small deterministic numeric routines used by the solvers."""

from __future__ import annotations

import math

import numpy as np

_PHI_INV = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, lo: float, hi: float, xtol: float = 1e-10):
    """Golden-section minimum of a unimodal function on [lo, hi].

    Returns (argmin, min); the argmin is the best evaluated point, so the
    value is never worse than any probe.
    """
    a, b = lo, hi
    c = b - _PHI_INV * (b - a)
    d = a + _PHI_INV * (b - a)
    fc, fd = f(c), f(d)
    best = min((fc, c), (fd, d))
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _PHI_INV * (b - a)
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + _PHI_INV * (b - a)
            fd = f(d)
            best = min(best, (fd, d))
    return best[1], best[0]


def newton_system(residual, x0, max_iters: int = 200, tol: float = 1e-13,
                  min_damping: float = 1.0 / 512.0):
    """Damped Newton for a square system; returns the root or None.

    The Jacobian is forward-difference; steps are halved until the residual
    norm drops, which keeps the iteration from jumping across branches.
    """
    x = np.asarray(x0, dtype=float)
    r = np.asarray(residual(x), dtype=float)
    if not np.all(np.isfinite(r)):
        return None
    for _ in range(max_iters):
        nr = float(np.max(np.abs(r)))
        if nr < tol:
            return x
        jac = np.empty((len(x), len(x)))
        for j in range(len(x)):
            h = 1e-7 * max(abs(float(x[j])), 1.0)
            xp = x.copy()
            xp[j] += h
            rp = np.asarray(residual(xp), dtype=float)
            jac[:, j] = (rp - r) / h
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t >= min_damping:
            xn = x - t * step
            rn = np.asarray(residual(xn), dtype=float)
            if np.all(np.isfinite(rn)):
                nrn = float(np.max(np.abs(rn)))
                if nrn < nr * (1.0 - 0.25 * t) or nrn < tol:
                    break
            t *= 0.5
        else:
            return None
        x, r = xn, rn
    return x if float(np.max(np.abs(r))) < tol else None
