"""Adaptive Simpson quadrature with Richardson extrapolation.

Two entry points: a scalar-interval version and a batched version that
refines many intervals at once (the integrand is called on whole arrays,
which keeps grid evaluations of the bid curve cheap).
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def adaptive_simpson(f: Callable, a: float, b: float, tol: float = 1e-10,
                     max_depth: int = 50) -> tuple[float, float]:
    """Integrate f over [a, b] to absolute tolerance tol.

    Returns (value, error_estimate). f must accept numpy arrays.
    """
    vals, errs = adaptive_simpson_batch(f, np.array([a]), np.array([b]),
                                        np.array([tol]), max_depth=max_depth)
    return float(vals[0]), float(errs[0])


def adaptive_simpson_batch(f: Callable, lo, hi, tol, max_depth: int = 50):
    """Integrate f over each [lo[i], hi[i]] to absolute tolerance tol[i].

    Returns (values, error_estimates) as arrays aligned with the inputs.
    Interval halves that miss their (split) tolerance are subdivided; each
    round evaluates f once on the stacked midpoints of all pending halves.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    tol = np.broadcast_to(np.asarray(tol, dtype=float), lo.shape).copy()
    n = lo.size
    values = np.zeros(n)
    errors = np.zeros(n)
    if n == 0:
        return values, errors

    live = hi > lo
    ids = np.nonzero(live)[0]
    a = lo[live]
    b = hi[live]
    if ids.size == 0:
        return values, errors
    fa = np.asarray(f(a), dtype=float)
    fb = np.asarray(f(b), dtype=float)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), dtype=float)
    s = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    t = tol[live]
    depth = np.zeros(ids.size, dtype=int)

    while ids.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = np.asarray(f(lm), dtype=float)
        frm = np.asarray(f(rm), dtype=float)
        h6 = (b - a) / 12.0
        s_l = h6 * (fa + 4.0 * flm + fm)
        s_r = h6 * (fm + 4.0 * frm + fb)
        err = (s_l + s_r - s) / 15.0
        done = (np.abs(err) <= t) | (depth >= max_depth)

        d = np.nonzero(done)[0]
        np.add.at(values, ids[d], s_l[d] + s_r[d] + err[d])
        np.add.at(errors, ids[d], np.abs(err[d]))

        p = np.nonzero(~done)[0]
        if p.size == 0:
            break
        # split each pending interval into its two halves
        ids = np.concatenate([ids[p], ids[p]])
        a, b, m, fa, fb, fm, s = (
            np.concatenate([a[p], m[p]]),
            np.concatenate([m[p], b[p]]),
            np.concatenate([lm[p], rm[p]]),
            np.concatenate([fa[p], fm[p]]),
            np.concatenate([fm[p], fb[p]]),
            np.concatenate([flm[p], frm[p]]),
            np.concatenate([s_l[p], s_r[p]]),
        )
        t = np.concatenate([0.5 * t[p], 0.5 * t[p]])
        depth = np.concatenate([depth[p] + 1, depth[p] + 1])

    return values, errors
