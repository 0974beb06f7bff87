"""Derivative-free maximization over boundary charts and interior grids.

Used by the Christoffel max search and the sup-norm estimator.  The result
is always a certified-lower estimate: every reported value was attained at
an examined point of the domain.
"""
import numpy as np

from . import geometry

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, budget):
    """Golden-section search maximizing a scalar function on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while evals < budget and (b - a) > 1e-12:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        evals += 1
    return (c, fc) if fc >= fd else (d, fd)


def _chart_grid(chart, count):
    k = chart.ndim
    m = max(int(round(count ** (1.0 / k))), 5)
    axes = [np.linspace(lo, hi, m) for lo, hi in chart.bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    params = np.column_stack([g.ravel() for g in mesh])
    spacing = np.array([(hi - lo) / (m - 1) for lo, hi in chart.bounds])
    return params, spacing


def _refine_chart(chart, fn, start, spacing, budget):
    """Local refinement in parameter space around a grid maximizer."""
    param = np.array(start, dtype=float)

    def value_at(p):
        pts = np.atleast_2d(chart.fn(np.atleast_2d(p)))
        return float(fn(pts)[0])

    if chart.ndim == 1:
        lo = max(chart.bounds[0, 0], param[0] - spacing[0])
        hi = min(chart.bounds[0, 1], param[0] + spacing[0])
        x, v = golden_section_max(lambda t: value_at([t]), lo, hi, budget)
        return np.array([x]), v
    # 2-d charts: coordinate-alternating golden sections
    best = value_at(param)
    rounds = 3
    per_axis = max(budget // (rounds * chart.ndim), 8)
    for _ in range(rounds):
        for axis in range(chart.ndim):
            lo = max(chart.bounds[axis, 0], param[axis] - spacing[axis])
            hi = min(chart.bounds[axis, 1], param[axis] + spacing[axis])

            def f_axis(t, axis=axis):
                q = param.copy()
                q[axis] = t
                return value_at(q)

            x, v = golden_section_max(f_axis, lo, hi, per_axis)
            if v > best:
                best = v
                param[axis] = x
        spacing = spacing * 0.5
    return param, best


def maximize_over_domain(domain, fn, resolution=64, budget=200, top=5,
                         include_interior=False, seed=0, extra_points=None):
    """Maximize fn (vectorized over points) over the domain.

    Evaluates catalogue sharp candidates, quasi-uniform boundary samples,
    per-chart coarse grids (locally refined for the best few), and an
    interior low-discrepancy grid when requested or when the domain is not
    flagged convex.  Returns (value, argmax, evaluations, trace); ties are
    broken toward the lexicographically smallest argmax.
    """
    evals = 0
    trace = []
    best_val = -np.inf
    best_pt = None

    def consider(points, values):
        nonlocal best_val, best_pt, evals
        evals += len(values)
        i = int(np.argmax(values))
        # resolve exact ties lexicographically
        ties = np.flatnonzero(values == values[i])
        if len(ties) > 1:
            order = np.lexsort(points[ties][:, ::-1].T)
            i = ties[order[0]]
        if values[i] > best_val or (
            values[i] == best_val
            and best_pt is not None
            and tuple(points[i]) < tuple(best_pt)
        ):
            best_val = float(values[i])
            best_pt = np.array(points[i])
            trace.append((best_pt.copy(), best_val))

    pool = geometry.boundary_candidates(domain, resolution=max(resolution, 8))
    if extra_points is not None and len(extra_points):
        pool = np.vstack([pool, np.atleast_2d(np.asarray(extra_points, dtype=float))])
    consider(pool, np.asarray(fn(pool), dtype=float))

    charts = domain.charts()
    refine_jobs = []
    for chart in charts:
        params, spacing = _chart_grid(chart, max(resolution // max(len(charts), 1), 25))
        pts = np.atleast_2d(chart.fn(params))
        vals = np.asarray(fn(pts), dtype=float)
        consider(pts, vals)
        order = np.argsort(vals)[::-1][: max(top // 2, 1)]
        for i in order:
            refine_jobs.append((float(vals[i]), chart, params[i], spacing))

    refine_jobs.sort(key=lambda job: -job[0])
    for _, chart, start, spacing in refine_jobs[:top]:
        param, val = _refine_chart(chart, fn, start, spacing, budget)
        evals += budget
        pt = np.atleast_2d(chart.fn(np.atleast_2d(param)))[0]
        if val > best_val:
            best_val = float(val)
            best_pt = np.array(pt)
            trace.append((best_pt.copy(), best_val))

    if include_interior or not domain.convex:
        pts = geometry.sample_domain(domain, max(resolution, 32), seed=seed)
        consider(pts, np.asarray(fn(pts), dtype=float))
        best_interior = _pattern_search(domain, fn, best_pt, budget)
        if best_interior is not None and best_interior[1] > best_val:
            best_pt, best_val = np.array(best_interior[0]), float(best_interior[1])
            trace.append((best_pt.copy(), best_val))

    return best_val, best_pt, evals, trace


def _pattern_search(domain, fn, start, budget):
    if start is None:
        return None
    x = np.array(start, dtype=float)
    box = domain.bounding_box()
    step = float(np.max(box[:, 1] - box[:, 0])) / 16.0
    fx = float(fn(x[None, :])[0])
    used = 1
    while used < budget and step > 1e-10:
        improved = False
        for axis in range(x.size):
            for sgn in (1.0, -1.0):
                trial = x.copy()
                trial[axis] += sgn * step
                if not domain.contains(trial[None, :])[0]:
                    continue
                val = float(fn(trial[None, :])[0])
                used += 1
                if val > fx:
                    x, fx = trial, val
                    improved = True
        if not improved:
            step *= 0.5
    return x, fx
