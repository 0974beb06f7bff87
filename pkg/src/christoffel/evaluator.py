"""Christoffel function evaluation, max search, and Nikol'skii ratios.

C(x) = b(x)^T G^{-1} b(x) is computed as a quadratic form against the
pivoted Cholesky factor of the Gram system; it is basis-independent, and
points outside the domain are legal (extension semantics).
"""
from dataclasses import dataclass, field
from math import inf

import numpy as np

from .basis import eval_basis
from .moments import GramSystem, l_norm
from .search import maximize_over_domain


class ChristoffelEvaluator:
    """Read-only evaluator bound to one Gram system."""

    def __init__(self, system: GramSystem):
        self.system = system

    @property
    def domain(self):
        return self.system.domain

    @property
    def degree(self):
        return self.system.degree

    @property
    def degraded(self):
        return self.system.degraded

    def basis_at(self, points):
        return eval_basis(self.system.basis, points)

    def christoffel_at(self, points):
        """C(P_n, D, x) at one point or a batch of points.

        Uses the extended-precision factor when the float64 factorization
        is degraded and the Gram family retained the exact matrix.
        """
        if self.system.mp_cholesky is not None:
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            v = self.basis_at(pts)
            fac = self.system.mp_cholesky
            c = np.array([fac.quadform(row) for row in v])
            return float(c[0]) if np.asarray(points).ndim == 1 else c
        return self._christoffel_f64(points)

    def _christoffel_f64(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        v = self.basis_at(pts)
        z = self.system.solve_half(v.T)
        c = np.sum(z * z, axis=0)
        return float(c[0]) if single else c

    def kernel_at(self, x, y):
        """Reproducing kernel K(x, y) = b(x)^T G^{-1} b(y)."""
        zx = self.system.solve_half(self.basis_at(np.asarray(x, float)).ravel())
        zy = self.system.solve_half(self.basis_at(np.asarray(y, float)).ravel())
        return float(zx @ zy)

    def extremal_polynomial(self, x):
        """Coefficients of K(x,.)/K(x,x): the minimal-L2 polynomial with f(x)=1."""
        b = self.basis_at(np.asarray(x, float)).ravel()
        g_inv_b = self.system.solve(b)
        c_val = float(b @ g_inv_b)
        return g_inv_b / c_val


@dataclass
class MaxReport:
    """Result of the (certified-lower) max search for C over the domain."""

    value: float
    argmax: np.ndarray = field(repr=False)
    candidates_examined: int
    trace: list = field(repr=False)
    degraded: bool
    precision: str = "float64"


def christoffel_max(evaluator, resolution=64, budget=200, interior=None, seed=0):
    """Maximize C over boundary candidates with local refinement.

    For convex domains the boundary carries the max up to a factor 2^d, so
    the interior grid is only added when the domain is not flagged convex
    (or on request).  On degraded systems with an extended-precision
    factor, a float64 pass locates candidates and the accurate quadratic
    form re-scores and refines them.
    """
    domain = evaluator.domain
    include_interior = (not domain.convex) if interior is None else interior
    system = evaluator.system
    if system.mp_cholesky is None:
        value, argmax, evals, trace = maximize_over_domain(
            domain,
            evaluator.christoffel_at,
            resolution=resolution,
            budget=budget,
            include_interior=include_interior,
            seed=seed,
        )
        return MaxReport(
            value=value,
            argmax=argmax,
            candidates_examined=evals,
            trace=trace,
            degraded=evaluator.degraded,
        )
    # two-stage search: cheap pass to locate, accurate pass to score
    _, stage_pt, evals0, _ = maximize_over_domain(
        domain,
        evaluator._christoffel_f64,
        resolution=resolution,
        budget=budget,
        include_interior=include_interior,
        seed=seed,
    )
    extra = [stage_pt] if stage_pt is not None else []
    value, argmax, evals1, trace = maximize_over_domain(
        domain,
        evaluator.christoffel_at,
        resolution=24,
        budget=48,
        top=2,
        include_interior=False,
        seed=seed,
        extra_points=extra,
    )
    return MaxReport(
        value=value,
        argmax=argmax,
        candidates_examined=evals0 + evals1,
        trace=trace,
        degraded=False,
        precision="extended",
    )


def nikolskii_ratio(evaluator, report=None, **search_kwargs):
    """sup over P_n of ||phi||_inf / ||phi||_2 = sqrt(max C)."""
    if report is None:
        report = christoffel_max(evaluator, **search_kwargs)
    return float(np.sqrt(report.value))


@dataclass
class BootstrapReport:
    """Numerical check of the norm-bootstrap inequality for one polynomial."""

    q: float
    r: float
    s: int
    ratio: float
    bound_direct: float | None
    bound_power: float | None
    passed: bool
    slack: float
    sampling_error: float


def bootstrap_check(evaluator, coeffs, q, r, s=1, family=None, seed=0,
                    resolution=96, budget=160):
    """Check ||phi||_r <= C_max^(1/q - 1/r) ||phi||_q with measured slack.

    The direct bound needs q <= 2; the power-trick bound raises phi to the
    s-th power (degree n*s) and is valid for q <= 2s.  Norms outside
    {2, inf} are sampled, so the report carries an error bar.
    """
    if not (0 < q <= r):
        raise ValueError("need 0 < q <= r")
    if s < 1:
        raise ValueError("s must be a positive integer")
    coeffs = np.asarray(coeffs, dtype=float)
    sys0 = evaluator.system
    nq = l_norm(sys0, coeffs, q, resolution=resolution, budget=budget, seed=seed)
    nr = l_norm(sys0, coeffs, r, resolution=resolution, budget=budget, seed=seed)
    ratio = nr.value / nq.value if nq.value > 0 else inf
    rel_err = 0.0
    for nv in (nq, nr):
        if nv.value > 0:
            rel_err += nv.stderr / nv.value
    exponent = (1.0 / q) - (1.0 / r if r != inf else 0.0)

    bound_direct = None
    if q <= 2:
        cmax = christoffel_max(evaluator, resolution=resolution, budget=budget).value
        bound_direct = cmax**exponent

    bound_power = None
    if family is not None and q <= 2 * s:
        sys_s = family.system(evaluator.degree * s)
        ev_s = ChristoffelEvaluator(sys_s)
        cmax_s = christoffel_max(ev_s, resolution=resolution, budget=budget).value
        bound_power = cmax_s**exponent

    bounds = [b for b in (bound_direct, bound_power) if b is not None]
    if not bounds:
        raise ValueError("no applicable bound: direct needs q <= 2, power needs q <= 2s")
    bound = min(bounds)
    slack = bound - ratio
    passed = ratio <= bound * (1.0 + 1e-9) + 3.0 * rel_err * ratio
    return BootstrapReport(
        q=q, r=r, s=s, ratio=ratio,
        bound_direct=bound_direct, bound_power=bound_power,
        passed=bool(passed), slack=float(slack),
        sampling_error=float(rel_err * ratio),
    )
