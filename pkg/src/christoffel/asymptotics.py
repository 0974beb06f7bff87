"""Exponent fits, the closed-form sigma table, and bound certificates.

Lower certificates are rigorous numbers (a concrete polynomial witness is
integrated exactly, so the bound holds up to rounding).  Upper
certificates record rates only - an exponent and a |det T| scaling - since
the inscription theorems carry existential constants; their geometric
premise (image containment) is verified by sampling.
"""
import os
from dataclasses import dataclass, field
from math import inf, sqrt

import numpy as np
from scipy import integrate, stats

from . import geometry
from ._highprec import mpf
from .errors import InsufficientDegreesError
from .evaluator import ChristoffelEvaluator, christoffel_max
from .geometry import (
    AffineImage,
    BallP,
    ConeDisk,
    Cube,
    HalfBall,
    Product,
    Simplex,
    SimplexUnion,
    ball_cover_points,
    extension_point,
    parallel_section,
    section_width,
    support_min,
)
from .moments import GramFamily, MomentEngine
from .orthopoly import kernel_polynomial


def _thread_count():
    try:
        return max(int(os.environ.get("CHRISTOFFEL_THREADS", "1")), 1)
    except ValueError:
        return 1


def max_over_degrees(domain, degrees, family=None, resolution=64, budget=200,
                     basis_kind="tensor-legendre", mode="auto", seed=0):
    """Sweep christoffel_max over degrees; returns [(n, MaxReport)] sorted by n.

    One extended-precision Gram assembly at the top degree serves the whole
    sweep (smaller degrees are principal blocks).  Per-degree max searches
    run on a thread pool when CHRISTOFFEL_THREADS > 1; aggregation order is
    deterministic either way.
    """
    degrees = sorted(set(int(n) for n in degrees))
    family = family or GramFamily(domain, basis_kind, mode)
    family.system(degrees[-1])

    def job(n):
        ev = ChristoffelEvaluator(family.system(n))
        return n, christoffel_max(ev, resolution=resolution, budget=budget, seed=seed)

    workers = _thread_count()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, degrees))
    else:
        results = [job(n) for n in degrees]
    return sorted(results, key=lambda item: item[0])


def fit_power_law(ns, values):
    """OLS of log(values) on log(ns): (slope, intercept, half_width).

    half_width is the 95% Student-t confidence half-width of the slope
    from the regression residuals.
    """
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    k = len(x)
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    if k > 2:
        s2 = float(resid @ resid) / (k - 2)
        half = float(stats.t.ppf(0.975, k - 2)) * sqrt(max(s2, 0.0) / sxx)
    else:
        half = 0.0
    return slope, intercept, half


def fit_exponent(ns, values):
    """Exponent fit log C = a + sigma log n + b/n: (sigma, a, half_width).

    The 1/n nuisance term absorbs the leading finite-degree transient
    (C_max approaches c n^sigma slowly from below on curved domains); on
    exact power-law input it vanishes and sigma is recovered to rounding.
    half_width is the 95% Student-t half-width of the sigma coefficient.
    """
    ns = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(values, dtype=float))
    design = np.column_stack([np.ones_like(ns), np.log(ns), 1.0 / ns])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    dof = len(ns) - design.shape[1]
    if dof > 0:
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(design.T @ design)
        half = float(stats.t.ppf(0.975, dof)) * sqrt(max(cov[1, 1], 0.0))
    else:
        half = 0.0
    return float(beta[1]), float(beta[0]), half


@dataclass
class SigmaEstimate:
    """Fitted Nikol'skii exponent with its degree range and uncertainty."""

    degrees: list
    values: list
    slope: float
    intercept: float
    half_width: float
    excluded: list
    reference: float | None = None

    def to_dict(self):
        return {
            "degrees": list(self.degrees),
            "values": [float(v) for v in self.values],
            "sigma_fit": self.slope,
            "intercept": self.intercept,
            "half_width": self.half_width,
            "excluded": list(self.excluded),
            "sigma_reference": self.reference,
        }


def fit_sigma(domain, degrees, family=None, resolution=64, budget=200,
              n_min=4, seed=0, sweep=None):
    """Fit sigma from the max-Christoffel sweep, excluding degraded degrees."""
    sweep = sweep or max_over_degrees(
        domain, degrees, family=family, resolution=resolution,
        budget=budget, seed=seed,
    )
    used_n, used_v, excluded = [], [], []
    for n, rep in sweep:
        if n < n_min:
            excluded.append((n, "below n_min"))
        elif rep.degraded:
            excluded.append((n, "degraded gram"))
        elif not np.isfinite(rep.value) or rep.value <= 0:
            excluded.append((n, "non-finite value"))
        else:
            used_n.append(n)
            used_v.append(rep.value)
    if len(used_n) < 5:
        raise InsufficientDegreesError(
            f"only {len(used_n)} usable degrees (need at least 5); excluded={excluded}"
        )
    slope, intercept, half = fit_exponent(used_n, used_v)
    return SigmaEstimate(
        degrees=used_n,
        values=used_v,
        slope=slope,
        intercept=intercept,
        half_width=half,
        excluded=excluded,
        reference=sigma_reference(domain),
    )


def sigma_reference(domain):
    """Closed-form sharp exponent for catalogue domains; None when unknown.

    l_p balls: 2 + 2(d-1)/p for 1 <= p <= 2, d+1 for 2 <= p < inf, 2d at
    p = inf.  Polytopes: 2d.  Half balls: d+2.  Cone over the disk: 6.
    Products add exponents; affine images inherit the base exponent.
    """
    if isinstance(domain, Cube):
        return 2.0 * domain.dim
    if isinstance(domain, BallP):
        d, p = domain.dim, domain.p
        if p == inf:
            return 2.0 * d
        if p >= 2.0:
            return d + 1.0
        if p >= 1.0:
            return 2.0 + 2.0 * (d - 1) / p
        return None
    if isinstance(domain, (Simplex, SimplexUnion)):
        return 2.0 * domain.dim
    if isinstance(domain, HalfBall):
        return domain.dim + 2.0
    if isinstance(domain, ConeDisk):
        return 6.0
    if isinstance(domain, Product):
        parts = [sigma_reference(f) for f in domain.factors]
        if any(p is None for p in parts):
            return None
        return float(sum(parts))
    if isinstance(domain, AffineImage):
        return sigma_reference(domain.base)
    return None


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    """A lower or upper bound record for the Christoffel function."""

    kind: str
    degree: int
    point: np.ndarray | None = None
    value: float | None = None
    rate_exponent: float | None = None
    det_scaling: float | None = None
    verified: bool = True
    witness: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "kind": self.kind,
            "degree": self.degree,
            "verified": bool(self.verified),
        }
        if self.point is not None:
            out["point"] = [float(v) for v in np.atleast_1d(self.point)]
        if self.value is not None:
            out["value"] = float(self.value)
        if self.rate_exponent is not None:
            out["rate_exponent"] = float(self.rate_exponent)
        if self.det_scaling is not None:
            out["det_scaling"] = float(self.det_scaling)
        out["witness"] = _jsonable(self.witness)
        out["info"] = _jsonable(self.info)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _self_convolve(coeffs):
    out = [mpf(0)] * (2 * len(coeffs) - 1)
    for i, a in enumerate(coeffs):
        for j, b in enumerate(coeffs):
            out[i + j] += a * b
    return out


def _affine_power_integrals(engine, const, lin, max_j):
    """phi_j = int_D (const + lin . x)^j dx for j = 0..max_j (exact moments)."""
    d = len(lin)
    form = [(None, mpf(const))] + [(i, mpf(lin[i])) for i in range(d) if lin[i] != 0.0]
    cur = {tuple([0] * d): mpf(1)}
    phis = [engine.moment_mp(tuple([0] * d))]
    for _ in range(max_j):
        nxt = {}
        for kappa, c in cur.items():
            for i, coeff in form:
                key = kappa if i is None else kappa[:i] + (kappa[i] + 1,) + kappa[i + 1:]
                nxt[key] = nxt.get(key, mpf(0)) + c * coeff
        cur = nxt
        total = mpf(0)
        for kappa, c in cur.items():
            total += c * engine.moment_mp(kappa)
        phis.append(total)
    return phis


def _containment_in_mapped_cube(domain, tmap, samples, seed=0, tol=1e-9):
    pts = geometry.sample_domain(domain, samples, seed=seed)
    pulled = tmap.inverse()(pts)
    return bool(np.all(np.abs(pulled) <= 1.0 + tol)), len(pts)


def tensor_lower_certificate(domain, tmap, y, n, engine=None, check_samples=4096,
                             seed=0):
    """Rigorous lower bound at T y from a tensor product of kernel polynomials.

    Requires D inside T([-1,1]^d) (verified by sampling) and T y in D.  The
    witness Q is the product of one-dimensional kernels of degree
    floor(n/d) anchored at the coordinates of y; the bound is
    |Q(y)|^2 / ||Q o T^{-1}||^2_{L2(D)} = 1 / ||Q o T^{-1}||^2.
    """
    d = domain.dim
    y = np.asarray(y, dtype=float)
    if n < d:
        raise ValueError("need n >= d so that floor(n/d) >= 1")
    n_tilde = n // d
    point = tmap(y)
    ok_point = domain.membership(point, tol=1e-9)
    ok_cover, checked = _containment_in_mapped_cube(
        domain, tmap, check_samples, seed=seed
    )
    kernels = [kernel_polynomial(n_tilde, 1, float(y[i])) for i in range(d)]
    axis_coeffs = [[mpf(c) for c in k.univariate_coeffs()] for k in kernels]

    engine = engine or MomentEngine(domain)
    inv = tmap.inverse()
    m_inv, off_inv = inv.matrix, inv.offset
    diag_only = np.all((m_inv - np.diag(np.diag(m_inv))) == 0.0)

    if diag_only:
        # per-axis substitution u_i = off_i + s_i x_i, then separable sum
        axis_x = []
        for i in range(d):
            coeffs = axis_coeffs[i]
            deg = len(coeffs) - 1
            powers = [[mpf(0)] * (deg + 1) for _ in range(deg + 1)]
            powers[0][0] = mpf(1)
            o, s = mpf(off_inv[i]), mpf(m_inv[i, i])
            for j in range(1, deg + 1):
                prev = powers[j - 1]
                cur = powers[j]
                for t in range(j):
                    if prev[t]:
                        cur[t] += prev[t] * o
                        cur[t + 1] += prev[t] * s
            comp = [mpf(0)] * (deg + 1)
            for j, c in enumerate(coeffs):
                if c:
                    for t in range(j + 1):
                        comp[t] += c * powers[j][t]
            axis_x.append(comp)
        convs = [_self_convolve(c) for c in axis_x]
        norm2 = mpf(0)
        for gamma_idx in np.ndindex(*[len(c) for c in convs]):
            w = mpf(1)
            for i in range(d):
                w *= convs[i][gamma_idx[i]]
            if w:
                norm2 += w * engine.moment_mp(gamma_idx)
    else:
        poly = {tuple([0] * d): mpf(1)}
        for i in range(d):
            phi_pows = _form_power_dicts(off_inv[i], m_inv[i], len(axis_coeffs[i]) - 1)
            axis_poly = {}
            for j, c in enumerate(axis_coeffs[i]):
                if c:
                    for kappa, pc in phi_pows[j].items():
                        axis_poly[kappa] = axis_poly.get(kappa, mpf(0)) + c * pc
            poly = _dict_multiply(poly, axis_poly)
        norm2 = mpf(0)
        items = list(poly.items())
        for a_idx in range(len(items)):
            ka, ca = items[a_idx]
            for b_idx in range(len(items)):
                kb, cb = items[b_idx]
                gamma_idx = tuple(x + z for x, z in zip(ka, kb))
                norm2 += ca * cb * engine.moment_mp(gamma_idx)

    bound = float(1 / norm2)
    return Certificate(
        kind="lower-tensor",
        degree=n,
        point=point,
        value=bound,
        verified=bool(ok_point and ok_cover),
        witness={"map": tmap.to_dict(), "y": y.tolist(),
                 "axis_degrees": [k.degree for k in kernels]},
        info={"n_tilde": n_tilde, "containment_samples": checked,
              "point_in_domain": ok_point, "cover_ok": ok_cover},
    )


def _form_power_dicts(const, lin, max_j):
    d = len(lin)
    form = [(None, mpf(const))] + [(i, mpf(lin[i])) for i in range(d) if lin[i] != 0.0]
    cur = {tuple([0] * d): mpf(1)}
    out = [cur]
    for _ in range(max_j):
        nxt = {}
        for kappa, c in cur.items():
            for i, coeff in form:
                key = kappa if i is None else kappa[:i] + (kappa[i] + 1,) + kappa[i + 1:]
                nxt[key] = nxt.get(key, mpf(0)) + c * coeff
        out.append(nxt)
        cur = nxt
    return out


def _dict_multiply(a, b):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            key = tuple(x + z for x, z in zip(ka, kb))
            out[key] = out.get(key, mpf(0)) + ca * cb
    return out


def parallel_section_lower(domain, xi, n, m=2, engine=None, detect_lambda=True):
    """Lower bound for max C from the parallel-section construction.

    Two paths: (i) rigorous - integrate the explicit witness polynomial
    P(1 - (x.xi - h)/b) exactly with the moment engine; (ii) rate - the two
    section integrals, whose reciprocal carries an unknown constant, plus
    the power-law shortcut exponent 2(1+lambda) when A(t) <= M t^lambda is
    evidenced near t = 0 (log-log slope with R^2 > 0.999).
    """
    xi = np.asarray(xi, dtype=float)
    xi = xi / np.linalg.norm(xi)
    if m < 1:
        raise ValueError("m must be >= 1")
    h = support_min(domain, xi)
    width = section_width(domain, xi)
    b = width / 2.0

    kernel = kernel_polynomial(n, m, 1.0)
    p_coeffs = [mpf(c) for c in kernel.univariate_coeffs()]
    conv = _self_convolve(p_coeffs)
    engine = engine or MomentEngine(domain)
    rigorous = None
    if engine.exact:
        const = 1.0 + h / b
        lin = -xi / b
        phis = _affine_power_integrals(engine, const, lin, len(conv) - 1)
        norm2 = mpf(0)
        for j, c in enumerate(conv):
            if c:
                norm2 += c * phis[j]
        rigorous = float(1 / norm2)

    def section(t):
        return float(parallel_section(domain, xi, t))

    t0 = min(1.0 / n**2, width)
    i1, _ = integrate.quad(section, 0.0, t0, limit=200)
    i2, _ = integrate.quad(lambda t: section(t) * t ** (-m), t0, width, limit=200)
    denom = i1 + n ** (-2.0 * m) * i2
    rate_value = 1.0 / denom if denom > 0 else inf

    lam = lam_r2 = shortcut = None
    if detect_lambda:
        ts = np.logspace(-4, -2, 24)
        vals = np.array([section(t) for t in ts])
        if np.all(vals > 0):
            slope, intercept, _ = fit_power_law(ts, vals)
            fit = intercept + slope * np.log(ts)
            y = np.log(vals)
            ss_res = float(np.sum((y - fit) ** 2))
            ss_tot = float(np.sum((y - y.mean()) ** 2))
            r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
            if r2 > 0.999:
                lam, lam_r2 = slope, r2
                shortcut = 2.0 * (1.0 + lam)
            else:
                lam_r2 = r2

    # a point attaining the touching hyperplane, for the record
    cands = geometry.boundary_candidates(domain, resolution=64)
    touch = cands[int(np.argmin(cands @ xi))]
    return Certificate(
        kind="lower-parallel-section",
        degree=n,
        point=touch,
        value=rigorous,
        rate_exponent=shortcut,
        verified=True,
        witness={"xi": xi.tolist(), "m": m, "kernel_degree": kernel.degree,
                 "h": h, "width": width},
        info={"rate_value": rate_value, "integral_near": i1, "integral_far": i2,
              "lambda": lam, "lambda_r2": lam_r2},
    )


def inscribed_upper_certificate(domain, tmap, n, samples=10_000, tol=1e-9,
                                rate_exponent=None, kind="upper-inscribed-ellipsoid"):
    """Upper-rate certificate from an inscribed affine ball.

    Verifies T(B_2^d) inside D on a quasi-uniform sphere-plus-interior
    sample and emits the rate n^(d+1) (or the supplied exponent) scaled by
    |det T|^{-1} at the point T v_n^d.  The numeric constant is existential
    and deliberately not reported.
    """
    d = domain.dim
    pts = ball_cover_points(d, samples)
    mapped = tmap(pts)
    inside = domain.contains(mapped, tol=tol)
    ok = bool(np.all(inside))
    point = tmap(extension_point(n, d))
    return Certificate(
        kind=kind,
        degree=n,
        point=point,
        rate_exponent=float(rate_exponent if rate_exponent is not None else d + 1),
        det_scaling=1.0 / abs(tmap.determinant),
        verified=ok,
        witness={"map": tmap.to_dict()},
        info={"samples": samples, "violations": int(np.sum(~inside))},
    )


def lp_cone_upper_certificate(domain, n, x=None, samples=10_000):
    """Cone-inscription upper rate n^(2+2(d-1)/p) on an l_p ball, 1 < p <= 2.

    The inscribed ball's axial displacement from x is (alpha/3) times the
    cone-set parameter, so the transverse semi-axes must carry the factor
    (alpha/3)^s for the image to stay inside the cone set (the factor only
    shifts the existential constant, not the rate).
    """
    if not isinstance(domain, BallP):
        raise ValueError("cone certificate applies to l_p balls")
    d, p = domain.dim, domain.p
    alpha, beta = geometry.lp_cone_constants(d, p)
    if x is None:
        x = np.zeros(d)
        x[0] = 1.0
    x = np.asarray(x, dtype=float)
    u = -geometry.lp_outward_normal(p, x)
    s = 1.0 / p
    beta_eff = beta * (alpha / 3.0) ** s
    tmap = geometry.cone_inscription_map(x, u, alpha, beta_eff, s, n)
    cert = inscribed_upper_certificate(
        domain, tmap, n, samples=samples,
        rate_exponent=2.0 + 2.0 * s * (d - 1), kind="upper-cone",
    )
    cert.witness.update({"alpha": alpha, "beta": beta, "beta_effective": beta_eff,
                         "s": s, "x": x.tolist(), "u": u.tolist()})
    return cert


@dataclass
class ConsistencyReport:
    """Fitted exponent against the convex-body sandwich and the table value."""

    estimate: SigmaEstimate
    tolerance: float
    convex_bounds_ok: bool | None
    reference_ok: bool | None
    certificates: list

    def to_dict(self):
        return {
            "estimate": self.estimate.to_dict(),
            "tolerance": self.tolerance,
            "convex_bounds_ok": self.convex_bounds_ok,
            "reference_ok": self.reference_ok,
            "certificates": [c.to_dict() for c in self.certificates],
        }


def consistency_report(domain, degrees, family=None, certificates=(),
                       resolution=64, budget=200, seed=0):
    """Bundle the sigma fit, d+1 <= sigma <= 2d sanity bounds, certificates."""
    est = fit_sigma(domain, degrees, family=family, resolution=resolution,
                    budget=budget, seed=seed)
    tol = est.half_width + 0.3
    d = domain.dim
    convex_ok = None
    if domain.convex:
        convex_ok = bool(d + 1 - tol <= est.slope <= 2 * d + tol)
    ref_ok = None
    if est.reference is not None:
        ref_ok = bool(abs(est.slope - est.reference) <= tol)
    return ConsistencyReport(
        estimate=est,
        tolerance=tol,
        convex_bounds_ok=convex_ok,
        reference_ok=ref_ok,
        certificates=list(certificates),
    )
