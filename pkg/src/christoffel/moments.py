"""Exact monomial moments over the catalogue and Gram-matrix assembly.

Moments int_D x^alpha dx are closed forms (Gamma/Beta/Dirichlet integrals,
the standard-simplex factorial formula, products, affine pushforward by
expanding powers of linear forms); domains without a closed form fall back
to deterministic low-discrepancy sampling with an error estimate.

The Gram of the evaluation basis is assembled from those moments through
the triangular change-of-basis matrix in extended precision (see
``_highprec``), then factorized in binary64 by pivoted Cholesky.  A tensor
Gauss rule over the bounding box is only ever used when the domain *is*
its bounding box; a Gauss rule against a membership indicator would break
polynomial exactness exactly where the Christoffel function is most
sensitive, near the boundary.
"""
from dataclasses import dataclass, field
from math import inf, sqrt

import numpy as np
from scipy.linalg import solve_triangular
from scipy.linalg.lapack import dpstrf

from . import geometry
from ._highprec import ensure_precision, mp_binom, mp_factorial, mp_gamma, mp_sqrt, mpf
from .basis import BasisSpec, eval_basis, legendre_spec, monomial_spec
from .errors import CapacityError
from .geometry import (
    AffineImage,
    BallP,
    ConeDisk,
    Cube,
    HalfBall,
    Product,
    Simplex,
    SimplexUnion,
)
from .orthopoly import gauss_legendre

#: default degree caps by ambient dimension (dense factorization budget)
DEGREE_CAPS = {1: 32, 2: 24, 3: 14, 4: 8}
CONDITION_LIMIT = 1e13
AFFINE_EXPANSION_CAP = 64


def degree_cap(dim):
    return DEGREE_CAPS.get(dim, 6)


def _has_exact_moments(domain):
    if isinstance(domain, (Cube, BallP, HalfBall, ConeDisk, Simplex, SimplexUnion)):
        return True
    if isinstance(domain, Product):
        return all(_has_exact_moments(f) for f in domain.factors)
    if isinstance(domain, AffineImage):
        return _has_exact_moments(domain.base)
    return False


def _is_box(domain):
    box = domain.bounding_box()
    vol_box = float(np.prod(box[:, 1] - box[:, 0]))
    return abs(domain.volume() - vol_box) <= 1e-9 * vol_box


class MomentEngine:
    """Monomial moments of one domain with a per-multi-index cache.

    mode: "auto" resolves to "exact" when the catalogue provides closed
    forms (affine images report "mapped-exact"), otherwise "sampled".
    """

    def __init__(self, domain, mode="auto", samples=2**17, seed=0):
        self.domain = domain
        self.samples = int(samples)
        self.seed = int(seed)
        if mode == "auto":
            if _has_exact_moments(domain):
                mode = "mapped-exact" if isinstance(domain, AffineImage) else "exact"
            else:
                mode = "sampled"
        if mode in ("exact", "mapped-exact") and not _has_exact_moments(domain):
            raise ValueError(f"no exact moments for domain kind {domain.kind!r}")
        if mode == "gauss-box" and not _is_box(domain):
            raise ValueError("gauss-box moments apply only to box-exact shapes")
        self.mode = mode
        self._cache = {}
        self._sample_cache = None

    @property
    def exact(self):
        return self.mode in ("exact", "mapped-exact", "gauss-box")

    def moment_mp(self, alpha):
        """Exact moment as an mpfr value (exact modes only)."""
        ensure_precision()
        alpha = tuple(int(a) for a in alpha)
        hit = self._cache.get(alpha)
        if hit is None:
            if self.mode == "sampled":
                raise ValueError("sampled engine has no high-precision moments")
            hit = _mp_moment(self.domain, alpha)
            self._cache[alpha] = hit
        return hit

    def moment(self, alpha):
        """Moment value; pair with moment_error for the sampled mode."""
        if self.mode == "sampled":
            return self._sampled_moment(tuple(int(a) for a in alpha))[0]
        return float(self.moment_mp(alpha))

    def moment_error(self, alpha):
        if self.mode == "sampled":
            return self._sampled_moment(tuple(int(a) for a in alpha))[1]
        return 0.0

    def _sampled_moment(self, alpha):
        hit = self._cache.get(alpha)
        if hit is not None:
            return hit
        pts = self._samples()
        vals = np.prod(pts ** np.asarray(alpha, dtype=float), axis=1)
        vol = self.domain.volume()
        mean = float(np.mean(vals))
        stderr = float(np.std(vals) / sqrt(len(vals)))
        out = (vol * mean, vol * stderr)
        self._cache[alpha] = out
        return out

    def _samples(self):
        if self._sample_cache is None:
            self._sample_cache = geometry.sample_domain(
                self.domain, self.samples, seed=self.seed
            )
        return self._sample_cache

    def integrate_coeffs_mp(self, indices, coeffs):
        """Sum of coeff * moment over multi-indices, in extended precision."""
        total = mpf(0)
        for idx, c in zip(indices, coeffs):
            if c:
                total += mpf(c) * self.moment_mp(idx)
        return total


# ---------------------------------------------------------------------------
# closed-form moments (all mpfr)


def _mp_moment(domain, alpha):
    if isinstance(domain, Cube):
        return _cube_moment(alpha)
    if isinstance(domain, BallP):
        if domain.p == inf:
            return _cube_moment(alpha)
        return _ballp_moment(alpha, domain.p)
    if isinstance(domain, HalfBall):
        return _half_ball_moment(alpha)
    if isinstance(domain, ConeDisk):
        return _cone_disk_moment(alpha)
    if isinstance(domain, Simplex):
        return _simplex_moment(domain, alpha)
    if isinstance(domain, SimplexUnion):
        total = mpf(0)
        for s in domain.simplices:
            total += _simplex_moment(s, alpha)
        return total
    if isinstance(domain, Product):
        total = mpf(1)
        start = 0
        for f in domain.factors:
            total *= _mp_moment(f, alpha[start:start + f.dim])
            start += f.dim
        return total
    if isinstance(domain, AffineImage):
        return _affine_moment(domain, alpha)
    raise ValueError(f"no closed-form moments for {domain.kind!r}")


def _cube_moment(alpha):
    out = mpf(1)
    for a in alpha:
        if a % 2 == 1:
            return mpf(0)
        out *= mpf(2) / (a + 1)
    return out


def _ballp_moment(alpha, p):
    """Dirichlet integral over the l_p ball: zero unless every exponent is even."""
    if any(a % 2 == 1 for a in alpha):
        return mpf(0)
    d = len(alpha)
    p = mpf(p)
    num = mpf(2) ** d
    for a in alpha:
        num *= mp_gamma((a + 1) / p)
    den = p**d * mp_gamma((sum(alpha) + d) / p + 1)
    return num / den


def _half_ball_moment(alpha):
    """Euclidean ball restricted to x_d >= 0; the last exponent may be odd."""
    if any(a % 2 == 1 for a in alpha[:-1]):
        return mpf(0)
    d = len(alpha)
    num = mpf(2) ** (d - 1)
    for a in alpha:
        num *= mp_gamma(mpf(a + 1) / 2)
    den = mpf(2) ** d * mp_gamma(mpf(sum(alpha) + d) / 2 + 1)
    return num / den


def _cone_disk_moment(alpha):
    """Slice at height z is a disk of radius 1-z: Beta integral in z."""
    a, b, c = alpha
    disk = _ballp_moment((a, b), 2.0)
    if disk == 0:
        return mpf(0)
    beta = mp_gamma(c + 1) * mp_gamma(a + b + 3) / mp_gamma(a + b + c + 4)
    return disk * beta


def _std_simplex_moment(kappa):
    num = mpf(1)
    for k in kappa:
        num *= mp_factorial(k)
    return num / mp_factorial(sum(kappa) + len(kappa))


def _simplex_moment(simplex, alpha):
    d = simplex.dim
    offset = simplex.vertices[0]
    matrix = simplex._edge  # columns v_i - v_0
    expansion = _linear_power_expansion(offset, matrix, alpha)
    total = mpf(0)
    for kappa, c in expansion.items():
        total += c * _std_simplex_moment(kappa)
    return total * mpf(simplex._absdet)


def _affine_moment(domain, alpha):
    if sum(alpha) > AFFINE_EXPANSION_CAP:
        raise CapacityError(
            f"affine pushforward capped at total degree {AFFINE_EXPANSION_CAP}"
        )
    amap = domain.map
    base = domain.base
    absdet = abs(amap.determinant)
    a = amap.matrix
    off_diag = a - np.diag(np.diag(a))
    if np.all(off_diag == 0.0):
        value = _diag_affine_moment(base, np.diag(a), amap.offset, alpha)
    else:
        expansion = _linear_power_expansion(amap.offset, a, alpha)
        value = mpf(0)
        for kappa, c in expansion.items():
            value += c * _mp_moment(base, kappa)
    return mpf(absdet) * value


def _diag_affine_moment(base, scale, offset, alpha):
    """Pushforward along x_i = offset_i + scale_i * y_i (binomial per axis)."""
    d = len(alpha)
    axis_tables = []
    for i in range(d):
        a_i = alpha[i]
        tab = [
            mp_binom(a_i, k) * mpf(offset[i]) ** (a_i - k) * mpf(scale[i]) ** k
            for k in range(a_i + 1)
        ]
        axis_tables.append(tab)
    total = mpf(0)
    for kappa in np.ndindex(*[a + 1 for a in alpha]):
        c = mpf(1)
        for i in range(d):
            c *= axis_tables[i][kappa[i]]
        if c:
            total += c * _mp_moment(base, kappa)
    return total


def _linear_power_expansion(offset, matrix, alpha):
    """Monomial expansion of prod_i (offset_i + sum_j matrix[i,j] y_j)^alpha_i."""
    d = len(alpha)
    forms = []
    for i in range(d):
        form = [(None, mpf(offset[i]))]
        for j in range(d):
            if matrix[i, j] != 0.0:
                form.append((j, mpf(matrix[i, j])))
        forms.append(form)
    expansion = {tuple([0] * d): mpf(1)}
    for i in range(d):
        for _ in range(alpha[i]):
            nxt = {}
            for kappa, c in expansion.items():
                for j, coeff in forms[i]:
                    if j is None:
                        key = kappa
                    else:
                        key = kappa[:j] + (kappa[j] + 1,) + kappa[j + 1:]
                    nxt[key] = nxt.get(key, mpf(0)) + c * coeff
            expansion = nxt
    return expansion


# ---------------------------------------------------------------------------
# change of basis (tensor-Legendre -> monomials), extended precision


def _legendre_axis_coeffs(n, lo, hi):
    """Rows k=0..n: ascending monomial coefficients of the orthonormal
    Legendre polynomial on [lo, hi]."""
    s = mpf(2) / (mpf(hi) - mpf(lo))
    c = -(mpf(hi) + mpf(lo)) / (mpf(hi) - mpf(lo))
    rows = [[mpf(1)]]
    if n >= 1:
        rows.append([c, s])
    for k in range(1, n):
        prev, cur = rows[k - 1], rows[k]
        shifted = [mpf(0)] + [s * v for v in cur]
        mixed = [c * v for v in cur] + [mpf(0)]
        nxt = []
        for j in range(k + 2):
            term = (2 * k + 1) * (shifted[j] + mixed[j])
            if j < len(prev):
                term -= k * prev[j]
            nxt.append(term / (k + 1))
        rows.append(nxt)
    width = mpf(hi) - mpf(lo)
    out = []
    for k in range(n + 1):
        scale = mp_sqrt((2 * k + 1) / width)
        out.append([scale * v for v in rows[k]])
    return out


def _basis_rows_mp(spec):
    """Sparse change-of-basis rows: for each basis index alpha, a list of
    (monomial position, mpfr coefficient) in the shared graded-lex order."""
    idx = spec.index_set
    d, n = idx.dim, idx.degree
    pos = {tuple(row): i for i, row in enumerate(idx.indices)}
    axis = [
        _legendre_axis_coeffs(n, spec.box[a, 0], spec.box[a, 1]) for a in range(d)
    ]
    rows = []
    for alpha in idx.indices:
        entries = []
        ranges = [
            [(j, axis[a][alpha[a]][j]) for j in range(alpha[a] + 1)
             if axis[a][alpha[a]][j] != 0]
            for a in range(d)
        ]
        def rec(a, beta, coeff):
            if a == d:
                entries.append((pos[tuple(beta)], coeff))
                return
            for j, c in ranges[a]:
                rec(a + 1, beta + [j], coeff * c)
        rec(0, [], mpf(1))
        rows.append(entries)
    return rows


# ---------------------------------------------------------------------------
# Gram systems


@dataclass
class GramSystem:
    """Gram matrix of the evaluation basis over a domain, with its pivoted
    Cholesky factor and a pivot-ratio condition estimate.

    degraded means the factorization ran out of positive pivots or the
    condition estimate exceeds 1e13; downstream exponent fits must skip
    such degrees.
    """

    basis: BasisSpec
    gram: np.ndarray = field(repr=False)
    factor: np.ndarray = field(repr=False)
    piv: np.ndarray = field(repr=False)
    rank: int
    condition_estimate: float
    degraded: bool
    degree: int
    domain: object
    engine_mode: str
    mp_cholesky: object = field(default=None, repr=False)

    @property
    def size(self):
        return self.gram.shape[0]

    @property
    def precision(self):
        return "extended" if self.mp_cholesky is not None else "float64"

    @property
    def reliable(self):
        """True when values from this system can enter exponent fits."""
        return (not self.degraded) or self.mp_cholesky is not None

    def solve_half(self, rhs):
        """z = L^-1 P rhs, so that rhs^T G^-1 rhs = ||z||^2 columnwise."""
        rhs = np.asarray(rhs, dtype=float)
        one = rhs.ndim == 1
        if one:
            rhs = rhs[:, None]
        if self.rank < self.size:
            z = self._pinv_half() @ rhs
        else:
            z = solve_triangular(self.factor, rhs[self.piv], lower=True)
        return z[:, 0] if one else z

    def solve(self, rhs):
        """G^-1 rhs (pseudo-inverse solve when rank-deficient)."""
        rhs = np.asarray(rhs, dtype=float)
        one = rhs.ndim == 1
        if one:
            rhs = rhs[:, None]
        if self.rank < self.size:
            half = self._pinv_half()
            z = half.T @ (half @ rhs)
        else:
            y = solve_triangular(self.factor, rhs[self.piv], lower=True)
            y = solve_triangular(self.factor.T, y, lower=False)
            z = np.empty_like(y)
            z[self.piv] = y
        return z[:, 0] if one else z

    def _pinv_half(self):
        if not hasattr(self, "_pinv_half_cache"):
            evals, evecs = np.linalg.eigh(self.gram)
            cutoff = max(evals.max(), 0.0) * self.size * np.finfo(float).eps
            keep = evals > cutoff
            half = (evecs[:, keep] / np.sqrt(evals[keep])).T
            self._pinv_half_cache = half
        return self._pinv_half_cache


def _factorize(basis, gram, degree, domain, mode):
    n = gram.shape[0]
    c, piv, rank, info = dpstrf(gram, lower=1)
    factor = np.tril(c)
    piv = np.asarray(piv, dtype=np.int64) - 1
    diag = np.diag(factor)[:rank]
    if rank > 0 and diag[-1] > 0:
        cond = float((diag[0] / diag[-1]) ** 2)
    else:
        cond = np.inf
    degraded = (rank < n) or (cond > CONDITION_LIMIT)
    return GramSystem(
        basis=basis,
        gram=gram,
        factor=factor,
        piv=piv,
        rank=int(rank),
        condition_estimate=cond,
        degraded=bool(degraded),
        degree=degree,
        domain=domain,
        engine_mode=mode,
    )


def _gram_mp(domain, spec, engine, keep_mp=False):
    """Exact Gram in extended precision, rounded once to float64.

    With keep_mp the full MPFR matrix is also returned (list of row lists)
    so that degraded degrees can be refactorized in extended precision.
    """
    ensure_precision()
    idx = spec.index_set
    n_basis = len(idx)
    mono = idx.indices
    # moment matrix in the monomial basis
    moments = np.empty((n_basis, n_basis), dtype=object)
    for i in range(n_basis):
        for j in range(i, n_basis):
            m = engine.moment_mp(tuple(mono[i] + mono[j]))
            moments[i, j] = m
            moments[j, i] = m
    if spec.kind == "monomial":
        gram = np.array([[float(moments[i, j]) for j in range(n_basis)]
                         for i in range(n_basis)])
        mp_rows = [list(moments[i]) for i in range(n_basis)] if keep_mp else None
        return gram, mp_rows
    rows = _basis_rows_mp(spec)
    zero = mpf(0)
    # H = M C^T
    h = [[zero] * n_basis for _ in range(n_basis)]
    for col, entries in enumerate(rows):
        for i in range(n_basis):
            acc = zero
            mrow = moments[i]
            for posn, c in entries:
                acc += c * mrow[posn]
            h[i][col] = acc
    gram = np.empty((n_basis, n_basis), dtype=float)
    mp_rows = [[zero] * n_basis for _ in range(n_basis)] if keep_mp else None
    for r, entries in enumerate(rows):
        for col in range(r, n_basis):
            acc = zero
            for posn, c in entries:
                acc += c * h[posn][col]
            if keep_mp:
                mp_rows[r][col] = acc
                mp_rows[col][r] = acc
            v = float(acc)
            gram[r, col] = v
            gram[col, r] = v
    return gram, mp_rows


def _gram_gauss_box(domain, spec):
    box = spec.box
    n = spec.index_set.degree
    d = spec.dim
    q = n + 1
    nodes, weights = gauss_legendre(q)
    axes_x, axes_w = [], []
    for a in range(d):
        lo, hi = box[a]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        axes_x.append(mid + half * nodes)
        axes_w.append(half * weights)
    mesh = np.meshgrid(*axes_x, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    wmesh = np.meshgrid(*axes_w, indexing="ij")
    w = np.prod(np.column_stack([m.ravel() for m in wmesh]), axis=1)
    v = eval_basis(spec, pts)
    return (v * w[:, None]).T @ v


def _gram_sampled(domain, spec, engine):
    pts = engine._samples()
    v = eval_basis(spec, pts)
    return (domain.volume() / len(pts)) * (v.T @ v)


def make_basis_spec(domain, degree, kind="tensor-legendre"):
    if kind == "monomial":
        return monomial_spec(domain.dim, degree, domain.bounding_box())
    return legendre_spec(domain.dim, degree, domain.bounding_box())


def assemble_gram(domain, degree, basis_kind="tensor-legendre", mode="auto",
                  engine=None, samples=2**17, seed=0):
    """Assemble and factorize the Gram system of the evaluation basis.

    mode "auto" prefers the tensor Gauss rule when the domain is a box,
    the exact-moment path otherwise, and sampling as a last resort.
    """
    d = domain.dim
    if degree > degree_cap(d):
        raise CapacityError(
            f"degree {degree} exceeds the cap {degree_cap(d)} for dimension {d}"
        )
    # capacity check happens inside enumerate_indices as well
    spec = make_basis_spec(domain, degree, basis_kind)
    if mode == "auto":
        if _is_box(domain) and basis_kind == "tensor-legendre":
            mode = "gauss-box"
        elif _has_exact_moments(domain):
            mode = "mapped-exact" if isinstance(domain, AffineImage) else "exact"
        else:
            mode = "sampled"
    if mode == "gauss-box":
        if not _is_box(domain):
            raise ValueError("gauss-box Gram assembly applies only to box-exact shapes")
        gram = _gram_gauss_box(domain, spec)
    elif mode in ("exact", "mapped-exact"):
        engine = engine or MomentEngine(domain, mode=mode)
        gram, _ = _gram_mp(domain, spec, engine)
    elif mode == "sampled":
        engine = engine or MomentEngine(domain, mode="sampled", samples=samples, seed=seed)
        gram = _gram_sampled(domain, spec, engine)
    else:
        raise ValueError(f"unknown engine mode {mode!r}")
    gram = 0.5 * (gram + gram.T)
    return _factorize(spec, gram, degree, domain, mode)


class GramFamily:
    """Shared Gram assembly across a degree sweep.

    The basis box does not depend on the degree and multi-indices are
    graded, so the Gram at degree m is the leading principal block of the
    Gram at the largest degree assembled so far; one extended-precision
    assembly serves the whole sweep.  For exact-moment domains the family
    also keeps the MPFR Gram: degrees whose float64 factorization degrades
    (intrinsic condition past 1e13) get an extended-precision Cholesky
    instead, and Cholesky nesting lets a single full-size factor serve
    every such degree.
    """

    def __init__(self, domain, basis_kind="tensor-legendre", mode="auto",
                 samples=2**17, seed=0):
        self.domain = domain
        self.basis_kind = basis_kind
        self.mode = mode
        self.samples = samples
        self.seed = seed
        self.engine = None
        self._top = None  # (degree, gram ndarray, resolved mode)
        self._mp_rows = None
        self._mp_factor = None

    def _resolve_mode(self):
        mode = self.mode
        if mode == "auto":
            if _is_box(self.domain) and self.basis_kind == "tensor-legendre":
                mode = "gauss-box"
            elif _has_exact_moments(self.domain):
                mode = ("mapped-exact" if isinstance(self.domain, AffineImage)
                        else "exact")
            else:
                mode = "sampled"
        return mode

    def _assemble_top(self, degree):
        d = self.domain.dim
        if degree > degree_cap(d):
            raise CapacityError(
                f"degree {degree} exceeds the cap {degree_cap(d)} for dimension {d}"
            )
        spec = make_basis_spec(self.domain, degree, self.basis_kind)
        mode = self._resolve_mode()
        mp_rows = None
        if mode == "gauss-box":
            if not _is_box(self.domain):
                raise ValueError(
                    "gauss-box Gram assembly applies only to box-exact shapes"
                )
            gram = _gram_gauss_box(self.domain, spec)
        elif mode in ("exact", "mapped-exact"):
            if self.engine is None:
                self.engine = MomentEngine(self.domain, mode=mode)
            gram, mp_rows = _gram_mp(self.domain, spec, self.engine, keep_mp=True)
        else:
            if self.engine is None:
                self.engine = MomentEngine(self.domain, mode="sampled",
                                           samples=self.samples, seed=self.seed)
            gram = _gram_sampled(self.domain, spec, self.engine)
        gram = 0.5 * (gram + gram.T)
        self._top = (degree, gram, mode)
        self._mp_rows = mp_rows
        self._mp_factor = None

    def _extended_factor(self, size):
        from ._highprec import MPCholesky, MPCholeskyView

        if self._mp_rows is None:
            return None
        if self._mp_factor is None:
            try:
                self._mp_factor = MPCholesky(self._mp_rows, len(self._mp_rows))
            except ArithmeticError:
                self._mp_factor = False
        if self._mp_factor is False:
            return None
        return MPCholeskyView(self._mp_factor, size)

    def system(self, degree):
        if self._top is None or degree > self._top[0]:
            self._assemble_top(degree)
        _, top_gram, mode = self._top
        spec = make_basis_spec(self.domain, degree, self.basis_kind)
        n = spec.size
        gram = np.array(top_gram[:n, :n])
        sysm = _factorize(spec, gram, degree, self.domain, mode)
        if sysm.degraded:
            sysm.mp_cholesky = self._extended_factor(n)
        return sysm


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormResult:
    """A computed polynomial norm; kind records one-sided/sampled semantics."""

    value: float
    kind: str = "exact"  # "exact" | "lower-estimate" | "sampled"
    stderr: float = 0.0

    def __float__(self):
        return self.value


def l_norm(system, coeffs, p, engine=None, resolution=128, budget=200, seed=0):
    """Norm of a polynomial given by coefficients in the system's basis.

    p = 2 uses the Gram quadratic form; p = inf is a candidate-search
    lower estimate; other finite p are sampled with an error bar.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if p == 2:
        val = float(np.sqrt(max(coeffs @ system.gram @ coeffs, 0.0)))
        return NormResult(val, "exact")
    domain = system.domain
    if p == inf:
        from .search import maximize_over_domain

        def fn(points):
            return np.abs(eval_basis(system.basis, points) @ coeffs)

        best_val, _, _, _ = maximize_over_domain(
            domain, fn, resolution=resolution, budget=budget,
            include_interior=True, seed=seed,
        )
        return NormResult(best_val, "lower-estimate")
    if p <= 0:
        raise ValueError("p must be positive")
    engine = engine or MomentEngine(domain, mode="sampled", seed=seed)
    pts = geometry.sample_domain(domain, engine.samples, seed=seed)
    vals = np.abs(eval_basis(system.basis, pts) @ coeffs) ** p
    vol = domain.volume()
    mean = float(np.mean(vals))
    stderr = float(np.std(vals) / sqrt(len(vals)))
    value = (vol * mean) ** (1.0 / p)
    err = value / p * (stderr / mean) if mean > 0 else 0.0
    return NormResult(value, "sampled", err)


def export_gram_csv(system, path):
    """Row-major CSV dump of the Gram matrix, 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in system.gram:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
