"""Univariate machinery: Legendre, Jacobi, Gauss rules, Chebyshev-cell kernels.

The kernel polynomial (t_j(x)/t_j(y))^m built on a Chebyshev partition is
the workhorse of the lower-bound certificates: it equals 1 at the anchor y,
has algebraic degree <= n, and decays like (rho_n(y)/(rho_n(y)+|x-y|))^m
away from y, where rho_n(x) = 1/n^2 + sqrt(1-x^2)/n.
"""
import functools
from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np

from . import _kernels
from .errors import CapacityError, ConvergenceError


def legendre_normalized(k, x):
    """L2[-1,1]-orthonormal Legendre value(s): sqrt((2k+1)/2) * P_k(x)."""
    if k < 0:
        raise ValueError("degree must be >= 0")
    x = np.asarray(x, dtype=float)
    table = _kernels.legendre_table(np.atleast_1d(x).ravel(), k)
    vals = table[:, k] * np.sqrt((2 * k + 1) / 2.0)
    return float(vals[0]) if x.ndim == 0 else vals.reshape(x.shape)


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError("Jacobi parameters must satisfy alpha, beta > -1")


def jacobi_at(params, m, x):
    """Classical (non-normalized) Jacobi polynomial P_m^(alpha,beta) at x."""
    a, b = params.alpha, params.beta
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if m == 0:
        return float(p_prev) if x.ndim == 0 else p_prev
    p = 0.5 * (a - b) + 0.5 * (a + b + 2) * x
    for k in range(2, m + 1):
        s = 2 * k + a + b
        c1 = 2 * k * (k + a + b) * (s - 2)
        c2 = (s - 1) * (a * a - b * b)
        c3 = (s - 1) * s * (s - 2)
        c4 = 2 * (k + a - 1) * (k + b - 1) * s
        p, p_prev = ((c3 * x + c2) * p - c4 * p_prev) / c1, p
    return float(p) if x.ndim == 0 else p


def jacobi_norm(params, m):
    """L2 norm of P_m^(alpha,beta) under the weight (1-x)^alpha (1+x)^beta."""
    a, b = params.alpha, params.beta
    h2 = (
        2.0 ** (a + b + 1)
        / (2 * m + a + b + 1)
        * gamma(m + a + 1)
        * gamma(m + b + 1)
        / (gamma(m + 1) * gamma(m + a + b + 1))
    )
    return np.sqrt(h2)


def jacobi_at_minus_one(params, m):
    """Closed Gamma form of P_m^(alpha,beta)(-1): (-1)^m binom(m+beta, m)."""
    b = params.beta
    return (-1) ** m * gamma(m + 1 + b) / (gamma(m + 1) * gamma(1 + b))


@functools.lru_cache(maxsize=None)
def gauss_legendre(rule_size):
    """Gauss-Legendre nodes and weights on [-1,1], exact through degree 2q-1.

    Newton iteration on the Legendre roots; the cached arrays are read-only.
    """
    q = int(rule_size)
    if q < 1:
        raise ValueError("rule size must be >= 1")
    i = np.arange(q)
    x = np.cos(pi * (4 * i + 3) / (4 * q + 2))
    for _ in range(200):
        table = _kernels.legendre_table(x, q)
        pq = table[:, q]
        pq1 = table[:, q - 1] if q >= 1 else np.zeros_like(x)
        deriv = q * (x * pq - pq1) / (x * x - 1.0) if q >= 1 else np.ones_like(x)
        step = pq / deriv
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    else:
        raise ConvergenceError(f"Gauss-Legendre Newton iteration stalled for q={q}")
    table = _kernels.legendre_table(x, q)
    deriv = q * (x * table[:, q] - table[:, q - 1]) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * deriv * deriv)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact symmetry of the rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def rho(n, x):
    """Pointwise approximation width 1/n^2 + sqrt(1-x^2)/n on [-1,1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("rho is only defined for |x| <= 1")
    x = np.clip(x, -1.0, 1.0)
    out = 1.0 / n**2 + np.sqrt(1.0 - x * x) / n
    return float(out) if out.ndim == 0 else out


def chebyshev_partition(k):
    """Partition points x_j = cos(j pi / k), j = 0..k (decreasing)."""
    return np.cos(np.arange(k + 1) * pi / k)


def _cheb_coeffs(k):
    """Monomial coefficients of T_k (ascending), exact in float64 for k <= 45."""
    c_prev = np.array([1.0])
    if k == 0:
        return c_prev
    c = np.array([0.0, 1.0])
    for _ in range(1, k):
        nxt = np.zeros(len(c) + 1)
        nxt[1:] = 2.0 * c
        nxt[: len(c_prev)] -= c_prev
        c_prev, c = c, nxt
    return c


@dataclass(frozen=True)
class KernelPolynomial:
    """Evaluable kernel (t_j(x)/t_j(y))^m on the Chebyshev partition of [-1,1].

    k = floor(n/m) + 1 is the internal Chebyshev degree, j the cell index
    with y in [x_j, x_{j-1}].  The value at y is exactly 1 and the algebraic
    degree is (k-1)*m <= n.
    """

    n: int
    m: int
    y: float
    k: int
    j: int
    cell: tuple = field(repr=False)  # (x_j, x_{j-1})
    tilde_xj: float = field(repr=False, default=0.0)
    tj_at_y: float = field(repr=False, default=1.0)

    @property
    def degree(self):
        return (self.k - 1) * self.m

    def t_j(self, x):
        """The cell polynomial T_k(x) (x_{j-1}-x_j) / (x - tilde_x_j)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        width = self.cell[1] - self.cell[0]
        tk = _kernels.chebyshev_table(x, self.k)[:, self.k]
        diff = x - self.tilde_xj
        out = np.empty_like(x)
        near = np.abs(diff) < 1e-8
        out[~near] = tk[~near] * width / diff[~near]
        if np.any(near):
            # removable singularity: Taylor around the Chebyshev zero
            tp, tpp = self._tk_deriv_at_zero()
            out[near] = width * (tp + 0.5 * tpp * diff[near])
        return out

    def _tk_deriv_at_zero(self):
        k, j = self.k, self.j
        s = np.sin((j - 0.5) * pi / k)
        tp = k * (-1) ** (j - 1) / s
        # from the Chebyshev ODE (1-x^2)T'' - x T' + k^2 T = 0 with T=0
        tpp = self.tilde_xj * tp / (1.0 - self.tilde_xj**2)
        return tp, tpp

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = (self.t_j(np.atleast_1d(x)) / self.tj_at_y) ** self.m
        return float(vals[0]) if x.ndim == 0 else vals.reshape(x.shape)

    def univariate_coeffs(self):
        """Ascending monomial coefficients of the kernel (degree (k-1)*m)."""
        ck = _cheb_coeffs(self.k)
        # synthetic division of T_k by its root tilde_x_j
        q = np.zeros(self.k)
        acc = ck[self.k]
        q[self.k - 1] = acc
        for idx in range(self.k - 1, 0, -1):
            acc = ck[idx] + acc * self.tilde_xj
            q[idx - 1] = acc
        width = self.cell[1] - self.cell[0]
        base = q * (width / self.tj_at_y)
        coeffs = np.array([1.0])
        for _ in range(self.m):
            coeffs = np.convolve(coeffs, base)
        return coeffs


def kernel_polynomial(n, m, y):
    """Construct the decaying kernel polynomial anchored at y in [-1,1]."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if not -1.0 <= y <= 1.0:
        raise ValueError("anchor y must lie in [-1,1]")
    k = n // m + 1
    part = chebyshev_partition(k)
    # smallest j with y >= x_j; ties resolved to the smaller j
    j = int(np.argmax(y >= part - 1e-15))
    j = max(j, 1)
    tilde = np.cos((j - 0.5) * pi / k)
    cell = (part[j], part[j - 1])
    kp = KernelPolynomial(n=n, m=m, y=float(y), k=k, j=j, cell=cell, tilde_xj=float(tilde))
    tj_y = float(kp.t_j(np.array([y]))[0])
    return KernelPolynomial(
        n=n, m=m, y=float(y), k=k, j=j, cell=cell, tilde_xj=float(tilde), tj_at_y=tj_y
    )


def lacunary_l4(n):
    """Fourth power of the L4 norm of sum_k exp(i 2^k x) on the circle.

    Computed on a uniform grid dense enough that the rectangle rule is
    exact for the trigonometric polynomial |f|^4; equals 2n^2 - n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 16:
        raise CapacityError("lacunary fixture capped at n = 16")
    size = 2 ** (n + 3)
    x = np.arange(size) * (2.0 * pi / size)
    f = np.zeros(size, dtype=complex)
    for k in range(1, n + 1):
        f += np.exp(1j * (2**k) * x)
    return float(np.mean(np.abs(f) ** 4))
