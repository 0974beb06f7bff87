"""Thin gmpy2/MPFR layer for exact-moment Gram assembly.

Converting closed-form monomial moments into a tensor-Legendre Gram loses
roughly ``log10(max coeff^2)`` digits to cancellation (about 12 digits at
degree 24), so the assembly runs in extended precision and is rounded to
binary64 exactly once, at the end.
"""
import os

import gmpy2

PRECISION = int(os.environ.get("CHRISTOFFEL_MP_PREC", "320"))


def ensure_precision():
    ctx = gmpy2.get_context()
    if ctx.precision < PRECISION:
        ctx.precision = PRECISION


ensure_precision()


def mpf(x):
    ensure_precision()
    return gmpy2.mpfr(x)


def mp_gamma(x):
    return gmpy2.gamma(mpf(x))


def mp_pi():
    return gmpy2.const_pi()


def mp_sqrt(x):
    return gmpy2.sqrt(mpf(x))


def mp_factorial(n):
    return gmpy2.factorial(int(n))


def mp_binom(n, k):
    return gmpy2.bincoef(int(n), int(k))


class MPCholesky:
    """Plain Cholesky of an exact Gram in MPFR, for systems whose intrinsic
    condition exceeds what binary64 can factorize.

    At the default 320-bit precision this handles conditions up to ~1e80
    while leaving ~14 reliable digits in the quadratic form.
    """

    def __init__(self, rows, size):
        ensure_precision()
        n = size
        factor = [[mpf(0)] * n for _ in range(n)]
        for j in range(n):
            acc = rows[j][j]
            fj = factor[j]
            for k in range(j):
                acc -= fj[k] * fj[k]
            if acc <= 0:
                raise ArithmeticError(
                    f"extended-precision pivot failed at column {j}"
                )
            pivot = gmpy2.sqrt(acc)
            fj[j] = pivot
            for i in range(j + 1, n):
                acc = rows[i][j]
                fi = factor[i]
                for k in range(j):
                    acc -= fi[k] * fj[k]
                fi[j] = acc / pivot
        self.size = n
        self.factor = factor

    def quadform(self, b, size=None):
        """b^T G^{-1} b for a float vector b, via one forward solve.

        Cholesky factors nest, so passing size=m (m <= full size) solves
        against the leading principal block: one factorization serves every
        degree of a graded sweep.
        """
        ensure_precision()
        n = self.size if size is None else int(size)
        z = [mpf(0)] * n
        total = mpf(0)
        for i in range(n):
            acc = mpf(float(b[i]))
            fi = self.factor[i]
            for k in range(i):
                acc -= fi[k] * z[k]
            zi = acc / fi[i]
            z[i] = zi
            total += zi * zi
        return float(total)


class MPCholeskyView:
    """Fixed-size view of a shared MPCholesky factor."""

    def __init__(self, factor, size):
        if size > factor.size:
            raise ValueError("view larger than the factor")
        self._factor = factor
        self.size = size

    def quadform(self, b):
        return self._factor.quadform(b, self.size)
