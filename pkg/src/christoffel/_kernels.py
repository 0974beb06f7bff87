"""Hot numeric kernels: univariate recurrence tables and tensor gathers.

Each kernel has a pure-numpy implementation and (when numba is importable)
an ``@njit`` twin.  The active implementation is chosen at import time;
set ``CHRISTOFFEL_PURE_NUMPY=1`` to force the numpy path.  The benchmark
in ``benchmarks/bench_kernels.py`` compares the two.
"""
import os

import numpy as np

_FORCE_NUMPY = os.environ.get("CHRISTOFFEL_PURE_NUMPY", "").strip() not in ("", "0")

try:
    if _FORCE_NUMPY:
        raise ImportError("pure-numpy mode requested")
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def legendre_table_numpy(u, kmax):
    """Table of plain Legendre values P_0..P_kmax at points u, shape (M, kmax+1)."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    out = np.empty((u.size, kmax + 1))
    out[:, 0] = 1.0
    if kmax >= 1:
        out[:, 1] = u
    for k in range(1, kmax):
        out[:, k + 1] = ((2 * k + 1) * u * out[:, k] - k * out[:, k - 1]) / (k + 1)
    return out


@njit(cache=True)
def legendre_table_numba(u, kmax):  # pragma: no cover - numba twin
    m = u.shape[0]
    out = np.empty((m, kmax + 1))
    for i in range(m):
        out[i, 0] = 1.0
    if kmax >= 1:
        for i in range(m):
            out[i, 1] = u[i]
    for k in range(1, kmax):
        a = 2.0 * k + 1.0
        for i in range(m):
            out[i, k + 1] = (a * u[i] * out[i, k] - k * out[i, k - 1]) / (k + 1.0)
    return out


def power_table_numpy(u, kmax):
    """Table of monomial powers u^0..u^kmax, shape (M, kmax+1)."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    out = np.empty((u.size, kmax + 1))
    out[:, 0] = 1.0
    for k in range(kmax):
        out[:, k + 1] = out[:, k] * u
    return out


@njit(cache=True)
def power_table_numba(u, kmax):  # pragma: no cover - numba twin
    m = u.shape[0]
    out = np.empty((m, kmax + 1))
    for i in range(m):
        out[i, 0] = 1.0
    for k in range(kmax):
        for i in range(m):
            out[i, k + 1] = out[i, k] * u[i]
    return out


def tensor_gather_numpy(tables, indices):
    """Products of per-axis table columns.

    tables: (d, M, kmax+1); indices: (N, d) ints.  Returns (M, N) with
    entry (i, j) = prod_a tables[a, i, indices[j, a]].
    """
    d = tables.shape[0]
    prod = tables[0][:, indices[:, 0]].copy()
    for a in range(1, d):
        prod *= tables[a][:, indices[:, a]]
    return prod


@njit(cache=True)
def tensor_gather_numba(tables, indices):  # pragma: no cover - numba twin
    d, m, _ = tables.shape
    n = indices.shape[0]
    out = np.empty((m, n))
    for j in range(n):
        for i in range(m):
            p = tables[0, i, indices[j, 0]]
            for a in range(1, d):
                p *= tables[a, i, indices[j, a]]
            out[i, j] = p
    return out


def chebyshev_table_numpy(u, kmax):
    """Table of Chebyshev T_0..T_kmax values (recurrence; valid for all real u)."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    out = np.empty((u.size, kmax + 1))
    out[:, 0] = 1.0
    if kmax >= 1:
        out[:, 1] = u
    for k in range(1, kmax):
        out[:, k + 1] = 2.0 * u * out[:, k] - out[:, k - 1]
    return out


@njit(cache=True)
def chebyshev_table_numba(u, kmax):  # pragma: no cover - numba twin
    m = u.shape[0]
    out = np.empty((m, kmax + 1))
    for i in range(m):
        out[i, 0] = 1.0
    if kmax >= 1:
        for i in range(m):
            out[i, 1] = u[i]
    for k in range(1, kmax):
        for i in range(m):
            out[i, k + 1] = 2.0 * u[i] * out[i, k] - out[i, k - 1]
    return out


if HAS_NUMBA:
    legendre_table = legendre_table_numba
    power_table = power_table_numba
    tensor_gather = tensor_gather_numba
    chebyshev_table = chebyshev_table_numba
else:
    legendre_table = legendre_table_numpy
    power_table = power_table_numpy
    tensor_gather = tensor_gather_numpy
    chebyshev_table = chebyshev_table_numpy
