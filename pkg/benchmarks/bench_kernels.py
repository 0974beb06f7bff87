#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Both implementations are importable regardless of the active default
(which is selected at import time by CHRISTOFFEL_PURE_NUMPY), so this
script times each pair directly and then a realistic end-to-end call:
a tensor-Legendre basis evaluation at a candidate batch, the inner loop
of the Christoffel max search.
"""
import time

import numpy as np

from christoffel import _kernels
from christoffel.basis import legendre_spec
from christoffel import basis


def timeit(fn, *args, repeat=5):
    fn(*args)  # warm-up (JIT compile)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    u = rng.uniform(-1, 1, 200_000)
    print(f"numba active: {_kernels.HAS_NUMBA}")
    rows = []
    for name, np_fn, nb_fn, args in [
        ("legendre_table(200k, k=24)", _kernels.legendre_table_numpy,
         _kernels.legendre_table_numba, (u, 24)),
        ("power_table(200k, k=24)", _kernels.power_table_numpy,
         _kernels.power_table_numba, (u, 24)),
        ("chebyshev_table(200k, k=64)", _kernels.chebyshev_table_numpy,
         _kernels.chebyshev_table_numba, (u, 64)),
    ]:
        t_np = timeit(np_fn, *args)
        t_nb = timeit(nb_fn, *args) if _kernels.HAS_NUMBA else float("nan")
        rows.append((name, t_np, t_nb))

    idx = basis.enumerate_indices(2, 24).indices
    tables = np.stack([_kernels.legendre_table_numpy(u[:20_000], 24)] * 2)
    t_np = timeit(_kernels.tensor_gather_numpy, tables, idx)
    t_nb = (timeit(_kernels.tensor_gather_numba, tables, idx)
            if _kernels.HAS_NUMBA else float("nan"))
    rows.append(("tensor_gather(20k x 325)", t_np, t_nb))

    spec = legendre_spec(2, 24, [[-1, 1], [-1, 1]])
    pts = rng.uniform(-1, 1, (20_000, 2))
    t_eval = timeit(basis.eval_basis, spec, pts)
    print(f"{'kernel':34s}{'numpy':>10s}{'numba':>10s}{'speedup':>9s}")
    for name, t_np, t_nb in rows:
        ratio = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"{name:34s}{t_np*1e3:9.2f}ms{t_nb*1e3:9.2f}ms{ratio:8.2f}x")
    print(f"\nend-to-end eval_basis(20k pts, d=2, n=24, active path): "
          f"{t_eval*1e3:.2f} ms")


if __name__ == "__main__":
    main()
