from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import christoffel as ch
from christoffel import _kernels
from christoffel.basis import legendre_spec, monomial_spec
from christoffel.errors import CapacityError


def test_enumerate_d2_n2_exact_order():
    idx = ch.enumerate_indices(2, 2)
    assert [tuple(map(int, a)) for a in idx] == [
        (0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0),
    ]


def test_enumerate_d1_n5_count():
    assert len(ch.enumerate_indices(1, 5)) == 6


def test_enumerate_d3_n10_against_brute_force():
    count = 0
    for a in range(11):
        for b in range(11):
            for c in range(11):
                if a + b + c <= 10:
                    count += 1
    assert count == 286
    assert len(ch.enumerate_indices(3, 10)) == count


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("n", range(13))
def test_count_is_binomial(d, n):
    assert len(ch.enumerate_indices(d, n)) == comb(n + d, d)


@given(d=st.integers(1, 4), n=st.integers(0, 9))
@settings(max_examples=30, deadline=None)
def test_graded_lex_no_duplicates(d, n):
    idx = list(ch.enumerate_indices(d, n))
    assert len(set(idx)) == len(idx)
    keys = [(sum(a), a) for a in idx]
    assert keys == sorted(keys)


def test_capacity_error():
    with pytest.raises(CapacityError):
        ch.enumerate_indices(6, 30)


def test_monomial_eval_1d():
    spec = monomial_spec(1, 2)
    vals = ch.eval_basis(spec, np.array([[2.0]]))
    np.testing.assert_allclose(vals[0], [1.0, 2.0, 4.0])


def test_tensor_legendre_1d_at_one():
    # hand orthonormalization of {1, x} on [-1, 1]
    spec = legendre_spec(1, 1, [[-1.0, 1.0]])
    vals = ch.eval_basis(spec, np.array([[1.0]]))
    np.testing.assert_allclose(vals[0], [1 / np.sqrt(2), np.sqrt(1.5)], rtol=1e-14)


def test_constant_basis_function_unit_norm():
    box = [[0.0, 2.0], [-1.0, 3.0]]
    spec = legendre_spec(2, 3, box)
    vals = ch.eval_basis(spec, np.array([[0.7, 1.1], [1.9, -0.5]]))
    expect = (2.0 * 4.0) ** -0.5
    np.testing.assert_allclose(vals[:, 0], expect, rtol=1e-14)


def test_change_of_basis_fixed_matrix():
    # monomial and tensor-legendre values are related by one invertible matrix
    rng = np.random.default_rng(5)
    box = [[-1.0, 1.0], [0.0, 1.0]]
    mono = monomial_spec(2, 5, box)
    leg = legendre_spec(2, 5, box)
    n = mono.size
    pts_fit = rng.uniform(-1, 1, (n, 2))
    a = ch.eval_basis(mono, pts_fit)
    b = ch.eval_basis(leg, pts_fit)
    coupling = np.linalg.solve(a, b)
    pts_new = rng.uniform(-1, 1, (50, 2))
    lhs = ch.eval_basis(mono, pts_new) @ coupling
    rhs = ch.eval_basis(leg, pts_new)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("n", [3, 7, 11])
def test_tensor_legendre_gram_identity_on_own_box(n):
    # Gauss rule of exactness >= 2n per axis
    system = ch.assemble_gram(ch.Cube(2), n, mode="gauss-box")
    np.testing.assert_allclose(system.gram, np.eye(system.size), atol=1e-11)


def test_points_outside_box_are_legal():
    spec = legendre_spec(1, 3, [[-1.0, 1.0]])
    vals = ch.eval_basis(spec, np.array([[2.5]]))
    assert np.all(np.isfinite(vals))


def test_kernel_twins_agree():
    rng = np.random.default_rng(0)
    u = rng.uniform(-1.2, 1.2, 257)
    np.testing.assert_allclose(
        _kernels.legendre_table_numpy(u, 12),
        _kernels.legendre_table(u, 12),
        rtol=1e-13,
    )
    np.testing.assert_allclose(
        _kernels.power_table_numpy(u, 9), _kernels.power_table(u, 9), rtol=1e-13
    )
    tables = np.stack([_kernels.legendre_table_numpy(u, 6)] * 2)
    idx = ch.enumerate_indices(2, 6).indices
    np.testing.assert_allclose(
        _kernels.tensor_gather_numpy(tables, idx),
        _kernels.tensor_gather(tables, idx),
        rtol=1e-13,
    )
