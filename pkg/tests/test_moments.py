from math import inf, pi, sqrt

import numpy as np
import pytest

import christoffel as ch
from christoffel import geometry
from christoffel.errors import CapacityError
from christoffel.geometry import AffineMap
from christoffel.moments import DEGREE_CAPS, l_norm


def test_interval_moment():
    eng = ch.MomentEngine(ch.Cube(1))
    assert eng.moment((2,)) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert eng.moment((3,)) == 0.0


def test_disk_moment_polar_oracle():
    from scipy.integrate import dblquad

    oracle, _ = dblquad(
        lambda r, th: r**3 * np.cos(th) ** 2, 0, 2 * pi, 0, 1
    )
    eng = ch.MomentEngine(ch.BallP(2, 2))
    assert eng.moment((2, 0)) == pytest.approx(oracle, rel=1e-10)
    assert oracle == pytest.approx(pi / 4, rel=1e-10)
    assert eng.moment((1, 0)) == 0.0


def test_moment_zero_is_volume():
    for domain in [
        ch.Cube(2),
        ch.BallP(2, 1.5),
        ch.BallP(3, 1),
        ch.BallP(2, inf),
        ch.HalfBall(3),
        ch.ConeDisk(),
        ch.Simplex([[0, 0], [2, 0], [0, 1]]),
        ch.Product([ch.BallP(2, 2), ch.interval(0.0, 1.0)]),
        ch.AffineImage(AffineMap([[1.0, 0.5], [0.0, 1.0]], [0.1, 0.2]), ch.BallP(2, 2)),
    ]:
        eng = ch.MomentEngine(domain)
        assert eng.moment((0,) * domain.dim) == pytest.approx(
            domain.volume(), rel=1e-12
        )


def test_half_ball_one_sided_moment():
    # int_{B+^3} z dV = pi/4 by direct slicing
    eng = ch.MomentEngine(ch.HalfBall(3))
    assert eng.moment((0, 0, 1)) == pytest.approx(pi / 4, rel=1e-13)
    assert eng.moment((1, 0, 0)) == 0.0


def test_exact_vs_sampled_within_four_sigma():
    dom = ch.BallP(3, 1.5)
    exact = ch.MomentEngine(dom)
    sampled = ch.MomentEngine(dom, mode="sampled", samples=2**20, seed=42)
    idx = ch.enumerate_indices(3, 8)
    checked = 0
    for alpha in idx:
        m_exact = exact.moment(alpha)
        m_sampled = sampled.moment(alpha)
        err = sampled.moment_error(alpha)
        if m_exact == 0.0 and err == 0.0:
            continue
        assert abs(m_sampled - m_exact) <= 4 * err + 1e-12
        checked += 1
    assert checked > 100


@pytest.mark.slow
def test_exact_paths_vs_ten_million_point_oracle():
    # run-once oracle across all exact shape paths
    cases = [
        (ch.HalfBall(3), (2, 0, 1)),
        (ch.ConeDisk(), (2, 0, 1)),
        (ch.Simplex([[0, 0], [1.5, 0], [0.5, 1.0]]), (2, 1)),
        (ch.AffineImage(AffineMap([[1.0, 0.4], [-0.3, 0.8]], [0.2, 0.1]),
                        ch.BallP(2, 1.5)), (2, 2)),
        (ch.BallP(2, inf), (4, 2)),
    ]
    total = 10_000_000
    chunk = 1_000_000
    for domain, alpha in cases:
        eng = ch.MomentEngine(domain)
        box = domain.bounding_box()
        widths = box[:, 1] - box[:, 0]
        cell = float(np.prod(widths))
        acc, acc2, count = 0.0, 0.0, 0
        for block in range(total // chunk):
            pts = geometry.sobol_points(chunk, domain.dim, seed=1000 + block)
            pts = box[:, 0] + pts * widths
            vals = np.prod(pts ** np.asarray(alpha, float), axis=1)
            vals = vals * domain.contains(pts)
            acc += float(np.sum(vals))
            acc2 += float(np.sum(vals * vals))
            count += chunk
        mean = acc / count
        var = max(acc2 / count - mean * mean, 0.0)
        est = cell * mean
        se = cell * sqrt(var / count)
        assert eng.moment(alpha) == pytest.approx(est, abs=4 * se)


def test_gram_interval_identity():
    system = ch.assemble_gram(ch.Cube(1), 1)
    np.testing.assert_allclose(system.gram, np.eye(2), atol=1e-14)


def test_gram_ball_monomial():
    system = ch.assemble_gram(ch.BallP(2, 2), 1, basis_kind="monomial")
    np.testing.assert_allclose(
        system.gram, np.diag([pi, pi / 4, pi / 4]), rtol=1e-14, atol=1e-15
    )


def test_gram_scaling_change_of_variables():
    # pure scaling, monomial basis: entries scale by |det T| s^(|k|+|l|)
    base = ch.Cube(2)
    s = 1.7
    image = ch.apply_affine(AffineMap.scaling([s, s]), base)
    g0 = ch.assemble_gram(base, 3, basis_kind="monomial").gram
    g1 = ch.assemble_gram(image, 3, basis_kind="monomial").gram
    idx = ch.enumerate_indices(2, 3)
    degs = np.array([sum(a) for a in idx])
    scale = s**2 * s ** (degs[:, None] + degs[None, :])
    np.testing.assert_allclose(g1, g0 * scale, rtol=1e-12, atol=1e-15)


def test_gram_symmetry_and_factor():
    system = ch.assemble_gram(ch.BallP(2, 1.5), 8)
    g = system.gram
    assert np.max(np.abs(g - g.T)) <= 1e-14 * np.max(np.abs(g))
    # factor reproduces the permuted Gram
    lower = system.factor
    perm = system.piv
    reconstructed = lower @ lower.T
    np.testing.assert_allclose(
        reconstructed, g[np.ix_(perm, perm)],
        atol=system.size * 1e-12 * np.max(np.abs(g)),
    )
    assert not system.degraded


def test_gram_parity_blocks_vanish_on_symmetric_domains():
    system = ch.assemble_gram(ch.BallP(2, 2), 6)
    idx = ch.enumerate_indices(2, 6)
    arr = idx.indices
    for i in range(len(idx)):
        for j in range(len(idx)):
            if np.any((arr[i] + arr[j]) % 2):
                assert abs(system.gram[i, j]) < 1e-13


def test_degraded_flag_without_family():
    # triangle at degree 16: intrinsic condition far past 1e13 in float64
    system = ch.assemble_gram(ch.Simplex([[0, 0], [1, 0], [0, 1]]), 16)
    assert system.degraded
    assert system.mp_cholesky is None
    assert not system.reliable


def test_family_slices_match_direct_assembly():
    dom = ch.BallP(2, 1.5)
    family = ch.GramFamily(dom)
    top = family.system(10)
    direct = ch.assemble_gram(dom, 6)
    sliced = family.system(6)
    np.testing.assert_allclose(sliced.gram, direct.gram, rtol=1e-15, atol=1e-18)
    assert top.degree == 10


def test_family_extended_rescue():
    dom = ch.Simplex([[0, 0], [1, 0], [0, 1]])
    family = ch.GramFamily(dom)
    system = family.system(16)
    assert system.degraded and system.mp_cholesky is not None
    assert system.reliable and system.precision == "extended"
    ev = ch.ChristoffelEvaluator(system)
    # extended vs float64 disagree exactly where float64 has collapsed
    vertex_val = ev.christoffel_at(np.array([0.0, 1.0]))
    assert vertex_val > ev._christoffel_f64(np.array([0.0, 1.0]))


def test_degree_caps():
    with pytest.raises(CapacityError):
        ch.assemble_gram(ch.Cube(2), DEGREE_CAPS[2] + 1)
    with pytest.raises(CapacityError):
        ch.GramFamily(ch.Cube(3)).system(DEGREE_CAPS[3] + 1)


def test_affine_expansion_cap():
    dom = ch.AffineImage(AffineMap([[1.0, 0.2], [0.0, 1.0]], [0.0, 0.0]), ch.Cube(2))
    eng = ch.MomentEngine(dom)
    with pytest.raises(CapacityError):
        eng.moment((40, 30))


def test_gauss_box_mode_rejects_non_boxes():
    with pytest.raises(ValueError):
        ch.assemble_gram(ch.BallP(2, 2), 4, mode="gauss-box")


def test_l_norm_constant_and_parseval(rng):
    dom = ch.BallP(2, 2)
    system = ch.assemble_gram(dom, 4)
    coeffs = np.zeros(system.size)
    coeffs[0] = 3.0  # constant c = 3 / sqrt(Vol)
    c_val = 3.0 * ch.eval_basis(system.basis, np.zeros((1, 2)))[0, 0]
    expected = abs(c_val) * sqrt(dom.volume())
    assert float(l_norm(system, coeffs, 2)) == pytest.approx(expected, rel=1e-12)
    for _ in range(10):
        a = rng.standard_normal(system.size)
        assert float(l_norm(system, a, 2)) ** 2 == pytest.approx(
            float(a @ system.gram @ a), rel=1e-12
        )


def test_l_norm_unit_gram_vector():
    system = ch.assemble_gram(ch.BallP(2, 2), 4)
    a = np.zeros(system.size)
    a[3] = 1.0
    a = a / float(l_norm(system, a, 2))
    assert float(l_norm(system, a, 2)) == pytest.approx(1.0, rel=1e-13)


def test_l_norm_sup_is_lower_estimate():
    dom = ch.Cube(1)
    system = ch.assemble_gram(dom, 5)
    ev = ch.ChristoffelEvaluator(system)
    f = ev.extremal_polynomial(np.array([1.0]))
    res = l_norm(system, f, np.inf)
    assert res.kind == "lower-estimate"
    # extremal polynomial peaks at x = 1 with value 1
    assert res.value == pytest.approx(1.0, rel=1e-9)


def test_l_norm_sampled_p4():
    dom = ch.Cube(1)
    system = ch.assemble_gram(dom, 3)
    coeffs = np.zeros(system.size)
    coeffs[0] = 1.0 / ch.eval_basis(system.basis, np.zeros((1, 1)))[0, 0]
    res = l_norm(system, coeffs, 4.0, seed=3)
    # |f| = 1, so the L4 norm is Vol^(1/4)
    assert res.value == pytest.approx(2.0 ** 0.25, rel=1e-3)
    assert res.kind == "sampled"


def test_export_gram_csv(tmp_path):
    from christoffel.moments import export_gram_csv

    system = ch.assemble_gram(ch.Cube(1), 2)
    path = tmp_path / "gram.csv"
    export_gram_csv(system, path)
    rows = path.read_text().strip().splitlines()
    assert len(rows) == system.size
    back = np.array([[float(v) for v in row.split(",")] for row in rows])
    np.testing.assert_allclose(back, system.gram, atol=1e-16)
