import numpy as np
import pytest

import christoffel as ch


def make_triangle():
    return ch.Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def make_cylinder():
    return ch.Product([ch.BallP(2, 2), ch.interval(0.0, 1.0)])


D2_DEGREES = list(range(4, 25, 2))
D3_DEGREES = list(range(4, 15))

SIGMA_CASES = {
    "ball2_2": (lambda: ch.BallP(2, 2), D2_DEGREES, 3.0),
    "cube2": (lambda: ch.Cube(2), D2_DEGREES, 4.0),
    "ball2_1": (lambda: ch.BallP(2, 1), D2_DEGREES, 4.0),
    "ball2_1.5": (lambda: ch.BallP(2, 1.5), D2_DEGREES, 10.0 / 3.0),
    "half_disk": (lambda: ch.HalfBall(2), D2_DEGREES, 4.0),
    "triangle": (make_triangle, D2_DEGREES, 4.0),
    "ball3_2": (lambda: ch.BallP(3, 2), D3_DEGREES, 4.0),
    "half_ball3": (lambda: ch.HalfBall(3), D3_DEGREES, 5.0),
    "cylinder": (make_cylinder, D3_DEGREES, 5.0),
}


class SigmaSuite:
    """Lazily computed sigma sweeps shared across the whole test session."""

    def __init__(self):
        self._cache = {}

    def entry(self, name):
        if name not in self._cache:
            build, degrees, reference = SIGMA_CASES[name]
            domain = build()
            family = ch.GramFamily(domain)
            sweep = ch.max_over_degrees(domain, degrees, family=family)
            estimate = ch.fit_sigma(domain, degrees, sweep=sweep)
            self._cache[name] = {
                "domain": domain,
                "degrees": degrees,
                "reference": reference,
                "family": family,
                "sweep": sweep,
                "estimate": estimate,
            }
        return self._cache[name]


@pytest.fixture(scope="session")
def sigma_suite():
    return SigmaSuite()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
