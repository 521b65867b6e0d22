"""Shared polynomials and settings for the test suites"""

from pathlib import Path

import pytest

from milnor_linear import MilnorSettings
from nondegeneracy import NondegeneracySettings, load_local_data
from symbolic_poly import Polynomial, parse

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

SURFACE221 = "7*z3^6+5*z1*z3^4+12*z2*z3^4-8*z1^2*z3^2+6*z2^2*z3^2+4*z1^3+z2^3"
SURFACE221_CHART = ((2, 2, 1), (1, 1, 1), (1, 0, 0))
# (z1^2 + 2 z2^2 - z3^2)(2 z1^2 + z2^2 - z3^2): four nodes at [1:+-1:+-sqrt(3)]
CONIC_PAIR = "2*z1^4+5*z1^2*z2^2+2*z2^4-3*z1^2*z3^2-3*z2^2*z3^2+z3^4"
CONIC_PAIR_CHART = ((1, 1, 1), (0, 1, 0), (0, 0, 1))


def _z(i):
    return Polynomial.variable(3, i)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def surface221():
    return parse(SURFACE221, 3)


@pytest.fixture
def surface221_local():
    """Shear a = x2 + 2 x3 at the single singular point of E(2,2,1)"""
    payload = [{
        "chart": [list(g) for g in SURFACE221_CHART],
        "point": ["-1/2", "-1/4"],
        "mu": 2,
        "change": ["z1+2*z2", "z2"],
    }]
    return load_local_data(payload, 3)


@pytest.fixture
def conic_pair():
    return parse(CONIC_PAIR, 3)


@pytest.fixture
def conic_pair_local():
    """Milnor numbers of the four irrational nodes, without coordinates"""
    payload = [{"chart": [list(g) for g in CONIC_PAIR_CHART], "mu": 1} for _ in range(4)]
    return load_local_data(payload, 3)


@pytest.fixture
def nodal_cubic():
    """Irreducible cubic with one node at [1:1:1]"""
    z1, z2, z3 = _z(1), _z(2), _z(3)
    return z3 * (z1 - z3) * (z2 - z3) + (z1 - z3) ** 3 + (z2 - z3) ** 3


@pytest.fixture
def line_conic():
    """Line plus conic: two nodes, at [1:1:1] and [3:1:2]"""
    z1, z2, z3 = _z(1), _z(2), _z(3)
    return (z1 + z2 - 2 * z3) * (z1 * z1 + z2 * z2 - z3 * z3 - z1 * z3)


@pytest.fixture
def cusp():
    return parse("z1^2+z2^3", 2)


@pytest.fixture
def cuspidal_cubic():
    """Cuspidal plane cubic y^2 z - x^3 as a homogeneous cone in 3 variables"""
    return parse("z2^2*z3-z1^3", 3)


@pytest.fixture
def milnor_settings():
    return MilnorSettings(trials=5, max_trials=12, seed=11)


@pytest.fixture
def nd_settings():
    return NondegeneracySettings(seed=3)
