import pytest
from mpmath import mp

from padelab.germs import AlgebraicGerm, CauchyTransform, Density, RationalFunction
from padelab.errors import DensityVanishes, NodeOnSingularity
from padelab.numkit import Poly, precision
from padelab.surface import Surface


@pytest.fixture
def cross_germ():
    return AlgebraicGerm(Poly([-1, 0, 0, 0, 1]), 2)


def test_germ_value_on_real_axis(cross_germ):
    with precision(digits=40):
        assert abs(cross_germ(2) - 1 / mp.sqrt(15)) < mp.mpf(10) ** -35


def test_germ_continuation_is_single_valued_off_cuts(cross_germ):
    with precision(digits=40):
        z = mp.mpc("0.3", "0.2")
        v = cross_germ(z)
        assert abs(v ** 2 * (z ** 4 - 1) - 1) < mp.mpf(10) ** -30


def test_germ_taylor_matches_difference_quotient(cross_germ):
    with precision(digits=40):
        z = mp.mpc("0.3", "0.2")
        c = cross_germ.taylor(z, 3)
        h = mp.mpf(10) ** -12
        fd = (cross_germ(z + h) - cross_germ(z - h)) / (2 * h)
        assert abs(c[1] - fd) < mp.mpf(10) ** -15


def test_germ_laurent_leading_term(cross_germ):
    s0, c = cross_germ.laurent_at_infinity(4)
    assert s0 == 2 and abs(c[0] - 1) < 1e-30


def test_germ_rejects_bad_degree():
    with pytest.raises(ValueError):
        AlgebraicGerm(Poly([-1, 0, 0, 1]), 2)


def test_cauchy_transform_closed_form():
    with precision(digits=40):
        S = Surface([-1, 1])
        f = CauchyTransform(S, Density.const(1))
        # constant density on [-1, 1]: 1 / (2 sqrt(z^2 - 1))
        assert abs(abs(f(2)) - 1 / (2 * mp.sqrt(3))) < mp.mpf(10) ** -30


def test_density_vanishing_rejected():
    S = Surface([-1, 1])
    with pytest.raises(DensityVanishes):
        CauchyTransform(S, Density("poly", [0, 1]))


def test_rational_target_node_on_pole():
    r = RationalFunction(Poly([1]), Poly([0, 1]))
    with pytest.raises(NodeOnSingularity):
        r.taylor(0, 2)
