import random

import pytest
from mpmath import mp

from padelab.numkit import precision
from padelab.surface import Divisor, Surface, SurfacePoint
from padelab.thetajip import (
    JacobiInverter, ThetaContext, riemann_constants, theta, theta_direct, theta_period_factor,
)


def test_theta_genus1_against_box_sum():
    with precision(digits=40):
        ctx = ThetaContext([[mp.mpc(0, 1)]])
        u = [mp.mpc("0.2", "0.1")]
        assert abs(theta(ctx, u) - theta_direct([[mp.mpc(0, 1)]], u, 30)) < mp.mpf(10) ** -35


def test_theta_quasi_periodicity_genus2():
    with precision(digits=40):
        B = [[mp.mpc("0.3", "1.2"), mp.mpc("0.1", "0.4")], [mp.mpc("0.1", "0.4"), mp.mpc("-0.2", "0.9")]]
        ctx = ThetaContext(B)
        rng = random.Random(1)
        for _ in range(5):
            u = [mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(2)]
            m = [rng.randint(-2, 2) for _ in range(2)]
            j = [rng.randint(-2, 2) for _ in range(2)]
            up = [u[i] + j[i] + mp.fsum(B[i][k] * m[k] for k in range(2)) for i in range(2)]
            lhs, rhs = theta(ctx, up), theta_period_factor(B, u, m) * theta(ctx, u)
            assert abs(lhs - rhs) <= mp.mpf(10) ** -30 * max(abs(lhs), 1)


def test_theta_genus0_is_one():
    assert theta(ThetaContext([]), []) == 1


@pytest.fixture(scope="module")
def genus1():
    with precision(digits=40):
        S = Surface([-1, 1, "-1j", "1j"])
        return S, JacobiInverter(S)


@pytest.mark.parametrize("p", [SurfacePoint(mp.mpc("0.7", "0.9"), 1), SurfacePoint(mp.mpc("-1.3", "0.2"), 0)])
def test_jacobi_round_trip_genus1(genus1, p):
    S, inv = genus1
    with precision(digits=40):
        res = inv.solve(S.abel_point(p))
        got = res.divisor.expanded()
        assert len(got) == 1 and got[0].distance(p) < 1e-15
        assert res.unique
        assert isinstance(res.as_dict()["points"], list)


def test_jacobi_infinity(genus1):
    S, inv = genus1
    with precision(digits=40):
        res = inv.solve(S.abel_point(SurfacePoint.infinity(1)))
        assert res.divisor.expanded()[0].is_infinite


def test_riemann_constants_calibrated(genus1):
    S, _ = genus1
    with precision(digits=40):
        K = riemann_constants(S)
        assert len(K) == 1
        assert S._riemann_score < 1e-20
