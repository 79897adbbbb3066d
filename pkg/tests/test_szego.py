import pytest
from mpmath import mp

from padelab.errors import ConditionEViolated, TooCloseToCut
from padelab.germs import CauchyTransform, Density
from padelab.numkit import precision
from padelab.pade import build_scheme, compute_pade
from padelab.surface import Surface, SurfacePoint
from padelab.szego import (
    boundary_audit, build_bundle, divisor_audit, predict_SA, sa_discrepancy_on_circle,
)


@pytest.fixture(scope="module")
def genus0():
    with precision(digits=40):
        S = Surface([-1, 1])
        rho = Density.exp_poly([0, 1])
        f = CauchyTransform(S, rho)
        out = {}
        for n in (4, 6):
            row = build_scheme("classical", n)
            out[n] = (compute_pade(f, row), build_bundle(S, rho, row))
        return S, rho, out


def test_boundary_relation(genus0):
    _, _, out = genus0
    with precision(digits=40):
        assert boundary_audit(out[4][1], 3) < mp.mpf(10) ** -20


def test_divisor_windings(genus0):
    _, _, out = genus0
    with precision(digits=40):
        d = divisor_audit(out[4][1])
        assert d["inf0"] == d["expected_inf0"] and d["inf1"] == d["expected_inf1"]


def test_normalization_constants(genus0):
    _, _, out = genus0
    b = out[4][1]
    assert abs(abs(b.gamma * b.gamma_star) - 0.5) < 1e-20


def test_discrepancy_decreases(genus0):
    _, _, out = genus0
    with precision(digits=40):
        d4 = sa_discrepancy_on_circle(out[4][1], out[4][0].q, 0, 3, 16)
        d6 = sa_discrepancy_on_circle(out[6][1], out[6][0].q, 0, 3, 16)
        assert d6 < d4 < 1e-3


def test_prediction_rejects_points_on_cut(genus0):
    _, _, out = genus0
    with precision(digits=40):
        with pytest.raises(TooCloseToCut):
            predict_SA(out[4][1], mp.mpf("0.2"))
        p0, p1 = predict_SA(out[4][1], mp.mpc(0, 2))
        assert abs(p0) > abs(p1)


def test_as_dict_is_json_ready(genus0):
    import json

    _, _, out = genus0
    json.dumps(out[4][1].as_dict())


def test_symmetric_genus1_degenerates_for_odd_n():
    with precision(digits=40):
        S = Surface([-2, -1, 1, 2])
        rho = Density.const(1)
        with pytest.raises(ConditionEViolated):
            build_bundle(S, rho, build_scheme("classical", 5))
        b = build_bundle(S, rho, build_scheme("classical", 6))
        assert b.diagnostics["jip_residual"] < 1e-15
        assert boundary_audit(b, 2) < mp.mpf(10) ** -15
        assert b.D.degree == 1 and isinstance(b.D.expanded()[0], SurfacePoint)
