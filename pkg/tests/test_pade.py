import warnings

import pytest
from mpmath import mp

from padelab.errors import UnknownKind
from padelab.germs import AlgebraicGerm, CauchyTransform, Density, RationalFunction
from padelab.numkit import Poly, precision
from padelab.pade import (
    Scheme, build_scheme, compute_pade, decay_order, hausdorff_points, interpolation_residual,
    pole_report, row_from_nodes, stabilization,
)
from padelab.surface import Surface


@pytest.mark.parametrize("kind,n,finite,n_inf", [
    ("classical", 3, 0, 6), ("four_corner", 4, 8, 0), ("four_corner", 5, 8, 2),
    ("shifted_corner", 6, 12, 0), ("two_corner", 3, 6, 0),
])
def test_scheme_rows_have_2n_nodes(kind, n, finite, n_inf):
    row = build_scheme(kind, n)
    assert row.size == 2 * n
    assert sum(m for _, m in row.finite) == finite and row.n_inf == n_inf


def test_scheme_aliases_and_unknown():
    assert Scheme("V_*").kind == "four_corner"
    with pytest.raises(UnknownKind):
        Scheme("nonsense")


def test_row_from_nodes_collects_multiplicity():
    row = row_from_nodes([0, 0, "inf", 1])
    assert row.n == 2 and row.n_inf == 1 and dict((complex(v), m) for v, m in row.finite)[0j] == 2
    with pytest.raises(ValueError):
        row_from_nodes([0, 1, 2])


def test_explicit_scheme_rows():
    s = Scheme("explicit", nodes=[0, 1, 2, 3, "inf", "inf"])
    assert s.row(2).size == 4 and s.row(3).n_inf == 2


def test_rational_target_is_reproduced():
    with precision(digits=40):
        f = RationalFunction(Poly([1, 2]), Poly([mp.mpf("0.25"), -1, 1]))
        r = compute_pade(f, "four_corner", 2)
        z = mp.mpc("0.7", "-1.3")
        assert abs(r(z) - f(z)) < mp.mpf(10) ** -30
        assert r.q.degree == 2


def test_interpolation_conditions_hold():
    with precision(digits=64):
        g = AlgebraicGerm(Poly([-1, 0, 0, 0, 1]), 2)
        r = compute_pade(g, "shifted_corner", 6)
        assert interpolation_residual(r, g) < mp.mpf(10) ** -50
        assert decay_order(r, g) >= r.n + 1


def test_pole_report_and_stabilization():
    rep = pole_report([0.5, 2j, 0.01j], [[-1, 1]], 0.05)
    assert rep.n_outliers == 1 and rep.outliers[0] == 2j
    st = stabilization([0, 1, 3j], [0.01, 1.02], 0.05)
    assert st.n_outliers == 1 and st.outliers[0] == 3j
    assert hausdorff_points([0, 1], [0, 1]) == 0


def test_chebyshev_small_n():
    with precision(digits=40):
        f = CauchyTransform(Surface([-1, 1]), Density.const(1))
        r = compute_pade(f, "classical", 3)
        # monic T_3 / 4 = z^3 - 3z/4
        target = [0, mp.mpf(-3) / 4, 0, 1]
        assert max(abs(a - b) for a, b in zip(r.q.coeffs, target)) < mp.mpf(10) ** -30


def test_degenerate_system_warns():
    # an even function sampled symmetrically gives a defective row
    with precision(digits=40):
        g = AlgebraicGerm(Poly([-1, 0, 0, 0, 1]), 2)
        with warnings.catch_warnings(record=True):
            warnings.simplefilter("always")
            r = compute_pade(g, "classical", 3)
        assert r.q.degree <= 3
