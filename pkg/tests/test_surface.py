import random

import pytest
from mpmath import mp

from padelab.errors import CutEndpointMismatch, DuplicateBranchPoint, Singularity
from padelab.numkit import precision
from padelab.surface import Surface, SurfacePoint
from padelab.surface.contour import check_symmetry, trace_contour

P = SurfacePoint


@pytest.fixture(scope="module")
def cross():
    with precision(digits=40):
        return Surface([-1, 1, "-1j", "1j"])


def test_duplicate_branch_points_rejected():
    with pytest.raises(DuplicateBranchPoint):
        Surface([1, 1, 2, 3])


def test_cut_endpoint_mismatch():
    with pytest.raises(CutEndpointMismatch):
        Surface([-1, 1, 2, 3], cuts=[[-1, 1], [1, 3]])


def test_period_matrix_symmetric_positive(cross):
    with precision(digits=40):
        B = cross.B
        assert abs(B[0][0] - mp.mpc(0, 1)) < mp.mpf(10) ** -25 or mp.im(B[0][0]) > 0
        assert cross.period_diagnostics["symmetry_defect"] < mp.mpf(10) ** -20


def test_abel_map_antisymmetric_under_involution(cross):
    with precision(digits=40):
        rng = random.Random(0)
        for _ in range(3):
            z = mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if cross.cuts.nearest_cut_distance(complex(z)) < 0.1:
                continue
            s = [a + b for a, b in zip(cross.abel(P(z)), cross.abel(P(z, 1)))]
            assert cross.lattice_distance(s) < mp.mpf(10) ** -20


def test_green_genus0_closed_form():
    with precision(digits=40):
        S = Surface([-1, 1])
        got = S.green(P(2), P.infinity(0))
        assert abs(got - mp.log(2 + mp.sqrt(3))) < mp.mpf(10) ** -25
        assert S.green(P(S.e0), P(mp.mpc("0.3", "0.2"))) == 0


def test_green_singular_at_pole(cross):
    with pytest.raises(Singularity):
        cross.green(P(mp.mpc("0.5", "0.5")), P(mp.mpc("0.5", "0.5")))


def test_trace_contour_of_interval_is_interval():
    with precision(digits=40):
        tc = trace_contour(Surface([-1, 1]))
        assert tc.distance_to([(-1, 1)]) < 1e-10


def test_symmetry_classical_interval():
    with precision(digits=40):
        rep = check_symmetry(Surface([-1, 1]), "classical", [2, 4])
        assert rep.cut_bound < 1e-20 and rep.divergent
