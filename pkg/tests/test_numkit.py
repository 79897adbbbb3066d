import random

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from padelab.errors import ZeroPolynomial
from padelab.numkit import (
    Line, Path, Poly, digits_to_bits, precision, poly_roots, quad_path, quad_tol, solve_linear, to_mpc,
    tolerance_override, tolerances,
)


def test_precision_context_restores():
    before = mp.prec
    with precision(digits=50):
        assert mp.prec == digits_to_bits(50) and mp.prec >= 50 * 3.32
    assert mp.prec == before


def test_tolerance_override_scoped():
    with precision(digits=40):
        default = quad_tol()
        with tolerances(quad_tol="1e-20", jip_tol=None):
            assert quad_tol() == mp.mpf("1e-20")
            assert tolerance_override("jip_tol") is None
        assert quad_tol() == default


def test_to_mpc_accepts_strings_and_pairs():
    assert to_mpc("1+2j") == mp.mpc(1, 2)
    assert to_mpc(3) == mp.mpc(3)


def test_poly_arithmetic():
    p = Poly([1, 2])
    q = Poly([-1, 0, 1])
    assert (p * q).degree == 3
    assert (q - q).degree == -1
    quo, rem = q.divmod(Poly([-1, 1]))
    assert rem.degree == -1 and quo == Poly([1, 1])
    assert (p ** 3)(2) == 125


def test_poly_roots_multiplicity():
    with precision(digits=40):
        p = Poly.from_roots([1, 1, 1, -2, mp.mpc(0, 3)])
        roots = poly_roots(p)
        assert sum(m for _, m in roots) == 5
        mult = {complex(r).real.__round__(6): m for r, m in roots if abs(mp.im(r)) < 1e-10}
        assert mult[1.0] == 3


def test_poly_roots_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        poly_roots(Poly([]))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8))
def test_poly_roots_recover_simple_roots(rs):
    # keep roots well separated so the cluster merge does not apply
    sep = [r for i, r in enumerate(rs) if all(abs(r - s) > 0.1 for s in rs[:i])]
    with precision(digits=40):
        found = [complex(r) for r, _ in poly_roots(Poly.from_roots(sep))]
        for r in sep:
            assert min(abs(r - f) for f in found) < 1e-20


def test_solve_linear_square_and_lstsq():
    with precision(digits=40):
        rng = random.Random(4)
        A = [[mp.mpf(rng.uniform(-1, 1)) for _ in range(5)] for _ in range(5)]
        x = [mp.mpf(rng.uniform(-1, 1)) for _ in range(5)]
        b = [mp.fsum(a * t for a, t in zip(row, x)) for row in A]
        got = solve_linear(A, b)
        assert max(abs(g - t) for g, t in zip(got, x)) < mp.mpf(10) ** -35
        # overdetermined consistent system
        A2 = A + [[mp.mpf(1)] * 5]
        b2 = b + [mp.fsum(x)]
        got2 = solve_linear(A2, b2)
        assert max(abs(g - t) for g, t in zip(got2, x)) < mp.mpf(10) ** -30


def test_quadrature_polyline_and_circle():
    with precision(digits=40):
        val = quad_path(lambda z: z ** 2, Path.polyline([0, 1, mp.mpc(1, 1)]))
        assert abs(val - mp.mpc(1, 1) ** 3 / 3) < mp.mpf(10) ** -30
        res = quad_path(lambda z: 1 / z, Path.circle(0, 1))
        assert abs(res - 2j * mp.pi) < mp.mpf(10) ** -30


def test_quadrature_endpoint_singularity():
    with precision(digits=40):
        val = quad_path(lambda t: 1 / mp.sqrt(1 - t * t), Line(-1, 1, sing_start=True, sing_end=True))
        assert abs(val - mp.pi) < mp.mpf(10) ** -18
