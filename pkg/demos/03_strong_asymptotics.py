"""Szegő-type asymptotics of Padé denominators on a single interval.

For rho(t) = exp(t) on [-1, 1] we build gamma_n Psi_n from its Green
function, Cauchy integral and normalising constants, and compare it with
q_n on the circle |z| = 3.  The discrepancy shrinks quickly with n.
"""

from padelab.germs import CauchyTransform, Density
from padelab.numkit import precision
from padelab.pade import build_scheme, compute_pade
from padelab.surface import Surface
from padelab.szego import boundary_audit, build_bundle, sa_discrepancy_on_circle

with precision(digits=40):
    S = Surface([-1, 1])
    rho = Density.exp_poly([0, 1])
    f = CauchyTransform(S, rho)
    for n in (4, 8, 12):
        row = build_scheme("classical", n)
        b = build_bundle(S, rho, row)
        d = sa_discrepancy_on_circle(b, compute_pade(f, row).q, 0, 3, 32)
        print(f"n={n:2d}: max |q_n/(gamma_n Psi_n) - 1| on |z|=3 = {float(d):.2e}")
    print(f"boundary relation defect at n=12: {float(boundary_audit(b, 3)):.1e}")
