"""The moving divisor on a genus-one surface.

On two intervals [-2, -1] ∪ [1, 2] with rho(t) = exp(t), the asymptotics of
q_n involve one extra point D_n on the surface, found by Jacobi inversion.
For this density it alternates between two mirror points on opposite sheets.
"""

from mpmath import mp

from padelab.germs import Density
from padelab.numkit import precision
from padelab.pade import build_scheme
from padelab.surface import Surface
from padelab.szego import build_bundle

with precision(digits=40):
    S = Surface([-2, -1, 1, 2])
    print("period matrix B =", mp.nstr(S.B[0][0], 12))
    rho = Density.exp_poly([0, 1])
    for n in (5, 6, 7, 8):
        b = build_bundle(S, rho, build_scheme("classical", n), upsilon=False)
        p = b.D.expanded()[0]
        where = "infinity" if p.is_infinite else mp.nstr(p.z, 8)
        print(f"n={n}: D_n = {where} on sheet {p.sheet}, inversion residual "
              f"{float(b.diagnostics['jip_residual']):.1e}")
