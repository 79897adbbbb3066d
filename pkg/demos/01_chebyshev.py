"""Classical Padé denominators of the arcsine Cauchy transform are Chebyshev polynomials.

With all interpolation nodes at infinity and the constant density on [-1, 1],
the denominator q_n is the monic Chebyshev polynomial T_n / 2^(n-1).
"""

from mpmath import mp

from padelab.germs import CauchyTransform, Density
from padelab.numkit import precision
from padelab.pade import compute_pade
from padelab.surface import Surface

with precision(digits=40):
    f = CauchyTransform(Surface([-1, 1]), Density.const(1))
    for n in (2, 5, 8):
        q = compute_pade(f, "classical", n).q
        cheb = mp.chebyt(n, mp.mpf("0.3")) / 2 ** (n - 1)
        print(f"n={n}: q_n(0.3) = {mp.nstr(mp.re(q(mp.mpf('0.3'))), 15)}   "
              f"T_n(0.3)/2^(n-1) = {mp.nstr(cheb, 15)}")
