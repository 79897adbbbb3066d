"""Poles of multipoint Padé approximants of (z^4 - 1)^(-1/2) and (z^4 - 1)^(-1/4).

Interpolating at the four corners ±1 ± i makes the cross [-1, 1] ∪ [-i, i]
the symmetric contour, and the poles line up along it.  With two of the
corners only, the attracting contour moves and two stray poles show up for
the quartic root.
"""

import os
import sys

from padelab import svg
from padelab.germs import AlgebraicGerm
from padelab.numkit import Poly, precision
from padelab.pade import compute_pade, pole_report, stabilization

out = sys.argv[1] if len(sys.argv) > 1 else "demo-out"
os.makedirs(out, exist_ok=True)
cross = [[-1, 1], ["-1j", "1j"]]

with precision(digits=64):
    for k, n in ((2, 34), (4, 36)):
        g = AlgebraicGerm(Poly([-1, 0, 0, 0, 1]), k)
        r = compute_pade(g, "four_corner", n)
        rep = pole_report(r, cross)
        print(f"k={k}, n={n}, four corners: {rep.n_outliers} poles farther than 0.05 from the cross")
        svg.write(os.path.join(out, f"cross_k{k}.svg"), polylines=[[-1, 1], [-1j, 1j]],
                  points=r.pole_points, crosses=[v for v, _ in r.row.finite], title=f"k={k}, n={n}")

    g = AlgebraicGerm(Poly([-1, 0, 0, 0, 1]), 4)
    st = stabilization(compute_pade(g, "two_corner", 34), compute_pade(g, "two_corner", 32))
    print("two corners, k=4: poles that do not stabilise from n=32 to n=34:",
          [complex(round(z.real, 4), round(z.imag, 4)) for z in st.outliers])
