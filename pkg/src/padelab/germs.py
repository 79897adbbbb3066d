"""Functions to approximate: algebraic germs and Cauchy transforms.

Every target exposes the same small interface used by the Padé solver:

``f(z)``
    value (branch fixed by the target's own rule),
``taylor(v, m, scale)``
    coefficients ``c_j`` with ``f(v + scale*u) = sum c_j u^j``, ``j < m``,
``laurent_at_infinity(m, center, scale)``
    ``(s0, c)`` with ``f(center + scale*zeta) = sum c_j zeta^(-s0-j)``.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from mpmath import mp

from .errors import DensityVanishes, NodeOnSingularity, PathThroughBranchPoint, PointOnCut
from .numkit import Line, Path, Poly, poly_roots, quad_segment, to_mpc


def series_power(a: Sequence, alpha, b0, m: int) -> list:
    """First ``m`` coefficients of ``(sum a_j u^j)^alpha`` given ``b_0``.

    Uses ``j a_0 b_j = sum_{i=1}^{j} ((alpha+1) i - j) a_i b_{j-i}``.
    """
    a = list(a) + [mp.mpc(0)] * max(0, m - len(a))
    b = [to_mpc(b0)]
    a0 = a[0]
    for j in range(1, m):
        s = mp.mpc(0)
        for i in range(1, j + 1):
            if a[i] != 0:
                s += ((alpha + 1) * i - j) * a[i] * b[j - i]
        b.append(s / (j * a0))
    return b[:m]


class AlgebraicGerm:
    """Branch of ``P(z)^(-1/k)`` continued analytically from infinity.

    Parameters
    ----------
    P : Poly
        Base polynomial; ``k`` must divide its degree so that infinity is
        not a branch point.
    k : int
        Root order (``>= 2``).
    branch : int
        Selects ``f(z) ~ exp(-(Log lead + 2 pi i branch)/k) z^(-deg P / k)``.
    """

    def __init__(self, P: Poly, k: int, branch: int = 0):
        if not isinstance(P, Poly):
            P = Poly(P)
        if k < 2:
            raise ValueError("k must be at least 2")
        if P.degree < 1 or P.degree % k:
            raise ValueError("deg P must be a positive multiple of k")
        self.P, self.k, self.branch = P, int(k), int(branch)
        self.alpha = mp.mpf(-1) / k
        self.s0 = P.degree // k
        lead = P.lead
        self.c_inf = mp.exp(-(mp.log(lead) + 2j * mp.pi * branch) / k)
        self.R0 = max(mp.mpf(1), 2 * mp.fsum(abs(c / lead) for c in P.coeffs[:-1]))

    @property
    def roots(self):
        if getattr(self, "_roots", None) is None or self._roots[0] != mp.prec:
            self._roots = (mp.prec, [r for r, _ in poly_roots(self.P)])
        return self._roots[1]

    def __repr__(self):
        return f"AlgebraicGerm({self.P!r}, k={self.k})"

    def _near_inf(self, z):
        P = self.P
        d = P.degree
        ratio = P(z) / (P.lead * z ** d)
        return self.c_inf * z ** (-self.s0) * ratio ** self.alpha

    def __call__(self, z, via=None):
        return eval_germ(self, z, via)

    def taylor(self, v, m: int, scale=1, via=None) -> list:
        v = to_mpc(v)
        f0 = self(v, via)
        Pt = self.P.compose_affine(v, scale)
        if Pt.coeffs[0] == 0:
            raise NodeOnSingularity("node at a root of P")
        return series_power(Pt.coeffs, self.alpha, f0, m)

    def laurent_at_infinity(self, m: int, center=0, scale=1):
        Q = self.P.compose_affine(center, scale)
        d = Q.degree
        a = [Q.coeffs[d - i] / Q.lead for i in range(d + 1)]
        b = series_power(a, self.alpha, 1, m)
        # leading constant relative to zeta: z ~ scale*zeta
        lead = self.c_inf * to_mpc(scale) ** (-self.s0)
        return self.s0, [lead * t for t in b]


def _path_points(via) -> list:
    if isinstance(via, Path):
        pts = [via.segments[0].start] + [s.end for s in via.segments]
        return [to_mpc(p) for p in pts]
    return [to_mpc(p) for p in via]


def eval_germ(g: AlgebraicGerm, z, via=None):
    """Value of the germ at ``z`` continued along ``via``.

    ``via`` is a :class:`Path` or list of points whose first point lies in
    the disc-free region ``|z| >= R0`` around infinity where the reference
    branch is explicit; by default the radial segment from that region.
    """
    z = to_mpc(z)
    if via is None:
        if abs(z) >= g.R0:
            return g._near_inf(z)
        start = z * (g.R0 * mp.mpf("1.01") / abs(z)) if z != 0 else mp.mpc(g.R0 * mp.mpf("1.01"))
        pts = [start, z]
    else:
        pts = _path_points(via)
        if abs(pts[-1] - z) > mp.mpf(10) ** -20 * max(1, abs(z)):
            pts.append(z)
    if abs(pts[0]) < g.R0:
        raise ValueError("path must start in the region |z| >= R0 around infinity")
    roots = g.roots
    cur = pts[0]
    val = g._near_inf(cur)
    Pcur = g.P(cur)
    tiny = mp.mpf(10) ** -20
    for nxt in pts[1:]:
        a = cur
        while True:
            dmin = min(abs(a - r) for r in roots)
            if dmin < tiny:
                raise PathThroughBranchPoint("path passes through a root of P")
            rem = abs(nxt - a)
            if rem == 0:
                break
            step = min(rem, dmin / 4)
            b = nxt if step >= rem else a + (nxt - a) * (step / rem)
            # segment must not pass close to a root in between
            Pb = g.P(b)
            val = val * mp.exp(g.alpha * mp.log(Pb / Pcur))
            Pcur = Pb
            a = b
            if b == nxt:
                break
        cur = nxt
    return val


# ---------------------------------------------------------------------------
# densities and Cauchy transforms
# ---------------------------------------------------------------------------

class Density:
    """Non-vanishing density on the cut system.

    ``kind`` is ``"const"``, ``"poly"``, ``"exppoly"`` (``exp`` of a
    polynomial) or ``"callback"``.  ``log`` returns a continuous
    determination of ``log rho`` (exact for ``const`` and ``exppoly``).
    """

    def __init__(self, kind: str, params=(), fn: Callable | None = None, logfn: Callable | None = None):
        self.kind = kind
        self.params = [to_mpc(p) for p in params]
        if kind == "const":
            c = self.params[0]
            if c == 0:
                raise DensityVanishes("constant density is zero")
            self._f = lambda t: c
            lc = mp.log(c)
            self._log = lambda t: lc
        elif kind == "poly":
            P = Poly(self.params)
            self.poly = P
            self._f = P
            self._log = lambda t: mp.log(P(t))
        elif kind == "exppoly":
            Q = Poly(self.params)
            self.poly = Q
            self._f = lambda t: mp.exp(Q(t))
            self._log = Q
        elif kind == "callback":
            if fn is None:
                raise ValueError("callback density needs fn")
            self._f = fn
            self._log = logfn or (lambda t: mp.log(fn(t)))
        else:
            raise ValueError(f"unknown density kind {kind!r}")

    @classmethod
    def const(cls, c=1) -> "Density":
        return cls("const", [c])

    @classmethod
    def exp_poly(cls, coeffs) -> "Density":
        return cls("exppoly", coeffs)

    @property
    def is_trivial(self) -> bool:
        return self.kind == "const" and self.params[0] == 1

    def __call__(self, t):
        return self._f(t)

    def log(self, t):
        return self._log(t)

    def validate(self, cuts, samples: int = 64) -> None:
        """Check non-vanishing and continuity of ``log`` along each arc."""
        for arc in cuts.arcs:
            prev = None
            for k in range(arc.nseg):
                a, b = arc.segment(k)
                for j in range(samples + 1):
                    t = a + (b - a) * mp.mpf(j) / samples
                    r = self(t)
                    if abs(r) < mp.mpf(10) ** -30:
                        raise DensityVanishes("density vanishes on the cut system")
                    lv = self.log(t)
                    if prev is not None and abs(lv - prev) > 1:
                        raise DensityVanishes("log of the density is not continuous on the arc")
                    prev = lv

    def __repr__(self):
        return f"Density({self.kind}, {[mp.nstr(p, 6) for p in self.params]})"


def _raw_legs(cuts):
    """Arc pieces split at crossings, with the raw sheet-0 ``w_+``."""
    out = []
    for ai, arc in enumerate(cuts.arcs):
        cross = {}
        for c in cuts.crossings:
            if c.arc_a == ai:
                cross.setdefault(c.seg_a, []).append(c.t_a)
            if c.arc_b == ai:
                cross.setdefault(c.seg_b, []).append(c.t_b)
        for k in range(arc.nseg):
            a, b = arc.segment(k)
            ts = [mp.mpf(0)] + [mp.mpf(t) for t in sorted(cross.get(k, []))] + [mp.mpf(1)]
            for j in range(len(ts) - 1):
                seg = Line(a + (b - a) * ts[j], a + (b - a) * ts[j + 1],
                           sing_start=(k == 0 and j == 0),
                           sing_end=(k == arc.nseg - 1 and j == len(ts) - 2))

                def wp(t, ai=ai, k=k):
                    return cuts.w(t, on=(ai, k, 1))
                out.append((seg, wp))
    return out


def integrate_over_cuts(cuts, F: Callable, order=None):
    """``sum over arcs of int F(t, w_+(t)) dt`` (vector valued ``F`` allowed)."""
    total = None
    for seg, wp in _raw_legs(cuts):
        val, _ = quad_segment(lambda t: F(t, wp(t)), seg, order=order)
        vv = val if isinstance(val, list) else [val]
        total = vv if total is None else [x + y for x, y in zip(total, vv)]
    return total


class CauchyTransform:
    """``f_rho(z) = (1/2 pi i) int rho(t) / (t - z) dt / w_+(t)`` over the cuts."""

    def __init__(self, cuts, density: Density, order=None):
        if hasattr(cuts, "cuts"):
            cuts = cuts.cuts  # a Surface
        self.cuts = cuts
        self.rho = density
        self.order = order
        density.validate(cuts)

    def __repr__(self):
        return f"CauchyTransform({self.rho!r})"

    def _check(self, z):
        if self.cuts.locate(z, mp.mpf(10) ** -25 * self.cuts.scale) is not None:
            raise PointOnCut("Cauchy transform evaluated on the cut system")

    def __call__(self, z, via=None):
        z = to_mpc(z)
        self._check(z)
        rho = self.rho
        val = integrate_over_cuts(self.cuts, lambda t, wp: rho(t) / ((t - z) * wp), self.order)[0]
        return val / (2j * mp.pi)

    def taylor(self, v, m: int, scale=1, via=None) -> list:
        v = to_mpc(v)
        self._check(v)
        s = to_mpc(scale)
        rho = self.rho

        def F(t, wp):
            base = rho(t) / wp
            x = s / (t - v)
            out = []
            p = base / (t - v)
            for _ in range(m):
                out.append(p)
                p = p * x
            return out

        vals = integrate_over_cuts(self.cuts, F, self.order)
        return [x / (2j * mp.pi) for x in vals]

    def laurent_at_infinity(self, m: int, center=0, scale=1):
        c0, r = to_mpc(center), to_mpc(scale)
        rho = self.rho

        def F(t, wp):
            base = rho(t) / wp / r
            x = (t - c0) / r
            out = []
            p = base
            for _ in range(m):
                out.append(p)
                p = p * x
            return out

        vals = integrate_over_cuts(self.cuts, F, self.order)
        return 1, [-x / (2j * mp.pi) for x in vals]

    def one_sided(self, x, side: int, n=None, deltas=(1e-4, 5e-5, 2.5e-5)):
        """One-sided limit at a cut point by Richardson extrapolation in the offset."""
        loc = self.cuts.locate(x, 1e-20 * self.cuts.scale)
        if n is None:
            if loc is None:
                raise ValueError("x is not on a cut")
            n = self.cuts.arc_left_normal(*loc)
        n = to_mpc(n)
        vals = [self(to_mpc(x) + side * mp.mpf(d) * n) for d in deltas]
        return richardson(vals, [mp.mpf(d) for d in deltas])


def richardson(vals, hs):
    """Polynomial extrapolation of ``vals(h)`` to ``h = 0`` (Neville)."""
    n = len(vals)
    T = list(vals)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            T[i] = T[i] + (T[i] - T[i - 1]) * hs[i] / (hs[i - k] - hs[i])
    return T[-1]


class RationalFunction:
    """Exact rational target ``num / den``."""

    def __init__(self, num: Poly, den: Poly):
        self.num = num if isinstance(num, Poly) else Poly(num)
        self.den = den if isinstance(den, Poly) else Poly(den)

    def __call__(self, z, via=None):
        return self.num(z) / self.den(z)

    def taylor(self, v, m: int, scale=1, via=None) -> list:
        N = self.num.compose_affine(v, scale)
        D = self.den.compose_affine(v, scale)
        if D.coeffs[0] == 0 if D.coeffs else True:
            raise NodeOnSingularity("node at a pole of the rational target")
        n = list(N.coeffs) + [mp.mpc(0)] * m
        d = list(D.coeffs) + [mp.mpc(0)] * m
        out = []
        for j in range(m):
            s = n[j] - mp.fsum(d[i] * out[j - i] for i in range(1, j + 1))
            out.append(s / d[0])
        return out

    def laurent_at_infinity(self, m: int, center=0, scale=1):
        N = self.num.compose_affine(center, scale)
        D = self.den.compose_affine(center, scale)
        s0 = D.degree - N.degree
        if s0 < 0:
            raise NodeOnSingularity("rational target has a pole at infinity")
        n = [N.coeffs[N.degree - i] for i in range(N.degree + 1)] + [mp.mpc(0)] * m
        d = [D.coeffs[D.degree - i] for i in range(D.degree + 1)] + [mp.mpc(0)] * m
        out = []
        for j in range(m):
            s = n[j] - mp.fsum(d[i] * out[j - i] for i in range(1, j + 1))
            out.append(s / d[0])
        return s0, out


class AnalyticFunction:
    """Target given only by evaluation.

    Taylor and Laurent coefficients come from trapezoidal sums on circles
    of radius ``radius`` around the node and ``R_inf`` around the centre.
    """

    def __init__(self, fn: Callable, radius=mp.mpf("0.25"), R_inf=4, samples: int = 256):
        self.fn, self.radius, self.R_inf, self.samples = fn, mp.mpf(radius), mp.mpf(R_inf), samples

    def __call__(self, z, via=None):
        return self.fn(to_mpc(z))

    def taylor(self, v, m: int, scale=1, via=None) -> list:
        M = self.samples
        r = self.radius / abs(to_mpc(scale))
        vals = [self.fn(v + scale * r * mp.expjpi(mp.mpf(2 * j) / M)) for j in range(M)]
        return [mp.fsum(vals[j] * mp.expjpi(-mp.mpf(2 * j * k) / M) for j in range(M)) / M / r ** k
                for k in range(m)]

    def laurent_at_infinity(self, m: int, center=0, scale=1):
        M = self.samples
        R = self.R_inf
        vals = [self.fn(center + scale * R * mp.expjpi(mp.mpf(2 * j) / M)) for j in range(M)]
        coef = [mp.fsum(vals[j] * mp.expjpi(mp.mpf(2 * j * k) / M) for j in range(M)) / M * R ** k
                for k in range(m + 1)]
        # coefficient of zeta^0 is coef[0]; report from zeta^0 downward
        return 0, coef[:m]
