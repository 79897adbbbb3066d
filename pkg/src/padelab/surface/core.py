"""Two-sheeted hyperelliptic surface ``w^2 = prod (z - e)``.

A point of the surface is a :class:`SurfacePoint` ``(z, sheet)``.  Sheet 0
carries the branch of ``w`` with ``w ~ z^{g+1}`` at infinity, sheet 1 its
negative.  Every odd differential used here has the form ``h(t) dt / w``;
the involution flips the sign of ``w`` and hence of the differential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

from mpmath import mp

from ..errors import (
    PathDegeneracy,
    SingularNormalization,
    Singularity,
    VAtBranchPoint,
)
from ..numkit import Line, Poly, Ray, quad_segment, solve_linear, to_mpc
from .cuts import CutSystem
from .paths import Router


@dataclass(frozen=True)
class SurfacePoint:
    """Point ``(z, sheet)``; ``z`` is an ``mpc`` or ``mp.inf``.

    ``side`` (``+1`` left, ``-1`` right, relative to the cut orientation)
    selects a one-sided trace when ``z`` lies on a cut; the trace is taken
    from the region ``D^(sheet)``.
    """

    z: object
    sheet: int = 0
    side: int | None = None

    def __post_init__(self):
        if self.sheet not in (0, 1):
            raise ValueError("sheet must be 0 or 1")
        if not (self.z == mp.inf):
            object.__setattr__(self, "z", to_mpc(self.z))

    @classmethod
    def infinity(cls, sheet: int = 0) -> "SurfacePoint":
        return cls(mp.inf, sheet)

    @property
    def is_infinite(self) -> bool:
        return self.z == mp.inf

    def star(self) -> "SurfacePoint":
        return SurfacePoint(self.z, 1 - self.sheet, self.side)

    def distance(self, other: "SurfacePoint") -> float:
        """Distance in ``(z, sheet)`` coordinates (chordal at infinity)."""
        if self.sheet != other.sheet:
            return math.inf
        if self.is_infinite or other.is_infinite:
            if self.is_infinite and other.is_infinite:
                return 0.0
            w = other.z if self.is_infinite else self.z
            return 1.0 / abs(complex(w))
        return abs(complex(self.z - other.z))

    def __repr__(self):
        zs = "inf" if self.is_infinite else mp.nstr(self.z, 10)
        return f"SurfacePoint({zs}, sheet={self.sheet})"


class Divisor:
    """Finite formal sum of surface points with integer coefficients."""

    def __init__(self, terms: Sequence[tuple[SurfacePoint, int]] = ()):
        self.terms = [(p, int(k)) for p, k in terms if int(k) != 0]

    @classmethod
    def points(cls, pts) -> "Divisor":
        return cls([(p, 1) for p in pts])

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.terms)

    @property
    def is_effective(self) -> bool:
        return all(k >= 0 for _, k in self.terms)

    def expanded(self) -> list[SurfacePoint]:
        out = []
        for p, k in self.terms:
            if k < 0:
                raise ValueError("divisor is not effective")
            out += [p] * k
        return out

    def has_symmetric_pair(self, tol: float = 1e-10) -> bool:
        pts = self.expanded()
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                a, b = pts[i], pts[j]
                if a.sheet != b.sheet and a.star().distance(b) <= tol:
                    return True
        return False

    def contains(self, p: SurfacePoint, tol: float = 1e-10) -> bool:
        return any(q.distance(p) <= tol for q, k in self.terms if k > 0)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.terms + other.terms)

    def __neg__(self):
        return Divisor([(p, -k) for p, k in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        return "Divisor(" + ", ".join(f"{k}*{p!r}" for p, k in self.terms) + ")"


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------

class Cycle:
    """Involution-symmetric cycle.

    ``kind == "arc"``: lift of cut arc ``arc``; its integral of ``h dt/w`` is
    twice the integral along the arc of ``h / w_+`` (sign of ``w_+`` tracked
    through crossings with other arcs).
    ``kind == "path"``: a polyline between two branch points avoiding the
    cuts, run on sheet 0 and back on sheet 1; integral twice that along the
    polyline on sheet 0.
    """

    def __init__(self, kind: str, arc: int | None = None, points=None, sign: int = 1):
        if kind not in ("arc", "path"):
            raise ValueError("cycle kind must be 'arc' or 'path'")
        self.kind, self.arc, self.sign = kind, arc, sign
        self.points = [to_mpc(p) for p in points] if points is not None else None

    def flipped(self) -> "Cycle":
        return Cycle(self.kind, self.arc, self.points, -self.sign)

    def legs(self, cuts: CutSystem):
        """List of ``(segment, w_function)`` pieces of the half cycle."""
        if self.kind == "arc":
            arc = cuts.arcs[self.arc]
            cross = {}
            for c in cuts.crossings:
                if c.arc_a == self.arc:
                    cross.setdefault(c.seg_a, []).append(c.t_a)
                if c.arc_b == self.arc:
                    cross.setdefault(c.seg_b, []).append(c.t_b)
            out = []
            sigma = 1
            for k in range(arc.nseg):
                a, b = arc.segment(k)
                ts = [mp.mpf(0)] + [mp.mpf(t) for t in sorted(cross.get(k, []))] + [mp.mpf(1)]
                for j in range(len(ts) - 1):
                    p = a + (b - a) * ts[j]
                    q = a + (b - a) * ts[j + 1]
                    seg = Line(p, q, sing_start=(k == 0 and j == 0),
                               sing_end=(k == arc.nseg - 1 and j == len(ts) - 2))
                    out.append((seg, _boundary_w(cuts, self.arc, k, sigma)))
                    if j < len(ts) - 2:
                        sigma = -sigma
            return out
        pts = self.points
        out = []
        for j in range(len(pts) - 1):
            seg = Line(pts[j], pts[j + 1], sing_start=(j == 0), sing_end=(j == len(pts) - 2))
            out.append((seg, cuts.w))
        return out


def _boundary_w(cuts, ai, k, sigma):
    def wf(t):
        return sigma * cuts.w(t, on=(ai, k, 1))
    return wf


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------

@dataclass
class HoloBasis:
    """Normalised holomorphic differentials ``Omega_k = L_k(t) dt / w``."""

    L: list
    A: list  # alpha periods of t^m dt/w, A[j][m]

    def values(self, t) -> list:
        return [Lk(t) for Lk in self.L]


@dataclass
class ThirdKind:
    """Differential ``G_v = h(t) dt / w`` with purely imaginary periods.

    ``numerator`` is the polynomial ``N`` with ``h = N / (t - v)`` for finite
    ``v`` and ``h = N`` for ``v`` at infinity.
    """

    v: SurfacePoint
    numerator: Poly
    c: list
    alpha_periods: list
    beta_periods: list

    def h(self, t):
        if self.v.is_infinite:
            return self.numerator(t)
        return self.numerator(t) / (t - self.v.z)

    @cached_property
    def critical_points(self) -> list:
        from ..numkit import poly_roots
        if self.numerator.degree < 1:
            return []
        return [r for r, m in poly_roots(self.numerator) for _ in range(m)]


class Surface:
    """Hyperelliptic surface with cut system, homology basis and periods.

    Parameters
    ----------
    E : sequence
        The ``2g + 2`` branch points; ``E[0]`` is the base point ``e_0``.
    cuts : sequence of polylines, optional
        Each polyline joins two branch points.  Defaults to straight
        segments pairing ``E[0]-E[1]``, ``E[2]-E[3]``, ...
    cycles : dict, optional
        ``{"alpha": [...], "beta": [...]}`` lists of :class:`Cycle`.  Built
        automatically when omitted (always for ``g <= 2``).
    order : int, optional
        Gauss-Legendre order used for all quadratures.
    """

    def __init__(self, E, cuts=None, cycles=None, order: int | None = None,
                 auto_cycles: bool | None = None):
        E = [to_mpc(e) for e in E]
        if cuts is None:
            cuts = [[E[2 * k], E[2 * k + 1]] for k in range(len(E) // 2)]
        self.cuts = CutSystem(E, cuts)
        # arc containing e0 goes first
        arcs = self.cuts.arcs
        i0 = next(i for i, a in enumerate(arcs) if 0 in (a.start, a.end))
        if i0 != 0:
            order_ = [i0] + [i for i in range(len(arcs)) if i != i0]
            self.cuts = CutSystem(E, [arcs[i].vertices for i in order_])
        self.E = self.cuts.E
        self.e0 = self.E[0]
        self.g = self.cuts.genus
        self.order = order
        self.router = Router(self.cuts)
        self.period_diagnostics: dict = {}
        if self.g == 0:
            self.alpha, self.beta = [], []
        elif cycles is not None:
            self.alpha, self.beta = list(cycles["alpha"]), list(cycles["beta"])
        else:
            if self.g > 2 and not auto_cycles:
                raise SingularNormalization("genus > 2 needs explicit homology cycles")
            cands = self._auto_cycles()
        self._third_cache: dict = {}
        if self.g and cycles is not None:
            self._build_periods(orient=False)
        elif self.g:
            last = None
            for alpha, beta in cands:
                self.alpha, self.beta = alpha, beta
                try:
                    self._build_periods(orient=True)
                except SingularNormalization as exc:
                    last = exc
                    continue
                if self.period_diagnostics["symmetry_defect"] < mp.mpf(10) ** -8:
                    break
            else:
                raise SingularNormalization("could not build a canonical homology basis") from last

    # -- basic evaluation ----------------------------------------------------

    @property
    def genus(self) -> int:
        return self.g

    def w(self, p: SurfacePoint):
        """``w`` at a surface point (raises on cut points without a side)."""
        if p.is_infinite:
            raise Singularity("w has a pole at infinity")
        sgn = 1 if p.sheet == 0 else -1
        if p.side is not None:
            loc = self.cuts.locate(p.z, 1e-20 * self.cuts.scale)
            if loc is not None:
                return sgn * self.cuts.w(p.z, on=(loc[0], loc[1], p.side))
        return sgn * self.cuts.w_checked(p.z)

    def w_plane(self, z):
        return self.cuts.w(z)

    # -- homology ------------------------------------------------------------

    def _auto_cycles(self):
        """Candidate canonical bases: alpha_k = lift of arc k, beta_k joins arc k to arc 0.

        Two beta cycles through the same branch point would intersect
        there, so distinct endpoints of arc 0 (or interior points of it for
        g > 2) are used as targets.  Several assignments are returned; the
        first one with a symmetric period matrix is kept.
        """
        g = self.g
        alpha = [Cycle("arc", arc=k) for k in range(1, g + 1)]
        arc0 = self.cuts.arcs[0]
        ends = [arc0.start, arc0.end]
        cands = []
        if g <= 2:
            assigns = [ends[:g], ends[:g][::-1]] if g == 2 else [[ends[0]], [ends[1]]]
            for tgt in assigns:
                for flip_start in ([False] * g, [True] * g):
                    beta = []
                    for k in range(1, g + 1):
                        arc = self.cuts.arcs[k]
                        ib = arc.end if flip_start[k - 1] else arc.start
                        beta.append(Cycle("path", points=self.branch_route(ib, tgt[k - 1])))
                    cands.append((alpha, beta))
        else:
            for shift in (0, 1):
                beta = []
                for k in range(1, g + 1):
                    ib = self.cuts.arcs[k].start
                    beta.append(Cycle("path", points=self.interior_route(ib, 0, (k + shift) / (g + 2))))
                cands.append((alpha, beta))
        return cands

    def interior_route(self, i: int, arc: int, frac: float) -> list:
        """Polyline from ``E[i]`` to an interior point of the first segment of ``arc``."""
        r = self.router
        a = r.exit_point(i)
        A = self.cuts.arcs[arc]
        p, q = A.segment(0)
        x = p + (q - p) * mp.mpf(frac)
        n = self.cuts.arc_left_normal(arc, 0)
        ap = complex(x) + 0.5 * r.delta * n
        mid = r.route(a, ap)
        return [self.E[i]] + [to_mpc(t) for t in mid] + [x]

    def branch_route(self, i: int, j: int) -> list:
        """Cut-avoiding polyline from branch point ``E[i]`` to ``E[j]``."""
        r = self.router
        a, b = r.exit_point(i), r.exit_point(j)
        mid = r.route(a, b)
        return [self.E[i]] + [to_mpc(p) for p in mid] + [self.E[j]]

    def cycle_integrals(self, h: Callable, cycles: Sequence[Cycle], order=None) -> list:
        """``oint h(t) dt / w`` over each cycle; ``h`` may be vector valued."""
        out = []
        for cyc in cycles:
            total = None
            for seg, wf in cyc.legs(self.cuts):
                val, _ = quad_segment(_odd(h, wf), seg, order=order or self.order)
                vv = val if isinstance(val, list) else [val]
                total = vv if total is None else [x + y for x, y in zip(total, vv)]
            scal = 2 * cyc.sign
            res = [scal * x for x in total]
            out.append(res if _is_vec(h) else res[0])
        return out

    def _build_periods(self, orient: bool):
        g = self.g
        mono = lambda t: [t ** m for m in range(g)]
        Aa = self.cycle_integrals(mono, self.alpha)
        Ab = self.cycle_integrals(mono, self.beta)
        # C A^T = I with A[j][m] = alpha_j period of t^m dt/w
        try:
            At = [[Aa[j][m] for j in range(g)] for m in range(g)]
            C = []
            for k in range(g):
                e = [mp.mpc(1 if i == k else 0) for i in range(g)]
                # solve C_k^T: sum_m C[k][m] A[j][m] = delta_jk  ->  A C_k = e_k
                C.append(solve_linear([[Aa[j][m] for m in range(g)] for j in range(g)], e))
        except ZeroDivisionError as exc:
            raise SingularNormalization("alpha periods are singular") from exc
        del At
        self._C = C
        self._L = [Poly(C[k]) for k in range(g)]
        self._Aa, self._Ab = Aa, Ab
        B = [[mp.fsum(C[k][m] * Ab[j][m] for m in range(g)) for k in range(g)] for j in range(g)]
        if orient:
            flips = [1 if B[k][k].imag > 0 else -1 for k in range(g)]
            if any(f < 0 for f in flips):
                self.beta = [c if f > 0 else c.flipped() for c, f in zip(self.beta, flips)]
                Ab = [[f * x for x in row] for row, f in zip(Ab, flips)]
                self._Ab = Ab
                B = [[f * x for x in row] for row, f in zip(B, flips)]
        self._B = B
        sym = max((abs(B[j][k] - B[k][j]) for j in range(g) for k in range(g)), default=0)
        ImB = mp.matrix([[B[j][k].imag for k in range(g)] for j in range(g)])
        ImB = (ImB + ImB.T) / 2
        eig = mp.eigsy(ImB)[0] if g > 1 else [ImB[0, 0]]
        self.period_diagnostics = {
            "symmetry_defect": sym,
            "im_b_min_eigenvalue": min(eig),
        }
        if min(eig) <= 0:
            raise SingularNormalization("Im B is not positive definite for the chosen cycles")

    @property
    def holo_basis(self) -> HoloBasis:
        if self.g == 0:
            return HoloBasis([], [])
        return HoloBasis(self._L, self._Aa)

    @property
    def B(self) -> list:
        return [] if self.g == 0 else [row[:] for row in self._B]

    def B_matrix(self):
        return mp.matrix(self.B) if self.g else mp.matrix(0, 0)

    def omega(self, t) -> list:
        """Values ``L_k(t)`` of the normalised basis numerators."""
        return [Lk(t) for Lk in self._L] if self.g else []

    # -- paths on the surface ------------------------------------------------

    def path_legs(self, target: SurfacePoint, avoid=()):
        """Canonical route from ``e_0`` to ``target``.

        Returns ``(segments, sheet)``; the route stays inside ``D^(sheet)``
        (it touches the cut system only at its endpoints).
        """
        r = self.router
        cuts = self.cuts
        avoid = [(complex(c), rad) for c, rad in avoid]
        start = r.exit_point(0)
        head = [Line(self.e0, to_mpc(start), sing_start=True)]
        if target.is_infinite:
            far = r.far_point()
            pts = r.route(start, far, avoid)
            segs = head + _polyline(pts) + [Ray(to_mpc(far), to_mpc(far - r.center))]
            return segs, target.sheet
        z = target.z
        fz = complex(z)
        bi = next((i for i, e in enumerate(cuts.fE) if abs(e - fz) <= 1e-25 * cuts.scale), None)
        if bi == 0:
            return [], target.sheet
        if bi is not None:
            ex = r.exit_point(bi)
            pts = r.route(start, ex, avoid)
            segs = head + _polyline(pts) + [Line(to_mpc(ex), self.E[bi], sing_end=True)]
            return segs, target.sheet
        loc = cuts.locate(z, 1e-20 * cuts.scale)
        if loc is not None:
            if target.side is None:
                raise PathDegeneracy("target on a cut needs a side")
            n = cuts.arc_left_normal(*loc)
            a, b = cuts.arcs[loc[0]].fvertices[loc[1]], cuts.arcs[loc[0]].fvertices[loc[1] + 1]
            off = min(0.5 * r.delta, 0.25 * min(abs(fz - a), abs(fz - b)))
            ap = fz + target.side * off * n
            pts = r.route(start, ap, avoid)
            segs = head + _polyline(pts) + [Line(to_mpc(ap), z)]
            return segs, target.sheet
        pts = r.route(start, fz, avoid)
        pts[-1] = z
        return head + _polyline(pts), target.sheet

    def integrate_to(self, F: Callable, target: SurfacePoint, avoid=(), order=None):
        """``int_{e_0}^{target} F(t, w(t))`` along the canonical route.

        ``F(t, wt)`` returns a scalar or list; ``wt`` is the sheet-resolved
        value of ``w``.  Points in ``avoid`` are ``(z, radius)`` discs the
        route must keep clear of.
        """
        segs, sheet = self.path_legs(target, avoid)
        return self.integrate_along(F, segs, sheet, order=order)

    def integrate_along(self, F, segs, sheet: int, order=None):
        sgn = 1 if sheet == 0 else -1
        wf = self.cuts.w

        def f(t):
            return F(t, sgn * wf(t))

        total = None
        vec = False
        for seg in segs:
            val, _ = quad_segment(f, seg, order=order or self.order)
            vec = isinstance(val, list)
            vv = val if vec else [val]
            total = vv if total is None else [x + y for x, y in zip(total, vv)]
        if total is None:
            probe = F(self.e0 + 1, mp.mpc(1))
            vec = isinstance(probe, list)
            total = [mp.mpc(0)] * (len(probe) if vec else 1)
        return total if vec else total[0]

    # -- Abel map ------------------------------------------------------------

    def abel_point(self, p: SurfacePoint, avoid=()) -> list:
        if self.g == 0:
            return []
        L = self._L
        return self.integrate_to(lambda t, wt: [Lk(t) / wt for Lk in L], p, avoid)

    def abel(self, D) -> list:
        """Abel map of a divisor (or a single point) from ``e_0``."""
        if isinstance(D, SurfacePoint):
            return self.abel_point(D)
        out = [mp.mpc(0)] * self.g
        for p, k in D.terms:
            a = self.abel_point(p)
            out = [x + k * y for x, y in zip(out, a)]
        return out

    def lattice_reduce(self, u):
        """Write ``u = x + B y`` and reduce ``x, y`` modulo integers.

        Returns ``(reduced, j, m)`` with ``u = reduced + j + B m``.
        """
        g = self.g
        if g == 0:
            return [], [], []
        B = self._B
        ImB = [[B[i][k].imag for k in range(g)] for i in range(g)]
        y = solve_linear(ImB, [mp.mpf(ui.imag) for ui in u])
        y = [mp.re(t) for t in y]
        x = [u[i].real - mp.fsum(B[i][k].real * y[k] for k in range(g)) for i in range(g)]
        m = [int(mp.nint(t)) for t in y]
        j = [int(mp.nint(t)) for t in x]
        red = [u[i] - j[i] - mp.fsum(B[i][k] * m[k] for k in range(g)) for i in range(g)]
        return red, j, m

    def lattice_distance(self, u) -> mp.mpf:
        red, _, _ = self.lattice_reduce(u)
        return max((abs(t) for t in red), default=mp.mpf(0))

    # -- third-kind differentials -------------------------------------------

    def third_kind(self, v: SurfacePoint) -> ThirdKind:
        """``G_v`` with residues -1 at ``v``, +1 at ``v*`` and imaginary periods."""
        key = (None if v.is_infinite else v.z, v.sheet)
        if key in self._third_cache:
            return self._third_cache[key]
        if v.is_infinite:
            N0 = Poly.monomial(self.g, 1 if v.sheet == 0 else -1)
            h0 = lambda t: N0(t)
        else:
            z = v.z
            if any(abs(z - e) <= mp.mpf(10) ** -25 * self.cuts.scale for e in self.E):
                raise VAtBranchPoint("third-kind differential undefined at a branch point")
            wv = self.w(SurfacePoint(z, v.sheet))
            N0 = Poly([-wv])
            h0 = lambda t: -wv / (t - z)
        g = self.g
        if g == 0:
            tk = ThirdKind(v, N0, [], [], [])
        else:
            Pa = self.cycle_integrals(h0, self.alpha)
            Pb = self.cycle_integrals(h0, self.beta)
            B = self._B
            x = [-t.real for t in Pa]
            ImB = [[B[i][k].imag for k in range(g)] for i in range(g)]
            rhs = [Pb[i].real + mp.fsum(B[i][k].real * x[k] for k in range(g)) for i in range(g)]
            y = [mp.re(t) for t in solve_linear(ImB, rhs)]
            c = [mp.mpc(x[k], y[k]) for k in range(g)]
            extra = Poly()
            for k in range(g):
                extra = extra + self._L[k] * c[k]
            if v.is_infinite:
                N = N0 + extra
            else:
                N = N0 + Poly([-v.z, 1]) * extra
            alpha = [Pa[k] + c[k] for k in range(g)]
            beta = [Pb[i] + mp.fsum(B[i][k] * c[k] for k in range(g)) for i in range(g)]
            tk = ThirdKind(v, N, c, alpha, beta)
        self._third_cache[key] = tk
        return tk

    def green(self, z: SurfacePoint, v: SurfacePoint) -> mp.mpf:
        """Green-type function ``g(z, v) = Re int_{e_0}^z G_v``."""
        if _same_base(z, v):
            raise Singularity("green function is singular at v and v*")
        G = self.third_kind(v)
        avoid = [] if v.is_infinite else [(v.z, self.router.delta * 0.5)]
        val = self.integrate_to(lambda t, wt: G.h(t) / wt, z, avoid=_clip_avoid(avoid, z))
        return mp.re(val)


def _clip_avoid(avoid, z: SurfacePoint):
    if z.is_infinite:
        return avoid
    out = []
    for c, r in avoid:
        d = float(abs(complex(z.z) - complex(c)))
        out.append((c, min(r, 0.5 * d)))
    return out


def _same_base(a: SurfacePoint, b: SurfacePoint) -> bool:
    if a.is_infinite or b.is_infinite:
        return a.is_infinite and b.is_infinite
    return abs(a.z - b.z) <= mp.mpf(10) ** -30 * max(1, abs(b.z))


def _polyline(pts):
    pts = [to_mpc(p) for p in pts]
    return [Line(a, b) for a, b in zip(pts, pts[1:]) if a != b]


def _odd(h, wf):
    def f(t):
        hv = h(t)
        wt = wf(t)
        if isinstance(hv, list):
            return [x / wt for x in hv]
        return hv / wt
    return f


def _is_vec(h) -> bool:
    probe = h(mp.mpc("0.123456789", "0.31415926"))
    return isinstance(probe, list)


def make_surface(E, cuts=None, cycles=None, order=None) -> Surface:
    return Surface(E, cuts, cycles, order)


def eval_w(S: Surface, p: SurfacePoint):
    return S.w(p)
