"""Zero level lines of Green functions and schemes synthesized from level curves.

Level lines of ``g = Re F`` with ``dF = G_v = h dt / w`` are followed by an
arclength predictor-corrector.  ``w`` is continued along the traced curve
itself (ratio square roots over short steps), so tracing ignores the cut
system of the surface: a level set of ``g`` is symmetric under the
involution and the sheet the continuation lands on does not matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from mpmath import mp

from ..errors import LevelCurveNotJordan, TraceStall, XiNotConformal
from ..numkit import Poly, gauss_legendre, to_mpc, tolerance_override
from .core import Surface, SurfacePoint


# ---------------------------------------------------------------------------
# continuation primitives
# ---------------------------------------------------------------------------

class _Flow:
    """``F`` and ``w`` continued along short straight steps."""

    def __init__(self, S: Surface, h: Callable, order: int = 24):
        self.S = S
        self.P = Poly.from_roots(S.E)
        self.h = h
        self.E = list(S.E)
        xs, ws = gauss_legendre(order)
        self.nodes = [(x + 1) / 2 for x in xs]
        self.weights = [wt / 2 for wt in ws]

    def w_at(self, z0, w0, z):
        return w0 * mp.sqrt(self.P(z) / self.P(z0))

    def step(self, z0, F0, w0, z1):
        """``(F(z1), w(z1))`` continuing from ``(z0, F0, w0)``."""
        d = z1 - z0
        P0 = self.P(z0)
        acc = mp.mpc(0)
        for u, wt in zip(self.nodes, self.weights):
            t = z0 + u * d
            acc += wt * self.h(t) / (w0 * mp.sqrt(self.P(t) / P0))
        return F0 + acc * d, self.w_at(z0, w0, z1)

    def dF(self, z, w):
        return self.h(z) / w

    def branch_dist(self, z):
        return min(abs(z - e) for e in self.E)

    def start_at_branch(self, i: int, s, direction):
        """``(z1, F1, w1)`` a distance ``s`` from ``E[i]`` with ``F(E[i]) = 0``.

        Uses ``t = e + d u^2`` so the square-root singularity disappears.
        """
        e = self.E[i]
        Q = Poly.from_roots([x for j, x in enumerate(self.E) if j != i])
        Qe = Q(e)
        R0 = mp.sqrt(Qe)
        sd = mp.sqrt(direction)
        U = mp.sqrt(s)
        acc = mp.mpc(0)
        for u, wt in zip(self.nodes, self.weights):
            uu = u * U
            t = e + direction * uu * uu
            R = R0 * mp.sqrt(Q(t) / Qe)
            acc += wt * 2 * sd * self.h(t) / R
        z1 = e + direction * s
        w1 = R0 * mp.sqrt(Q(z1) / Qe) * sd * U
        return z1, acc * U, w1


@dataclass
class TracedArc:
    """Polyline sample of one arc of a level set."""

    points: list
    start: str
    end: str
    arclength: list = field(default_factory=list)
    max_level_error: float = 0.0

    def __post_init__(self):
        if not self.arclength:
            s, out = 0.0, [0.0]
            for a, b in zip(self.points, self.points[1:]):
                s += float(abs(b - a))
                out.append(s)
            self.arclength = out


@dataclass
class TracedContour:
    """Projection of the zero level set of ``g(., v)``."""

    arcs: list
    crossings: list
    step: float

    def points(self) -> list:
        return [complex(z) for a in self.arcs for z in a.points]

    def endpoints(self) -> list:
        return [(complex(a.points[0]), complex(a.points[-1])) for a in self.arcs]

    def hausdorff(self, other: "TracedContour | Sequence") -> float:
        """Symmetric Hausdorff distance between the sampled point sets (polyline aware)."""
        mine = self.points()
        theirs = other.points() if isinstance(other, TracedContour) else [complex(z) for z in other]
        segs_a = _segments(self)
        segs_b = _segments(other) if isinstance(other, TracedContour) else [(z, z) for z in theirs]
        d1 = max(min(_pseg(z, a, b) for a, b in segs_b) for z in mine)
        d2 = max(min(_pseg(z, a, b) for a, b in segs_a) for z in theirs)
        return max(d1, d2)

    def distance_to(self, segments) -> float:
        """Largest distance from a traced sample to a set of segments."""
        return max(min(_pseg(z, complex(a), complex(b)) for a, b in segments) for z in self.points())


def _segments(tc: TracedContour):
    out = []
    for a in tc.arcs:
        pts = [complex(z) for z in a.points]
        out += list(zip(pts, pts[1:]))
    return out


def _pseg(z, a, b) -> float:
    d = b - a
    if d == 0:
        return abs(z - a)
    t = min(1.0, max(0.0, ((z - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(z - (a + t * d))


def _tangent(dF, prev=None):
    # level lines of Re F run along i * conj(F')
    tau = 1j * mp.conj(dF) / abs(dF)
    if prev is not None and mp.re(tau * mp.conj(prev)) < 0:
        tau = -tau
    return tau


def _correct(flow, z0, F0, w0, zp, level, iters: int = 4, tol=None):
    for _ in range(iters):
        Fp, wp = flow.step(z0, F0, w0, zp)
        gv = mp.re(Fp) - level
        dF = flow.dF(zp, wp)
        if dF == 0:
            break
        dz = gv / dF
        zp = zp - dz
        if abs(dz) < (tol if tol is not None else mp.eps * 16) * max(1, abs(zp)):
            break
    Fp, wp = flow.step(z0, F0, w0, zp)
    return zp, Fp, wp


# ---------------------------------------------------------------------------
# zero level set
# ---------------------------------------------------------------------------

def trace_contour(S: Surface, v: SurfacePoint | None = None, step: float | None = None,
                  max_steps: int = 20000, tol=None) -> TracedContour:
    """Trace the projection of the zero level set of ``g(., v)``.

    One arc is started at every branch point not already reached, in the
    direction where ``Re(K sqrt(z - e)) = 0`` for the local expansion
    ``F ~ K sqrt(z - e)``.  An arc ends at another branch point or at a
    critical point of ``G_v`` lying on the level set (a smooth crossing of
    several arcs, such as the origin for the four-point cross).

    Raises
    ------
    TraceStall
        When the step collapses or the arc leaves the working region.
    """
    if v is None:
        v = SurfacePoint.infinity(0)
    if tol is None:
        tol = tolerance_override("trace_tol")
    G = S.third_kind(v)
    flow = _Flow(S, G.h)
    scale = float(S.cuts.scale)
    base = mp.mpf(step if step is not None else scale / 200)
    crit = [c for c in G.critical_points]
    far = 50 * scale + (0 if v.is_infinite else abs(complex(v.z)))
    arcs, crossings = [], []
    reached: set[int] = set()
    Q_all = flow.P.deriv()
    for i, e in enumerate(S.E):
        if i in reached:
            continue
        he = G.h(e)
        if abs(he) < mp.eps * 1e6:
            raise TraceStall("critical point at a branch point", location=complex(e))
        R0sq = Q_all(e)  # w^2 ~ P'(e)(z - e)
        K2 = 4 * he * he / R0sq
        d = -1 / K2
        d = d / abs(d)
        z, F, w = flow.start_at_branch(i, base, d)
        z, F, w = _correct_from_branch(flow, i, z, base, d)
        pts = [e, z]
        tau = d
        end_label = None
        worst = abs(mp.re(F))
        for _ in range(max_steps):
            dF = flow.dF(z, w)
            tau = _tangent(dF, tau)
            hb = flow.branch_dist(z)
            # termination at a branch point
            j_near = min(range(len(S.E)), key=lambda j: abs(z - S.E[j]))
            if j_near != i and hb < 2 * base:
                pts.append(S.E[j_near])
                end_label = f"E{j_near}"
                reached.add(j_near)
                break
            hit = _near_critical(flow, crit, z, F, w, base)
            if hit is not None:
                pts.append(hit)
                end_label = "crossing"
                if not any(abs(hit - c) < 1e-12 * scale for c in crossings):
                    crossings.append(hit)
                break
            hstep = min(base, hb / 4)
            if crit:
                hstep = min(hstep, max(min(abs(z - c) for c in crit) / 4, base / 8))
            if hstep < base / 1000:
                raise TraceStall("step collapsed", location=complex(z))
            zp = z + hstep * tau
            z1, F1, w1 = _correct(flow, z, F, w, zp, 0, tol=tol)
            if abs(z1 - z) < hstep / 10:
                raise TraceStall("corrector failed to advance", location=complex(z))
            z, F, w = z1, F1, w1
            worst = max(worst, abs(mp.re(F)))
            pts.append(z)
            if abs(z) > far:
                raise TraceStall("trace left the working region", location=complex(z))
        else:
            raise TraceStall("maximum number of steps reached", location=complex(z))
        reached.add(i)
        arcs.append(TracedArc(pts, f"E{i}", end_label, max_level_error=float(worst)))
    return TracedContour(arcs, crossings, float(base))


def _correct_from_branch(flow, i, z, s, d):
    """Move the first point onto the zero level keeping its distance from ``E[i]``."""
    e = flow.E[i]
    for _ in range(6):
        z1, F1, w1 = flow.start_at_branch(i, abs(z - e), (z - e) / abs(z - e))
        gv = mp.re(F1)
        dF = flow.dF(z1, w1)
        # move along the circle |z - e| = s
        t = 1j * (z1 - e)
        dg = mp.re(dF * t)
        if dg == 0:
            break
        z = e + (z1 - e) * mp.expj(-gv / dg)
        if abs(gv) < mp.eps * 1e4:
            break
    return flow.start_at_branch(i, abs(z - e), (z - e) / abs(z - e))


def _near_critical(flow, crit, z, F, w, base):
    for c in crit:
        if abs(z - c) < 2 * base and flow.branch_dist(c) > 2 * base:
            Fc, _ = flow.step(z, F, w, c)
            if abs(mp.re(Fc)) < 1e-6 * max(1, base):
                return c
    return None


# ---------------------------------------------------------------------------
# level curves and synthesized schemes
# ---------------------------------------------------------------------------

class LevelCurve:
    """Closed level curve ``g(., v) = c`` with the conjugate function along it.

    ``points[k]`` and ``F[k]`` sample the curve and ``F = c + i theta`` with
    ``theta`` increasing from 0 to ``2 pi`` (one full turn of flux).
    """

    def __init__(self, S: Surface, c, v: SurfacePoint | None = None, direction=1,
                 step: float | None = None, max_steps: int = 20000):
        if v is None:
            v = SurfacePoint.infinity(0)
        self.S, self.v, self.c = S, v, mp.mpf(c)
        G = S.third_kind(v)
        self.flow = _Flow(S, G.h)
        z0 = self._start(to_mpc(direction))
        w0 = S.w(SurfacePoint(z0, v.sheet))
        F0 = mp.mpc(self.c, 0)
        base = mp.mpf(step if step is not None else self._length_guess(z0) / 400)
        pts, Fs, ws = [z0], [F0], [w0]
        z, F, w = z0, F0, w0
        tau = None
        two_pi = 2 * mp.pi
        for _ in range(max_steps):
            dF = self.flow.dF(z, w)
            if abs(dF) < mp.eps * 1e8:
                raise LevelCurveNotJordan("level curve passes through a critical point")
            tau = 1j * mp.conj(dF) / abs(dF)
            # orient so that theta increases: d(Im F) = Im(dF * tau) > 0
            if mp.im(dF * tau) < 0:
                tau = -tau
            hb = self.flow.branch_dist(z)
            hstep = min(base, hb / 4)
            if hstep < base / 1000:
                raise LevelCurveNotJordan("level curve runs into a branch point")
            z1, F1, w1 = _correct(self.flow, z, F, w, z + hstep * tau, self.c)
            if mp.im(F1) <= mp.im(F):
                raise LevelCurveNotJordan("conjugate function failed to increase")
            if mp.im(F1) >= two_pi:
                # close the loop at theta = 2 pi
                zc, Fc, wc = self._solve(z, F, w, mp.mpc(self.c, two_pi))
                pts.append(zc)
                Fs.append(Fc)
                ws.append(wc)
                break
            z, F, w = z1, F1, w1
            pts.append(z)
            Fs.append(F)
            ws.append(w)
        else:
            raise LevelCurveNotJordan("level curve did not close")
        gap = abs(pts[-1] - z0)
        if gap > 1e-8 * max(1, abs(z0)):
            raise LevelCurveNotJordan(f"level curve does not close (gap {mp.nstr(gap, 3)})")
        wgap = abs(ws[-1] - w0)
        if wgap > 1e-8 * max(1, abs(w0)):
            raise LevelCurveNotJordan("level curve returns on the other sheet")
        self.points, self.F, self.w = pts, Fs, ws
        self._check_simple()

    def _length_guess(self, z0):
        ref = mp.mpc(0) if self.v.is_infinite else self.v.z
        if self.v.is_infinite:
            ref = mp.fsum(self.S.E) / len(self.S.E)
        return 2 * mp.pi * abs(z0 - ref)

    def _start(self, direction):
        """Point on the ray from the pole (or the centroid for ``v = inf``) with ``g = c``."""
        S, v, c = self.S, self.v, self.c
        direction = direction / abs(direction)
        if v.is_infinite:
            base = mp.fsum(S.E) / len(S.E)
            R = max(abs(e - base) for e in S.E)
            g = lambda t: S.green(SurfacePoint(base + t * direction, v.sheet), v) - c
            lo, hi = R * mp.mpf("1.05"), R * 2
            while g(hi) < 0:
                lo, hi = hi, hi * 2
                if hi > 1e12:
                    raise LevelCurveNotJordan("level not reached along the ray")
        else:
            base = v.z
            dist = min(min(abs(e - base) for e in S.E), S.cuts.nearest_cut_distance(complex(base)))
            g = lambda t: S.green(SurfacePoint(base + t * direction, v.sheet), v) - c
            lo, hi = dist * mp.mpf("1e-6"), dist * mp.mpf("0.9")
            if g(hi) > 0:
                raise LevelCurveNotJordan("level curve meets the cut system")
        glo, ghi = g(lo), g(hi)
        if glo * ghi > 0:
            raise LevelCurveNotJordan("level not bracketed along the ray")
        # Illinois regula falsi
        side = 0
        for _ in range(200):
            t = (lo * ghi - hi * glo) / (ghi - glo)
            gt = g(t)
            if abs(gt) < mp.ldexp(1, -mp.prec // 2 - 8) or abs(hi - lo) < mp.eps * 1e3:
                break
            if gt * ghi > 0:
                hi, ghi = t, gt
                if side == -1:
                    glo /= 2
                side = -1
            else:
                lo, glo = t, gt
                if side == 1:
                    ghi /= 2
                side = 1
        return base + t * direction

    def _solve(self, z, F, w, target, iters: int = 30):
        """Newton for ``F(x) = target`` continuing from ``(z, F, w)``."""
        x = z
        for _ in range(iters):
            Fx, wx = self.flow.step(z, F, w, x)
            dx = (Fx - target) / self.flow.dF(x, wx)
            x = x - dx
            if abs(dx) < mp.eps * 64 * max(1, abs(x)):
                break
        Fx, wx = self.flow.step(z, F, w, x)
        return x, Fx, wx

    def _check_simple(self):
        pts = [complex(p) for p in self.points]
        n = len(pts)
        # winding number about the pole region must be one
        ref = complex(mp.fsum(self.S.E) / len(self.S.E)) if self.v.is_infinite else complex(self.v.z)
        ang = 0.0
        for a, b in zip(pts, pts[1:]):
            ang += math.atan2(((b - ref) / (a - ref)).imag, ((b - ref) / (a - ref)).real)
        if abs(abs(ang) - 2 * math.pi) > 1e-3:
            raise LevelCurveNotJordan("level curve does not wind once around the pole")
        stride = max(1, n // 200)
        sub = pts[::stride] + [pts[0]]
        for i in range(len(sub) - 1):
            for j in range(i + 2, len(sub) - 1):
                if i == 0 and j == len(sub) - 2:
                    continue
                if _seg_cross(sub[i], sub[i + 1], sub[j], sub[j + 1]):
                    raise LevelCurveNotJordan("level curve intersects itself")

    def point_at(self, theta):
        """Point of the curve with ``Im F = theta``."""
        theta = mp.mpf(theta)
        Fs = self.F
        k = max(0, min(len(Fs) - 2, _bisect_im(Fs, theta)))
        z, _, _ = self._solve(self.points[k], Fs[k], self.w[k], mp.mpc(self.c, theta))
        return z

    def flux_nodes(self, n: int) -> list:
        """``2n`` points splitting the curve into arcs of equal flux, one per arc midpoint."""
        m = 2 * n
        return [self.point_at(2 * mp.pi * (i + mp.mpf(1) / 2) / m) for i in range(m)]


def _bisect_im(Fs, theta):
    lo, hi = 0, len(Fs) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mp.im(Fs[mid]) <= theta:
            lo = mid
        else:
            hi = mid
    return lo


def _seg_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q - p).real * (r - p).imag - (q - p).imag * (r - p).real
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def check_conformal(Xi: Callable, samples: Sequence, E: Sequence, h: float = 1e-6) -> None:
    """Reject maps whose derivative vanishes on ``samples`` or that move a branch point."""
    for z in samples:
        z = to_mpc(z)
        d = (Xi(z + h) - Xi(z - h)) / (2 * h)
        if abs(d) < 1e-10:
            raise XiNotConformal(f"derivative of the map vanishes near {complex(z)}")
    for e in E:
        if abs(Xi(to_mpc(e)) - e) > 1e-12 * max(1, abs(e)):
            raise XiNotConformal(f"map does not fix the branch point {complex(e)}")


def scheme_from_map(S: Surface, c, n: int, Xi: Callable | None = None,
                    v: SurfacePoint | None = None, curve: LevelCurve | None = None) -> list:
    """``2n`` interpolation nodes on ``Xi(L_c)`` with equal Green flux per arc.

    ``L_c`` is the level curve ``g(., v) = c``; it is traced once and may be
    reused through ``curve``.  ``Xi`` defaults to the identity.
    """
    if curve is None:
        curve = LevelCurve(S, c, v)
    nodes = curve.flux_nodes(n)
    if Xi is None:
        return nodes
    check_conformal(Xi, curve.points[:: max(1, len(curve.points) // 64)], S.E)
    return [to_mpc(Xi(z)) for z in nodes]


def conformal_scheme(S: Surface, c, Xi: Callable | None = None, v: SurfacePoint | None = None):
    """:class:`~padelab.pade.Scheme` whose rows come from :func:`scheme_from_map`."""
    from ..pade import Scheme

    curve = LevelCurve(S, c, v)
    if Xi is not None:
        check_conformal(Xi, curve.points[:: max(1, len(curve.points) // 64)], S.E)
    return Scheme("conformal", generator=lambda n: scheme_from_map(S, c, n, Xi, v, curve))


# ---------------------------------------------------------------------------
# symmetry diagnostics
# ---------------------------------------------------------------------------

@dataclass
class SymmetryReport:
    n_list: list
    cut_max: list
    cut_min: list
    sheet1_max: list
    extra_infinity: bool

    @property
    def cut_bound(self) -> float:
        return max(max(abs(a), abs(b)) for a, b in zip(self.cut_max, self.cut_min))

    @property
    def divergent(self) -> bool:
        """Sheet-1 maxima strictly decreasing in ``n``."""
        s = self.sheet1_max
        return all(b < a for a, b in zip(s, s[1:]))

    def as_dict(self) -> dict:
        return {
            "n": list(self.n_list),
            "cut_max": [float(x) for x in self.cut_max],
            "cut_min": [float(x) for x in self.cut_min],
            "sheet1_max": [float(x) for x in self.sheet1_max],
            "cut_bound": float(self.cut_bound),
            "divergent": self.divergent,
            "extra_infinity": self.extra_infinity,
        }


def green_vector(S: Surface, x: SurfacePoint, poles: Sequence[SurfacePoint]) -> list:
    """``[g(x, p) for p in poles]`` from a single canonical path."""
    Gs = [S.third_kind(p) for p in poles]
    delta = S.router.delta
    avoid = [(complex(p.z), delta * 0.5) for p in poles if not p.is_infinite
             and (x.is_infinite or abs(complex(p.z) - complex(x.z)) > delta)]
    vals = S.integrate_to(lambda t, wt: [G.h(t) / wt for G in Gs], x, avoid=avoid)
    if not isinstance(vals, list):
        vals = [vals]
    return [mp.re(t) for t in vals]


def check_symmetry(S: Surface, scheme, n_list: Sequence[int], cut_samples=None,
                   sheet1_samples=None, extra_infinity: bool = False,
                   per_segment: int = 6) -> SymmetryReport:
    """Sums ``sum_i g(x, v_i^(0))`` over the rows ``V_{2n}`` of ``scheme``.

    ``cut_samples`` are points on the cut system (evaluated from the ``+``
    side of sheet 0); ``sheet1_samples`` are plane points lifted to sheet 1.
    With ``extra_infinity`` one more node at infinity is added to every row.
    """
    from ..pade import build_scheme

    if cut_samples is None:
        cut_samples = [x for x, _, _ in S.cuts.sample_points(per_segment)]
    if sheet1_samples is None:
        sc = float(S.cuts.scale)
        ctr = complex(mp.fsum(S.E) / len(S.E))
        sheet1_samples = [ctr + sc * r * complex(math.cos(a), math.sin(a))
                          for r, a in ((0.35, 0.4), (0.7, 2.0), (1.3, 3.6), (2.0, 5.1))]
        sheet1_samples = [z for z in sheet1_samples
                          if S.cuts.nearest_cut_distance(z) > 0.05 * sc]
    rows = [build_scheme(scheme, n) for n in n_list]
    distinct: list = []
    for r in rows:
        for vz, _ in r.finite:
            if not any(vz == u for u in distinct):
                distinct.append(vz)
    poles = [SurfacePoint(vz, 0) for vz in distinct] + [SurfacePoint.infinity(0)]

    def weights(r):
        wts = [mp.mpf(0)] * len(poles)
        for vz, m in r.finite:
            wts[next(i for i, u in enumerate(distinct) if u == vz)] += m
        wts[-1] += r.n_inf + (1 if extra_infinity else 0)
        return wts

    cut_vals = [green_vector(S, SurfacePoint(to_mpc(x), 0, side=1), poles) for x in cut_samples]
    s1_vals = [[-t for t in green_vector(S, SurfacePoint(to_mpc(z), 0), poles)] for z in sheet1_samples]
    cmax, cmin, smax = [], [], []
    for r in rows:
        wts = weights(r)
        sums = [mp.fsum(a * b for a, b in zip(wts, vec)) for vec in cut_vals]
        cmax.append(max(sums))
        cmin.append(min(sums))
        smax.append(max(mp.fsum(a * b for a, b in zip(wts, vec)) for vec in s1_vals))
    return SymmetryReport(list(n_list), cmax, cmin, smax, extra_infinity)
