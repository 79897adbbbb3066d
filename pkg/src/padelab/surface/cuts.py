"""Cut systems: polygonal arcs pairing branch points, and the sheet-0 ``w``.

On sheet 0 the square root ``w(z) = prod_e (z - e)^{1/2}`` is the product
over arcs of ``W(z) = (z - a) exp(1/2 sum_k Log((z - p_{k+1}) / (z - p_k)))``
where ``a = p_0, ..., p_K`` are the arc vertices.  Each factor is continuous
off its own arc and behaves like ``z`` at infinity, so ``w ~ z^{g+1}``.

The ``+`` side of an arc is its left side with respect to the arc's
orientation; there the logarithm of the crossed ratio has argument ``+pi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp

from ..errors import CutEndpointMismatch, CutsSeparatePlane, DuplicateBranchPoint, OnCutWithoutSide
from ..numkit import to_mpc


def _c(z) -> complex:
    return complex(z)


def seg_intersection(a: complex, b: complex, c: complex, d: complex, eps: float = 1e-14):
    """Parameters ``(s, t)`` of the proper intersection of ``ab`` and ``cd``.

    Returns ``None`` for parallel or non-intersecting segments.  Both
    parameters lie in ``[0, 1]``.
    """
    r = b - a
    q = d - c
    den = r.real * q.imag - r.imag * q.real
    if abs(den) <= eps * abs(r) * abs(q):
        return None
    w = c - a
    s = (w.real * q.imag - w.imag * q.real) / den
    t = (w.real * r.imag - w.imag * r.real) / den
    if -eps <= s <= 1 + eps and -eps <= t <= 1 + eps:
        return s, t
    return None


def point_seg_dist(p: complex, a: complex, b: complex) -> float:
    d = b - a
    L2 = d.real * d.real + d.imag * d.imag
    if L2 == 0:
        return abs(p - a)
    t = ((p - a).real * d.real + (p - a).imag * d.imag) / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


def seg_seg_dist(a: complex, b: complex, c: complex, d: complex) -> float:
    if seg_intersection(a, b, c, d, 0.0) is not None:
        return 0.0
    return min(point_seg_dist(a, c, d), point_seg_dist(b, c, d),
               point_seg_dist(c, a, b), point_seg_dist(d, a, b))


@dataclass
class CutArc:
    """Polygonal arc from branch point ``E[start]`` to ``E[end]``."""

    vertices: list
    start: int
    end: int
    fvertices: list = field(default_factory=list)

    def __post_init__(self):
        self.vertices = [to_mpc(v) for v in self.vertices]
        self.fvertices = [_c(v) for v in self.vertices]

    @property
    def nseg(self) -> int:
        return len(self.vertices) - 1

    def segment(self, k: int):
        return self.vertices[k], self.vertices[k + 1]

    def tangent_at_start(self) -> complex:
        d = self.fvertices[1] - self.fvertices[0]
        return d / abs(d)

    def tangent_at_end(self) -> complex:
        d = self.fvertices[-1] - self.fvertices[-2]
        return d / abs(d)


@dataclass(frozen=True)
class Crossing:
    """Interior crossing of two arcs (a smooth meeting point, not in E)."""

    point: object
    arc_a: int
    seg_a: int
    t_a: float
    arc_b: int
    seg_b: int
    t_b: float


class CutSystem:
    """Validated set of arcs pairing the branch points ``E``."""

    def __init__(self, E, arcs):
        self.E = [to_mpc(e) for e in E]
        self.fE = [_c(e) for e in self.E]
        n = len(self.E)
        if n < 2 or n % 2:
            raise ValueError("need an even number (>= 2) of branch points")
        scale = max(1.0, max(abs(e) for e in self.fE))
        self.scale = scale
        for i in range(n):
            for j in range(i + 1, n):
                if abs(self.fE[i] - self.fE[j]) <= 1e-12 * scale:
                    raise DuplicateBranchPoint(f"branch points {i} and {j} coincide")
        self.arcs = [self._make_arc(a) for a in arcs]
        used = sorted(i for arc in self.arcs for i in (arc.start, arc.end))
        if used != list(range(n)):
            raise CutEndpointMismatch("every branch point must be the endpoint of exactly one arc")
        self.segments = [(ai, k, arc.fvertices[k], arc.fvertices[k + 1])
                         for ai, arc in enumerate(self.arcs) for k in range(arc.nseg)]
        self.crossings = self._find_crossings()
        self.fvertices = sorted({v for arc in self.arcs for v in arc.fvertices},
                                key=lambda v: (v.real, v.imag))
        self.features = self.fvertices + [_c(c.point) for c in self.crossings]

    @property
    def genus(self) -> int:
        return len(self.E) // 2 - 1

    def _match(self, p) -> int | None:
        fp = _c(p)
        for i, e in enumerate(self.fE):
            if abs(fp - e) <= 1e-10 * self.scale:
                return i
        return None

    def _make_arc(self, pts) -> CutArc:
        pts = [to_mpc(p) for p in pts]
        if len(pts) < 2:
            raise CutEndpointMismatch("an arc needs at least two vertices")
        i0, i1 = self._match(pts[0]), self._match(pts[-1])
        if i0 is None or i1 is None or i0 == i1:
            raise CutEndpointMismatch("arc endpoints must be two distinct branch points")
        for p in pts[1:-1]:
            if self._match(p) is not None:
                raise CutEndpointMismatch("branch points may only be arc endpoints")
        pts[0], pts[-1] = self.E[i0], self.E[i1]
        for a, b in zip(pts, pts[1:]):
            if abs(_c(a) - _c(b)) <= 1e-12 * self.scale:
                raise CutEndpointMismatch("degenerate arc segment")
        return CutArc(pts, i0, i1)

    def _find_crossings(self):
        out = []
        segs = self.segments
        tol = 1e-12
        pair_count: dict = {}
        for x in range(len(segs)):
            ai, ki, a, b = segs[x]
            for y in range(x + 1, len(segs)):
                aj, kj, c, d = segs[y]
                if ai == aj and abs(ki - kj) == 1:
                    # consecutive segments share a vertex; check for overlap only
                    if seg_intersection(a, b, c, d, 0.0) is None and _collinear_overlap(a, b, c, d):
                        raise CutsSeparatePlane("arc folds back on itself")
                    continue
                hit = seg_intersection(a, b, c, d, tol)
                if hit is None:
                    if _collinear_overlap(a, b, c, d):
                        raise CutsSeparatePlane("overlapping cut segments")
                    continue
                s, t = hit
                if ai == aj:
                    raise CutsSeparatePlane("self-intersecting arc")
                ends_s = s < 1e-9 or s > 1 - 1e-9
                ends_t = t < 1e-9 or t > 1 - 1e-9
                if ends_s and ends_t:
                    raise CutsSeparatePlane("arcs share a vertex")
                if ends_s or ends_t:
                    # a vertex lying on another arc: treat as touching, which
                    # splits the neighbourhood just like a crossing
                    pass
                key = (min(ai, aj), max(ai, aj))
                pair_count[key] = pair_count.get(key, 0) + 1
                pa, pb = self.arcs[ai].segment(ki)
                pt = pa + (pb - pa) * mp.mpf(s)
                pt = self._refine_crossing(ai, ki, aj, kj, pt)
                out.append(Crossing(pt, ai, ki, s, aj, kj, t))
        # crossing graph of arcs must be a forest, otherwise a bounded
        # component of the complement appears
        if any(v > 1 for v in pair_count.values()):
            raise CutsSeparatePlane("two arcs cross more than once")
        parent = list(range(len(self.arcs)))

        def find(i):
            while parent[i] != i:
                i = parent[i]
            return i

        for a, b in pair_count:
            ra, rb = find(a), find(b)
            if ra == rb:
                raise CutsSeparatePlane("cuts enclose a bounded region")
            parent[ra] = rb
        return out

    def _refine_crossing(self, ai, ki, aj, kj, guess):
        a, b = self.arcs[ai].segment(ki)
        c, d = self.arcs[aj].segment(kj)
        r, q, w = b - a, d - c, c - a
        den = r.real * q.imag - r.imag * q.real
        s = (w.real * q.imag - w.imag * q.real) / den
        return a + r * s

    # -- evaluation ---------------------------------------------------------

    def locate(self, z, tol: float | None = None):
        """Return ``(arc, seg)`` if ``z`` lies on a cut (within ``tol``)."""
        fz = _c(z)
        tol = 1e-30 * self.scale if tol is None else tol
        pre = max(float(tol), 1e-12 * self.scale)
        z = to_mpc(z)
        for ai, k, a, b in self.segments:
            if point_seg_dist(fz, a, b) <= pre:
                # confirm at working precision
                A, B = self.arcs[ai].segment(k)
                d = B - A
                t = mp.re((z - A) * mp.conj(d)) / abs(d) ** 2
                t = min(mp.mpf(1), max(mp.mpf(0), t))
                if abs(z - (A + t * d)) <= tol:
                    return ai, k
        return None

    def w(self, z, on=None):
        """Sheet-0 value of ``w`` at ``z``.

        ``on = (arc, seg, side)`` requests the boundary value on the given
        cut segment from side ``+1`` (left) or ``-1`` (right).
        """
        z = to_mpc(z)
        out = mp.mpc(1)
        for ai, arc in enumerate(self.arcs):
            if on is not None and on[0] == ai:
                out *= self._W_boundary(arc, z, on[1], on[2])
            else:
                out *= self._W(arc, z)
        return out

    @staticmethod
    def _W(arc: CutArc, z):
        v = arc.vertices
        if len(v) == 2:
            a, b = v
            return (z - a) * mp.sqrt((z - b) / (z - a))
        s = mp.mpc(0)
        for p, q in zip(v, v[1:]):
            s += mp.log((z - q) / (z - p))
        return (z - v[0]) * mp.exp(s / 2)

    @staticmethod
    def _W_boundary(arc: CutArc, z, k: int, side: int):
        v = arc.vertices
        if len(v) == 2:
            a, b = v
            r = abs((z - b) / (z - a))
            return (z - a) * mp.mpc(0, side) * mp.sqrt(r)
        s = mp.mpc(0)
        for j, (p, q) in enumerate(zip(v, v[1:])):
            if j == k:
                s += mp.mpc(mp.log(abs((z - q) / (z - p))), side * mp.pi)
            else:
                s += mp.log((z - q) / (z - p))
        return (z - v[0]) * mp.exp(s / 2)

    def w_checked(self, z):
        """Sheet-0 ``w`` that refuses points on a cut."""
        if self.locate(z, 1e-25 * self.scale) is not None:
            raise OnCutWithoutSide("point lies on a cut; a side is required")
        return self.w(z)

    def crossings_of_segment(self, p: complex, q: complex):
        """Parameters in ``(0, 1)`` where the straight segment ``pq`` crosses a cut.

        Returns a sorted list of ``(t, arc, seg)``.
        """
        out = []
        for ai, k, a, b in self.segments:
            hit = seg_intersection(p, q, a, b, 0.0)
            if hit is None:
                continue
            s, t = hit
            if 0.0 < s < 1.0:
                out.append((s, ai, k))
        out.sort()
        return out

    def segment_clear(self, p: complex, q: complex, ignore_endpoints: bool = False) -> bool:
        """True if segment ``pq`` does not meet any cut."""
        for ai, k, a, b in self.segments:
            hit = seg_intersection(p, q, a, b, 1e-13)
            if hit is None:
                continue
            if ignore_endpoints:
                s, _ = hit
                if s < 1e-9 or s > 1 - 1e-9:
                    continue
            return False
        return True

    def arc_left_normal(self, ai: int, k: int) -> complex:
        a, b = self.arcs[ai].fvertices[k], self.arcs[ai].fvertices[k + 1]
        d = (b - a) / abs(b - a)
        return 1j * d

    def nearest_cut_distance(self, z) -> float:
        fz = _c(z)
        return min(point_seg_dist(fz, a, b) for _, _, a, b in self.segments)

    def sample_points(self, per_segment: int = 5, margin: float = 0.05):
        """Interior sample points ``(z, arc, seg)`` on every cut segment."""
        out = []
        for ai, arc in enumerate(self.arcs):
            for k in range(arc.nseg):
                a, b = arc.segment(k)
                for j in range(per_segment):
                    t = mp.mpf(margin) + (1 - 2 * mp.mpf(margin)) * (mp.mpf(j) + mp.mpf(1) / 2) / per_segment
                    out.append((a + (b - a) * t, ai, k))
        return out


def _collinear_overlap(a, b, c, d) -> bool:
    r = b - a
    if abs(r) == 0:
        return False
    for p in (c, d):
        w = p - a
        if abs(r.real * w.imag - r.imag * w.real) > 1e-12 * abs(r) * max(1.0, abs(w)):
            return False
    # collinear: overlap of the 1-D projections
    def proj(p):
        return ((p - a).real * r.real + (p - a).imag * r.imag) / abs(r) ** 2
    lo, hi = sorted((proj(c), proj(d)))
    return hi > 1e-12 and lo < 1 - 1e-12
