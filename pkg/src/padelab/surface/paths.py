"""Deterministic cut-avoiding polygonal routes in the plane.

A visibility graph is built once per cut system from waypoints placed on
small rings around every cut vertex and crossing, on both sides of every cut
segment, and on a large circle enclosing everything.  Routes are shortest
paths in that graph (Dijkstra with index tie-breaking), so they never cross
a cut and are reproducible.
"""

from __future__ import annotations

import heapq
import math

from ..errors import PathDegeneracy
from .cuts import CutSystem, point_seg_dist


class Router:
    def __init__(self, cuts: CutSystem):
        self.cuts = cuts
        feats = cuts.features
        dmin = math.inf
        for i in range(len(feats)):
            for j in range(i + 1, len(feats)):
                d = abs(feats[i] - feats[j])
                if d > 1e-12:
                    dmin = min(dmin, d)
        for f in feats:
            for _, _, a, b in cuts.segments:
                if abs(f - a) > 1e-12 and abs(f - b) > 1e-12:
                    d = point_seg_dist(f, a, b)
                    if d > 1e-12:
                        dmin = min(dmin, d)
        if dmin is math.inf:
            dmin = cuts.scale
        self.delta = min(0.25 * dmin, 0.1 * cuts.scale)
        center = sum(cuts.fE) / len(cuts.fE)
        self.center = center
        self.R = max(abs(p - center) for p in feats) * 1.5 + self.delta * 4
        pts = []
        for f in feats:
            for k in range(8):
                pts.append(f + self.delta * complex(math.cos(math.pi * (k + 0.5) / 4),
                                                    math.sin(math.pi * (k + 0.5) / 4)))
        for ai, k, a, b in cuts.segments:
            n = cuts.arc_left_normal(ai, k)
            L = abs(b - a)
            m = max(1, int(L / (4 * self.delta)))
            for j in range(1, 2 * m + 1, 2):
                mid = a + (b - a) * (j / (2 * m))
                pts.append(mid + self.delta * n)
                pts.append(mid - self.delta * n)
        for k in range(16):
            pts.append(center + self.R * complex(math.cos(2 * math.pi * (k + 0.25) / 16),
                                                 math.sin(2 * math.pi * (k + 0.25) / 16)))
        self.points = [p for p in pts if cuts.nearest_cut_distance(p) >= 0.4 * self.delta]
        self.branch = list(cuts.fE)
        n = len(self.points)
        self.adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if self.visible(self.points[i], self.points[j]):
                    d = abs(self.points[i] - self.points[j])
                    self.adj[i].append((j, d))
                    self.adj[j].append((i, d))

    def visible(self, p: complex, q: complex, avoid=()) -> bool:
        if not self.cuts.segment_clear(p, q):
            return False
        for e in self.branch:
            if abs(e - p) > 1e-12 and abs(e - q) > 1e-12 and point_seg_dist(e, p, q) < 0.3 * self.delta:
                return False
        for c, r in avoid:
            if point_seg_dist(c, p, q) < r:
                return False
        return True

    def route(self, start: complex, end: complex, avoid=()) -> list[complex]:
        """Shortest cut-avoiding polyline from ``start`` to ``end``."""
        if abs(start - end) < 1e-300:
            return [start, end]
        if self.visible(start, end, avoid):
            return [start, end]
        n = len(self.points)
        S, T = n, n + 1
        start_edges = [(j, abs(start - p)) for j, p in enumerate(self.points)
                       if self.visible(start, p, avoid)]
        end_edges = {j: abs(end - p) for j, p in enumerate(self.points)
                     if self.visible(p, end, avoid)}
        dist = {S: 0.0}
        prev = {}
        heap = [(0.0, S)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            if u == T:
                break
            if u == S:
                nbrs = start_edges
            else:
                nbrs = [(j, w) for j, w in self.adj[u]
                        if not avoid or self._edge_ok(u, j, avoid)]
                if u in end_edges:
                    nbrs = nbrs + [(T, end_edges[u])]
            for v, w in nbrs:
                nd = d + w
                if nd < dist.get(v, math.inf) - 1e-15:
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, v))
        if T not in done:
            raise PathDegeneracy("no cut-avoiding route found")
        out = [end]
        u = prev[T]
        while u != S:
            out.append(self.points[u])
            u = prev[u]
        out.append(start)
        return out[::-1]

    def _edge_ok(self, i, j, avoid) -> bool:
        p, q = self.points[i], self.points[j]
        return all(point_seg_dist(c, p, q) >= r for c, r in avoid)

    def exit_point(self, branch_index: int) -> complex:
        """Point just off the branch point, opposite to its arc's direction."""
        cuts = self.cuts
        for arc in cuts.arcs:
            if arc.start == branch_index:
                t = arc.tangent_at_start()
                return cuts.fE[branch_index] - 0.5 * self.delta * t
            if arc.end == branch_index:
                t = arc.tangent_at_end()
                return cuts.fE[branch_index] + 0.5 * self.delta * t
        raise ValueError("not a branch point index")

    def far_point(self, direction: complex | None = None) -> complex:
        if direction is None:
            direction = complex(math.cos(0.3), math.sin(0.3))
        return self.center + self.R * 1.2 * direction / abs(direction)
