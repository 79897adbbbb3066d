"""Multipoint Padé approximants with free poles.

A scheme row is a multiset of ``2n`` interpolation nodes in the extended
plane.  The type ``(n, n)`` approximant ``p/q`` interpolates the target at
the finite nodes (with multiplicity) and the linearized error

    R(z) = (q(z) f(z) - p(z)) / v(z),   v(z) = prod over finite nodes (z - e),

vanishes at infinity to order ``n + 1``.  Polynomials are represented in a
scaled monomial basis ``zeta = (z - c) / r`` to keep the linear system usable
at degrees near sixty.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp

from .errors import NodeOnSingularity, SingularSystem, UnknownKind
from .numkit import Poly, null_space, poly_roots, to_mpc

INF = "inf"

SCHEME_KINDS = ("classical", "four_corner", "shifted_corner", "two_corner", "explicit", "conformal")

_ALIASES = {
    "inf": "classical", "classical-inf": "classical", "V_inf": "classical",
    "V_*": "four_corner", "four-corner": "four_corner", "star": "four_corner",
    "V'_*": "shifted_corner", "shifted-corner": "shifted_corner", "star_prime": "shifted_corner",
    "V''_*": "two_corner", "two-corner": "two_corner", "star_dprime": "two_corner",
    "explicit-list": "explicit", "conformal-synthesized": "conformal",
}


@dataclass(frozen=True)
class SchemeRow:
    """One row ``V_{2n}``: finite nodes with multiplicities plus nodes at infinity."""

    n: int
    finite: tuple  # ((node, multiplicity), ...)
    n_inf: int

    @property
    def size(self) -> int:
        return sum(m for _, m in self.finite) + self.n_inf

    def nodes(self) -> list:
        """Expanded node list, infinity written as the string ``"inf"``."""
        out = []
        for v, m in self.finite:
            out += [v] * m
        return out + [INF] * self.n_inf

    def v_poly(self) -> Poly:
        """``v_{2n}``: monic polynomial vanishing at the finite nodes."""
        p = Poly([1])
        for v, m in self.finite:
            p = p * Poly([-v, 1]) ** m
        return p


def row_from_nodes(nodes: Sequence, n: int | None = None) -> SchemeRow:
    """Collect a node list (``"inf"``/``None``/``mp.inf`` meaning infinity) into a row."""
    finite: list = []
    n_inf = 0
    for v in nodes:
        if v is None or (isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "∞")) \
                or (not isinstance(v, str) and mp.isinf(abs(to_mpc(v)))):
            n_inf += 1
            continue
        z = to_mpc(v)
        for i, (u, m) in enumerate(finite):
            if u == z:
                finite[i] = (u, m + 1)
                break
        else:
            finite.append((z, 1))
    total = sum(m for _, m in finite) + n_inf
    if total % 2:
        raise ValueError("a scheme row must contain an even number of nodes")
    if n is None:
        n = total // 2
    if total != 2 * n:
        raise ValueError(f"row has {total} nodes, expected {2 * n}")
    return SchemeRow(n, tuple(finite), n_inf)


class Scheme:
    """Interpolation scheme: a rule producing ``V_{2n}`` for every ``n``.

    Parameters
    ----------
    kind : str
        ``classical`` (all nodes at infinity), ``four_corner``,
        ``shifted_corner``, ``two_corner``, ``explicit`` or ``conformal``.
    nodes : sequence, optional
        For ``explicit``: either a single sequence whose first ``2n`` entries
        form ``V_{2n}``, or a mapping ``n -> node list``.
    generator : callable, optional
        For ``conformal``: ``n -> node list`` (see :mod:`padelab.surface.contour`).
    """

    def __init__(self, kind: str, nodes=None, generator=None):
        kind = _ALIASES.get(kind, kind)
        if kind not in SCHEME_KINDS:
            raise UnknownKind(f"unknown scheme kind {kind!r}")
        if kind == "explicit" and nodes is None:
            raise ValueError("explicit scheme needs nodes")
        if kind == "conformal" and generator is None:
            raise ValueError("conformal scheme needs a generator")
        self.kind, self._nodes, self._gen = kind, nodes, generator

    def __repr__(self):
        return f"Scheme({self.kind!r})"

    def row(self, n: int) -> SchemeRow:
        if n < 1:
            raise ValueError("n must be at least 1")
        return build_scheme(self, n)

    def corners(self) -> list:
        if self.kind == "four_corner":
            return [mp.mpc(1, 1), mp.mpc(-1, 1), mp.mpc(-1, -1), mp.mpc(1, -1)]
        if self.kind == "shifted_corner":
            q = mp.mpf(1) / 4
            return [mp.mpc(q, 1), mp.mpc(-1, q), mp.mpc(-q, -1), mp.mpc(1, -q)]
        if self.kind == "two_corner":
            return [mp.mpc(1, 1), mp.mpc(-1, -1)]
        return []


def build_scheme(kind, n: int) -> SchemeRow:
    """Row ``V_{2n}`` of a scheme.

    The corner generators put ``n // 2`` nodes at each of four corners and,
    for odd ``n``, two more at infinity; the two-corner generator puts ``n``
    at each of ``1+i`` and ``-1-i``.

    Examples
    --------
    >>> [complex(z) for z in build_scheme("four_corner", 2).nodes()]
    [(1+1j), (-1+1j), (-1-1j), (1-1j)]
    """
    s = kind if isinstance(kind, Scheme) else Scheme(kind)
    if n < 1:
        raise ValueError("n must be at least 1")
    if s.kind == "classical":
        return SchemeRow(n, (), 2 * n)
    if s.kind in ("four_corner", "shifted_corner"):
        m = n // 2
        finite = tuple((c, m) for c in s.corners()) if m else ()
        return SchemeRow(n, finite, 2 * (n % 2))
    if s.kind == "two_corner":
        return SchemeRow(n, tuple((c, n) for c in s.corners()), 0)
    if s.kind == "explicit":
        src = s._nodes
        if isinstance(src, dict):
            key = n if n in src else str(n)
            if key not in src:
                raise ValueError(f"explicit scheme has no row for n={n}")
            return row_from_nodes(src[key], n)
        if len(src) < 2 * n:
            raise ValueError(f"explicit scheme has fewer than {2 * n} nodes")
        return row_from_nodes(list(src)[: 2 * n], n)
    return row_from_nodes(s._gen(n), n)


# ---------------------------------------------------------------------------
# the linear problem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pole:
    z: object
    multiplicity: int
    residue: object


@dataclass(frozen=True)
class PadeResult:
    """Type ``(n, n)`` multipoint Padé approximant ``p/q``.

    ``q`` is monic of minimal degree; ``q_scaled``/``p_scaled`` are the same
    polynomials in the variable ``(z - center)/radius``.
    """

    n: int
    row: SchemeRow
    q: Poly
    p: Poly
    q_scaled: Poly
    p_scaled: Poly
    center: object
    radius: object
    poles: tuple
    v: Poly
    diagnostics: dict = field(default_factory=dict)

    def __call__(self, z):
        z = to_mpc(z)
        zeta = (z - self.center) / self.radius
        return self.p_scaled(zeta) / self.q_scaled(zeta)

    @property
    def pole_points(self) -> list:
        return [pl.z for pl in self.poles for _ in range(pl.multiplicity)]


def _binom_shift(k: int, s, m: int) -> list:
    """Coefficients of ``u^j`` (``j < m``) in ``(s + u)^k``."""
    out = []
    for j in range(min(k, m - 1) + 1):
        out.append(mp.binomial(k, j) * s ** (k - j))
    return out + [mp.mpc(0)] * (m - len(out))


def default_frame(f, row: SchemeRow):
    """Centre and radius of the scaled monomial basis.

    Uses the target's singular set when it exposes one (branch points of a
    germ, cut vertices of a Cauchy transform), otherwise the finite nodes.
    """
    pts = []
    if hasattr(f, "roots"):
        pts = list(f.roots)
    elif hasattr(f, "cuts"):
        pts = [to_mpc(e) for e in f.cuts.E]
    if not pts:
        pts = [v for v, _ in row.finite]
    if not pts:
        return mp.mpc(0), mp.mpf(1)
    c = mp.fsum(pts) / len(pts)
    r = max(abs(p - c) for p in pts)
    return c, (r if r > 0 else mp.mpf(1))


def assemble_system(f, row: SchemeRow, center, radius):
    """Rows of the homogeneous system in unknowns ``(a_0..a_n, b_0..b_n)``."""
    n = row.n
    N = n + 1
    rows = []
    for v, mult in row.finite:
        try:
            fv = f.taylor(v, mult, scale=radius)
        except ZeroDivisionError as exc:
            raise NodeOnSingularity(f"target singular at node {v}") from exc
        if not all(mp.isfinite(t.real) and mp.isfinite(t.imag) for t in fv):
            raise NodeOnSingularity(f"target singular at node {v}")
        s = (v - center) / radius
        mons = [_binom_shift(k, s, mult) for k in range(N)]
        for j in range(mult):
            rowj = []
            for k in range(N):
                mk = mons[k]
                rowj.append(mp.fsum(mk[i] * fv[j - i] for i in range(j + 1)))
            rowj += [-mons[k][j] for k in range(N)]
            rows.append(rowj)
    d = sum(m for _, m in row.finite)
    # (q f - p) = O(zeta^(d-n-1)) at infinity
    lo = d - n
    s0, lc = f.laurent_at_infinity(n + 2 + max(0, n - lo), center=center, scale=radius)
    for e in range(lo, n + 1):
        rowe = []
        for k in range(N):
            j = k - s0 - e  # coefficient index of zeta^(e - k)
            rowe.append(lc[j] if 0 <= j < len(lc) else mp.mpc(0))
        rowe += [mp.mpc(-1) if k == e else mp.mpc(0) for k in range(N)]
        rows.append(rowe)
    return rows


def _minimal_degree(basis, N, tol):
    """Null vector whose ``q`` part has the smallest degree."""
    vecs = [list(b) for b in basis]
    for k in range(N - 1, -1, -1):
        if len(vecs) == 1:
            break
        scale = max(abs(x) for v in vecs for x in v[:N])
        cand = [(abs(v[k]), i) for i, v in enumerate(vecs)]
        big, piv = max(cand, key=lambda t: (t[0], -t[1]))
        if big <= tol * scale:
            continue
        pv = vecs.pop(piv)
        vecs = [[x - (v[k] / pv[k]) * y for x, y in zip(v, pv)] for v in vecs]
    return vecs[0]


def compute_pade(f, row, n: int | None = None, center=None, radius=None) -> PadeResult:
    """Multipoint Padé approximant of type ``(n, n)``.

    Parameters
    ----------
    f : target
        Any object with ``taylor``/``laurent_at_infinity`` (see :mod:`padelab.germs`).
    row : SchemeRow, Scheme or str
        Interpolation row; a scheme (or scheme kind) is expanded with ``n``.
    n : int, optional
        Required when ``row`` is a scheme.

    Returns
    -------
    PadeResult
        Monic minimal-degree denominator, numerator, poles and residues.
        A rank-deficient system (more than one independent solution) issues
        a :class:`SingularSystem`-tagged warning and still returns the
        minimal-degree representative.
    """
    if not isinstance(row, SchemeRow):
        if n is None:
            raise ValueError("n is required when passing a scheme")
        row = build_scheme(row, n)
    n = row.n
    if center is None or radius is None:
        c0, r0 = default_frame(f, row)
        center = c0 if center is None else to_mpc(center)
        radius = r0 if radius is None else mp.mpf(radius)
    N = n + 1
    rows = assemble_system(f, row, center, radius)
    amax = max(abs(x) for r in rows for x in r)
    tol = mp.ldexp(mp.mpf(1), -(mp.prec * 3) // 4)
    basis, rank = null_space(rows, tol=tol)
    diag = {"rank": rank, "unknowns": 2 * N, "equations": len(rows), "nullity": len(basis)}
    if not basis:
        raise SingularSystem("no nontrivial solution found", rank=rank)
    if len(basis) > 1:
        warnings.warn(f"degenerate Padé system: null space of dimension {len(basis)} "
                      f"(rank {rank}); returning the minimal-degree denominator",
                      RuntimeWarning, stacklevel=2)
    dtol = mp.ldexp(mp.mpf(1), -mp.prec // 3)
    x = _minimal_degree(basis, N, dtol)
    a, b = x[:N], x[N:]
    amag = max(abs(t) for t in a)
    deg = max(k for k in range(N) if abs(a[k]) > dtol * amag)
    lead = a[deg]
    qs = Poly([t / lead for t in a[: deg + 1]])
    pscoef = [t / lead for t in b]
    bmag = max((abs(t) for t in pscoef), default=mp.mpf(0))
    while len(pscoef) > 1 and abs(pscoef[-1]) <= dtol * max(bmag, 1):
        pscoef.pop()
    ps = Poly(pscoef)
    q = _unscale(qs, center, radius)
    p = _unscale(ps, center, radius)
    k = q.lead
    q = Poly([t / k for t in q.coeffs])
    p = Poly([t / k for t in p.coeffs])
    poles = _poles(qs, ps, center, radius)
    diag["degree_q"] = qs.degree
    diag["degree_p"] = ps.degree
    diag["system_residual"] = _rel_residual(rows, [t / lead for t in x], amax)
    res = PadeResult(n, row, q, p, qs, ps, center, radius, tuple(poles), row.v_poly(), diag)
    diag["interpolation_residual"] = interpolation_residual(res, f)
    diag["decay_order"] = decay_order(res, f)
    return res


def _rel_residual(rows, x, amax):
    xn = max(abs(t) for t in x)
    return max(abs(mp.fsum(a * b for a, b in zip(r, x))) for r in rows) / (amax * xn)


def _unscale(ps: Poly, center, radius) -> Poly:
    """``P(zeta)`` rewritten in ``z`` with ``zeta = (z - center)/radius``."""
    return ps.compose_affine(-center / radius, 1 / radius)


def _poles(qs: Poly, ps: Poly, center, radius) -> list:
    if qs.degree < 1:
        return []
    out = []
    roots = poly_roots(qs)
    for zeta, m in roots:
        if m == 1:
            res = ps(zeta) / qs.deriv()(zeta) * radius
        else:
            others = [abs(zeta - w) for w, _ in roots if w != zeta]
            rr = (min(others) if others else mp.mpf(1)) / 3
            M = 64
            acc = mp.mpc(0)
            for j in range(M):
                e = mp.expjpi(mp.mpf(2 * j) / M)
                t = zeta + rr * e
                acc += ps(t) / qs(t) * rr * e
            res = acc / M * radius
        out.append(Pole(center + radius * zeta, m, res))
    return out


def linearized_error(r: PadeResult, f, z, via=None):
    """``R_n(z) = (q(z) f(z) - p(z)) / v_{2n}(z)``."""
    z = to_mpc(z)
    fz = f(z, via) if via is not None else f(z)
    zeta = (z - r.center) / r.radius
    # evaluate in the scaled frame and restore the monic normalisation in z
    k = r.radius ** r.q_scaled.degree
    return (r.q_scaled(zeta) * fz - r.p_scaled(zeta)) * k / r.v(z)


def interpolation_residual(r: PadeResult, f) -> mp.mpf:
    """Largest relative defect of the node conditions (values and derivatives)."""
    worst = mp.mpf(0)
    for v, mult in r.row.finite:
        fv = f.taylor(v, mult, scale=r.radius)
        s = (v - r.center) / r.radius
        qv = list(r.q_scaled.compose_affine(s, 1).coeffs) + [mp.mpc(0)] * mult
        pv = list(r.p_scaled.compose_affine(s, 1).coeffs) + [mp.mpc(0)] * mult
        for j in range(mult):
            qf = mp.fsum(qv[i] * fv[j - i] for i in range(j + 1))
            scale = 1 + mp.fsum(abs(qv[i] * fv[j - i]) for i in range(j + 1))
            worst = max(worst, abs(qf - pv[j]) / scale)
    return worst


def decay_order(r: PadeResult, f, extra: int = 4) -> int:
    """Order of vanishing of ``R_n`` at infinity, from the Laurent data of ``f``.

    Returns the smallest ``k`` such that the ``zeta^(-k)`` coefficient of the
    expansion of ``R_n`` is numerically nonzero (capped at ``n + 1 + extra``).
    """
    n = r.n
    c, rad = r.center, r.radius
    m = 2 * n + extra + 4
    s0, lc = f.laurent_at_infinity(m, center=c, scale=rad)
    qs, ps = r.q_scaled, r.p_scaled
    vs = r.v.compose_affine(c, rad)  # v(c + rad*zeta), degree d
    d = vs.degree
    # qf - p as a map power -> coefficient
    num = {}
    for k, a in enumerate(qs.coeffs):
        for j, cj in enumerate(lc):
            e = k - s0 - j
            num[e] = num.get(e, mp.mpc(0)) + a * cj
    for k, b in enumerate(ps.coeffs):
        num[k] = num.get(k, mp.mpc(0)) - b
    top = max(num)
    bot = min(num)
    # divide by v: series in 1/zeta, R = sum r_i zeta^(top - d - i)
    nc = [num.get(top - i, mp.mpc(0)) for i in range(top - bot + 1)]
    vc = [vs.coeffs[d - i] for i in range(d + 1)]
    rc = []
    for i in range(len(nc)):
        t = nc[i] - mp.fsum(vc[j] * rc[i - j] for j in range(1, min(i, d) + 1))
        rc.append(t / vc[0])
    powers = [top - d - i for i in range(len(rc))]
    scale = max(abs(t) for t in rc) or mp.mpf(1)
    tol = mp.ldexp(mp.mpf(1), -mp.prec // 2) * max(scale, max(abs(t) for t in qs.coeffs))
    cap = n + 1 + extra
    for pw, t in zip(powers, rc):
        if -pw >= cap:
            break
        if abs(t) > tol:
            return -pw
    return cap


def decay_order_circle(r: PadeResult, f, radius, samples: int | None = None, rel_tol=None) -> int:
    """Decay order of ``R_n`` measured by trapezoidal Laurent coefficients on ``|z - c| = radius``.

    Independent of the algebraic Laurent data; needs ``f`` cheap to evaluate
    at large ``|z|``.
    """
    n = r.n
    M = samples or 4 * (n + 1) + 64
    R = mp.mpf(radius)
    vals = []
    for j in range(M):
        e = mp.expjpi(mp.mpf(2 * j) / M)
        vals.append(linearized_error(r, f, r.center + R * e))
    coefs = []
    for k in range(n + 4):
        ck = mp.fsum(vals[j] * mp.expjpi(mp.mpf(2 * j * k) / M) for j in range(M)) / M
        coefs.append(abs(ck))  # size of the zeta^(-k) term on the circle
    scale = max(coefs)
    if rel_tol is None:
        rel_tol = mp.ldexp(mp.mpf(1), -mp.prec // 3)
    for k, a in enumerate(coefs):
        if a > rel_tol * scale:
            return k
    return n + 4


# ---------------------------------------------------------------------------
# pole statistics
# ---------------------------------------------------------------------------

def _dist_point_segment(z, a, b) -> float:
    z, a, b = complex(z), complex(a), complex(b)
    d = b - a
    if d == 0:
        return abs(z - a)
    t = ((z - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * d))


def reference_segments(S) -> list:
    """Normalise a reference set to a list of segments ``(a, b)``.

    Accepts a :class:`~padelab.surface.CutSystem`, a surface, a list of
    segments or a list of points (treated as degenerate segments).
    """
    if hasattr(S, "cuts"):
        S = S.cuts
    if hasattr(S, "segments") and not isinstance(S, (list, tuple)):
        return [(a, b) for _, _, a, b in S.segments]
    out = []
    for item in S:
        if isinstance(item, (list, tuple)):
            pts = [complex(to_mpc(x)) for x in item]
            if len(pts) == 1:
                out.append((pts[0], pts[0]))
            for i in range(len(pts) - 1):
                out.append((pts[i], pts[i + 1]))
        else:
            z = complex(to_mpc(item))
            out.append((z, z))
    return out


@dataclass(frozen=True)
class PoleReport:
    distances: tuple
    threshold: float
    outliers: tuple
    hausdorff: float

    @property
    def n_outliers(self) -> int:
        return len(self.outliers)


def pole_report(r, S, threshold: float = 0.05) -> PoleReport:
    """Distances from the poles (with multiplicity) to the reference set ``S``."""
    segs = reference_segments(S)
    pts = r.pole_points if isinstance(r, PadeResult) else list(r)
    dists = tuple(min(_dist_point_segment(z, a, b) for a, b in segs) for z in pts)
    outl = tuple(z for z, d in zip(pts, dists) if d > threshold)
    return PoleReport(dists, threshold, outl, max(dists, default=0.0))


def hausdorff_points(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a, b = [complex(z) for z in a], [complex(z) for z in b]
    if not a and not b:
        return 0.0
    if not a or not b:
        return math.inf
    d1 = max(min(abs(x - y) for y in b) for x in a)
    d2 = max(min(abs(x - y) for x in a) for y in b)
    return max(d1, d2)


@dataclass(frozen=True)
class Stabilization:
    """Split of a pole set into a cluster stable under ``n_prev -> n`` and outliers."""

    cluster: tuple
    outliers: tuple
    hausdorff_all: float
    hausdorff_cluster: float

    @property
    def n_outliers(self) -> int:
        return len(self.outliers)


def stabilization(current, previous, threshold: float = 0.05) -> Stabilization:
    """Poles of ``current`` within ``threshold`` of the pole set of ``previous`` form the cluster.

    Both arguments are :class:`PadeResult` objects or point lists (with
    multiplicity).  ``hausdorff_cluster`` compares the two clusters, each
    restricted to points within ``threshold`` of the other pole set.
    """
    cur = [complex(z) for z in (current.pole_points if isinstance(current, PadeResult) else current)]
    prev = [complex(z) for z in (previous.pole_points if isinstance(previous, PadeResult) else previous)]

    def near(z, pts):
        return any(abs(z - w) <= threshold for w in pts)

    cluster = tuple(z for z in cur if near(z, prev))
    outl = tuple(z for z in cur if not near(z, prev))
    prev_cluster = [z for z in prev if near(z, cur)]
    return Stabilization(cluster, outl, hausdorff_points(cur, prev),
                         hausdorff_points(cluster, prev_cluster))


def orthogonality_defects(r: PadeResult, transform, jmax: int | None = None) -> list:
    """``int q(t) t^j rho(t) / (v(t) w_+(t)) dt`` over the cuts, ``j < n``, scaled.

    Each entry is divided by ``int |q t^j rho / (v w_+)| |dt|`` so that
    exact orthogonality reads as a value near zero.
    """
    from .germs import integrate_over_cuts

    n = r.n if jmax is None else jmax
    rho = transform.rho
    c, rad = r.center, r.radius

    def F(t, wp):
        base = r.q_scaled((t - c) / rad) * rho(t) / (r.v(t) * wp)
        x = (t - c) / rad
        out, p = [], base
        for _ in range(n):
            out.append(p)
            p = p * x
        return out + [abs(base) * abs(x) ** j for j in range(n)]

    vals = integrate_over_cuts(transform.cuts, F, transform.order)
    return [abs(vals[j]) / max(abs(vals[n + j]), mp.eps) for j in range(n)]
