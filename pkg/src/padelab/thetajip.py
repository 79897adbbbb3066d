"""Riemann theta function, scheme vectors and Jacobi inversion.

The theta series is summed over the lattice points of an ellipsoid chosen
so that the neglected tail is below a prescribed tolerance relative to the
largest term.  Jacobi inversion is Newton's method on the symmetric Abel
map with a multistart over a fixed grid of surface points; the theta
divisor is used only as an independent check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp

from .errors import DnContainsInfinity0, NoConvergence, NodeAtBranchPoint, NonUniqueDivisor
from .numkit import Poly, solve_linear, to_mpc, tolerance_override
from .surface.core import Divisor, Surface, SurfacePoint


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

class ThetaContext:
    """Truncation data for ``theta(u) = sum exp(pi i n.B.n + 2 pi i n.u)``.

    Parameters
    ----------
    B : g x g matrix
        Symmetric with positive definite imaginary part.
    eps : mpf, optional
        Tail tolerance relative to the largest term; default ``2**(-prec)``.
    K : vector, optional
        Riemann constants; see :func:`riemann_constants`.
    """

    def __init__(self, B, eps=None, K=None):
        self.B = [[to_mpc(x) for x in row] for row in B]
        self.g = len(self.B)
        g = self.g
        self.eps = mp.mpf(eps) if eps is not None else mp.ldexp(mp.mpf(1), -mp.prec)
        Y = mp.matrix([[self.B[i][j].imag for j in range(g)] for i in range(g)]) if g else None
        self.Y = Y
        if g:
            L = mp.cholesky(Y)  # Y = L L^T
            self.R = L.T  # Y = R^T R, R upper triangular
            self.Yinv = Y ** -1
            ev, _ = mp.eigsy(Y)
            self.lam_min = min(ev[i] for i in range(g))
            self.radius = self._radius()
        self.K = list(K) if K is not None else None

    def _radius(self):
        """``r`` with tail of ``sum_{Q > r^2} exp(-pi Q)`` below ``eps``.

        Uses the count bound ``#{n : Q(n + c) <= s} <= (2 sqrt(s / lam_min) + 1)^g``.
        """
        g, lam, eps = self.g, self.lam_min, self.eps
        r2 = mp.mpf(1)
        while True:
            tail = mp.mpf(0)
            j = 0
            while True:
                s = r2 + j
                term = (2 * mp.sqrt((s + 1) / lam) + 1) ** g * mp.exp(-mp.pi * s)
                tail += term
                if term < eps * mp.mpf(10) ** -3:
                    break
                j += 1
            if tail <= eps:
                return mp.sqrt(r2)
            r2 += 1

    def with_radius_scale(self, factor) -> "ThetaContext":
        ctx = ThetaContext(self.B, self.eps, self.K)
        if self.g:
            ctx.radius = self.radius * factor
        return ctx

    def points(self, center) -> list:
        """Integer vectors ``n`` with ``(n - center)^T Y (n - center) <= radius^2``.

        Fincke-Pohst enumeration, last coordinate outermost.
        """
        g = self.g
        R = self.R
        bound = self.radius ** 2
        out = []
        n = [0] * g

        def rec(i, rem):
            # partial sum for coordinates > i already fixed
            s = mp.fsum(R[i, j] * (n[j] - center[j]) for j in range(i + 1, g))
            rii = R[i, i]
            half = mp.sqrt(max(rem, 0)) / rii
            mid = center[i] - s / rii
            lo, hi = int(mp.ceil(mid - half)), int(mp.floor(mid + half))
            for k in range(lo, hi + 1):
                n[i] = k
                t = rii * (k - center[i]) + s
                r2 = rem - t * t
                if r2 < 0:
                    continue
                if i == 0:
                    out.append(tuple(n))
                else:
                    rec(i - 1, r2)

        rec(g - 1, bound)
        return out

    def center_of(self, u):
        """``-Y^{-1} Im u``, the centre of the dominant terms."""
        g = self.g
        im = mp.matrix([mp.im(x) for x in u])
        v = self.Yinv * im
        return [-v[i] for i in range(g)]


def theta(ctx: ThetaContext, u: Sequence) -> mp.mpc:
    """Riemann theta function at ``u`` (``1`` for genus 0)."""
    g = ctx.g
    if g == 0:
        return mp.mpc(1)
    u = [to_mpc(x) for x in u]
    B = ctx.B
    c = ctx.center_of(u)
    acc = []
    for n in ctx.points(c):
        q = mp.fsum(n[i] * B[i][j] * n[j] for i in range(g) for j in range(g))
        lin = mp.fsum(n[i] * u[i] for i in range(g))
        acc.append(mp.exp(mp.pi * 1j * q + 2j * mp.pi * lin))
    return mp.fsum(acc)


def theta_direct(B, u, N: int) -> mp.mpc:
    """Plain box summation ``|n_i| <= N`` (reference for tests)."""
    g = len(B)
    tot = []
    for n in itertools.product(range(-N, N + 1), repeat=g):
        q = mp.fsum(n[i] * B[i][j] * n[j] for i in range(g) for j in range(g))
        lin = mp.fsum(n[i] * u[i] for i in range(g))
        tot.append(mp.exp(mp.pi * 1j * q + 2j * mp.pi * lin))
    return mp.fsum(tot)


def theta_period_factor(B, u, m) -> mp.mpc:
    """``exp(-pi i m.B.m - 2 pi i m.u)`` from ``theta(u + B m) = factor * theta(u)``."""
    g = len(B)
    q = mp.fsum(m[i] * B[i][j] * m[j] for i in range(g) for j in range(g))
    lin = mp.fsum(m[i] * u[i] for i in range(g))
    return mp.exp(-mp.pi * 1j * q - 2j * mp.pi * lin)


# ---------------------------------------------------------------------------
# scheme vectors and c_rho
# ---------------------------------------------------------------------------

def _node_poles(row, extra_infinity: bool = False):
    poles = []
    for v, m in row.finite:
        poles.append((SurfacePoint(v, 0), m))
    k = row.n_inf + (1 if extra_infinity else 0)
    if k:
        poles.append((SurfacePoint.infinity(0), k))
    return poles


def _check_nodes(S: Surface, row):
    for v, _ in row.finite:
        if any(abs(v - e) <= mp.mpf(10) ** -25 * S.cuts.scale for e in S.E):
            raise NodeAtBranchPoint(f"node {complex(v)} is a branch point")


def scheme_vectors(S: Surface, row, extra_infinity: bool = False, return_imag: bool = False):
    """``(omega_n, tau_n)`` from the stored periods of the third-kind differentials.

    ``(omega_n)_k = -(1/4 pi i) sum_i beta_k-period of G_{v_i}``,
    ``(tau_n)_k = (1/4 pi i) sum_i alpha_k-period of G_{v_i}``.
    With ``return_imag`` the discarded imaginary parts are returned as well.
    """
    g = S.g
    if g == 0:
        return ([], [], [], []) if return_imag else ([], [])
    _check_nodes(S, row)
    om = [mp.mpc(0)] * g
    ta = [mp.mpc(0)] * g
    for p, m in _node_poles(row, extra_infinity):
        G = S.third_kind(p)
        for k in range(g):
            om[k] -= m * G.beta_periods[k]
            ta[k] += m * G.alpha_periods[k]
    om = [x / (4j * mp.pi) for x in om]
    ta = [x / (4j * mp.pi) for x in ta]
    if return_imag:
        return [mp.re(x) for x in om], [mp.re(x) for x in ta], [mp.im(x) for x in om], [mp.im(x) for x in ta]
    return [mp.re(x) for x in om], [mp.re(x) for x in ta]


def scheme_vectors_aggregate(S: Surface, row, extra_infinity: bool = False):
    """Same vectors from direct cycle integrals of the aggregated differential ``G_n``."""
    g = S.g
    if g == 0:
        return [], []
    parts = [(S.third_kind(p), m) for p, m in _node_poles(row, extra_infinity)]

    def h(t):
        return mp.fsum(m * G.h(t) for G, m in parts) / 2

    Pa = S.cycle_integrals(h, S.alpha)
    Pb = S.cycle_integrals(h, S.beta)
    return [mp.re(-x / (2j * mp.pi)) for x in Pb], [mp.re(x / (2j * mp.pi)) for x in Pa]


def c_rho(S: Surface, density) -> list:
    """``(1/2 pi i)`` times the integral of ``log rho * Omega`` over the lifted cut cycle.

    The lifted cycle is the boundary of the sheet-0 domain, so the integral
    equals twice the integral over the arcs with the ``+`` boundary value of
    ``w``.
    """
    from .germs import integrate_over_cuts

    g = S.g
    if g == 0:
        return []
    if density.kind == "const":
        return [mp.mpc(0)] * g
    L = S.holo_basis.L
    vals = integrate_over_cuts(S.cuts, lambda t, wp: [2 * density.log(t) * Lk(t) / wp for Lk in L])
    return [x / (2j * mp.pi) for x in vals]


# ---------------------------------------------------------------------------
# local charts on the surface
# ---------------------------------------------------------------------------

class _Chart:
    """A surface point with a local coordinate suited to Newton steps.

    ``kind`` is ``"z"`` (plane coordinate, fixed sheet), ``"s"`` (``s = 1/z``
    near infinity) or ``"b"`` (``z = e_i + t^2`` near branch point ``i``).
    """

    def __init__(self, S: Surface, kind: str, coord, sheet: int = 0, bi: int | None = None):
        self.S, self.kind, self.coord, self.sheet, self.bi = S, kind, to_mpc(coord), sheet, bi

    # geometry helpers
    def point(self) -> SurfacePoint:
        S = self.S
        if self.kind == "z":
            return SurfacePoint(self.coord, self.sheet)
        if self.kind == "s":
            if self.coord == 0:
                return SurfacePoint.infinity(self.sheet)
            return SurfacePoint(1 / self.coord, self.sheet)
        t = self.coord
        e = S.E[self.bi]
        z = e + t * t
        if t == 0:
            return SurfacePoint(e, 0)
        wt = self._w_branch(t)
        loc = S.cuts.locate(z, mp.mpf(10) ** -25 * S.cuts.scale)
        if loc is not None:
            wp = S.cuts.w(z, on=(loc[0], loc[1], 1))
            if abs(wt - wp) <= abs(wt + wp):
                return SurfacePoint(z, 0, side=1)
            return SurfacePoint(z, 1, side=1)
        w0 = S.cuts.w(z)
        return SurfacePoint(z, 0 if abs(wt - w0) <= abs(wt + w0) else 1)

    def _branch_data(self):
        S = self.S
        e = S.E[self.bi]
        Q = Poly.from_roots([x for j, x in enumerate(S.E) if j != self.bi])
        return e, Q, Q(e)

    def _w_branch(self, t):
        e, Q, Qe = self._branch_data()
        z = e + t * t
        return mp.sqrt(Qe) * mp.sqrt(Q(z) / Qe) * t

    def derivative(self) -> list:
        """``d(abel)/d(coord)``."""
        S = self.S
        L = S.holo_basis.L
        if self.kind == "z":
            w = S.w(SurfacePoint(self.coord, self.sheet)) if S.cuts.locate(self.coord, mp.mpf(10) ** -25) is None \
                else S.w(self.point())
            return [Lk(self.coord) / w for Lk in L]
        if self.kind == "s":
            s = self.coord
            g = S.g
            # L_k(1/s)/w(1/s) * (-1/s^2) with w ~ sigma z^(g+1); multiply through by s^(g+1)
            P = Poly.from_roots(S.E)
            rev = Poly(list(reversed(list(P.coeffs))))  # s^(2g+2) P(1/s)
            sgn = 1 if self.sheet == 0 else -1
            ws = sgn * _sqrt_near_one(rev, s, P.lead)  # s^(g+1) w(1/s)
            out = []
            for Lk in L:
                d = Lk.degree if Lk.degree >= 0 else 0
                cs = list(Lk.coeffs) + [mp.mpc(0)] * (g - len(Lk.coeffs))
                # s^(g-1) L_k(1/s) as a polynomial in s
                revL = Poly(list(reversed(cs[:g])))
                out.append(-revL(s) / ws)
            return out
        e, Q, Qe = self._branch_data()
        t = self.coord
        z = e + t * t
        R = mp.sqrt(Qe) * mp.sqrt(Q(z) / Qe)
        return [2 * Lk(z) / R for Lk in L]

    def moved(self, dc) -> "_Chart":
        """Chart after the step ``coord += dc``, switching charts or sheets as needed."""
        S = self.S
        cuts = S.cuts
        new = self.coord + dc
        if self.kind == "z":
            z0, z1 = self.coord, new
            sheet = self.sheet
            cr = cuts.crossings_of_segment(complex(z0), complex(z1))
            if len(cr) % 2:
                sheet = 1 - sheet
            ch = _Chart(S, "z", z1, sheet)
        elif self.kind == "s":
            ch = _Chart(S, "s", new, self.sheet)
        else:
            ch = _Chart(S, "b", new, 0, self.bi)
        return ch.normalized()

    def normalized(self) -> "_Chart":
        S = self.S
        R = _router_radius(S)
        delta = S.router.delta
        if self.kind == "z":
            z = self.coord
            if abs(z - _centre(S)) > 2 * R:
                return _Chart(S, "s", 1 / z, self.sheet)
            for i, e in enumerate(S.E):
                if abs(z - e) < 0.2 * delta:
                    t = mp.sqrt(z - e)
                    ch = _Chart(S, "b", t, 0, i)
                    # pick the root matching the current sheet
                    if ch.point().sheet != self.sheet:
                        ch = _Chart(S, "b", -t, 0, i)
                    return ch
            return self
        if self.kind == "s":
            s = self.coord
            if s != 0 and abs(1 / s - _centre(S)) < R:
                return _Chart(S, "z", 1 / s, self.sheet).normalized()
            return self
        t = self.coord
        if abs(t) ** 2 > 0.4 * delta:
            p = self.point()
            return _Chart(S, "z", p.z, p.sheet)
        return self

    def abel(self, avoid=()) -> list:
        S = self.S
        p = self.point()
        if p.side is not None:
            return S.abel_point(p)
        return S.abel_point(p)


def _sqrt_near_one(rev: Poly, s, lead):
    """``sqrt(rev(s))`` with the branch equal to ``sqrt(lead)`` at ``s = 0``."""
    r0 = mp.sqrt(lead)
    return r0 * mp.sqrt(rev(s) / lead)


def _centre(S: Surface):
    return mp.fsum(S.E) / len(S.E)


def _router_radius(S: Surface):
    return mp.mpf(S.router.R)


def _chart_for(S: Surface, p: SurfacePoint) -> _Chart:
    if p.is_infinite:
        return _Chart(S, "s", 0, p.sheet)
    return _Chart(S, "z", p.z, p.sheet).normalized()


# ---------------------------------------------------------------------------
# Jacobi inversion
# ---------------------------------------------------------------------------

@dataclass
class JipResult:
    divisor: Divisor
    j: list
    m: list
    residual: mp.mpf
    unique: bool
    raw: list = field(default_factory=list)

    def as_dict(self) -> dict:
        pts = []
        for p in self.divisor.expanded():
            pts.append({"z": None if p.is_infinite else [float(mp.re(p.z)), float(mp.im(p.z))],
                        "sheet": p.sheet})
        return {"points": pts, "j": list(self.j), "m": list(self.m),
                "residual": float(self.residual), "unique": self.unique}


class JacobiInverter:
    """Newton solver for ``abel(D) = rhs`` modulo periods, ``deg D = g``.

    Starting points come from a fixed grid of surface points whose Abel
    images are computed once and cached on the inverter.
    """

    def __init__(self, S: Surface, tol=None, pair_tol: float = 1e-10, grid: int = 8):
        self.S = S
        self.g = S.g
        self.tol = mp.mpf(tol) if tol is not None else _default_jip_tol()
        self.pair_tol = pair_tol
        self._grid_n = grid
        self._grid = None

    def grid(self):
        if self._grid is None:
            S = self.S
            c = _centre(S)
            R = max(abs(e - c) for e in S.E)
            pts = [SurfacePoint.infinity(0), SurfacePoint.infinity(1)]
            for rad in (mp.mpf("0.5"), mp.mpf("1.1"), mp.mpf("2.0")):
                for k in range(self._grid_n):
                    z = c + rad * R * mp.expjpi(mp.mpf(2 * k + 1) / self._grid_n)
                    if S.cuts.nearest_cut_distance(complex(z)) < 0.2 * S.router.delta:
                        continue
                    pts += [SurfacePoint(z, 0), SurfacePoint(z, 1)]
            self._grid = [(p, S.abel_point(p)) for p in pts]
        return self._grid

    def _resid(self, val, rhs):
        d = [a - b for a, b in zip(val, rhs)]
        red, j, m = self.S.lattice_reduce(d)
        return red, j, m

    def solve(self, rhs, maxiter: int = 60, starts: int = 6) -> JipResult:
        S, g = self.S, self.g
        if g == 0:
            return JipResult(Divisor(), [], [], mp.mpf(0), True)
        rhs = [to_mpc(x) for x in rhs]
        grid = self.grid()
        cands = []
        for combo in itertools.combinations_with_replacement(range(len(grid)), g):
            val = [mp.fsum(grid[i][1][k] for i in combo) for k in range(g)]
            red, _, _ = self._resid(val, rhs)
            cands.append((float(max(abs(x) for x in red)), combo))
        cands.sort()
        best = None
        tried = 0
        for score, combo in cands:
            if tried >= starts:
                break
            pts = [grid[i][0] for i in combo]
            if _has_pair(pts, self.pair_tol):
                continue
            tried += 1
            res = self._newton([_chart_for(S, p) for p in pts], rhs, maxiter)
            if res is None:
                continue
            if best is None or (res.residual, _coord_key(res)) < (best.residual, _coord_key(best)):
                best = res
            if best.residual <= self.tol:
                break
        if best is None or best.residual > self.tol:
            raise NoConvergence("Jacobi inversion did not converge", best=best)
        return best

    def _newton(self, charts, rhs, maxiter):
        S, g = self.S, self.g
        vals = [c.abel() for c in charts]
        total = [mp.fsum(v[k] for v in vals) for k in range(g)]
        red, j, m = self._resid(total, rhs)
        err = max(abs(x) for x in red)
        polish = 0
        for _ in range(maxiter):
            # a couple of extra steps past tolerance sharpen the points
            if err <= self.tol:
                polish += 1
                if polish > 2:
                    break
            J = [[charts[i].derivative()[k] for i in range(g)] for k in range(g)]
            try:
                dc = solve_linear(J, [-x for x in red])
            except Exception:
                return None
            # damping: keep steps local
            lam = mp.mpf(1)
            accepted = False
            for _ in range(12):
                trial = []
                for c, d in zip(charts, dc):
                    lim = _step_limit(c)
                    step = lam * d
                    if abs(step) > lim:
                        step = step * lim / abs(step)
                    trial.append(c.moved(step))
                tv = [c.abel() for c in trial]
                tt = [mp.fsum(v[k] for v in tv) for k in range(g)]
                tred, tj, tm = self._resid(tt, rhs)
                terr = max(abs(x) for x in tred)
                if terr < err:
                    charts, red, j, m, err = trial, tred, tj, tm, terr
                    accepted = True
                    break
                lam /= 2
            if not accepted:
                break
        pts = [c.point() for c in charts]
        D = Divisor([(p, 1) for p in pts])
        return JipResult(D, j, m, err, not _has_pair(pts, self.pair_tol), red)


def _default_jip_tol():
    o = tolerance_override("jip_tol")
    return o if o is not None else mp.ldexp(mp.mpf(1), -mp.prec // 2 + 16)


def _step_limit(c: _Chart):
    S = c.S
    if c.kind == "z":
        dist = min(abs(c.coord - e) for e in S.E)
        return max(dist / 2, S.router.delta * 0.05)
    if c.kind == "s":
        return mp.mpf(1) / (4 * _router_radius(S))
    return mp.sqrt(S.router.delta) / 2


def _has_pair(pts, tol) -> bool:
    for a, b in itertools.combinations(pts, 2):
        if a.is_infinite and b.is_infinite:
            if a.sheet != b.sheet:
                return True
            continue
        if a.is_infinite or b.is_infinite:
            continue
        if abs(a.z - b.z) <= tol * max(1, abs(a.z)):
            if a.sheet != b.sheet:
                return True
            # a branch point taken twice is a symmetric pair as well
    return False


def _coord_key(res: JipResult):
    out = []
    for p in res.divisor.expanded():
        out.append((p.sheet, float(mp.re(p.z)) if not p.is_infinite else math.inf,
                    float(mp.im(p.z)) if not p.is_infinite else 0.0))
    return tuple(sorted(out))


def jacobi_invert(S: Surface, rhs, inverter: JacobiInverter | None = None) -> JipResult:
    """Effective degree-``g`` divisor with Abel image ``rhs`` modulo periods."""
    inv = inverter or _inverter(S)
    return inv.solve(rhs)


def _inverter(S: Surface) -> JacobiInverter:
    inv = getattr(S, "_jip_inverter", None)
    if inv is None or inv.tol != _default_jip_tol():
        inv = JacobiInverter(S)
        S._jip_inverter = inv
    return inv


def secondary_invert(S: Surface, D: Divisor, inverter: JacobiInverter | None = None) -> JipResult:
    """Solve ``abel(D~) = abel(D + inf^(1) - inf^(0))``."""
    if D.contains(SurfacePoint.infinity(0)):
        raise DnContainsInfinity0("divisor contains infinity on sheet 0")
    if S.g == 0:
        return JipResult(Divisor(), [], [], mp.mpf(0), True)
    a = S.abel(D)
    i1 = S.abel_point(SurfacePoint.infinity(1))
    i0 = S.abel_point(SurfacePoint.infinity(0))
    rhs = [x + y - z for x, y, z in zip(a, i1, i0)]
    return jacobi_invert(S, rhs, inverter)


# ---------------------------------------------------------------------------
# Riemann constants
# ---------------------------------------------------------------------------

def half_periods(S: Surface) -> list:
    g = S.g
    B = S.B
    out = []
    for bits in itertools.product((0, 1), repeat=2 * g):
        a, b = bits[:g], bits[g:]
        out.append([(a[k] + mp.fsum(B[k][i] * b[i] for i in range(g))) / 2 for k in range(g)])
    return out


def riemann_constants(S: Surface, ctx: ThetaContext | None = None, trials: int = 3, seed: int = 7) -> list:
    """Half period ``K`` for which ``theta(abel(z) - abel(D) - K)`` vanishes on ``D``.

    Calibrated on ``trials`` fixed pseudo-random divisors: the chosen
    candidate makes the theta value at the points of ``D`` small relative
    to its value at a generic control point.
    """
    import random

    g = S.g
    if g == 0:
        return []
    ctx = ctx or ThetaContext(S.B)
    rng = random.Random(seed)
    c = _centre(S)
    R = max(abs(e - c) for e in S.E)

    def rand_point():
        while True:
            z = c + R * mp.mpf(rng.uniform(0.3, 1.6)) * mp.expj(mp.mpf(rng.uniform(0, 2 * math.pi)))
            if S.cuts.nearest_cut_distance(complex(z)) > 0.3 * S.router.delta:
                return SurfacePoint(z, rng.randint(0, 1))

    tests = []
    for _ in range(trials):
        D = [rand_point() for _ in range(g)]
        aD = [mp.fsum(x) for x in zip(*[S.abel_point(p) for p in D])]
        aP = [S.abel_point(p) for p in D]
        ctrl = rand_point()
        tests.append((aD, aP, S.abel_point(ctrl)))
    best, bscore = None, None
    for K in half_periods(S):
        score = mp.mpf(0)
        for aD, aP, actl in tests:
            ref = abs(theta(ctx, [x - y - k for x, y, k in zip(actl, aD, K)]))
            if ref == 0:
                score = mp.inf
                break
            for ap in aP:
                score = max(score, abs(theta(ctx, [x - y - k for x, y, k in zip(ap, aD, K)])) / ref)
        if bscore is None or score < bscore:
            best, bscore = K, score
    S._riemann_score = bscore
    return best


def theta_divisor_check(S: Surface, ctx: ThetaContext, K, D: Sequence[SurfacePoint], probes: Sequence[SurfacePoint]):
    """``(max at points of D, min at probes)`` of ``|theta(abel(z) - abel(D) - K)|``."""
    aD = [mp.fsum(x) for x in zip(*[S.abel_point(p) for p in D])]
    on = max(abs(theta(ctx, [x - y - k for x, y, k in zip(S.abel_point(p), aD, K)])) for p in D)
    off = min(abs(theta(ctx, [x - y - k for x, y, k in zip(S.abel_point(p), aD, K)])) for p in probes)
    return on, off
