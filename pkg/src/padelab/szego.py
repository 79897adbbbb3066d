"""Nuttall-Szegő functions, normalizing constants and strong asymptotics.

For a surface ``S``, a density ``rho`` on the cuts and a scheme row
``V_2n`` the function

    Psi_n = C_n S_n S_rho S_tau S_m Theta_n

has divisor ``(n - g) inf^(1) + D_n - n inf^(0)`` and boundary relation
``Psi_n(sheet 1, right) = (rho / v_2n) Psi_n(sheet 0, left)`` on the cuts.

All multi-valued pieces are integrals of differentials from the base
point ``e_0``.  They are evaluated together, along one path, so that the
product is single valued even though its factors are not:

* ``S_n = exp int G_n`` (divided by ``v_2n`` on sheet 1),
* ``S_rho = exp(Lambda_0 + int eta)`` where ``Lambda_0 = w H`` with ``H``
  the Cauchy transform of ``-log rho / w_+`` and ``eta`` a second-kind
  differential cancelling the growth of ``Lambda_0`` at infinity,
* ``S_tau S_m = exp(-2 pi i (tau_n + m_n) . a(z))`` with ``a`` the Abel map,
* ``Theta_n`` the usual quotient of theta functions.

Values on circles are obtained by continuing the integral vector along
the circle, which is far cheaper than one canonical path per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp

from .errors import ConditionEViolated, NonUniqueDivisor, TooCloseToCut
from .germs import Density, _raw_legs, integrate_over_cuts, series_power
from .numkit import ArcSegment, Poly, quad_segment, to_mpc
from .surface.core import Divisor, Surface, SurfacePoint, _clip_avoid
from .thetajip import (
    ThetaContext,
    c_rho,
    jacobi_invert,
    riemann_constants,
    scheme_vectors,
    theta,
)

__all__ = [
    "SnFactor",
    "RhoFactor",
    "ThetaFactor",
    "SzegoBundle",
    "build_Sn",
    "build_Srho",
    "build_Theta_n",
    "build_bundle",
    "predict_SA",
    "w_laurent",
]


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def w_laurent(S: Surface, m: int) -> list:
    """Coefficients ``c_k`` with ``w(z) = z^{g+1} sum_k c_k z^{-k}`` on sheet 0."""
    R = Poly([1])
    for e in S.E:
        R = R * Poly([1, -e])
    return series_power(R.coeffs, mp.mpf(1) / 2, 1, m)


def _theta_context(S: Surface, ctx=None, K=None) -> ThetaContext:
    if ctx is not None:
        return ctx
    cached = getattr(S, "_theta_ctx", None)
    if cached is not None and cached[0] == mp.prec:
        return cached[1]
    K = K if K is not None else riemann_constants(S)
    ctx = ThetaContext(S.B, K=K)
    S._theta_ctx = (mp.prec, ctx)
    return ctx


def _cached_abel(S: Surface, p: SurfacePoint) -> list:
    cache = S.__dict__.setdefault("_abel_cache", {})
    key = (mp.prec, None if p.is_infinite else p.z, p.sheet)
    if key not in cache:
        cache[key] = S.abel_point(p)
    return cache[key]


def _winding(vals) -> int:
    tot = mp.mpf(0)
    for a, b in zip(vals, vals[1:] + vals[:1]):
        tot += mp.arg(b / a)
    return int(mp.nint(tot / (2 * mp.pi)))


# ---------------------------------------------------------------------------
# factors
# ---------------------------------------------------------------------------

class SnFactor:
    """``S_n = exp int G_n`` (times ``1 / v_2n`` on sheet 1) for one scheme row.

    ``G_n`` has residue ``-n`` at ``inf^(0)``, residue ``m_i`` at each
    finite node on sheet 1 and residue ``n - deg v_2n`` at ``inf^(1)``.
    The constant ``C = |v_2n(e_0)|^{1/2}`` is stored but not applied.
    """

    def __init__(self, S: Surface, row):
        self.S = S
        self.row = row
        self.v = row.v_poly()
        self.C = mp.sqrt(abs(self.v(S.e0)))
        self._parts = [(S.third_kind(SurfacePoint(v, 0)), m, v) for v, m in row.finite]
        self._inf = S.third_kind(SurfacePoint.infinity(0)) if row.n_inf else None
        self.avoid = [(v, 0.5 * S.router.delta) for v, _ in row.finite]

    def integrand(self, t, wt):
        acc = mp.mpc(0)
        h = mp.mpc(0)
        for G, m, v in self._parts:
            acc += m / (t - v)
            h += m * G.h(t)
        if self._inf is not None:
            h += self.row.n_inf * self._inf.h(t)
        return (acc + h / wt) / 2

    def from_integral(self, p: SurfacePoint, I):
        val = mp.exp(I)
        if p.sheet == 1:
            val /= self.v(p.z)
        return val

    def __call__(self, p: SurfacePoint):
        I = self.S.integrate_to(self.integrand, p, avoid=_clip_avoid(self.avoid, p))
        return self.from_integral(p, I)


class RhoFactor:
    """``S_rho = exp(Lambda_rho)`` with jump ``1 / rho`` across the cuts.

    ``Lambda_rho = w H + int eta`` where ``H(z) = (1/2 pi i) int lambda / (t - z) dt / w_+``
    with ``lambda = -log rho``.  ``eta = h_eta dt / w`` removes the polynomial
    growth of ``w H`` at the two points at infinity and has zero
    ``alpha``-periods.
    """

    def __init__(self, S: Surface, density: Density, order=None):
        self.S = S
        self.rho = density
        self.order = order
        density.validate(S.cuts)
        self.trivial = density.is_trivial
        g = S.g
        self.lam = lambda t: -density.log(t)
        if self.trivial:
            self.moments = [mp.mpc(0)] * (g + 2)
            self.P = Poly()
            self.h_eta = Poly()
            return
        self.moments = [x / (2j * mp.pi) for x in integrate_over_cuts(
            S.cuts, lambda t, wp: [self.lam(t) * t ** j / wp for j in range(g + 2)], order)]
        # w H = -z^{g+1} sum_k d_k z^{-k},  d = c * (0, mu_0, mu_1, ...)
        c = w_laurent(S, g + 2)
        mu = [mp.mpc(0)] + self.moments
        d = [mp.fsum(c[i] * mu[k - i] for i in range(k + 1)) for k in range(g + 2)]
        # polynomial part of degrees 1..g: coefficient of z^{g+1-k}, k = 1..g
        P = [mp.mpc(0)] * (g + 1)
        for k in range(1, g + 1):
            P[g + 1 - k] = -d[k]
        self.P = Poly(P)
        self.h_eta = self._eta(c)

    def _eta(self, c) -> Poly:
        S, g = self.S, self.S.g
        if g == 0:
            return Poly()
        dP = self.P.deriv()
        # -P'(z) w(z), keep degrees g..2g of the polynomial part
        Q = [mp.mpc(0)] * (2 * g + 1)
        for i, a in enumerate(dP.coeffs):
            for k in range(len(c)):
                deg = i + g + 1 - k
                if g <= deg <= 2 * g:
                    Q[deg] -= a * c[k]
        Q = Poly(Q)
        A = S.cycle_integrals(lambda t: Q(t), S.alpha)
        h = Q
        for k in range(g):
            h = h - S.holo_basis.L[k] * A[k]
        return h

    # -- Cauchy transform of lambda / w_+ -----------------------------------

    def H(self, z):
        if self.trivial:
            return mp.mpc(0)
        lam = self.lam
        val = integrate_over_cuts(self.S.cuts, lambda t, wp: lam(t) / ((t - z) * wp), self.order)[0]
        return val / (2j * mp.pi)

    def H_boundary(self, x, side: int):
        """One-sided value of ``H`` at a cut point (Plemelj with subtraction)."""
        if self.trivial:
            return mp.mpc(0)
        x = to_mpc(x)
        cuts = self.S.cuts
        lam = self.lam
        legs = _raw_legs(cuts)
        fx = complex(x)
        own = None
        best = math.inf
        for i, (seg, wp) in enumerate(legs):
            a, b = complex(seg.a), complex(seg.b)
            L = abs(b - a)
            s = ((fx - a) * (b - a).conjugate()).real / (L * L)
            d = abs(a + (b - a) * min(max(s, 0.0), 1.0) - fx)
            if d < best:
                best, own = d, i
        seg, wp = legs[own]
        phix = lam(x) / wp(x)
        total = mp.mpc(0)
        for i, (sg, w_) in enumerate(legs):
            if i == own:
                v, _ = quad_segment(lambda t: (lam(t) / w_(t) - phix) / (t - x), sg, order=self.order)
                v += phix * mp.log(abs(sg.b - x) / abs(sg.a - x))
            else:
                v, _ = quad_segment(lambda t: lam(t) / (w_(t) * (t - x)), sg, order=self.order)
            total += v
        return total / (2j * mp.pi) + side * phix / 2

    def lambda0(self, p: SurfacePoint):
        """``w H`` at ``p`` (one-sided when ``p`` carries a side)."""
        if self.trivial:
            return mp.mpc(0)
        wz = self.S.w(p)
        if p.side is not None and self.S.cuts.locate(p.z, 1e-20 * self.S.cuts.scale) is not None:
            return wz * self.H_boundary(p.z, p.side)
        return wz * self.H(p.z)

    def integrand(self, t, wt):
        return self.h_eta(t) / wt

    def alpha_jumps(self) -> list:
        """``(1/2 pi i)`` times the ``beta``-periods of ``eta``."""
        S = self.S
        if S.g == 0 or self.trivial:
            return [mp.mpc(0)] * S.g
        B = S.cycle_integrals(lambda t: self.h_eta(t), S.beta)
        return [x / (2j * mp.pi) for x in B]

    def __call__(self, p: SurfacePoint):
        if self.trivial:
            return mp.mpc(1)
        I = self.S.integrate_to(self.integrand, p) if self.S.g else 0
        return mp.exp(self.lambda0(p) + I)


class ThetaFactor:
    """``theta(a(z) - a(D) - K) / theta(a(z) - a(g inf^(1)) - K)``."""

    def __init__(self, S: Surface, ctx: ThetaContext, D: Divisor, denominator=None):
        self.S, self.ctx = S, ctx
        self.K = ctx.K if ctx is not None else []
        self.aD = S.abel(D) if S.g else []
        if denominator is None:
            ai = _cached_abel(S, SurfacePoint.infinity(1))
            denominator = [S.g * x for x in ai]
        self.aden = denominator

    def from_abel(self, A):
        if self.S.g == 0:
            return mp.mpc(1)
        num = theta(self.ctx, [a - d - k for a, d, k in zip(A, self.aD, self.K)])
        den = theta(self.ctx, [a - d - k for a, d, k in zip(A, self.aden, self.K)])
        return num / den

    def __call__(self, p: SurfacePoint):
        return self.from_abel(self.S.abel_point(p))


def build_Sn(S: Surface, row) -> SnFactor:
    """Evaluator of ``S_n`` for the scheme row ``row``."""
    return SnFactor(S, row)


def build_Srho(S: Surface, density: Density) -> RhoFactor:
    """Evaluator of ``S_rho``."""
    return RhoFactor(S, density)


def build_Theta_n(S: Surface, D: Divisor, ctx: ThetaContext | None = None, unique: bool = True) -> ThetaFactor:
    """Evaluator of ``Theta_n`` for the divisor ``D``."""
    if not unique:
        raise NonUniqueDivisor("theta quotient vanishes identically for a non-unique divisor")
    ctx = _theta_context(S, ctx) if S.g else None
    return ThetaFactor(S, ctx, D)


# ---------------------------------------------------------------------------
# bundle
# ---------------------------------------------------------------------------

@dataclass
class SzegoBundle:
    """All pieces of ``Psi_n`` and ``Upsilon_n`` for one index ``n``.

    Attributes
    ----------
    gamma, gamma_star : mpc
        ``1/gamma = lim Psi_n(z^(0)) z^{-n}`` and
        ``1/gamma* = lim (Psi_n Upsilon_n)(z^(1)) z^{n-g-1}``.
    D, D_tilde : Divisor
        Solutions of the main and secondary inversion problems.
    diagnostics : dict
        Residuals and audits gathered while building.
    """

    S: Surface
    n: int
    row: object
    density: Density
    Sn: SnFactor
    Srho: RhoFactor
    theta_n: ThetaFactor
    theta_t: ThetaFactor | None
    C: object
    omega: list
    tau: list
    crho: list
    j: list
    m: list
    k: list
    tau_inf: list
    D: Divisor
    D_tilde: Divisor
    unique: bool
    gamma: object = None
    gamma_star: object = None
    ups_norm: object = mp.mpc(1)
    diagnostics: dict = field(default_factory=dict)

    # -- integral vector along paths ---------------------------------------

    def _integrand(self, t, wt):
        S = self.S
        out = [self.Sn.integrand(t, wt), self.Srho.integrand(t, wt) if S.g else mp.mpc(0),
               self._ginf.h(t) / wt]
        out += [Lk(t) / wt for Lk in S.holo_basis.L]
        return out

    @property
    def _ginf(self):
        return self.S.third_kind(SurfacePoint.infinity(0))

    def integrals(self, p: SurfacePoint):
        """``[int G_n, int eta, int G_inf, a_1, ..., a_g]`` along the canonical path."""
        return self.S.integrate_to(self._integrand, p, avoid=_clip_avoid(self.Sn.avoid, p))

    def _continue(self, I, seg, sheet):
        d = self.S.integrate_along(self._integrand, [seg], sheet)
        return [x + y for x, y in zip(I, d)]

    # -- values from an integral vector -----------------------------------

    def psi_from(self, p: SurfacePoint, I):
        g = self.S.g
        A = I[3:]
        e = I[0] + I[1] + self.Srho.lambda0(p)
        e -= 2j * mp.pi * mp.fsum((t + m) * a for t, m, a in zip(self.tau, self.m, A))
        val = self.C * mp.exp(e) * self.theta_n.from_abel(A)
        if p.sheet == 1:
            val /= self.Sn.v(p.z)
        return val

    def upsilon_from(self, p: SurfacePoint, I):
        A = I[3:]
        e = -I[2] + 2j * mp.pi * mp.fsum((t + m - k) * a for t, m, k, a in zip(self.tau_inf, self.m, self.k, A))
        val = mp.exp(e)
        if self.S.g:
            val *= self.theta_t.from_abel(A) / self.theta_n.from_abel(A)
        return self.ups_norm * val

    def psi(self, p: SurfacePoint):
        return self.psi_from(p, self.integrals(p))

    def upsilon(self, p: SurfacePoint):
        return self.upsilon_from(p, self.integrals(p))

    # -- circles -------------------------------------------------------------

    def on_circle(self, center, radius, samples: int, sheet: int, what=("psi",), theta0=0):
        """Values on ``|z - center| = radius`` by continuation along the circle.

        The first point, at angle ``theta0``, is reached by the canonical
        path; the others by integrating along the circle.
        """
        center, radius, theta0 = to_mpc(center), mp.mpf(radius), mp.mpf(theta0)
        z0 = center + radius * mp.expj(theta0)
        I = self.integrals(SurfacePoint(z0, sheet))
        pts, out = [], {k: [] for k in what}
        for k in range(samples):
            th = theta0 + 2 * mp.pi * k / samples
            z = center + radius * mp.expj(th)
            if k:
                seg = ArcSegment(center, radius, th - 2 * mp.pi / samples, th)
                I = self._continue(I, seg, sheet)
            p = SurfacePoint(z, sheet)
            pts.append(z)
            if "psi" in what:
                out["psi"].append(self.psi_from(p, I))
            if "upsilon" in what:
                out["upsilon"].append(self.upsilon_from(p, I))
        return pts, out

    def predict(self, z, margin=None):
        """``(gamma Psi_n(z^(0)), gamma Psi_n(z^(1)))``."""
        return predict_SA(self, z, margin)

    def as_dict(self) -> dict:
        def c(x):
            x = to_mpc(x)
            return [float(mp.re(x)), float(mp.im(x))]

        def pts(D):
            out = []
            for p in D.expanded():
                out.append({"z": "inf" if p.is_infinite else c(p.z), "sheet": p.sheet})
            return out

        d = {
            "n": self.n,
            "gamma": c(self.gamma) if self.gamma is not None else None,
            "gamma_star": c(self.gamma_star) if self.gamma_star is not None else None,
            "divisor": pts(self.D),
            "divisor_tilde": pts(self.D_tilde),
            "unique": self.unique,
            "j": list(self.j), "m": list(self.m), "k": list(self.k),
            "omega": [float(x) for x in self.omega], "tau": [float(x) for x in self.tau],
        }
        for key, val in self.diagnostics.items():
            d[key] = _jsonable(val)
        return d


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (mp.mpf, mp.mpc, complex)):
        x = to_mpc(v)
        return float(mp.re(x)) if mp.im(x) == 0 else [float(mp.re(x)), float(mp.im(x))]
    return v


def _contains_inf0(D: Divisor) -> bool:
    return any(p.is_infinite and p.sheet == 0 for p in D.expanded())


def _circle_radius(S: Surface, row, center):
    R = 3 * max(abs(e - center) for e in S.E)
    R = max(R, mp.mpf(1))
    for _ in range(20):
        if all(abs(abs(v - center) - R) > mp.mpf("0.1") * R for v, _ in row.finite):
            return R
        R *= mp.mpf("1.3")
    return R


def build_bundle(S: Surface, density: Density, row, n: int | None = None, *,
                 ctx: ThetaContext | None = None, samples: int | None = None,
                 upsilon: bool = True) -> SzegoBundle:
    """Assemble ``Psi_n``, ``Upsilon_n`` and the constants ``gamma_n``, ``gamma_n*``.

    Parameters
    ----------
    S : Surface
    density : Density
        Non-vanishing density on the cuts.
    row : SchemeRow
        Interpolation nodes ``V_2n``.
    samples : int, optional
        Points on the large circle used for the two limits at infinity.
    upsilon : bool
        Also build ``Upsilon_n`` and ``gamma_n*``.

    Raises
    ------
    ConditionEViolated
        The divisor meets ``inf^(0)`` or contains an involution-symmetric pair.
    """
    n = row.n if n is None else n
    g = S.g
    Sn = SnFactor(S, row)
    Srho = RhoFactor(S, density)
    diag: dict = {}
    if g:
        ctx = _theta_context(S, ctx)
        om, ta = scheme_vectors(S, row)
        cr = c_rho(S, density)
        ai1 = _cached_abel(S, SurfacePoint.infinity(1))
        B = S.B
        rhs = [g * ai1[k] + cr[k] + om[k] + mp.fsum(B[k][i] * ta[i] for i in range(g)) for k in range(g)]
        jip = jacobi_invert(S, rhs)
        D, j, m, unique = jip.divisor, jip.j, jip.m, jip.unique
        diag["jip_residual"] = jip.residual
        if not unique:
            raise ConditionEViolated(f"n={n}: divisor contains an involution-symmetric pair")
        if _contains_inf0(D):
            raise ConditionEViolated(f"n={n}: divisor contains infinity on sheet 0")
        # secondary problem
        G0 = S.third_kind(SurfacePoint.infinity(0))
        om0 = [mp.re(-x / (2j * mp.pi)) for x in G0.beta_periods]
        ta0 = [mp.re(x / (2j * mp.pi)) for x in G0.alpha_periods]
        rhs2 = [g * ai1[k] + cr[k] + om[k] - om0[k]
                + mp.fsum(B[k][i] * (ta[i] - ta0[i]) for i in range(g)) for k in range(g)]
        if upsilon:
            jt = jacobi_invert(S, rhs2)
            Dt, kvec = jt.divisor, jt.m
            diag["jip_tilde_residual"] = jt.residual
            diag["tilde_unique"] = jt.unique
            ai0 = _cached_abel(S, SurfacePoint.infinity(0))
            alt = [a + b - c for a, b, c in zip(S.abel(D), ai1, ai0)]
            diag["secondary_consistency"] = S.lattice_distance([x - y for x, y in zip(S.abel(Dt), alt)])
        else:
            Dt, kvec = Divisor(), [0] * g
        theta_n = ThetaFactor(S, ctx, D)
        theta_t = ThetaFactor(S, ctx, Dt) if upsilon else None
    else:
        om = ta = cr = j = m = kvec = ta0 = []
        D = Dt = Divisor()
        unique = True
        theta_n = ThetaFactor(S, None, D)
        theta_t = ThetaFactor(S, None, Dt)
    b = SzegoBundle(S, n, row, density, Sn, Srho, theta_n, theta_t, Sn.C, om, ta, cr, j, m,
                    kvec, ta0, D, Dt, unique, diagnostics=diag)
    if upsilon:
        e0 = SurfacePoint(S.e0, 0)
        zero = [mp.mpc(0)] * (3 + g)
        u0 = b.upsilon_from(e0, zero)
        b.ups_norm = 1 / u0 if u0 != 0 and mp.isfinite(abs(u0)) else mp.mpc(1)
    _constants(b, samples)
    return b


def _constants(b: SzegoBundle, samples):
    S, n, g = b.S, b.n, b.S.g
    center = mp.fsum(S.E) / len(S.E)
    R = _circle_radius(S, b.row, center)
    M = samples or 4 * (n + 1) + 64
    pts, vals = b.on_circle(center, R, M, 0, ("psi",))
    psi = vals["psi"]
    b.gamma = 1 / mp.fsum(v * z ** (-n) for v, z in zip(psi, pts)) * M
    b.diagnostics["winding_inf0"] = _winding(psi)
    b.diagnostics["circle_radius"] = R
    if b.theta_t is not None:
        pts1, v1 = b.on_circle(center, R, M, 1, ("psi", "upsilon"))
        pu = [a * c for a, c in zip(v1["psi"], v1["upsilon"])]
        b.gamma_star = M / mp.fsum(v * z ** (n - g - 1) for v, z in zip(pu, pts1))
        b.diagnostics["winding_inf1"] = _winding(v1["psi"])
        b.diagnostics["gamma_gamma_star"] = abs(b.gamma * b.gamma_star)
        # same product without the e_0 normalisation of Upsilon
        b.diagnostics["gamma_gamma_star_natural"] = abs(b.gamma * b.gamma_star * b.ups_norm)


# ---------------------------------------------------------------------------
# predictions and audits
# ---------------------------------------------------------------------------

def predict_SA(b: SzegoBundle, z, margin=None):
    """Leading-order predictions ``gamma_n Psi_n`` on both sheets at ``z``."""
    z = to_mpc(z)
    S = b.S
    margin = margin if margin is not None else 1e-3 * S.cuts.scale
    if S.cuts.nearest_cut_distance(complex(z)) < margin:
        raise TooCloseToCut("prediction point is too close to the cuts")
    out = []
    for sheet in (0, 1):
        p = SurfacePoint(z, sheet)
        out.append(b.gamma * b.psi(p))
    return tuple(out)


def sa_discrepancy_on_circle(b: SzegoBundle, q: Poly, center=0, radius=3, samples: int = 32):
    """``max |q(z) / (gamma Psi_n(z^(0))) - 1|`` over a circle."""
    pts, vals = b.on_circle(center, radius, samples, 0, ("psi",))
    return max(abs(q(z) / (b.gamma * v) - 1) for z, v in zip(pts, vals["psi"]))


def boundary_audit(b: SzegoBundle, samples: int = 20, offset: float = 0.05):
    """Max of ``|Psi(sheet 1, right) v / (rho Psi(sheet 0, left)) - 1|`` over cut samples."""
    S = b.S
    worst = mp.mpf(0)
    pts = S.cuts.sample_points(samples)
    for x, ai, k in pts:
        plus = b.psi(SurfacePoint(x, 0, +1))
        minus = b.psi(SurfacePoint(x, 1, -1))
        r = minus * b.Sn.v(x) / (b.density(x) * plus)
        worst = max(worst, abs(r - 1))
    return worst


def divisor_audit(b: SzegoBundle, radius=None, samples: int = 64) -> dict:
    """Winding numbers of ``Psi_n`` around the finite points of ``D_n`` and at infinity."""
    S = b.S
    out = {"finite": [], "inf0": b.diagnostics.get("winding_inf0"),
           "inf1": b.diagnostics.get("winding_inf1")}
    inf1 = sum(1 for p in b.D.expanded() if p.is_infinite and p.sheet == 1)
    out["expected_inf0"] = b.n
    out["expected_inf1"] = -(b.n - S.g + inf1)
    for p in b.D.expanded():
        if p.is_infinite:
            continue
        fz = complex(p.z)
        r = radius or min(0.25 * S.cuts.nearest_cut_distance(fz), 0.05 * S.cuts.scale)
        near = min(S.cuts.fE, key=lambda e: abs(e - fz))
        th0 = mp.arg(to_mpc(fz - near)) if abs(fz - near) > 0 else 0
        _, vals = b.on_circle(p.z, r, samples, p.sheet, ("psi",), theta0=th0)
        out["finite"].append(_winding(vals["psi"]))
    return out
