"""Precision context, polynomials, dense linear algebra and path quadrature.

All arithmetic goes through :mod:`mpmath` with a single global binary
precision.  The helpers here never change that precision behind the
caller's back except inside :func:`precision`.
"""

from __future__ import annotations

import contextlib
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from mpmath import mp

from .errors import (
    BudgetExceeded,
    IllConditioned,
    NoConvergence,
    NonFinite,
    ZeroPolynomial,
)

DEFAULT_PREC = 256
MIN_PREC = 128


# ---------------------------------------------------------------------------
# precision context
# ---------------------------------------------------------------------------

def get_prec() -> int:
    return mp.prec


def set_prec(bits: int) -> None:
    """Set the global working precision in bits (at least 128)."""
    if int(bits) < MIN_PREC:
        raise ValueError(f"precision must be at least {MIN_PREC} bits, got {bits}")
    mp.prec = int(bits)


def digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10)))


@contextlib.contextmanager
def precision(bits: int | None = None, digits: int | None = None):
    """Temporarily switch the global precision.

    Exactly one of ``bits`` and ``digits`` may be given; with neither the
    default of 256 bits is used.
    """
    if bits is not None and digits is not None:
        raise ValueError("give bits or digits, not both")
    if digits is not None:
        bits = digits_to_bits(digits)
    if bits is None:
        bits = DEFAULT_PREC
    old = mp.prec
    set_prec(bits)
    try:
        yield mp.prec
    finally:
        mp.prec = old


def eps() -> mp.mpf:
    return mp.ldexp(mp.mpf(1), 1 - mp.prec)


_OVERRIDES: dict = {}


@contextlib.contextmanager
def tolerances(**values):
    """Temporarily override named tolerances (``quad_tol``, ``jip_tol``, ``trace_tol``).

    ``None`` values are ignored.
    """
    old = dict(_OVERRIDES)
    _OVERRIDES.update({k: mp.mpf(v) for k, v in values.items() if v is not None})
    try:
        yield
    finally:
        _OVERRIDES.clear()
        _OVERRIDES.update(old)


def tolerance_override(name: str):
    """Current override for ``name`` or ``None``."""
    return _OVERRIDES.get(name)


def quad_tol() -> mp.mpf:
    """Default quadrature tolerance ``2**(-prec/2)``."""
    if "quad_tol" in _OVERRIDES:
        return _OVERRIDES["quad_tol"]
    return mp.ldexp(mp.mpf(1), -(mp.prec // 2))


def cluster_tol() -> mp.mpf:
    """Root clustering threshold ``2**(-prec/4)``."""
    return mp.ldexp(mp.mpf(1), -(mp.prec // 4))


def to_mpc(x) -> mp.mpc:
    """Convert numbers and strings like ``"1+2j"`` to ``mpc``."""
    if isinstance(x, mp.mpc):
        return x
    if isinstance(x, str):
        s = x.strip().replace(" ", "").replace("i", "j")
        try:
            return mp.mpc(mp.mpf(s))
        except (ValueError, TypeError):
            c = complex(s)  # only to split the parts
            re_s, im_s = _split_complex_str(s)
            if re_s is None:
                return mp.mpc(c)
            return mp.mpc(mp.mpf(re_s), mp.mpf(im_s))
    return mp.mpc(x)


def _split_complex_str(s: str):
    s = s.strip("()")
    if not s.endswith("j"):
        return None, None
    body = s[:-1]
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            re_s, im_s = body[:k], body[k:]
            if im_s in "+-":
                im_s += "1"
            return re_s, im_s
    im_s = body if body not in ("", "+", "-") else body + "1"
    return "0", im_s


def is_finite(x) -> bool:
    if isinstance(x, mp.mpc):
        return mp.isfinite(x.real) and mp.isfinite(x.imag)
    return bool(mp.isfinite(x))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Dense polynomial with coefficients stored lowest degree first.

    Trailing zero coefficients are stripped on construction so that
    ``degree`` is the index of the last nonzero coefficient (``-1`` for the
    zero polynomial).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_mpc(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Poly":
        out = [to_mpc(lead)]
        for r in roots:
            r = to_mpc(r)
            nxt = [mp.mpc(0)] * (len(out) + 1)
            for k, c in enumerate(out):
                nxt[k + 1] += c
                nxt[k] -= r * c
            out = nxt
        return cls(out)

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, z):
        acc = mp.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_with_derivative(self, z):
        p = mp.mpc(0)
        dp = mp.mpc(0)
        for c in reversed(self.coeffs):
            dp = dp * z + p
            p = p * z + c
        return p, dp

    def deriv(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        lc = self.lead
        return Poly([c / lc for c in self.coeffs])

    def scale(self, s) -> "Poly":
        return Poly([c * s for c in self.coeffs])

    def compose_affine(self, a, b) -> "Poly":
        """Return ``z -> self(a + b z)``."""
        a, b = to_mpc(a), to_mpc(b)
        out = Poly()
        lin = Poly([a, b])
        for c in reversed(self.coeffs):
            out = out * lin + Poly([c])
        return out

    def abs_bound(self, r) -> mp.mpf:
        """``sum |a_k| r^k``, the rounding scale of Horner at radius r."""
        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * r + abs(c)
        return acc

    def _binary(self, other, op):
        if not isinstance(other, Poly):
            other = Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [mp.mpc(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [mp.mpc(0)] * (n - len(other.coeffs))
        return Poly([op(x, y) for x, y in zip(a, b)])

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return Poly([other]) - self

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(to_mpc(other))
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [mp.mpc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(int(k)):
            out = out * self
        return out

    def divmod(self, other: "Poly"):
        if other.degree < 0:
            raise ZeroPolynomial("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = other.degree
        quo = [mp.mpc(0)] * max(0, len(rem) - dq)
        lc = other.lead
        for k in range(len(rem) - dq - 1, -1, -1):
            c = rem[k + dq] / lc
            quo[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= c * b
        return Poly(quo), Poly(rem[:dq])

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = ", ".join(mp.nstr(c, 8) for c in self.coeffs)
        return f"Poly([{terms}])"


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

def _as_rows(A) -> list[list]:
    if isinstance(A, mp.matrix):
        return [[mp.mpc(A[i, j]) for j in range(A.cols)] for i in range(A.rows)]
    return [[to_mpc(x) for x in row] for row in A]


def _check_finite(rows) -> None:
    for row in rows:
        for x in row:
            if not is_finite(x):
                raise NonFinite("non-finite matrix entry")


@dataclass(frozen=True)
class Elimination:
    """Result of complete-pivot Gaussian elimination.

    ``U`` holds the first ``rank`` pivot rows in permuted column order
    ``cols``; ``rhs`` the correspondingly transformed right-hand sides.
    """

    U: list
    rhs: list
    cols: list
    rank: int
    pivots: list
    residual_rows: list


def eliminate(A, B=None, tol=None) -> Elimination:
    """Complete-pivot elimination of ``A`` (and right-hand sides ``B``).

    Pivots smaller than ``tol * max|A|`` stop the elimination; the number
    of accepted pivots is the numerical rank.
    """
    rows = _as_rows(A)
    _check_finite(rows)
    m = len(rows)
    n = len(rows[0]) if m else 0
    if B is None:
        rhs = [[] for _ in range(m)]
    else:
        rhs = [[to_mpc(x) for x in (r if isinstance(r, (list, tuple)) else [r])] for r in B]
    if tol is None:
        tol = mp.ldexp(mp.mpf(1), -(mp.prec * 3) // 4)
    amax = max((abs(x) for row in rows for x in row), default=mp.mpf(0))
    cols = list(range(n))
    pivots = []
    r = 0
    while r < min(m, n):
        best, bi, bj = mp.mpf(-1), -1, -1
        for i in range(r, m):
            row = rows[i]
            for j in range(r, n):
                a = abs(row[cols[j]])
                if a > best:
                    best, bi, bj = a, i, j
        if amax == 0 or best <= tol * amax:
            break
        rows[r], rows[bi] = rows[bi], rows[r]
        rhs[r], rhs[bi] = rhs[bi], rhs[r]
        cols[r], cols[bj] = cols[bj], cols[r]
        pivots.append(best)
        prow = rows[r]
        pr = rhs[r]
        pc = cols[r]
        inv = 1 / prow[pc]
        for i in range(r + 1, m):
            f = rows[i][pc] * inv
            if f == 0:
                continue
            rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
            rows[i][pc] = mp.mpc(0)
            if pr:
                rhs[i] = [x - f * y for x, y in zip(rhs[i], pr)]
        r += 1
    return Elimination(rows[:r], rhs[:r], cols, r, pivots, rhs[r:])


def null_space(A, tol=None) -> tuple[list[list], int]:
    """Basis of the numerical null space of ``A`` and the numerical rank.

    Basis vector ``k`` sets free column ``cols[rank + k]`` to one and all
    other free columns to zero, so free columns are ordered by the pivot
    search (deterministic for fixed input).
    """
    el = eliminate(A, tol=tol)
    r, cols = el.rank, el.cols
    n = len(cols)
    basis = []
    for k in range(r, n):
        x = [mp.mpc(0)] * n
        x[cols[k]] = mp.mpc(1)
        for i in range(r - 1, -1, -1):
            row = el.U[i]
            s = row[cols[k]]
            for j in range(i + 1, r):
                s += row[cols[j]] * x[cols[j]]
            x[cols[i]] = -s / row[cols[i]]
        basis.append(x)
    return basis, r


@dataclass(frozen=True)
class LinearSolution:
    x: list
    rank: int
    residual: mp.mpf
    cond_estimate: mp.mpf


def _matvec(rows, x):
    return [mp.fsum(a * b for a, b in zip(row, x)) for row in rows]


def _norm(v) -> mp.mpf:
    return mp.sqrt(mp.fsum(abs(t) ** 2 for t in v)) if v else mp.mpf(0)


def solve_linear(A, b, tol=None, full_output: bool = False, warn_cond=None):
    """Solve ``A x = b``.

    Square full-rank systems use complete-pivot elimination.  Overdetermined
    or rank-deficient systems return the minimal-norm least-squares solution
    through an SVD.  With ``full_output`` a :class:`LinearSolution` carrying
    the numerical rank, residual and a pivot-ratio condition estimate is
    returned instead of the bare vector.
    """
    rows = _as_rows(A)
    bb = [to_mpc(t) for t in b]
    _check_finite(rows)
    _check_finite([bb])
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m < n:
        raise ValueError("solve_linear needs rows >= cols")
    el = eliminate(rows, [[t] for t in bb], tol=tol)
    cond = el.pivots[0] / el.pivots[-1] if el.rank else mp.inf
    if el.rank == n == m:
        x = [mp.mpc(0)] * n
        for i in range(n - 1, -1, -1):
            row = el.U[i]
            s = el.rhs[i][0]
            for j in range(i + 1, n):
                s -= row[el.cols[j]] * x[el.cols[j]]
            x[el.cols[i]] = s / row[el.cols[i]]
    else:
        x = _lstsq_svd(rows, bb, el.rank)
    if warn_cond is None:
        warn_cond = mp.ldexp(mp.mpf(1), mp.prec // 2)
    if cond > warn_cond:
        warnings.warn(f"ill-conditioned system, condition estimate {mp.nstr(cond, 5)}",
                      IllConditioned, stacklevel=2)
    res = _norm([y - t for y, t in zip(_matvec(rows, x), bb)])
    if full_output:
        return LinearSolution(x, el.rank, res, cond)
    return x


def _lstsq_svd(rows, b, rank):
    A = mp.matrix(rows)
    U, S, V = mp.svd_c(A, full_matrices=False)
    # V rows are right singular vectors (A = U diag(S) V)
    x = [mp.mpc(0)] * A.cols
    for k in range(min(rank, len(S))):
        if S[k] == 0:
            continue
        coef = mp.fsum(mp.conj(U[i, k]) * b[i] for i in range(A.rows)) / S[k]
        for j in range(A.cols):
            x[j] += coef * mp.conj(V[k, j])
    return x


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def poly_roots(p: Poly, maxiter: int = 2000, cluster: bool = True):
    """Roots of ``p`` with multiplicity estimates.

    Aberth simultaneous iteration, stopped per root at the rounding level of
    Horner evaluation, followed by Newton polishing.  Roots closer than
    ``2**(-prec/4)`` (relative) are merged into one entry whose multiplicity
    is the cluster size.  Returns a list of ``(root, multiplicity)`` sorted by
    real then imaginary part; multiplicities sum to ``p.degree``.
    """
    if not isinstance(p, Poly):
        p = Poly(p)
    if p.degree < 0:
        raise ZeroPolynomial("zero polynomial")
    if p.degree == 0:
        raise ValueError("poly_roots needs degree >= 1")
    cs = list(p.coeffs)
    nzero = 0
    while cs[0] == 0:
        cs.pop(0)
        nzero += 1
    q = Poly(cs).monic()
    roots = [mp.mpc(0)] * nzero
    if q.degree >= 1:
        try:
            roots += _aberth(q, maxiter)
        except NoConvergence:
            if q.degree > 8:
                raise
            roots += _companion_roots(q)
    if not cluster:
        return sorted(((r, 1) for r in roots), key=_root_key)
    return _cluster(roots)


def _root_key(item):
    r = item[0]
    return (float(mp.nint(r.real * 10**12)), float(mp.nint(r.imag * 10**12)))


def _cluster(roots):
    tol = cluster_tol()
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= tol * max(1, abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    out = [(mp.fsum(g) / len(g), len(g)) for g in groups.values()]
    return sorted(out, key=_root_key)


def _initial_guesses(q: Poly):
    d = q.degree
    c = q.coeffs
    # radius from the geometric mean of the roots, bounded by Fujiwara
    r0 = abs(c[0]) ** (mp.mpf(1) / d) if c[0] != 0 else mp.mpf(1)
    bound = 2 * max(abs(c[k]) ** (mp.mpf(1) / (d - k)) for k in range(d))
    r = min(max(r0, mp.mpf(10) ** -3 * bound), bound)
    return [r * mp.expjpi(mp.mpf(2 * k) / d + mp.mpf(1) / (2 * d) + mp.mpf("0.13"))
            for k in range(d)]


def _aberth(q: Poly, maxiter: int):
    d = q.degree
    if d == 1:
        return [-q.coeffs[0]]
    z = _initial_guesses(q)
    done = [False] * d
    e = eps()
    dq = q.deriv()
    for _ in range(maxiter):
        for i in range(d):
            if done[i]:
                continue
            zi = z[i]
            pv, dv = q.eval_with_derivative(zi)
            if abs(pv) <= 8 * d * e * q.abs_bound(abs(zi)):
                done[i] = True
                continue
            s = mp.fsum(1 / (zi - z[j]) for j in range(d) if j != i)
            if dv == 0:
                corr = mp.mpc(mp.sqrt(e), mp.sqrt(e))
            else:
                ratio = pv / dv
                den = 1 - ratio * s
                corr = ratio / den if den != 0 else ratio
            z[i] = zi - corr
            if abs(corr) <= e * max(1, abs(z[i])):
                done[i] = True
        if all(done):
            break
    else:
        raise NoConvergence("Aberth iteration did not converge", best=z)
    # Newton polish of well separated roots
    for i in range(d):
        sep = min(abs(z[i] - z[j]) for j in range(d) if j != i)
        if sep <= cluster_tol() * max(1, abs(z[i])):
            continue
        for _ in range(3):
            pv = q(z[i])
            dv = dq(z[i])
            if dv == 0:
                break
            step = pv / dv
            z[i] -= step
            if abs(step) <= e * max(1, abs(z[i])):
                break
    return z


def _companion_roots(q: Poly):
    d = q.degree
    C = mp.matrix(d, d)
    for k in range(1, d):
        C[k, k - 1] = 1
    for k in range(d):
        C[k, d - 1] = -q.coeffs[k]
    ev = mp.eig(C, left=False, right=False)
    return [mp.mpc(x) for x in ev]


# ---------------------------------------------------------------------------
# paths and quadrature
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _gauss_legendre(order: int, prec: int):
    """Nodes and weights on [-1, 1] (cached per order and precision)."""
    with mp.workprec(prec + 20):
        xs, ws = [], []
        for i in range(1, order // 2 + 1):
            x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (order + mp.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for k in range(2, order + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.ldexp(mp.mpf(1), -prec - 10):
                    break
            p0, p1 = mp.mpf(1), x
            for k in range(2, order + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = order * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            xs += [x, -x]
            ws += [w, w]
        if order % 2:
            p0, p1 = mp.mpf(1), mp.mpf(0)
            for k in range(2, order + 1):
                p0, p1 = p1, ((2 * k - 1) * 0 * p1 - (k - 1) * p0) / k
            dp = order * (0 * p1 - p0) / (-1)
            xs.append(mp.mpf(0))
            ws.append(2 / (dp * dp))
    return tuple(+x for x in xs), tuple(+w for w in ws)


def gauss_legendre(order: int):
    """Gauss-Legendre nodes and weights on [-1, 1] at the current precision."""
    if order < 2:
        raise ValueError("order must be at least 2")
    return _gauss_legendre(int(order), mp.prec)


def default_order() -> int:
    return max(20, mp.prec // 6)


class Segment:
    """Smooth oriented piece of a path parametrised on ``u in [0, 1]``.

    ``sing_start`` / ``sing_end`` declare an inverse square-root endpoint
    singularity of the integrand; quadrature then substitutes
    ``u = s^2`` (or its mirror, or ``u = s^2 (3 - 2 s)`` for both ends).
    ``side`` is an opaque tag for boundary-value paths along a cut.
    """

    sing_start = False
    sing_end = False
    side = None

    def point(self, u):
        raise NotImplementedError

    def deriv(self, u):
        raise NotImplementedError

    @property
    def start(self):
        return self.point(mp.mpf(0))

    @property
    def end(self):
        return self.point(mp.mpf(1))

    def reversed(self) -> "Segment":
        return _Reversed(self)

    def transformed(self, s):
        """``(z, dz/ds)`` after the endpoint substitution."""
        a, b = self.sing_start, self.sing_end
        if a and b:
            u = s * s * (3 - 2 * s)
            du = 6 * s * (1 - s)
        elif a:
            u, du = s * s, 2 * s
        elif b:
            t = 1 - s
            u, du = 1 - t * t, 2 * t
        else:
            u, du = s, 1
        return self.point(u), self.deriv(u) * du


class Line(Segment):
    def __init__(self, a, b, sing_start=False, sing_end=False, side=None):
        self.a, self.b = to_mpc(a), to_mpc(b)
        self.sing_start, self.sing_end, self.side = sing_start, sing_end, side

    def point(self, u):
        return self.a + (self.b - self.a) * u

    def deriv(self, u):
        return self.b - self.a

    @property
    def start(self):
        return self.a

    @property
    def end(self):
        return self.b

    def reversed(self):
        return Line(self.b, self.a, self.sing_end, self.sing_start, self.side)

    def __repr__(self):
        return f"Line({mp.nstr(self.a, 6)}, {mp.nstr(self.b, 6)})"


class ArcSegment(Segment):
    """Circular arc ``c + r exp(i theta)`` from ``theta0`` to ``theta1``."""

    def __init__(self, center, radius, theta0, theta1, side=None):
        self.c = to_mpc(center)
        self.r = mp.mpf(radius)
        self.t0, self.t1 = mp.mpf(theta0), mp.mpf(theta1)
        self.side = side

    def point(self, u):
        return self.c + self.r * mp.expj(self.t0 + (self.t1 - self.t0) * u)

    def deriv(self, u):
        th = self.t0 + (self.t1 - self.t0) * u
        return 1j * self.r * (self.t1 - self.t0) * mp.expj(th)

    def reversed(self):
        return ArcSegment(self.c, self.r, self.t1, self.t0, self.side)


class Ray(Segment):
    """Half line ``a + d t``, ``t in [0, inf)``, via ``t = u / (1 - u)``.

    The integrand must decay at least like ``|z|^-2``.
    """

    def __init__(self, a, direction):
        self.a = to_mpc(a)
        d = to_mpc(direction)
        self.d = d / abs(d)

    def point(self, u):
        return self.a + self.d * (u / (1 - u))

    def deriv(self, u):
        return self.d / (1 - u) ** 2

    @property
    def start(self):
        return self.a

    @property
    def end(self):
        return mp.inf

    def reversed(self):
        return _Reversed(self)


class Curve(Segment):
    """Parametrised curve given by callables ``z(u)`` and ``z'(u)``."""

    def __init__(self, z: Callable, dz: Callable, sing_start=False, sing_end=False, side=None):
        self._z, self._dz = z, dz
        self.sing_start, self.sing_end, self.side = sing_start, sing_end, side

    def point(self, u):
        return to_mpc(self._z(u))

    def deriv(self, u):
        return to_mpc(self._dz(u))


class _Reversed(Segment):
    def __init__(self, seg: Segment):
        self.seg = seg
        self.sing_start, self.sing_end, self.side = seg.sing_end, seg.sing_start, seg.side

    def point(self, u):
        return self.seg.point(1 - u)

    def deriv(self, u):
        return -self.seg.deriv(1 - u)

    @property
    def start(self):
        return self.seg.end

    @property
    def end(self):
        return self.seg.start

    def reversed(self):
        return self.seg


class Path:
    """Ordered list of segments sharing endpoints."""

    def __init__(self, segments: Sequence[Segment]):
        self.segments = list(segments)

    @classmethod
    def polyline(cls, points, sing_start=False, sing_end=False) -> "Path":
        pts = [to_mpc(p) for p in points]
        segs = [Line(a, b) for a, b in zip(pts, pts[1:])]
        if segs:
            segs[0].sing_start = sing_start
            segs[-1].sing_end = sing_end
        return cls(segs)

    @classmethod
    def circle(cls, center, radius, pieces: int = 4) -> "Path":
        segs = [ArcSegment(center, radius, 2 * mp.pi * k / pieces, 2 * mp.pi * (k + 1) / pieces)
                for k in range(pieces)]
        return cls(segs)

    def reversed(self) -> "Path":
        return Path([s.reversed() for s in reversed(self.segments)])

    def __add__(self, other: "Path") -> "Path":
        return Path(self.segments + other.segments)

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)


def _vec(v):
    if isinstance(v, (list, tuple)):
        return [to_mpc(t) if not isinstance(t, mp.mpc) else t for t in v], True
    return [v if isinstance(v, mp.mpc) else mp.mpc(v)], False


def _panel(F, a, b, xs, ws):
    h = (b - a) / 2
    m = (a + b) / 2
    acc = None
    for x, w in zip(xs, ws):
        v = F(m + h * x)
        if acc is None:
            acc = [w * t for t in v]
        else:
            for k, t in enumerate(v):
                acc[k] += w * t
    return [h * t for t in acc]


def quad_segment(f: Callable, seg: Segment, order: int | None = None, tol=None,
                 max_panels: int = 4000, initial_panels: int = 1):
    """Adaptive Gauss-Legendre integral of ``f(z) dz`` over one segment.

    ``f`` may return a scalar or a list (vector integrand).  Returns
    ``(value, error_estimate)`` with ``value`` matching the shape of ``f``.
    """
    order = order or default_order()
    tol = quad_tol() if tol is None else mp.mpf(tol)
    xs, ws = gauss_legendre(order)
    shape = []

    def F(s):
        z, dz = seg.transformed(s)
        v, is_vec = _vec(f(z))
        if not shape:
            shape.append(is_vec)
        return [t * dz for t in v]

    edges = [mp.mpf(k) / initial_panels for k in range(initial_panels + 1)]
    stack = [(a, b, _panel(F, a, b, xs, ws)) for a, b in zip(edges, edges[1:])]
    total = None
    err = mp.mpf(0)
    used = len(stack)
    while stack:
        a, b, whole = stack.pop()
        m = (a + b) / 2
        left = _panel(F, a, m, xs, ws)
        right = _panel(F, m, b, xs, ws)
        used += 2
        both = [x + y for x, y in zip(left, right)]
        d = max(abs(x - y) for x, y in zip(both, whole))
        size = max(abs(x) for x in both)
        if not all(is_finite(x) for x in both):
            raise NonFinite("non-finite integrand sample on path")
        if d <= tol * max(1, size) or used > max_panels:
            if used > max_panels and d > tol * max(1, size):
                est = _accumulate(total, both)
                for _, _, w in stack:
                    est = _accumulate(est, w)
                raise BudgetExceeded("quadrature panel budget exhausted", estimate=est,
                                     error=err + d)
            total = _accumulate(total, both)
            err += d
        else:
            stack.append((m, b, right))
            stack.append((a, m, left))
    val = total if shape and shape[0] else total[0]
    return val, err


def _accumulate(total, v):
    if total is None:
        return list(v)
    return [x + y for x, y in zip(total, v)]


def quad_path(f: Callable, path, order: int | None = None, tol=None, max_panels: int = 4000):
    """Integrate ``f(z) dz`` along a :class:`Path` (or a single segment)."""
    if isinstance(path, Segment):
        path = Path([path])
    total = None
    is_vec = False
    for seg in path.segments:
        v, _ = quad_segment(f, seg, order=order, tol=tol, max_panels=max_panels)
        vv, is_vec = _vec(v)
        total = _accumulate(total, vv)
    if total is None:
        return mp.mpc(0)
    return total if is_vec else total[0]
