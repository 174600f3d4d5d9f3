"""The nonlocal threshold integral

    I(f, delta) = ∬_{|f(s) - f(t)| > delta} ds dt / (s - t)^2

for piecewise-linear ``f`` over a square, by three independent routes:

* ``integral_exact``: closed form per pair of linear segments,
* ``integral_quadrature``: inner integral in ``t`` done analytically, outer
  integral in ``s`` by adaptive Gauss-Kronrod on a kink-aligned partition,
* ``integral_montecarlo``: uniform sampling of ``(s, t)`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .intervals import IntervalSet
from .plfn import PhaseFunction, PLFunction

__all__ = [
    "IntegralRequest",
    "IntegralResult",
    "integral_exact",
    "integral_quadrature",
    "integral_montecarlo",
    "restricted_pair_integral",
    "shrink_away",
    "threshold_integral",
    "BudgetExhausted",
]

_CHUNK = 100_000


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegralRequest:
    f: Union[PLFunction, PhaseFunction]
    delta: float
    square: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.square not in (1, 2, 1.0, 2.0):
            raise ValueError("square side must be 1 or 2")

    def function(self) -> PLFunction:
        """The PL function whose own domain is the integration square's side."""
        f = self.f
        if isinstance(f, PhaseFunction):
            return f.extended(int(self.square))
        d = f.domain
        if d.hi - d.lo != self.square:
            raise ValueError(
                f"PL function on [{d.lo}, {d.hi}] does not match square side {self.square}; "
                "pass a PhaseFunction to integrate over [0, 2]^2"
            )
        return f


@dataclass
class IntegralResult:
    value: float
    method: str
    error_estimate: float = 0.0
    pieces: int = 0
    converged: bool = True

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "error_estimate": self.error_estimate,
            "pieces": self.pieces,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# exact engine
# ---------------------------------------------------------------------------


def _log_term(alpha, beta, ua, ub):
    """∫_{ua}^{ub} du / (alpha u + beta), with alpha u + beta > 0 on the range."""
    den = alpha * ua + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        lin = (ub - ua) / den
        logt = np.log1p(alpha * lin) / alpha
    return np.where(alpha == 0.0, lin, logt)


def _diagonal(w: np.ndarray, m: np.ndarray, delta: float) -> np.ndarray:
    """Each segment against itself: 2 [x - 1 - ln x] with x = w |m| / delta."""
    out = np.zeros_like(w)
    am = np.abs(m)
    nz = am > 0
    x = np.zeros_like(w)
    x[nz] = w[nz] * am[nz] / delta
    hit = x > 1.0
    xm1 = x[hit] - 1.0
    out[hit] = 2.0 * (xm1 - np.log1p(xm1))
    return out


def _pair_chunk(gap, wA, wB, yA0, yA1, yB0, yB1, delta):
    """Contributions of segment pairs with A lying ``gap >= 0`` to the left of B.

    A point of A is written ``s = a1 - u`` (distance ``u`` back from A's
    right end) and a point of B as ``t = b0 + v``, so ``t - s = gap + u + v``
    and nothing depends on absolute positions.  Touching or nearly touching
    segments therefore keep full relative accuracy.
    """
    m1 = (yA1 - yA0) / wA
    m2 = (yB1 - yB0) / wB
    D1 = yA1 - yB0  # f_A(a1) - f_B(b0)

    # u where f_A(s) - f_B(t) = +-delta at t = b0 or t = b1
    targets = np.stack([yB0 - delta, yB0 + delta, yB1 - delta, yB1 + delta], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        bp = (yA1[:, None] - targets) / m1[:, None]
    bp = np.where(np.isfinite(bp), bp, 0.0)
    bp = np.clip(bp, 0.0, wA[:, None])
    cuts = np.concatenate([np.zeros((gap.size, 1)), bp, wA[:, None]], axis=1)
    cuts.sort(axis=1)
    ua, ub = cuts[:, :-1], cuts[:, 1:]
    live = ub > ua
    um = 0.5 * (ua + ub)

    m1c, m2c = m1[:, None], m2[:, None]
    wBc, gc, D1c = wB[:, None], gap[:, None], D1[:, None]
    fa = D1c - m1c * um  # f_A(s) - f_B(b0) at the midpoint

    flat = m2c == 0.0
    sgn = np.where(m2c > 0, 1.0, -1.0)
    m2s = np.where(flat, 1.0, m2c)
    # strip edges in v as affine functions of u: v = c1 u + c0
    c1 = -m1c / m2s
    cL0 = (D1c - sgn * delta) / m2s
    cU0 = (D1c + sgn * delta) / m2s
    Lm = c1 * um + cL0
    Um = c1 * um + cU0

    # lower piece v in [0, L], upper piece v in [U, wB]
    low_on = np.where(flat, np.abs(fa) > delta, Lm > 0.0) & live
    low_const = np.where(flat, True, Lm >= wBc)
    up_on = np.where(flat, False, Um < wBc) & live
    up_const = Um <= 0.0

    one = np.ones_like(ua)
    t0 = _log_term(one, gc * one, ua, ub)  # v = 0
    tB = _log_term(one, (gc + wBc) * one, ua, ub)  # v = wB
    tL = _log_term((1.0 + c1) * one, (gc + cL0) * one, ua, ub)
    tU = _log_term((1.0 + c1) * one, (gc + cU0) * one, ua, ub)

    total = np.where(low_on, t0 - np.where(low_const, tB, tL), 0.0)
    total += np.where(up_on, np.where(up_const, t0, tU) - tB, 0.0)
    return total[live]


def _corner_filter(yA0, yA1, yB0, yB1, delta):
    """Pairs whose rectangle leaves the strip somewhere.

    ``|f_A - f_B|`` is convex on the rectangle, so its maximum is at a corner.
    """
    c = np.maximum.reduce([np.abs(yA0 - yB0), np.abs(yA0 - yB1), np.abs(yA1 - yB0), np.abs(yA1 - yB1)])
    return c > delta


def _pairs(ia, ib, gap, x, y, delta, yshift=0.0):
    """2 x the contributions of pairs (segment ia) left of (segment ib, lifted by yshift)."""
    yA0, yA1 = y[ia], y[ia + 1]
    yB0, yB1 = y[ib] + yshift, y[ib + 1] + yshift
    keep = _corner_filter(yA0, yA1, yB0, yB1, delta)
    if not keep.any():
        return None, 0
    w = np.diff(x)
    ia, ib = ia[keep], ib[keep]
    gap, wA, wB = gap[keep], w[ia], w[ib]
    yA0, yA1, yB0, yB1 = yA0[keep], yA1[keep], yB0[keep], yB1[keep]
    # The strip edges are written as v = c(u) with slope -m_A/m_B.  When A is
    # the steeper segment that slope is huge and c(u) cancels badly, so the
    # pair is mirrored (s, t) -> (-t, -s), which swaps the two roles.
    steep = np.abs(yA1 - yA0) * wB > np.abs(yB1 - yB0) * wA
    keep_ = ~steep
    vals = [
        _pair_chunk(gap[keep_], wA[keep_], wB[keep_], yA0[keep_], yA1[keep_], yB0[keep_], yB1[keep_], delta),
        _pair_chunk(gap[steep], wB[steep], wA[steep], yB1[steep], yB0[steep], yA1[steep], yA0[steep], delta),
    ]
    return 2.0 * np.concatenate(vals), int(ia.size)


def _row_blocks(n: int, cols: int):
    step = max(1, _CHUNK // max(cols, 1))
    for lo in range(0, n, step):
        yield np.arange(lo, min(n, lo + step))


def _exact_pl(f: PLFunction, delta: float):
    x, y = f.x, f.y
    n = f.n_segments
    w = np.diff(x)
    m = np.diff(y) / w
    parts = [_diagonal(w, m, delta)]
    count = 0
    for rows in _row_blocks(n, n):
        ia, ib = np.meshgrid(rows, np.arange(n), indexing="ij")
        sel = ib > ia
        ia, ib = ia[sel], ib[sel]
        vals, c = _pairs(ia, ib, x[ib] - x[ia + 1], x, y, delta)
        if c:
            parts.append(vals)
            count += c
    flat = np.concatenate([p.ravel() for p in parts])
    # exactly rounded sum: order-independent and immune to cancellation
    return math.fsum(flat.tolist()), n + count


def _exact_two_periods(phi: PhaseFunction, delta: float):
    """Integral over [0, 2]^2 of the lift without forming ``1 + x``.

    By translation invariance the two diagonal blocks equal the single-period
    integral; the off-diagonal block pairs each segment of the first period
    with each segment of the second, at gap ``(1 - x_A1) + x_B0``.
    """
    base = phi.base
    x, y = base.x, base.y
    n = base.n_segments
    one, pieces = _exact_pl(base, delta)
    parts = [np.array([one, one])]
    count = 2 * pieces
    for rows in _row_blocks(n, n):
        ia, ib = (a.ravel() for a in np.meshgrid(rows, np.arange(n), indexing="ij"))
        gap = (1.0 - x[ia + 1]) + x[ib]
        vals, c = _pairs(ia, ib, gap, x, y, delta, yshift=phi.increment)
        if c:
            parts.append(vals)
            count += c
    flat = np.concatenate(parts)
    return math.fsum(flat.tolist()), count


def threshold_integral(f: Union[PLFunction, PhaseFunction], delta: float) -> float:
    """Exact integral over the function's own domain squared, or [0, 2]^2 for a phase."""
    if isinstance(f, PhaseFunction):
        return _exact_two_periods(f, delta)[0]
    return _exact_pl(f, delta)[0]


def integral_exact(req: IntegralRequest) -> IntegralResult:
    if isinstance(req.f, PhaseFunction) and req.square == 2:
        value, pieces = _exact_two_periods(req.f, req.delta)
    else:
        value, pieces = _exact_pl(req.function(), req.delta)
    return IntegralResult(value=max(value, 0.0), method="exact", error_estimate=0.0, pieces=pieces)


# ---------------------------------------------------------------------------
# semi-analytic adaptive quadrature
# ---------------------------------------------------------------------------


def _inner(f: PLFunction, delta: float, s: np.ndarray) -> np.ndarray:
    """h(s) = ∫ 1[|f(s) - f(t)| > delta] dt / (t - s)^2 over the domain."""
    x, y = f.x, f.y
    b0, b1 = x[:-1][None, :], x[1:][None, :]
    yb0, yb1 = y[:-1][None, :], y[1:][None, :]
    S = s[:, None]
    fs = np.interp(s, x, y)[:, None]
    dy = yb1 - yb0
    flat = dy == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = (fs - delta - yb0) / dy
        r2 = (fs + delta - yb0) / dy
    rlo = np.where(flat, 0.0, np.minimum(r1, r2))
    rhi = np.where(flat, 0.0, np.maximum(r1, r2))
    covered = np.abs(yb0 - fs) <= delta
    # strip in t, clipped to the segment; a flat segment is all-or-nothing
    width = b1 - b0
    lo = np.where(flat, np.where(covered, b0, b1), b0 + width * np.clip(rlo, 0.0, 1.0))
    hi = np.where(flat, b1, b0 + width * np.clip(rhi, 0.0, 1.0))

    def piece(p, q):
        # (q - p) / ((p - s)(q - s)) rather than a difference of reciprocals,
        # which turns into inf - inf when p or q rounds onto s
        ok = q > p
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (q - p) / ((p - S) * (q - S))
        return np.where(ok, v, 0.0)

    with np.errstate(invalid="ignore"):
        return np.sum(piece(b0 + 0.0 * S, lo) + piece(hi, b1 + 0.0 * S), axis=1)


def _inner_blocked(f: PLFunction, delta: float, s: np.ndarray) -> np.ndarray:
    """:func:`_inner` in row blocks so memory stays bounded."""
    step = max(15, _CHUNK // max(f.n_segments, 1))
    return np.concatenate([_inner(f, delta, s[i : i + step]) for i in range(0, s.size, step)])


def _kinks(f: PLFunction, delta: float) -> np.ndarray:
    """s-values where the admissible t-set changes combinatorially."""
    x, y = f.x, f.y
    pts = [x]
    targets = np.concatenate((y - delta, y + delta))
    for i in range(f.n_segments):
        y0, y1 = y[i], y[i + 1]
        if y0 == y1:
            continue
        r = (targets - y0) / (y1 - y0)
        r = r[(r > 0) & (r < 1)]
        pts.append(x[i] + (x[i + 1] - x[i]) * r)
    k = np.unique(np.concatenate(pts))
    return k


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))
_WK = np.concatenate((_WGK[:-1], _WGK[::-1]))
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate((_WG[:-1], _WG[::-1]))


def integral_quadrature(req: IntegralRequest, tol: float = 1e-6, max_intervals: int = 200_000) -> IntegralResult:
    """Adaptive outer quadrature of the analytic inner integral.

    The initial partition puts a break at every ``s`` where ``f(s) ± delta`` hits
    a breakpoint value, so the integrand is smooth on each piece; intervals
    are bisected until the Gauss-Kronrod error estimates sum below ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    f = req.function()
    delta = req.delta
    edges = _kinks(f, delta)
    lo, hi = edges[:-1], edges[1:]
    good = hi > lo
    lo, hi = lo[good], hi[good]
    total_len = f.domain.hi - f.domain.lo
    done_val, done_err = [], []
    n_final = 0
    evaluated = 0
    while lo.size:
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        S = (c[:, None] + h[:, None] * _NODES[None, :]).ravel()
        vals = _inner_blocked(f, delta, S).reshape(lo.size, 15)
        evaluated += lo.size
        with np.errstate(invalid="ignore"):
            k15 = h * (vals @ _WK)
            g7 = h * (vals @ _WG15)
            err = np.abs(k15 - g7)
        if not np.all(np.isfinite(k15)):
            # nodes rounded onto a breakpoint of a sub-ulp segment: the
            # integrand is unresolvable in doubles at this scale
            value = math.fsum(np.concatenate(done_val + [k15[np.isfinite(k15)]]).tolist())
            return IntegralResult(value, "quadrature", math.inf, n_final, converged=False)
        allow = 0.5 * tol * (hi - lo) / total_len
        ok = (err <= allow) | (h < 1e-15 * max(1.0, abs(total_len)))
        done_val.append(k15[ok])
        done_err.append(err[ok])
        n_final += int(ok.sum())
        lo, hi = lo[~ok], hi[~ok]
        if evaluated + 2 * lo.size > max_intervals:
            c = 0.5 * (lo + hi)
            h = 0.5 * (hi - lo)
            S = (c[:, None] + h[:, None] * _NODES[None, :]).ravel()
            vals = _inner_blocked(f, delta, S).reshape(lo.size, 15)
            done_val.append(h * (vals @ _WK))
            done_err.append(np.abs(h * (vals @ _WK) - h * (vals @ _WG15)))
            n_final += lo.size
            value = math.fsum(np.concatenate(done_val).tolist())
            err = float(np.sum(np.concatenate(done_err)))
            return IntegralResult(value, "quadrature", err, n_final, converged=False)
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
    vals = np.concatenate(done_val) if done_val else np.zeros(0)
    errs = np.concatenate(done_err) if done_err else np.zeros(0)
    value = math.fsum(vals.tolist())
    return IntegralResult(max(value, 0.0), "quadrature", float(errs.sum()), n_final, converged=True)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def integral_montecarlo(req: IntegralRequest, samples: int = 1_000_000, seed: int = 0) -> IntegralResult:
    """Uniform sampling of the square with the indicator evaluated exactly."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    f = req.function()
    lo, hi = f.domain.lo, f.domain.hi
    area = (hi - lo) ** 2
    rng = np.random.default_rng(seed)
    s1 = 0.0
    s2 = 0.0
    left = samples
    while left > 0:
        n = min(left, 1_000_000)
        s = lo + (hi - lo) * rng.random(n)
        t = lo + (hi - lo) * rng.random(n)
        diff = np.abs(np.interp(s, f.x, f.y) - np.interp(t, f.x, f.y))
        hit = diff > req.delta
        v = np.zeros(n)
        v[hit] = 1.0 / (s[hit] - t[hit]) ** 2
        s1 += math.fsum(v.tolist())
        s2 += math.fsum((v * v).tolist())
        left -= n
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    se = area * math.sqrt(var / samples) if samples > 1 else math.inf
    return IntegralResult(area * mean, "montecarlo", se, samples)


# ---------------------------------------------------------------------------
# separated sets
# ---------------------------------------------------------------------------


def restricted_pair_integral(A: IntervalSet, B: IntervalSet) -> float:
    """∬_{s in A, t in B} ds dt / (s - t)^2, +inf when A and B touch or overlap."""
    if not A or not B:
        return 0.0
    alo, ahi = A.lo[:, None], A.hi[:, None]
    blo, bhi = B.lo[None, :], B.hi[None, :]
    a_left = ahi < blo
    b_left = bhi < alo
    if not np.all(a_left | b_left):
        return math.inf
    gap = np.where(a_left, blo - ahi, alo - bhi)
    far = np.where(a_left, bhi - alo, ahi - blo)
    wa = ahi - alo
    wb = bhi - blo
    # ratios rather than products, so lengths near the underflow limit survive
    vals = np.log1p((wa / gap) * (wb / far))
    return math.fsum(vals.ravel().tolist())


def shrink_away(B: IntervalSet, A: IntervalSet, eps: float = 1e-9) -> IntervalSet:
    """Remove from B everything within eps of A (finite surrogate for touching sets)."""
    if not A:
        return B
    pad = IntervalSet(
        B.domain,
        np.maximum(A.lo - eps, B.domain.lo),
        np.minimum(A.hi + eps, B.domain.hi),
    )
    return B.difference(pad)
