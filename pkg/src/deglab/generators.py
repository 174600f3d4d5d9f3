"""Deterministic families of test functions.

All outputs are PL functions on [0, 1] with g(0) = 0.  The logarithmic
families take the offset ``beta`` in log form because the regimes of interest
put it far below what a double can hold.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .plfn import PLFunction, jitter_levels, level_value

__all__ = [
    "gen_linear",
    "gen_log_boundary",
    "log_boundary_for_M",
    "gen_multibump",
    "gen_random",
    "log_profile",
    "resolution",
]

_TINY = np.finfo(float).tiny


def gen_linear(M: int, delta: float) -> PLFunction:
    if M < 1 or not delta > 0:
        raise ValueError("need M >= 1 and delta > 0")
    return PLFunction((0.0, 1.0), (0.0, level_value(M, delta)))


def _log_depth(beta_log: float) -> float:
    """ln(1 + 1/beta) without forming beta."""
    return -beta_log + math.log1p(math.exp(beta_log))


def log_profile(beta_log: float, steps_per_unit: float, min_segments: int):
    """Geometric samples of ``z -> ln(1 + z/beta)`` on [0, 1].

    Returns ``(z, L)`` where ``L[j] = ln(1 + z[j]/beta)``; the log values are
    exact multiples of the ratio step, and ``z`` below the smallest normal
    double is lifted to it (duplicates removed later by the caller).
    """
    depth = _log_depth(beta_log)
    step = min(1.0 / steps_per_unit, depth / min_segments)
    J = int(math.ceil(depth / step))
    z, L = [0.0], [0.0]
    for j in range(1, J):
        lj = j * step
        if lj >= depth:
            break
        # ln z_j = ln beta + ln(r^j - 1)
        lnz = beta_log + lj + math.log(-math.expm1(-lj))
        zj = 1.0 if lnz >= 0 else max(math.exp(lnz), _TINY)
        if zj >= 1.0:
            break
        z.append(zj)
        L.append(lj)
    z.append(1.0)
    L.append(depth)
    return np.array(z), np.array(L)


def _dedupe(xs, ys):
    """Keep the first point of every run of equal x, and the final point."""
    out_x, out_y = [xs[0]], [ys[0]]
    for x, y in zip(xs[1:-1], ys[1:-1]):
        if x > out_x[-1]:
            out_x.append(x)
            out_y.append(y)
    if xs[-1] > out_x[-1]:
        out_x.append(xs[-1])
        out_y.append(ys[-1])
    else:
        out_y[-1] = ys[-1]
    return tuple(out_x), tuple(out_y)


def gen_log_boundary(
    K: float,
    beta_log: float,
    delta: float,
    side: str = "left",
    segments: int = 64,
    M: Optional[int] = None,
) -> PLFunction:
    """PL model of ``g(s) = (delta/K) ln(1 + s/beta)``, ``beta = exp(beta_log)``.

    Breakpoints sit at ``s_j = beta (r^j - 1)`` with at least four per band of
    height ``delta``.  ``side="right"`` returns ``g(1) - g(1 - s)``, which puts
    the singularity at 1 and keeps g(0) = 0.  When ``M`` is given the final
    value is snapped to exactly ``M * delta``.
    """
    if not K > 0 or not beta_log < 0 or not delta > 0:
        raise ValueError("need K > 0, beta_log < 0, delta > 0")
    if segments < 64:
        raise ValueError("segments must be >= 64")
    side = side.lower()
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    z, L = log_profile(beta_log, 4.0 / K, segments)
    y = (delta / K) * L
    if M is not None:
        y[-1] = level_value(M, delta)
    xs, ys = _dedupe(z.tolist(), y.tolist())
    if side == "right":
        top = ys[-1]
        rx = [1.0 - x for x in reversed(xs)]
        ry = [top - v for v in reversed(ys)]
        rx[0], ry[0] = 0.0, 0.0
        rx[-1], ry[-1] = 1.0, top
        xs, ys = _dedupe(rx, ry)
    return PLFunction(xs, ys)


def log_boundary_for_M(M: int, K: float, delta: float, side: str = "left", segments: int = 64) -> PLFunction:
    """Log-boundary function with ``g(1) = M delta`` exactly (beta chosen to fit)."""
    beta_log = -(M * K + math.log(-math.expm1(-M * K)))
    return gen_log_boundary(K, beta_log, delta, side=side, segments=segments, M=M)


def gen_multibump(
    bumps: int,
    M: int,
    delta: float,
    bump_K: float = 20.0,
    segments_per_rise: int = 64,
) -> PLFunction:
    """``bumps`` rise-and-fall log bumps of height ``M delta`` then a final rise.

    Each rise and each fall takes a slot of width ``1/(2 bumps + 1)`` and
    follows ``ln(1 + z/beta)`` with ``beta = exp(-bump_K)``, so bumps meet at
    sharp cusps at 0.  The result has ``(2 bumps + 1) (segments_per_rise + 1)``
    breakpoints at most.
    """
    if bumps < 0 or M < 1 or not delta > 0:
        raise ValueError("need bumps >= 0, M >= 1, delta > 0")
    beta_log = -bump_K
    depth = _log_depth(beta_log)
    z, L = log_profile(beta_log, 4.0 * M / depth, segments_per_rise)
    top = level_value(M, delta)
    P = top * (L / depth)
    P[-1] = top
    slots = 2 * bumps + 1
    xs, ys = [], []
    for q in range(slots):
        # (q + z) / slots puts shared slot ends on the same double
        if q % 2 == 0:  # rise
            px, py = (q + z) / slots, P
        else:  # fall
            px, py = (q + 1.0 - z[::-1]) / slots, P[::-1]
        xs.extend(px.tolist())
        ys.extend(py.tolist())
    xs[-1] = 1.0
    xs, ys = _dedupe(xs, ys)
    return PLFunction(xs, ys)


def gen_random(seed: int, segments: int, M: int, delta: float, roughness: float = 1.0) -> PLFunction:
    """Seeded random walk pinned to g(0) = 0 and g(1) = M delta."""
    if segments < 2:
        raise ValueError("segments must be >= 2")
    rng = np.random.default_rng(seed)
    inner = np.sort(rng.random(segments - 1))
    x = np.concatenate(([0.0], inner, [1.0]))
    x = np.unique(x)
    top = level_value(M, delta)
    steps = rng.normal(size=x.size - 1) * (top * roughness / math.sqrt(x.size - 1))
    w = np.concatenate(([0.0], np.cumsum(steps)))
    y = w - w[-1] * x + top * x
    y[0] = 0.0
    y[-1] = top
    f = PLFunction(tuple(x.tolist()), tuple(y.tolist()))
    return jitter_levels(f, delta, delta * 1e-6)


def resolution(f: PLFunction) -> float:
    """Smallest segment width measured in ulps of its right endpoint.

    Level crossings inside a segment are located to about one ulp, so this is
    the inverse relative accuracy of the band sets derived from ``f``.
    """
    x = f.x
    w = np.diff(x)
    u = np.spacing(np.maximum(np.abs(x[1:]), np.abs(x[:-1])))
    return float(np.min(w / u))
