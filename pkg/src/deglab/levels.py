"""Discretised level sets of a PL function and the index sets built from them.

For a band width ``delta`` the band sets are ``E_k = {g in [k delta, (k+1) delta]}``
and ``N_k = E_{k-1} ∪ E_k ∪ E_{k+1}``.  An index ``k`` is *satisfied* when some
interval is simultaneously 0.01-full (``|E_k ∩ I| > 0.01|I|``) and 0.01-empty
(``|N_k^c ∩ I| > 0.01|I|``) for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .intervals import IntervalSet
from .plfn import Interval, PLFunction, level_value

__all__ = [
    "NonFiniteLevelSet",
    "LevelDecomposition",
    "IndexSetReport",
    "decompose",
    "neighbors",
    "superlevel",
    "is_full",
    "is_empty",
    "satisfied_set",
    "satisfied_set_grid",
    "pair_integral_lower_check",
    "unsatisfied_pairs",
    "SATISFIED_ALPHA",
    "PAIR_INTEGRAL_FLOOR",
]

SATISFIED_ALPHA = 0.01
PAIR_INTEGRAL_FLOOR = 1e-4
# g(1)/delta counts as an integer within this relative slack
_MULTIPLE_RTOL = 1e-9


class NonFiniteLevelSet(ValueError):
    """A segment is constant on a level ``k * delta``; jitter the function first."""


@dataclass(frozen=True, eq=False)
class LevelDecomposition:
    delta: float
    M: int
    M_exact: bool
    domain: Interval
    E: dict
    g: Optional[PLFunction] = field(default=None, repr=False)

    def band(self, k: int) -> IntervalSet:
        s = self.E.get(k)
        return s if s is not None else IntervalSet.empty(self.domain)

    @cached_property
    def occupied(self) -> list:
        """Indices whose band set has positive measure, ascending."""
        return sorted(k for k, s in self.E.items() if s.measure > 0)

    @cached_property
    def _neighbors(self) -> dict:
        return {}

    def neighbors(self, k: int) -> IntervalSet:
        cache = self._neighbors
        if k not in cache:
            cache[k] = self.band(k - 1).union(self.band(k)).union(self.band(k + 1))
        return cache[k]

    def neighbors_complement(self, k: int) -> IntervalSet:
        return self.neighbors(k).complement()

    def superlevel(self, k: int) -> IntervalSet:
        out = IntervalSet.empty(self.domain)
        for j, s in self.E.items():
            if j > k:
                out = out.union(s)
        return out

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "M": self.M,
            "M_exact": self.M_exact,
            "domain": [self.domain.lo, self.domain.hi],
            "E": {str(k): self.E[k].to_json() for k in sorted(self.E)},
        }


def _band_index(y: float, delta: float) -> int:
    """The k with ``level(k) <= y < level(k+1)``."""
    k = math.floor(y / delta)
    while level_value(k, delta) > y:
        k -= 1
    while level_value(k + 1, delta) <= y:
        k += 1
    return k


def _segment_bands(x0, y0, x1, y1, delta, out, allow_flat=False):
    if y0 == y1:
        k = _band_index(y0, delta)
        if level_value(k, delta) == y0 and not allow_flat:
            raise NonFiniteLevelSet(f"segment [{x0}, {x1}] is constant on level {y0}")
        out.setdefault(k, []).append((x0, x1))
        return
    rising = y1 > y0
    ylo, yhi = (y0, y1) if rising else (y1, y0)
    xlo, xhi = (x0, x1) if rising else (x1, x0)
    k = _band_index(ylo, delta)
    cut_x = xlo
    span = x1 - x0
    while True:
        nxt = level_value(k + 1, delta)
        if nxt >= yhi:
            nxt_x = xhi
        else:
            nxt_x = x0 + span * ((nxt - y0) / (y1 - y0))
            nxt_x = min(max(nxt_x, x0), x1)
        a, b = (cut_x, nxt_x) if rising else (nxt_x, cut_x)
        if b > a:
            out.setdefault(k, []).append((a, b))
        if nxt >= yhi:
            break
        cut_x = nxt_x
        k += 1


def _multiple_of(value: float, delta: float):
    q = value / delta
    r = round(q)
    return r, abs(q - r) <= _MULTIPLE_RTOL * max(1.0, abs(q))


def decompose(g: PLFunction, delta: float) -> LevelDecomposition:
    """Exact band sets of ``g`` computed segment by segment.

    A globally constant ``g`` sits in a single band even when its value is a
    level; a flat piece on a level inside a non-constant ``g`` raises
    :class:`NonFiniteLevelSet`.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    pieces: dict = {}
    xs, ys = g.xs, g.ys
    constant = all(y == ys[0] for y in ys)
    for i in range(len(xs) - 1):
        _segment_bands(xs[i], ys[i], xs[i + 1], ys[i + 1], delta, pieces, constant)
    dom = g.domain
    E = {k: IntervalSet.from_pairs(p, dom) for k, p in pieces.items()}
    E = {k: s for k, s in E.items() if s}
    rise = ys[-1]
    r, exact = _multiple_of(rise, delta)
    M = int(r) if exact else int(math.floor(rise / delta))
    return LevelDecomposition(delta=delta, M=M, M_exact=exact, domain=dom, E=E, g=g)


def neighbors(d: LevelDecomposition, k: int) -> IntervalSet:
    return d.neighbors(k)


def superlevel(d: LevelDecomposition, k: int) -> IntervalSet:
    """``{g > (k+1) delta}`` up to its finite boundary."""
    return d.superlevel(k)


def is_full(d: LevelDecomposition, k: int, I: Interval, alpha: float) -> bool:
    return d.band(k).measure_between(I.lo, I.hi) > alpha * (I.hi - I.lo)


def is_empty(d: LevelDecomposition, k: int, I: Interval, alpha: float) -> bool:
    return d.neighbors_complement(k).measure_between(I.lo, I.hi) > alpha * (I.hi - I.lo)


@dataclass
class IndexSetReport:
    satisfied: list
    unsatisfied_pairs: list
    witness_intervals: dict
    occupied: list
    grid_disagreements: list = field(default_factory=list)

    @property
    def n_satisfied(self) -> int:
        return len(self.satisfied)

    def to_json(self) -> dict:
        return {
            "satisfied": list(self.satisfied),
            "unsatisfied_pairs": list(self.unsatisfied_pairs),
            "witness_intervals": {
                str(k): [I.lo, I.hi] for k, I in sorted(self.witness_intervals.items())
            },
            "grid_disagreements": list(self.grid_disagreements),
        }


def _best_interval(E: IntervalSet, C: IntervalSet, lo: float, hi: float, alpha: float):
    """Search intervals (a, b) in [lo, hi] that are alpha-full for E and alpha-full for C.

    Both margins ``|E ∩ (a,b)| - alpha (b-a)`` and ``|C ∩ (a,b)| - alpha (b-a)`` are
    affine on each cell of the endpoint lattice, so the maximum of their
    minimum over a cell sits at a cell vertex or where the two margins cross on
    a cell edge.  All such points are enumerated.  Returns the candidate
    intervals ordered by decreasing relative margin.
    """
    pts = np.unique(np.concatenate(([lo, hi], E.lo, E.hi, C.lo, C.hi)))
    pts = pts[(pts >= lo) & (pts <= hi)]
    P = pts.size
    if P < 3:
        return []
    mE = np.asarray(E.mass(pts))
    mC = np.asarray(C.mass(pts))
    mids = 0.5 * (pts[:-1] + pts[1:])
    sE = np.append(E.contains(mids).astype(float), 0.0)
    sC = np.append(C.contains(mids).astype(float), 0.0)

    cand_a, cand_b = [], []
    ii, jj = np.triu_indices(P, k=1)
    cand_a.append(pts[ii])
    cand_b.append(pts[jj])

    # vertical edges: a = pts[i], b in (pts[j], pts[j+1]) with j >= i+1
    i2, j2 = np.triu_indices(P - 1, k=1)
    H = (mE[j2] - mE[i2]) - (mC[j2] - mC[i2])
    dd = sE[j2] - sC[j2]
    ok = dd != 0
    with np.errstate(divide="ignore", invalid="ignore"):
        bstar = pts[j2] - H / np.where(ok, dd, 1.0)
    ok &= (bstar > pts[j2]) & (bstar < pts[j2 + 1])
    cand_a.append(pts[i2[ok]])
    cand_b.append(bstar[ok])

    # horizontal edges: b = pts[j], a in (pts[i], pts[i+1]) with i+1 <= j
    i3, j3 = np.triu_indices(P, k=1)
    sel = i3 + 1 <= j3
    i3, j3 = i3[sel], j3[sel]
    H = (mE[j3] - mE[i3]) - (mC[j3] - mC[i3])
    dd = sE[i3] - sC[i3]
    ok = dd != 0
    with np.errstate(divide="ignore", invalid="ignore"):
        astar = pts[i3] + H / np.where(ok, dd, 1.0)
    ok &= (astar > pts[i3]) & (astar < pts[i3 + 1])
    cand_a.append(astar[ok])
    cand_b.append(pts[j3[ok]])

    a = np.concatenate(cand_a)
    b = np.concatenate(cand_b)
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return []
    L = b - a
    fE = (np.asarray(E.mass(b)) - np.asarray(E.mass(a))) - alpha * L
    fC = (np.asarray(C.mass(b)) - np.asarray(C.mass(a))) - alpha * L
    score = np.minimum(fE, fC) / L
    good = score > 0
    if not np.any(good):
        return []
    a, b, score = a[good], b[good], score[good]
    order = np.argsort(-score, kind="stable")
    return [(float(a[t]), float(b[t]), float(score[t])) for t in order[:16]]


def _validate(E: IntervalSet, C: IntervalSet, a: float, b: float, alpha: float) -> bool:
    L = b - a
    return E.measure_between(a, b) > alpha * L and C.measure_between(a, b) > alpha * L


def satisfied_witness(d: LevelDecomposition, k: int, alpha: float = SATISFIED_ALPHA) -> Optional[Interval]:
    """An interval certifying ``k`` is satisfied, or None."""
    E = d.band(k)
    if E.measure <= 0:
        return None
    C = d.neighbors_complement(k)
    if C.measure <= 0:
        return None
    dom = d.domain
    for a, b, _ in _best_interval(E, C, dom.lo, dom.hi, alpha):
        if _validate(E, C, a, b, alpha):
            return Interval(a, b)
    return None


def unsatisfied_pairs(occupied, satisfied) -> list:
    S = set(satisfied)
    return [k for k in occupied if k not in S and k - 1 not in S and k + 1 not in S]


def satisfied_set(
    d: LevelDecomposition,
    alpha: float = SATISFIED_ALPHA,
    grid: Optional[int] = None,
) -> IndexSetReport:
    """Decide satisfaction for every occupied index.

    With ``grid`` set, the uniform-grid search of :func:`satisfied_set_grid`
    also runs and any index where the two disagree is listed in
    ``grid_disagreements``.
    """
    witnesses = {}
    for k in d.occupied:
        w = satisfied_witness(d, k, alpha)
        if w is not None:
            witnesses[k] = w
    S = sorted(witnesses)
    report = IndexSetReport(
        satisfied=S,
        unsatisfied_pairs=unsatisfied_pairs(d.occupied, S),
        witness_intervals=witnesses,
        occupied=list(d.occupied),
    )
    if grid:
        G = set(satisfied_set_grid(d, grid, alpha))
        report.grid_disagreements = sorted(G.symmetric_difference(S))
    return report


def _clip_measure(lo: np.ndarray, hi: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct |A ∩ [a,b]| by clipping every component (no prefix sums)."""
    total = np.zeros(np.broadcast(a, b).shape)
    for l, h in zip(lo.tolist(), hi.tolist()):
        total += np.clip(np.minimum(b, h) - np.maximum(a, l), 0.0, None)
    return total


def satisfied_set_grid(d: LevelDecomposition, n: int = 2048, alpha: float = SATISFIED_ALPHA) -> list:
    """Brute-force search over all intervals with endpoints on a uniform grid."""
    dom = d.domain
    grid = dom.lo + (dom.hi - dom.lo) * np.arange(n + 1) / n
    out = []
    for k in d.occupied:
        E = d.band(k)
        C = d.neighbors_complement(k)
        if C.measure <= 0:
            continue
        mE = _clip_measure(E.lo, E.hi, dom.lo, grid)
        mC = _clip_measure(C.lo, C.hi, dom.lo, grid)
        found = False
        for i in range(n):
            L = grid[i + 1 :] - grid[i]
            fe = (mE[i + 1 :] - mE[i]) > alpha * L
            fc = (mC[i + 1 :] - mC[i]) > alpha * L
            if np.any(fe & fc):
                found = True
                break
        if found:
            out.append(k)
    return out


def pair_integral_lower_check(d: LevelDecomposition, k: int):
    """The separated-set integral for index k and whether it clears 1e-4."""
    from .integral import restricted_pair_integral

    v = restricted_pair_integral(d.band(k), d.neighbors_complement(k))
    return v, v >= PAIR_INTEGRAL_FLOOR
