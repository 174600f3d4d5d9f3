"""Finite unions of closed intervals inside a bounded domain.

Components are kept sorted, pairwise disjoint and non-touching (touching
components are merged), and degenerate single points are dropped, since every
quantity built on these sets is a Lebesgue measure.  Set operations never do
arithmetic on endpoints, so outputs are drawn from input endpoints exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .plfn import Interval

__all__ = [
    "IntervalSet",
    "measure",
    "intersect",
    "complement",
    "union",
    "critical_points",
]


def _merge(lo: np.ndarray, hi: np.ndarray):
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    n = lo.size
    if n == 0:
        return lo, hi
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    start = np.ones(n, dtype=bool)
    start[1:] = lo[1:] > reach[:-1]
    idx = np.flatnonzero(start)
    ends = np.append(idx[1:] - 1, n - 1)
    return lo[idx], reach[ends]


@dataclass(frozen=True, eq=False)
class IntervalSet:
    domain: Interval
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).ravel()
        hi = np.asarray(self.hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("lo/hi shape mismatch")
        d = self.domain
        if lo.size and (lo.min() < d.lo or hi.max() > d.hi or np.any(hi < lo)):
            raise ValueError("components must be ordered and lie inside the domain")
        lo, hi = _merge(lo, hi)
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # -- construction -----------------------------------------------------
    @classmethod
    def empty(cls, domain: Interval) -> "IntervalSet":
        return cls(domain, np.empty(0), np.empty(0))

    @classmethod
    def full(cls, domain: Interval) -> "IntervalSet":
        return cls(domain, np.array([domain.lo]), np.array([domain.hi]))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]], domain: Interval) -> "IntervalSet":
        pairs = [tuple(p) for p in pairs]
        lo = np.array([p[0] for p in pairs], dtype=float)
        hi = np.array([p[1] for p in pairs], dtype=float)
        return cls(domain, lo, hi)

    # -- basic views --------------------------------------------------------
    @property
    def components(self) -> list:
        return list(zip(self.lo.tolist(), self.hi.tolist()))

    def __len__(self):
        return int(self.lo.size)

    def __bool__(self):
        return self.lo.size > 0

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (
            self.domain == other.domain
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __repr__(self):
        comps = ", ".join(f"[{a!r}, {b!r}]" for a, b in self.components)
        return f"IntervalSet({{{comps}}} in [{self.domain.lo}, {self.domain.hi}])"

    def to_json(self) -> list:
        return [[a, b] for a, b in self.components]

    @cached_property
    def _cum(self) -> np.ndarray:
        c = np.concatenate(([0.0], np.cumsum(self.hi - self.lo)))
        c.flags.writeable = False
        return c

    @property
    def measure(self) -> float:
        return float(np.sum(self.hi - self.lo))

    # -- mass function ------------------------------------------------------
    def mass(self, x):
        """``|A ∩ (-inf, x]|``; PL and nondecreasing in ``x``."""
        x = np.asarray(x, dtype=float)
        if self.lo.size == 0:
            return np.zeros_like(x) if x.ndim else 0.0
        j = np.searchsorted(self.lo, x, side="right") - 1
        jc = np.clip(j, 0, None)
        inside = np.clip(x - self.lo[jc], 0.0, self.hi[jc] - self.lo[jc])
        out = np.where(j >= 0, self._cum[jc] + inside, 0.0)
        return out if out.ndim else float(out)

    def measure_between(self, a, b):
        """``|A ∩ [a, b]|`` for (arrays of) endpoints ``a <= b``."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.lo.size <= 8 and a.ndim == 0 and b.ndim == 0:
            ov = np.minimum(self.hi, float(b)) - np.maximum(self.lo, float(a))
            return float(np.sum(ov[ov > 0]))
        out = self.mass(b) - self.mass(a)
        return np.maximum(out, 0.0) if np.ndim(out) else max(float(out), 0.0)

    def end_measure(self, side: str, tau: float) -> float:
        """``|A ∩ (lo, lo + tau)|`` or ``|A ∩ (hi - tau, hi)|`` with ``tau`` kept exact.

        Works in distance-from-endpoint coordinates, so a length far below
        the spacing of doubles near the endpoint is not rounded away.
        """
        d = self.domain
        if side == "left":
            near, far = self.lo - d.lo, self.hi - d.lo
        elif side == "right":
            near, far = d.hi - self.hi, d.hi - self.lo
        else:
            raise ValueError("side must be 'left' or 'right'")
        ov = np.minimum(far, tau) - near
        return float(np.sum(ov[ov > 0]))

    def contains(self, x):
        """Membership of points in the closed set."""
        x = np.asarray(x, dtype=float)
        if self.lo.size == 0:
            return np.zeros(x.shape, dtype=bool) if x.ndim else False
        j = np.searchsorted(self.lo, x, side="right") - 1
        jc = np.clip(j, 0, None)
        out = (j >= 0) & (x <= self.hi[jc])
        return out if out.ndim else bool(out)

    # -- algebra --------------------------------------------------------------
    def _coerce(self, other) -> "IntervalSet":
        if isinstance(other, IntervalSet):
            return other
        if isinstance(other, Interval):
            lo = max(other.lo, self.domain.lo)
            hi = min(other.hi, self.domain.hi)
            if hi <= lo:
                return IntervalSet.empty(self.domain)
            return IntervalSet(self.domain, np.array([lo]), np.array([hi]))
        if isinstance(other, tuple) and len(other) == 2:
            return self._coerce(Interval(*other))
        raise TypeError(f"cannot combine IntervalSet with {type(other).__name__}")

    def union(self, other) -> "IntervalSet":
        other = self._coerce(other)
        if other.domain != self.domain:
            raise ValueError("domains differ")
        return IntervalSet(
            self.domain,
            np.concatenate((self.lo, other.lo)),
            np.concatenate((self.hi, other.hi)),
        )

    def intersect(self, other) -> "IntervalSet":
        other = self._coerce(other)
        if other.domain != self.domain:
            raise ValueError("domains differ")
        a_lo, a_hi, b_lo, b_hi = self.lo, self.hi, other.lo, other.hi
        out_lo, out_hi = [], []
        i = j = 0
        while i < a_lo.size and j < b_lo.size:
            lo = a_lo[i] if a_lo[i] > b_lo[j] else b_lo[j]
            hi = a_hi[i] if a_hi[i] < b_hi[j] else b_hi[j]
            if hi > lo:
                out_lo.append(lo)
                out_hi.append(hi)
            if a_hi[i] < b_hi[j]:
                i += 1
            else:
                j += 1
        return IntervalSet(self.domain, np.array(out_lo, dtype=float), np.array(out_hi, dtype=float))

    def complement(self) -> "IntervalSet":
        d = self.domain
        lo = np.concatenate(([d.lo], self.hi))
        hi = np.concatenate((self.lo, [d.hi]))
        return IntervalSet(d, lo, hi)

    def difference(self, other) -> "IntervalSet":
        return self.intersect(self._coerce(other).complement())

    def restrict(self, a: float, b: float) -> "IntervalSet":
        return self.intersect(Interval(a, b))

    def endpoints(self) -> np.ndarray:
        return np.concatenate((self.lo, self.hi))

    __or__ = union
    __and__ = intersect
    __invert__ = complement


IntervalLike = Union[IntervalSet, Interval]


def measure(a: IntervalSet) -> float:
    return a.measure


def intersect(a: IntervalSet, b: IntervalLike) -> IntervalSet:
    return a.intersect(b)


def complement(a: IntervalSet) -> IntervalSet:
    return a.complement()


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def critical_points(sets: Sequence[IntervalSet], domain: Interval | None = None) -> np.ndarray:
    """Sorted distinct component endpoints of all sets plus the domain ends."""
    if domain is None:
        if not sets:
            domain = Interval(0.0, 1.0)
        else:
            domain = sets[0].domain
    parts = [np.array([domain.lo, domain.hi])]
    for s in sets:
        if s.domain != domain:
            raise ValueError("domains differ")
        parts.append(s.lo)
        parts.append(s.hi)
    return np.unique(np.concatenate(parts))
