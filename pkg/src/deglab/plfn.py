"""Piecewise-linear functions and periodic phase functions.

A :class:`PLFunction` is a continuous function on a closed interval given by its
breakpoints.  A :class:`PhaseFunction` is a PL function on ``[0, 1]`` extended
to the whole line by ``phi(x + 1) = phi(x) + D``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Interval",
    "PLFunction",
    "PhaseFunction",
    "evaluate",
    "degree",
    "normalize",
    "jitter_levels",
    "is_level_value",
    "level_value",
    "flat_level_segments",
]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"interval needs lo <= hi, got ({self.lo}, {self.hi})")

    @property
    def measure(self) -> float:
        return self.hi - self.lo

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True, eq=False)
class PLFunction:
    """Continuous piecewise-linear function through ``(xs[i], ys[i])``."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys):
            raise ValueError("xs and ys differ in length")
        if len(xs) < 2:
            raise ValueError("a PL function needs at least 2 breakpoints")
        if not all(math.isfinite(v) for v in xs + ys):
            raise ValueError("breakpoints must be finite")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x-coordinates must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]]) -> "PLFunction":
        pts = list(points)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    @cached_property
    def x(self) -> np.ndarray:
        a = np.array(self.xs, dtype=float)
        a.flags.writeable = False
        return a

    @cached_property
    def y(self) -> np.ndarray:
        a = np.array(self.ys, dtype=float)
        a.flags.writeable = False
        return a

    @property
    def domain(self) -> Interval:
        return Interval(self.xs[0], self.xs[-1])

    @property
    def points(self) -> list:
        return list(zip(self.xs, self.ys))

    @property
    def n_segments(self) -> int:
        return len(self.xs) - 1

    def __eq__(self, other):
        if not isinstance(other, PLFunction):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        return hash((self.xs, self.ys))

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self.value(float(x))
        return self.values(np.asarray(x, dtype=float))

    def value(self, x: float) -> float:
        xs, ys = self.xs, self.ys
        if not (xs[0] <= x <= xs[-1]):
            raise ValueError(f"x={x} outside domain [{xs[0]}, {xs[-1]}]")
        i = bisect.bisect_right(xs, x) - 1
        if i >= len(xs) - 1:
            return ys[-1]
        if x == xs[i]:
            return ys[i]
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        return y0 + (y1 - y0) * ((x - x0) / (x1 - x0))

    def values(self, x: np.ndarray) -> np.ndarray:
        """Vectorised evaluation; ``x`` must lie in the domain."""
        x = np.asarray(x, dtype=float)
        if x.size and (x.min() < self.xs[0] or x.max() > self.xs[-1]):
            raise ValueError("points outside domain")
        return np.interp(x, self.x, self.y)

    def slopes(self) -> np.ndarray:
        return np.diff(self.y) / np.diff(self.x)

    def shift(self, c: float) -> "PLFunction":
        return PLFunction(self.xs, tuple(y + c for y in self.ys))

    def scale(self, c: float) -> "PLFunction":
        return PLFunction(self.xs, tuple(y * c for y in self.ys))

    def reflect(self) -> "PLFunction":
        """``s -> lo + hi - s`` on the same domain."""
        lo, hi = self.xs[0], self.xs[-1]
        xs = [lo + hi - x for x in reversed(self.xs)]
        xs[0], xs[-1] = lo, hi
        return PLFunction(tuple(xs), tuple(reversed(self.ys)))

    def sup_distance(self, other: "PLFunction") -> float:
        """Max |f - g| over the union of both breakpoint sets (exact for PL)."""
        grid = np.union1d(self.x, other.x)
        return float(np.max(np.abs(self.values(grid) - other.values(grid))))


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """Base PL function on [0, 1] extended by ``phi(x + 1) = phi(x) + increment``."""

    base: PLFunction

    def __post_init__(self):
        d = self.base.domain
        if d.lo != 0.0 or d.hi != 1.0:
            raise ValueError("phase base must be defined on [0, 1]")

    @property
    def increment(self) -> float:
        return self.base.ys[-1] - self.base.ys[0]

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self.value(float(x))
        return self.values(np.asarray(x, dtype=float))

    def value(self, x: float) -> float:
        n = math.floor(x)
        r = x - n
        if r >= 1.0:  # x - floor(x) can round up to 1
            n, r = n + 1, 0.0
        return self.base.value(r) + n * self.increment

    def values(self, x: np.ndarray) -> np.ndarray:
        n = np.floor(x)
        r = x - n
        over = r >= 1.0
        n = np.where(over, n + 1, n)
        r = np.where(over, 0.0, r)
        return self.base.values(r) + n * self.increment

    def extended(self, periods: int = 2) -> PLFunction:
        """The lift on ``[0, periods]`` as a plain PL function."""
        xs, ys = list(self.base.xs), list(self.base.ys)
        D = self.increment
        out_x, out_y = list(xs), list(ys)
        for p in range(1, periods):
            out_x.extend(x + p for x in xs[1:])
            out_y.extend(y + p * D for y in ys[1:])
        return PLFunction(tuple(out_x), tuple(out_y))


Function = Union[PLFunction, PhaseFunction]


def evaluate(f: Function, x):
    return f(x)


def degree(f: Function) -> float:
    base = f.base if isinstance(f, PhaseFunction) else f
    return base.ys[-1] - base.ys[0]


def normalize(f: PLFunction) -> PLFunction:
    """Shift so that the function vanishes at the left end of its domain."""
    y0 = f.ys[0]
    return PLFunction(f.xs, tuple(y - y0 for y in f.ys))


def level_value(k: int, delta: float) -> float:
    """The level ``k * delta``; every module uses this exact product."""
    return k * delta


def is_level_value(y: float, delta: float) -> bool:
    k = round(y / delta)
    return level_value(k, delta) == y


def flat_level_segments(f: PLFunction, delta: float) -> list:
    """Indices of segments that are constant at an exact multiple of delta."""
    return [
        i
        for i in range(f.n_segments)
        if f.ys[i] == f.ys[i + 1] and is_level_value(f.ys[i], delta)
    ]


def jitter_levels(f: PLFunction, delta: float, epsilon: float) -> PLFunction:
    """Lift flat pieces sitting exactly on a level by ``epsilon``.

    Only breakpoints belonging to an offending flat segment move, so
    ``sup |f - f'| <= epsilon`` and every level set of the result is finite.
    """
    if delta <= 0 or not (0 < epsilon < delta):
        raise ValueError("need delta > 0 and 0 < epsilon < delta")
    bad = flat_level_segments(f, delta)
    if not bad:
        return f
    ys = list(f.ys)
    moved = set()
    for i in bad:
        moved.update((i, i + 1))
    for j in moved:
        v = f.ys[j] + epsilon
        while v - f.ys[j] > epsilon:  # rounding may overshoot by an ulp
            v = math.nextafter(v, -math.inf)
        ys[j] = v
    out = PLFunction(f.xs, tuple(ys))
    if flat_level_segments(out, delta):  # a shifted flat landed on another level
        raise ValueError("epsilon too coarse for this delta")
    return out
