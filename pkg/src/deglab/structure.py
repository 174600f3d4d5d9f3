"""Canonical, terminal and grounded intervals and the structure verdict.

The pipeline is ``decompose -> satisfied_set -> canonical/terminal data ->
G_L, G_R -> witness search``.  Every strict inequality is evaluated with zero
tolerance; margins are kept in the report so near-ties stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .intervals import IntervalSet
from .levels import (
    IndexSetReport,
    LevelDecomposition,
    decompose,
    satisfied_set,
)
from .plfn import Interval, PhaseFunction, PLFunction, degree, level_value

__all__ = [
    "PreconditionError",
    "Heaviness",
    "CanonicalInterval",
    "TerminalInterval",
    "TerminalTable",
    "Witness",
    "AnalysisReport",
    "CANONICAL_DENSITY",
    "HEAVY_FRACTION",
    "TERMINAL_DENSITY",
    "WITNESS_DENSITY",
    "build_canonical",
    "build_collection",
    "check_canonical",
    "is_compatible",
    "classify_heavy",
    "maximal_terminal",
    "is_grounded",
    "check_grounded_bounds",
    "build_GL",
    "build_GR",
    "extended_unsatisfied",
    "verify_witness",
    "find_witness",
    "structure_verdict",
    "theorem_check",
    "cross_boundary_contributions",
]

CANONICAL_DENSITY = 0.1
HEAVY_FRACTION = 0.8
TERMINAL_DENSITY = 0.03
WITNESS_DENSITY = 0.03
MIN_M = 100
REPORT_VERSION = 1
# relative pull-back applied to a supremal terminal length so that the strict
# density inequality holds at the representative
_STRICT_PULLBACK = 1e-9
# balance equality is a solved crossing; allow for rounding in the solve
_BALANCE_RTOL = 1e-12


class PreconditionError(ValueError):
    """Input outside the standing assumptions of an operation."""


class Heaviness(str, Enum):
    BOTTOM = "BottomHeavy"
    TOP = "TopHeavy"
    SLACK = "TerminalSlack"
    NONE = "Unclassified"


# ---------------------------------------------------------------------------
# canonical intervals


@dataclass(frozen=True)
class CanonicalInterval:
    k: int
    span: Interval
    slack: bool
    classification: Heaviness = Heaviness.NONE
    fraction_below: float = 0.0
    fraction_above: float = 0.0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "span": [self.span.lo, self.span.hi],
            "slack": self.slack,
            "classification": self.classification.value,
            "fraction_below": self.fraction_below,
            "fraction_above": self.fraction_above,
        }


def _greedy_spans(E: IntervalSet, dom: Interval, rho: float):
    lo, hi = E.lo, E.hi
    cum = E._cum
    n = lo.size
    out = []
    i = 0
    while i < n:
        s = float(lo[i])
        j = i
        while True:
            end = float(hi[j])
            phi = float(cum[j + 1] - cum[i]) - rho * (end - s)
            t = end + phi / rho
            if j + 1 < n and t > lo[j + 1]:
                j += 1
                continue
            if t >= dom.hi:
                out.append((s, dom.hi, True))
            else:
                out.append((s, t, False))
            break
        i = j + 1
    return out


def classify_heavy(d: LevelDecomposition, ci: CanonicalInterval) -> Heaviness:
    """Classify a canonical interval by which neighbouring band dominates it.

    An interval more than 80% covered by ``E_{k-1}`` is bottom-heavy (``g``
    sits mostly below the band) and one more than 80% covered by ``E_{k+1}``
    is top-heavy.
    """
    return _classify(d, ci.k, ci.span, ci.slack)[0]


def _classify(d: LevelDecomposition, k: int, span: Interval, slack: bool):
    L = span.hi - span.lo
    below = d.band(k - 1).measure_between(span.lo, span.hi)
    above = d.band(k + 1).measure_between(span.lo, span.hi)
    if below > HEAVY_FRACTION * L:
        c = Heaviness.BOTTOM
    elif above > HEAVY_FRACTION * L:
        c = Heaviness.TOP
    elif slack and d.band(k).measure_between(span.lo, span.hi) > CANONICAL_DENSITY * L:
        c = Heaviness.SLACK
    else:
        c = Heaviness.NONE
    return c, below / L, above / L


def build_canonical(d: LevelDecomposition, k: int) -> list:
    """Greedy left-to-right canonical cover of ``E_k``.

    Each interval starts at the first uncovered component of ``E_k`` and ends
    at the first point where the band density falls back to exactly 10%,
    or at the right end of the domain if that never happens.
    """
    E = d.band(k)
    if not E:
        return []
    out = []
    for s, t, slack in _greedy_spans(E, d.domain, CANONICAL_DENSITY):
        span = Interval(s, t)
        c, below, above = _classify(d, k, span, slack)
        out.append(CanonicalInterval(k, span, slack, c, below, above))
    return out


def check_canonical(d: LevelDecomposition, k: int, spans: list) -> list:
    """Covering, ordering and balance violations of a canonical list (empty if fine)."""
    problems = []
    E = d.band(k)
    cover = IntervalSet.from_pairs([(c.span.lo, c.span.hi) for c in spans], d.domain)
    if E.difference(cover).measure > 0:
        problems.append("covering")
    for a, b in zip(spans, spans[1:]):
        if not a.span.hi <= b.span.lo:
            problems.append("ordering")
    for i, c in enumerate(spans):
        L = c.span.hi - c.span.lo
        m = E.measure_between(c.span.lo, c.span.hi)
        last_at_end = i == len(spans) - 1 and c.span.hi == d.domain.hi
        if m < CANONICAL_DENSITY * L * (1 - _BALANCE_RTOL):
            problems.append(f"balance@{i}")
        elif not last_at_end and abs(m - CANONICAL_DENSITY * L) > _BALANCE_RTOL * max(L, m) + 1e-300:
            problems.append(f"balance-equality@{i}")
    return problems


def build_collection(d: LevelDecomposition, indices=None) -> dict:
    ks = d.occupied if indices is None else indices
    return {k: build_canonical(d, k) for k in ks}


def is_compatible(I: Interval, spans) -> bool:
    """Every span lies inside ``I`` or misses its interior."""
    for c in spans:
        sp = c.span if isinstance(c, CanonicalInterval) else Interval(*c)
        inside = I.lo <= sp.lo and sp.hi <= I.hi
        disjoint = sp.hi <= I.lo or sp.lo >= I.hi
        if not (inside or disjoint):
            return False
    return True


# ---------------------------------------------------------------------------
# terminal intervals


@dataclass(frozen=True)
class TerminalInterval:
    """Maximal end-anchored interval of length ``tau`` for index ``k``.

    ``tau`` is the supremum of qualifying lengths.  When the density condition
    is met at ``tau`` itself (only possible at ``tau = 1``) ``attained`` is
    True; otherwise ``strict_tau`` is a length just below ``tau`` at which the
    strict inequality holds.
    """

    k: int
    side: str
    tau: float
    attained: bool
    strict_tau: float

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "side": self.side,
            "tau": self.tau,
            "attained": self.attained,
            "strict_tau": self.strict_tau,
        }

    def interval(self, domain: Interval, use_strict: bool = True) -> Interval:
        t = self.strict_tau if use_strict else self.tau
        if self.side == "left":
            return Interval(domain.lo, domain.lo + t)
        return Interval(domain.hi - t, domain.hi)


def maximal_terminal(d: LevelDecomposition, k: int, side: str, rho: float = TERMINAL_DENSITY):
    """Last crossing of the end-anchored mass function with ``rho * tau``."""
    side = side.lower()
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    E = d.band(k)
    if not E:
        return None
    dom = d.domain
    length = dom.hi - dom.lo
    total = E.measure
    if total > rho * length:
        return TerminalInterval(k, side, length, True, length)
    cum = E._cum
    if side == "left":
        ends = E.hi - dom.lo
        mass = cum[1:]
    else:
        ends = (dom.hi - E.lo)[::-1]
        mass = (total - cum[:-1])[::-1]
    phi = mass - rho * ends
    pos = np.flatnonzero(phi > 0)
    if pos.size == 0:
        return None
    j = int(pos[-1])
    e = float(ends[j])
    tau = e + float(phi[j]) / rho
    tau = min(tau, length)
    pull = min(_STRICT_PULLBACK * tau, 0.5 * (tau - e))
    strict = tau - pull
    if not strict > e:
        strict = e
    return TerminalInterval(k, side, tau, False, strict)


class TerminalTable:
    """Lazy cache of maximal terminal intervals keyed by ``(k, side)``."""

    def __init__(self, d: LevelDecomposition):
        self.d = d
        self._cache: dict = {}

    def get(self, k: int, side: str) -> Optional[TerminalInterval]:
        key = (k, side)
        if key not in self._cache:
            self._cache[key] = maximal_terminal(self.d, k, side)
        return self._cache[key]

    def left(self, k: int):
        return self.get(k, "left")

    def right(self, k: int):
        return self.get(k, "right")


# ---------------------------------------------------------------------------
# grounded intervals


def is_grounded(d: LevelDecomposition, collection: dict, J: Interval, k: int, g: Optional[PLFunction] = None) -> bool:
    g = g if g is not None else d.g
    spans = collection.get(k)
    if spans is None:
        spans = build_canonical(d, k)
    if not is_compatible(J, spans):
        return False
    if not g.value(J.lo) < level_value(k + 1, d.delta):
        return False
    for c in spans:
        if J.lo <= c.span.lo and c.span.hi <= J.hi and c.classification is not Heaviness.BOTTOM:
            return False
    return True


def check_grounded_bounds(d: LevelDecomposition, J: Interval, k: int, collection: Optional[dict] = None, P=None):
    """Both mass bounds on a grounded interval, with the four raw measures.

    Returns ``(lhs1, rhs1, lhs2, rhs2, passes)`` where the bounds read
    ``lhs1 <= rhs1`` and ``lhs2 < rhs2`` (the latter also passing when both
    sides vanish, the case of an interval meeting no canonical span).
    """
    collection = collection if collection is not None else {}
    if P is not None and k not in set(P):
        raise PreconditionError(f"index {k} is not in the unsatisfied-pair set")
    if not is_grounded(d, collection, J, k):
        raise PreconditionError(f"interval ({J.lo}, {J.hi}) is not grounded for index {k}")
    lhs1 = sum(d.band(j).measure_between(J.lo, J.hi) for j in d.E if j > k)
    ek = d.band(k).measure_between(J.lo, J.hi)
    below = d.band(k - 1).measure_between(J.lo, J.hi)
    rhs1 = ek / 5
    lhs2, rhs2 = ek, below / 5
    ok = lhs1 <= rhs1 and (lhs2 < rhs2 or (lhs2 == 0 and rhs2 == 0))
    return lhs1, rhs1, lhs2, rhs2, ok


# ---------------------------------------------------------------------------
# G_L and G_R


def _P_set(report: IndexSetReport):
    return list(report.unsatisfied_pairs)


def build_GL(d: LevelDecomposition, report: IndexSetReport, terminals: Optional[TerminalTable] = None) -> list:
    """Greedy chain of indices whose left-terminal lengths grow by more than 3x."""
    g = d.g
    if g is not None and g.ys[0] != 0.0:
        raise PreconditionError("g(0) must be 0")
    terminals = terminals or TerminalTable(d)
    t0 = terminals.left(0)
    if t0 is None:
        return []
    chain = [(0, t0.tau)]
    cur_k, cur_t = 0, t0.tau
    for k in _P_set(report):
        if k <= cur_k:
            continue
        t = terminals.left(k)
        if t is not None and t.tau > 3 * cur_t:
            chain.append((k, t.tau))
            cur_k, cur_t = k, t.tau
    return chain


def build_GR(P, GL) -> list:
    gl = {k for k, _ in GL} if GL and isinstance(GL[0], tuple) else set(GL)
    return [k for k in P if k not in gl and k - 1 not in gl]


def extended_unsatisfied(report: IndexSetReport, k: int) -> bool:
    """Whether ``k, k-1, k+1`` all lie outside the satisfied set.

    Unlike the unsatisfied-pair set, ``k`` need not be occupied; indices past
    the range of ``g`` are unsatisfied by definition.
    """
    S = set(report.satisfied)
    return k not in S and k - 1 not in S and k + 1 not in S


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Witness:
    side: str  # "GrowthNear1" | "GrowthNear0"
    entries: tuple  # ((k, tau), ...)
    M: int

    @property
    def m(self) -> int:
        return len(self.entries) - 1

    def to_json(self) -> dict:
        return {"side": self.side, "M": self.M, "m": self.m, "entries": [[k, t] for k, t in self.entries]}


def _entry_ok(d: LevelDecomposition, side: str, k: int, tau: float, M: int) -> bool:
    dom = d.domain
    if not (0 < tau <= dom.hi - dom.lo):
        return False
    if side == "GrowthNear1":
        full_end, empty_end, shift = "right", "left", -M
    else:
        full_end, empty_end, shift = "left", "right", M
    rho = WITNESS_DENSITY
    if not d.band(k).end_measure(full_end, tau) > rho * tau:
        return False
    for j in (-1, 0, 1):
        near = d.neighbors(k + shift + j).end_measure(empty_end, tau)
        if not tau - near > rho * tau:
            return False
    return True


def _decay_ok(side: str, taus) -> bool:
    if side == "GrowthNear1":
        return all(a > 3 * b for a, b in zip(taus, taus[1:]))
    return all(b > 3 * a for a, b in zip(taus, taus[1:]))


def verify_witness(d: LevelDecomposition, w: Optional[Witness]) -> bool:
    """Literal check of every witness condition."""
    if w is None or not w.entries:
        return False
    if not w.m > 0.1 * w.M:
        return False
    ks = [k for k, _ in w.entries]
    taus = [t for _, t in w.entries]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        return False
    if not _decay_ok(w.side, taus):
        return False
    return all(_entry_ok(d, w.side, k, t, w.M) for k, t in w.entries)


def _longest_chain(side: str, entries: list) -> list:
    """Longest subsequence (in index order) with >3x decay; O(n^2) DP."""
    n = len(entries)
    if n == 0:
        return []
    best = [1] * n
    prev = [-1] * n
    for i in range(n):
        ti = entries[i][1]
        for j in range(i):
            tj = entries[j][1]
            ok = tj > 3 * ti if side == "GrowthNear1" else ti > 3 * tj
            if ok and best[j] + 1 > best[i]:
                best[i], prev[i] = best[j] + 1, j
    i = max(range(n), key=lambda t: (best[t], -t))
    out = []
    while i >= 0:
        out.append(entries[i])
        i = prev[i]
    return out[::-1]


def _emit(d, side, candidates, M, diag, label):
    good = [(k, t) for k, t in candidates if _entry_ok(d, side, k, t, M)]
    chain = _longest_chain(side, good)
    diag[label] = {"candidates": len(candidates), "valid_entries": len(good), "chain": len(chain)}
    if not chain:
        return None
    w = Witness(side, tuple(chain), M)
    if verify_witness(d, w):
        taus = [t for _, t in chain]
        assert _decay_ok(side, taus)
        return w
    return None


def find_witness(
    d: LevelDecomposition,
    report: IndexSetReport,
    GL: list,
    GR: list,
    terminals: Optional[TerminalTable] = None,
    diagnostics: Optional[dict] = None,
    check_precondition: bool = True,
) -> Optional[Witness]:
    """Search for a logarithmic-singularity witness following the two-case split.

    Case 1 (short ``G_L``) draws decaying right-terminal lengths from ``G_R``;
    case 2 pairs each long-chain index ``k`` with ``k + M`` and keeps the side
    whose terminal lengths dominate by 30x.  The case that the split selects
    runs first; the other is tried as a fallback.  Every entry is checked
    against the literal witness conditions before the longest 3x-decaying
    chain is extracted.
    """
    M = d.M
    if check_precondition and not report.n_satisfied < 0.01 * M:
        raise PreconditionError("witness search needs #S < 0.01 M")
    terminals = terminals or TerminalTable(d)
    diag = diagnostics if diagnostics is not None else {}
    Pset = set(report.unsatisfied_pairs)

    def case1():
        base = []
        for k in GR:
            if 1 <= k <= M:
                t = terminals.right(k)
                if t is not None and t.tau < 0.5:
                    base.append((k, t.strict_tau))
        even = [e for e in base if e[0] % 2 == 0]
        odd = [e for e in base if e[0] % 2 == 1]
        first, second = (even, odd) if len(even) >= len(odd) else (odd, even)
        diag["case1_W"] = {"even": len(even), "odd": len(odd)}
        for label, W in (("case1_primary", first), ("case1_other", second), ("case1_all", base)):
            w = _emit(d, "GrowthNear1", W, M, diag, label)
            if w is not None:
                return w
        return None

    def case2():
        idx = [k for k, _ in GL]
        ell = idx[-2] if len(idx) >= 2 else (idx[-1] if idx else 0)
        diag["ell"] = ell
        near0, near1 = [], []
        for k in idx:
            if k + M < ell + 1 or k not in Pset or not extended_unsatisfied(report, k + M):
                continue
            tl = terminals.left(k)
            if tl is None:
                continue
            tr = terminals.right(k + M)
            tau_r = tr.tau if tr is not None else 0.0
            if tl.tau > 30 * tau_r:
                near0.append((k, tl.strict_tau))
            elif tr is not None and tl.tau < tau_r / 30:
                near1.append((k + M, tr.strict_tau))
        diag["case2_W"] = {"near0": len(near0), "near1": len(near1)}
        order = [("GrowthNear1", near1), ("GrowthNear0", near0)]
        if len(near0) > len(near1):
            order.reverse()
        for side, W in order:
            w = _emit(d, side, W, M, diag, f"case2_{side}")
            if w is not None:
                return w
        return None

    short = len(GL) < 0.9 * M
    diag["case"] = 1 if short else 2
    for fn in ((case1, case2) if short else (case2, case1)):
        w = fn()
        if w is not None:
            return w
    return None


# ---------------------------------------------------------------------------
# verdict


@dataclass
class AnalysisReport:
    verdict: str  # SatisfiedRich | WitnessFound | Inconclusive
    decomposition: dict
    satisfied: IndexSetReport
    canonical: dict = field(default_factory=dict)
    GL: list = field(default_factory=list)
    GR: list = field(default_factory=list)
    GR_terminals: dict = field(default_factory=dict)
    witness: Optional[Witness] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_satisfied(self) -> int:
        return self.satisfied.n_satisfied

    def to_json(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "verdict": self.verdict,
            "decomposition": self.decomposition,
            "satisfied": self.satisfied.to_json(),
            "n_satisfied": self.n_satisfied,
            "canonical": {str(k): [c.to_json() for c in v] for k, v in sorted(self.canonical.items())},
            "GL": [[k, t] for k, t in self.GL],
            "GR": list(self.GR),
            "GR_terminals": {str(k): (v.to_json() if v else None) for k, v in sorted(self.GR_terminals.items())},
            "witness": self.witness.to_json() if self.witness else None,
            "diagnostics": self.diagnostics,
        }


def _check_inputs(g: PLFunction, delta: float, d: Optional[LevelDecomposition] = None) -> LevelDecomposition:
    dom = g.domain
    if dom.lo != 0.0 or dom.hi != 1.0:
        raise PreconditionError("g must be defined on [0, 1]")
    if g.ys[0] != 0.0:
        raise PreconditionError("g(0) must be 0 (normalize the input)")
    if d is None or d.g is not g or d.delta != delta:
        d = decompose(g, delta)
    if not d.M_exact:
        raise PreconditionError(f"g(1) = {g.ys[-1]!r} is not an integer multiple of delta = {delta!r}")
    if not d.M > MIN_M:
        raise PreconditionError(f"M = {d.M} violates the standing assumption 100 < M")
    return d


def structure_verdict(
    g: PLFunction,
    delta: float,
    grid: Optional[int] = None,
    d: Optional[LevelDecomposition] = None,
    report: Optional[IndexSetReport] = None,
) -> AnalysisReport:
    """Either many satisfied indices, a verified witness, or a flagged failure.

    A decomposition and satisfied-set report already computed for the same
    ``g`` and ``delta`` may be passed in to avoid recomputing them.
    """
    d = _check_inputs(g, delta, d)
    rep = report if report is not None and not grid else satisfied_set(d, grid=grid)
    summary = {
        "delta": delta,
        "M": d.M,
        "n_breakpoints": len(g.xs),
        "occupied": len(d.occupied),
    }
    canonical = build_collection(d)
    out = AnalysisReport("Inconclusive", summary, rep, canonical)
    if rep.grid_disagreements:
        out.diagnostics["grid_disagreements"] = list(rep.grid_disagreements)
    if rep.n_satisfied >= 0.01 * d.M:
        out.verdict = "SatisfiedRich"
        return out
    terminals = TerminalTable(d)
    GL = build_GL(d, rep, terminals)
    GR = build_GR(rep.unsatisfied_pairs, GL)
    out.GL, out.GR = GL, GR
    out.GR_terminals = {k: terminals.right(k) for k in GR}
    diag: dict = {}
    w = find_witness(d, rep, GL, GR, terminals, diag)
    out.diagnostics.update(diag)
    if w is not None:
        out.verdict = "WitnessFound"
        out.witness = w
    else:
        out.diagnostics["note"] = "no verifying witness; contradicts the structure theorem or hits a numerical margin"
    return out


# ---------------------------------------------------------------------------
# end-to-end inequality


def _end_piece(S: IntervalSet, side: str, tau: float, frame: Interval) -> IntervalSet:
    """``S`` within ``tau`` of one end, placed in a frame centred on that end.

    The right end maps to ``[-tau, 0]`` and the left end to ``[0, tau]``, so
    lengths far below the spacing of doubles near 1 survive.
    """
    dom = S.domain
    if side == "right":
        near, far = dom.hi - S.hi, dom.hi - S.lo
        lo, hi = -np.minimum(far, tau), -near
    else:
        near, far = S.lo - dom.lo, S.hi - dom.lo
        lo, hi = near, np.minimum(far, tau)
    keep = (near < tau) & (hi > lo)
    return IntervalSet(frame, lo[keep], hi[keep])


def cross_boundary_contributions(phi: PhaseFunction, delta: float, witness: Witness) -> list:
    """Separated-set integrals across the period boundary, one per witness entry.

    On the two-period lift, growth near 1 pairs ``(1 - tau, 1) ∩ E_k`` with
    ``(1, 1 + tau) ∩ N_k^c``.  Growth near 0 pairs ``(1 - tau, 1) ∩ N_{k+M}^c``
    with ``(1, 1 + tau) ∩ E_{k+M}``.  Both pieces are read off the base
    period in coordinates centred on the boundary.
    """
    from .integral import restricted_pair_integral

    base = phi.base
    g = PLFunction(base.xs, tuple(y - base.ys[0] for y in base.ys))
    d = decompose(g, delta)
    M = witness.M
    out = []
    for k, tau in witness.entries:
        frame = Interval(-tau, tau)
        if witness.side == "GrowthNear1":
            A = _end_piece(d.band(k), "right", tau, frame)
            B = _end_piece(d.neighbors_complement(k - M), "left", tau, frame)
        else:
            A = _end_piece(d.neighbors_complement(k + M), "right", tau, frame)
            B = _end_piece(d.band(k), "left", tau, frame)
        out.append(restricted_pair_integral(A, B))
    return out


@dataclass
class TheoremCheck:
    lhs: float
    rhs: float
    holds: bool
    integral: float
    witness_contributions: list = field(default_factory=list)

    @property
    def ratio(self) -> float:
        if self.lhs == 0:
            return math.inf
        return self.rhs / self.lhs

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "holds": self.holds,
            "integral": self.integral,
            "witness_contributions": list(self.witness_contributions),
        }


def theorem_check(phi: PhaseFunction, delta: float, witness: Optional[Witness] = None) -> TheoremCheck:
    """``|D| <= 1e9 * delta * I`` with ``I`` the threshold integral on [0,2]^2."""
    from .integral import threshold_integral

    if not delta < 0.01:
        raise PreconditionError("the degree bound is stated for delta < 0.01")
    lhs = abs(degree(phi))
    I = threshold_integral(phi, delta)
    rhs = 1e9 * delta * I
    contrib = cross_boundary_contributions(phi, delta, witness) if witness is not None else []
    return TheoremCheck(lhs, rhs, lhs <= rhs, I, contrib)
