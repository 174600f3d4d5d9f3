"""Property checks for the intermediate lemmas of the structure argument.

Each ``check_*`` function returns a list of counterexample dicts (empty when
the property holds on the instance).  :func:`run_lemma_suite` runs them all on
one function and :func:`persist_counterexamples` writes failures to JSON so a
falsifying instance can be replayed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .levels import IndexSetReport, LevelDecomposition, decompose, satisfied_set
from .plfn import Interval, PLFunction, level_value
from .structure import (
    CANONICAL_DENSITY,
    HEAVY_FRACTION,
    TerminalTable,
    build_collection,
    build_GL,
    build_GR,
    check_canonical,
    check_grounded_bounds,
    is_grounded,
)

__all__ = [
    "check_canonical_collection",
    "check_rigidity",
    "check_interval_growth",
    "check_grounded",
    "check_no_gaps",
    "check_decaying_r",
    "check_end_interval",
    "LemmaSuiteResult",
    "run_lemma_suite",
    "persist_counterexamples",
]


def check_canonical_collection(d: LevelDecomposition, collection: dict) -> list:
    out = []
    for k, spans in collection.items():
        problems = check_canonical(d, k, spans)
        if problems:
            out.append({"k": k, "problems": problems})
    return out


def check_rigidity(d, report: IndexSetReport, collection: dict, samples: int = 64, seed: int = 0) -> list:
    """Moderate band density inside ``I`` forces an 80% neighbouring band, for k in P.

    Tested on every balanced canonical interval and on ``samples`` seeded
    intervals per index with endpoints drawn from the band lattice.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in report.unsatisfied_pairs:
        cands = [(c.span.lo, c.span.hi, True) for c in collection.get(k, []) if not c.slack]
        pts = np.unique(np.concatenate([d.band(j).endpoints() for j in (k - 1, k, k + 1)] + [[d.domain.lo, d.domain.hi]]))
        if pts.size >= 2 and samples:
            i = rng.integers(0, pts.size, size=(samples, 2))
            for a, b in zip(pts[i.min(axis=1)], pts[i.max(axis=1)]):
                if b > a:
                    cands.append((float(a), float(b), False))
        Ek, Eb, Ea = d.band(k), d.band(k - 1), d.band(k + 1)
        for a, b, balanced in cands:
            L = b - a
            ek = Ek.measure_between(a, b)
            if not balanced and not (0.01 * L <= ek <= CANONICAL_DENSITY * L):
                continue
            below = Eb.measure_between(a, b)
            above = Ea.measure_between(a, b)
            if not (below > HEAVY_FRACTION * L or above > HEAVY_FRACTION * L):
                out.append({"k": k, "I": [a, b], "E_k": ek, "E_below": below, "E_above": above})
    return out


def _growth_violations(taus: dict, S: set, side: str) -> list:
    ks = np.array(sorted(taus), dtype=int)
    if ks.size < 2:
        return []
    t = np.array([taus[k] for k in ks])
    inS = np.array([k in S for k in ks])
    ki, kj = np.meshgrid(ks, ks, indexing="ij")
    ti, tj = np.meshgrid(t, t, indexing="ij")
    si, sj = np.meshgrid(inS, inS, indexing="ij")
    relevant = (ki < kj) & (np.abs(ki - kj) > 1) & ~(si & sj)
    bad = relevant & ~((ti > 3 * tj) | (tj > 3 * ti))
    return [
        {"side": side, "k": int(a), "k2": int(b), "tau": float(x), "tau2": float(y)}
        for a, b, x, y in zip(ki[bad], kj[bad], ti[bad], tj[bad])
    ]


def check_interval_growth(d, report: IndexSetReport, terminals: TerminalTable) -> list:
    """Maximal terminal lengths of well-separated indices differ by more than 3x."""
    S = set(report.satisfied)
    out = []
    for side in ("left", "right"):
        taus = {}
        for k in d.occupied:
            t = terminals.get(k, side)
            if t is not None:
                taus[k] = t.tau
        out.extend(_growth_violations(taus, S, side))
    return out


def check_grounded(d, report: IndexSetReport, collection: dict, max_points: int = 24, seed: int = 0) -> list:
    """Mass bounds on every grounded interval drawn from a compatible endpoint lattice."""
    g = d.g
    rng = np.random.default_rng(seed)
    out = []
    P = set(report.unsatisfied_pairs)
    for k in report.unsatisfied_pairs:
        spans = collection.get(k, [])
        ends = {d.domain.lo, d.domain.hi}
        for c in spans:
            ends.update((c.span.lo, c.span.hi))
        lattice = np.unique(np.concatenate([d.band(j).endpoints() for j in (k - 1, k, k + 1)]))
        if lattice.size:
            pick = rng.choice(lattice, size=min(max_points, lattice.size), replace=False)
            ends.update(float(p) for p in pick)
        ends = sorted(ends)
        if len(ends) > max_points * 2:
            keep = rng.choice(len(ends), size=max_points * 2, replace=False)
            ends = sorted(ends[i] for i in keep)
        span_arr = [(c.span.lo, c.span.hi) for c in spans]
        upper = level_value(k + 1, d.delta)
        for i, a in enumerate(ends):
            if not g.value(a) < upper:
                continue
            if any(lo < a < hi for lo, hi in span_arr):
                continue
            for b in ends[i + 1 :]:
                if any(lo < b < hi for lo, hi in span_arr):
                    continue
                J = Interval(a, b)
                if not is_grounded(d, collection, J, k, g):
                    continue
                lhs1, rhs1, lhs2, rhs2, ok = check_grounded_bounds(d, J, k, collection, P)
                if not ok:
                    out.append({"k": k, "J": [a, b], "above": lhs1, "fifth_Ek": rhs1, "Ek": lhs2, "fifth_below": rhs2})
    return out


def check_no_gaps(GL: list, GR: list) -> list:
    out = []
    if not GL:
        return out
    top = max(k for k, _ in GL)
    for b in GR:
        for k, tau in GL:
            if k > b and not (tau > 1 / 3 and k == top):
                out.append({"b": b, "k": k, "tau": tau, "max_GL": top})
    return out


def check_decaying_r(d, GR: list, terminals: TerminalTable) -> list:
    out = []
    for m in GR:
        tm = terminals.right(m)
        if tm is None:
            continue
        for k in d.occupied:
            if k <= m + 1:
                continue
            tk = terminals.right(k)
            if tk is None:
                continue
            if not (3 * tk.tau < tm.tau or tk.tau > 0.5):
                out.append({"m": m, "k": k, "tau_m": tm.tau, "tau_k": tk.tau})
    return out


def check_end_interval(d, GR: list, terminals: TerminalTable) -> list:
    return [{"k": k} for k in GR if k <= d.M and terminals.right(k) is None]


@dataclass
class LemmaSuiteResult:
    counterexamples: dict = field(default_factory=dict)
    scoped: bool = False  # whether the #S < 0.01 M lemmas applied
    n_satisfied: int = 0

    @property
    def ok(self) -> bool:
        return not any(self.counterexamples.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "scoped": self.scoped, "n_satisfied": self.n_satisfied, "counterexamples": self.counterexamples}


def run_lemma_suite(
    g: PLFunction,
    delta: float,
    d: Optional[LevelDecomposition] = None,
    report: Optional[IndexSetReport] = None,
    seed: int = 0,
) -> LemmaSuiteResult:
    """All lemma properties on one function.

    Rigidity, interval growth and the grounded bounds are checked on every
    input.  The ``G_L``/``G_R`` lemmas live under the standing assumption
    ``#S < 0.01 M`` and are only checked when it holds.
    """
    d = d or decompose(g, delta)
    report = report or satisfied_set(d)
    terminals = TerminalTable(d)
    collection = build_collection(d)
    res = LemmaSuiteResult(n_satisfied=report.n_satisfied)
    cx = res.counterexamples
    cx["canonical"] = check_canonical_collection(d, collection)
    cx["rigidity"] = check_rigidity(d, report, collection, seed=seed)
    cx["interval_growth"] = check_interval_growth(d, report, terminals)
    cx["grounded"] = check_grounded(d, report, collection, seed=seed)
    if report.n_satisfied < 0.01 * d.M and g.ys[0] == 0.0:
        res.scoped = True
        GL = build_GL(d, report, terminals)
        GR = build_GR(report.unsatisfied_pairs, GL)
        cx["no_gaps"] = check_no_gaps(GL, GR)
        cx["decaying_r"] = check_decaying_r(d, GR, terminals)
        cx["end_interval"] = check_end_interval(d, GR, terminals)
    return res


def persist_counterexamples(directory: str, name: str, g: PLFunction, delta: float, result: LemmaSuiteResult) -> Optional[str]:
    """Write a replayable JSON record for a failing instance; returns its path."""
    if result.ok:
        return None
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{name}.json")
    payload = {
        "function": {"xs": list(g.xs), "ys": list(g.ys)},
        "delta": delta,
        "result": result.to_json(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
    return path
