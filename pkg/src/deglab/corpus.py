"""The standard function corpus and a deterministic parallel runner."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .generators import gen_linear, gen_multibump, gen_random, log_boundary_for_M
from .plfn import PLFunction

__all__ = ["CorpusEntry", "default_corpus", "run_parallel", "default_threads", "CORPUS_DELTAS"]

CORPUS_DELTAS = (0.009, 0.005, 0.001)
CORPUS_M = 128
# steep enough at 0 that no band is satisfied; the image near 1 of a steep
# profile is not representable in doubles, so the right-hand log instance
# uses a gentle slope
LOG_LEFT_K = 5.0
LOG_RIGHT_K = 0.25
# collapses into a sub-ulp jump near 1; kept as an adversarial instance
LOG_RIGHT_STEEP_K = 5.0
MULTIBUMP_BUMPS = 3
RANDOM_SEGMENTS = 64


@dataclass(frozen=True)
class CorpusEntry:
    function_id: str
    family: str
    delta: float
    params: dict = field(default_factory=dict, hash=False, compare=False)

    def build(self) -> PLFunction:
        p = self.params
        M = p.get("M", CORPUS_M)
        if self.family == "linear":
            return gen_linear(M, self.delta)
        if self.family == "log_boundary":
            return log_boundary_for_M(M, p["K"], self.delta, side=p["side"], segments=p.get("segments", 64))
        if self.family == "multibump":
            return gen_multibump(p["bumps"], M, self.delta, p.get("bump_K", 20.0))
        if self.family == "random":
            return gen_random(p["seed"], p["segments"], M, self.delta)
        raise ValueError(f"unknown family {self.family!r}")


def default_corpus(
    deltas: Sequence[float] = CORPUS_DELTAS,
    n_random: int = 1000,
    M: int = CORPUS_M,
    random_segments: int = RANDOM_SEGMENTS,
) -> list:
    out = []
    for delta in deltas:
        out.append(CorpusEntry("linear", "linear", delta, {"M": M}))
        out.append(CorpusEntry("log_left", "log_boundary", delta, {"M": M, "K": LOG_LEFT_K, "side": "left"}))
        out.append(CorpusEntry("log_right", "log_boundary", delta, {"M": M, "K": LOG_RIGHT_K, "side": "right"}))
        out.append(CorpusEntry("log_right_steep", "log_boundary", delta, {"M": M, "K": LOG_RIGHT_STEEP_K, "side": "right"}))
        out.append(CorpusEntry("multibump", "multibump", delta, {"M": M, "bumps": MULTIBUMP_BUMPS}))
        for seed in range(n_random):
            out.append(
                CorpusEntry(f"random_{seed:04d}", "random", delta, {"M": M, "seed": seed, "segments": random_segments})
            )
    return out


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("DEGLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_parallel(fn: Callable, items: Iterable, threads: int = 1) -> list:
    """Map ``fn`` over ``items``; results come back in input order."""
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
