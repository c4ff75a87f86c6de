"""Token selection strategies: adaptive IQR rule, fixed top-k, and the
random / uniform-subsampling baselines.

The adaptive rule treats importance as an upper-tail outlier test on the
softmax scores: tokens whose score strictly exceeds Q3 + 1.5 * IQR are
retained. Quantiles use linear interpolation at rank p * (n - 1) over the
sorted sample (the "type 7" convention), the most widespread default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .significance import SignificanceScores

STRATEGY_IQR = "iqr"
STRATEGY_TOPK = "topk"
STRATEGY_RANDOM = "random"
STRATEGY_POOL = "pool"

ALL_STRATEGIES = (STRATEGY_IQR, STRATEGY_TOPK, STRATEGY_RANDOM, STRATEGY_POOL)

IQR_FACTOR = 1.5


@dataclass(frozen=True)
class QuartileSummary:
    """First/third quartiles, their spread, and the outlier upper bound."""

    q1: float
    q3: float
    iqr: float
    upper_bound: float


@dataclass(frozen=True)
class SelectionResult:
    """Retained token positions plus the rule that produced them.

    ``indices`` is strictly increasing, never empty, and always a strict
    or full subset of range(n_total). ``threshold`` carries the IQR upper
    bound actually applied; it is None for the other strategies.
    """

    indices: np.ndarray
    strategy: str
    threshold: float | None
    n_total: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.indices, dtype=np.int64)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "indices", arr)
        if arr.size < 1:
            raise ValueError("selection must retain at least one index")
        if arr.size and (arr[0] < 0 or arr[-1] >= self.n_total):
            raise ValueError("selected index out of range")
        if np.any(np.diff(arr) <= 0):
            raise ValueError("indices must be strictly increasing")

    @property
    def n_kept(self) -> int:
        return int(self.indices.size)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "threshold": self.threshold,
            "n_total": self.n_total,
            "indices": [int(i) for i in self.indices],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        """Line-oriented report: one field per line, indices space-joined."""
        lines = [
            f"strategy: {self.strategy}",
            f"n_total: {self.n_total}",
            f"n_kept: {self.n_kept}",
            f"threshold: {'' if self.threshold is None else repr(self.threshold)}",
            "indices: " + " ".join(str(int(i)) for i in self.indices),
        ]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Strategy:
    """Parsed selection strategy: kind plus its parameters.

    Text forms accepted by :meth:`parse`:
        iqr | topk:RATIO | random:RATIO:SEED | pool:RATIO
    """

    kind: str
    ratio: float | None = None
    seed: int | None = None

    @classmethod
    def parse(cls, spec: str) -> "Strategy":
        parts = spec.strip().lower().split(":")
        kind = parts[0]
        if kind == STRATEGY_IQR:
            if len(parts) != 1:
                raise ValueError("iqr strategy takes no parameters")
            return cls(kind=STRATEGY_IQR)
        if kind in (STRATEGY_TOPK, STRATEGY_POOL):
            if len(parts) != 2:
                raise ValueError(f"{kind} strategy needs a ratio, e.g. {kind}:0.05")
            return cls(kind=kind, ratio=_parse_ratio(parts[1]))
        if kind == STRATEGY_RANDOM:
            if len(parts) != 3:
                raise ValueError("random strategy needs ratio and seed, e.g. random:0.21:7")
            return cls(kind=STRATEGY_RANDOM, ratio=_parse_ratio(parts[1]), seed=int(parts[2]))
        raise ValueError(f"unknown strategy {spec!r}")

    def __str__(self) -> str:
        if self.kind == STRATEGY_IQR:
            return self.kind
        if self.kind == STRATEGY_RANDOM:
            return f"{self.kind}:{self.ratio:g}:{self.seed}"
        return f"{self.kind}:{self.ratio:g}"


def _parse_ratio(text: str) -> float:
    ratio = float(text)
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    return ratio


def round_half_away(x: float) -> int:
    """round() with halves away from zero; shared by every budget k."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def budget_k(n_total: int, ratio: float) -> int:
    """Token budget for a fixed-ratio strategy: max(1, round(ratio * n))."""
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    return max(1, round_half_away(ratio * n_total))


def quartiles(x: np.ndarray) -> QuartileSummary:
    """Q1/Q3 at ranks 0.25*(n-1) and 0.75*(n-1) of the sorted vector."""
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError("quartiles of an empty vector are undefined")
    if not np.isfinite(arr).all():
        raise ValueError("quartile input contains NaN or Inf")
    q1, q3 = np.quantile(arr, [0.25, 0.75])  # linear interpolation = type 7
    iqr = float(q3 - q1)
    return QuartileSummary(
        q1=float(q1), q3=float(q3), iqr=iqr, upper_bound=float(q3 + IQR_FACTOR * iqr)
    )


def select_iqr(scores: SignificanceScores) -> SelectionResult:
    """Adaptive selection: keep softmax scores strictly above Q3 + 1.5*IQR.

    When no score exceeds the bound (e.g. perfectly uniform scores), fall
    back to the single highest-scoring token, lowest index on ties, so the
    result is never empty.
    """
    qs = quartiles(scores.softmax)
    kept = np.flatnonzero(scores.softmax > qs.upper_bound)
    if kept.size == 0:
        kept = np.array([int(np.argmax(scores.softmax))], dtype=np.int64)
    return SelectionResult(
        indices=kept,
        strategy=STRATEGY_IQR,
        threshold=qs.upper_bound,
        n_total=scores.n_tokens,
    )


def select_topk(scores: SignificanceScores, ratio: float) -> SelectionResult:
    """Keep the k = max(1, round(ratio * N)) highest-softmax tokens.

    Ties break toward the lower original index; output is sorted ascending.
    """
    n = scores.n_tokens
    k = budget_k(n, ratio)
    # stable argsort of the negated scores = descending with index tie-break
    order = np.argsort(-scores.softmax, kind="stable")[:k]
    return SelectionResult(
        indices=np.sort(order),
        strategy=STRATEGY_TOPK,
        threshold=None,
        n_total=n,
    )


def select_random(n_total: int, ratio: float, seed: int) -> SelectionResult:
    """Uniform sample of k distinct indices from a pinned, portable PRNG.

    Identical (n_total, ratio, seed) triples produce identical selections
    on every platform; see :class:`SplitMix64`.
    """
    if n_total < 1:
        raise ValueError("n_total must be at least 1")
    k = budget_k(n_total, ratio)
    rng = SplitMix64(seed)
    pool = list(range(n_total))
    for i in range(k):  # partial Fisher-Yates shuffle
        j = i + rng.below(n_total - i)
        pool[i], pool[j] = pool[j], pool[i]
    return SelectionResult(
        indices=np.sort(np.asarray(pool[:k], dtype=np.int64)),
        strategy=STRATEGY_RANDOM,
        threshold=None,
        n_total=n_total,
    )


def select_pool(n_total: int, ratio: float) -> SelectionResult:
    """Uniform 1-D subsampling of positions across the flattened sequence.

    Keeps indices round(j * (n-1) / (k-1)) for j = 0..k-1 (deduplicated),
    or index 0 when the budget is a single token. Embedding values are
    untouched; only positions are subsampled.
    """
    if n_total < 1:
        raise ValueError("n_total must be at least 1")
    k = budget_k(n_total, ratio)
    if k == 1:
        picked = [0]
    else:
        picked = sorted({round_half_away(j * (n_total - 1) / (k - 1)) for j in range(k)})
    return SelectionResult(
        indices=np.asarray(picked, dtype=np.int64),
        strategy=STRATEGY_POOL,
        threshold=None,
        n_total=n_total,
    )


MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: a named, portable 64-bit PRNG (Steele et al. 2014).

    State advances by the golden-gamma constant; output is a 64-bit
    finalizer mix of the state. Bounded draws use rejection sampling, so
    they are exactly uniform and reproduce bit-for-bit everywhere.
    """

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int) -> None:
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + self.GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), bias-free via rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound
