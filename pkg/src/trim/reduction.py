"""Assemble the reduced token sequence from a selection.

Retained rows keep their original order and exact bit patterns. Whenever
any token was dropped, one aggregate row (the arithmetic mean of all
unselected rows) is appended at the end of the sequence to limit
information loss.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .selection import (
    STRATEGY_IQR,
    STRATEGY_POOL,
    STRATEGY_RANDOM,
    STRATEGY_TOPK,
    SelectionResult,
    Strategy,
    select_iqr,
    select_pool,
    select_random,
    select_topk,
)
from .significance import SignificanceScores, score_tokens
from .tensor_io import Matrix


@dataclass(frozen=True)
class ReducedSequence:
    """Kept rows in source order, plus the aggregate row when present.

    ``tokens`` has len(kept_indices) rows, plus one more iff any source
    row was left out; kept rows are bit-identical to the source rows.
    """

    tokens: Matrix
    kept_indices: np.ndarray
    has_aggregate: bool
    source_n: int

    @property
    def n_kept(self) -> int:
        return int(self.kept_indices.size)


class PipelineResult(NamedTuple):
    scores: SignificanceScores
    selection: SelectionResult
    reduced: ReducedSequence


def aggregate_unselected(source: Matrix, selection: SelectionResult) -> np.ndarray | None:
    """Mean of the rows NOT in the selection, or None when all are kept.

    Accumulates in float64 and stores the result at float32 so the mass
    identity (sum of all rows = kept rows + count * aggregate) stays tight.
    """
    if selection.n_total != source.rows:
        raise ValueError(
            f"selection covers {selection.n_total} tokens, source has {source.rows}"
        )
    mask = np.ones(source.rows, dtype=bool)
    mask[selection.indices] = False
    complement = source.data[mask]
    if complement.shape[0] == 0:
        return None
    return complement.astype(np.float64).mean(axis=0).astype(np.float32)


def reduce(source: Matrix, selection: SelectionResult) -> ReducedSequence:
    """Gather kept rows in ascending source order and append the aggregate."""
    aggregate = aggregate_unselected(source, selection)
    kept = source.data[selection.indices]
    if aggregate is None:
        tokens = Matrix(kept)
    else:
        tokens = Matrix(np.vstack([kept, aggregate[np.newaxis, :]]))
    return ReducedSequence(
        tokens=tokens,
        kept_indices=selection.indices,
        has_aggregate=aggregate is not None,
        source_n=source.rows,
    )


def run_pipeline(
    image_tokens: Matrix, text_pooled: np.ndarray, strategy: Strategy
) -> PipelineResult:
    """Score, select, reduce; all three intermediate artifacts returned."""
    scores = score_tokens(image_tokens, text_pooled)
    if strategy.kind == STRATEGY_IQR:
        selection = select_iqr(scores)
    elif strategy.kind == STRATEGY_TOPK:
        selection = select_topk(scores, strategy.ratio)
    elif strategy.kind == STRATEGY_RANDOM:
        if strategy.seed is None:
            raise ValueError("random strategy requires an explicit seed")
        selection = select_random(scores.n_tokens, strategy.ratio, strategy.seed)
    elif strategy.kind == STRATEGY_POOL:
        selection = select_pool(scores.n_tokens, strategy.ratio)
    else:
        raise ValueError(f"unknown strategy kind {strategy.kind!r}")
    return PipelineResult(scores, selection, reduce(image_tokens, selection))


def sidecar_dict(reduced: ReducedSequence, selection: SelectionResult) -> dict:
    """JSON sidecar describing a reduced-sequence tensor file."""
    return {
        "kept_indices": [int(i) for i in reduced.kept_indices],
        "has_aggregate": reduced.has_aggregate,
        "source_n": reduced.source_n,
        "strategy": selection.strategy,
    }
