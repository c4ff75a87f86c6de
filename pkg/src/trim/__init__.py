"""Text-guided visual token reduction with an analytical inference-cost model.

The pipeline scores each visual token against a pooled text embedding
(cosine similarity, then softmax), keeps the statistical outliers (or a
fixed budget), and folds the rest into one aggregate token. The cost
model quantifies what the shorter sequence saves in KV-cache memory and
prefill/decode latency.

Typical use:

    from trim import Matrix, Strategy, run_pipeline, read_tensor

    tokens = read_tensor("patches.trimt")
    text = read_tensor("text.trimt")
    scores, selection, reduced = run_pipeline(tokens, text.data[0], Strategy.parse("iqr"))
"""

__version__ = "0.1.0"

from .costmodel import (
    CostPoint,
    CostReport,
    HardwareSpec,
    ModelSpec,
    compare_costs,
    cost_point,
    first_token_ms,
    hardware_preset,
    kv_cache_bytes,
    model_preset,
    next_token_ms,
)
from .reduction import (
    PipelineResult,
    ReducedSequence,
    aggregate_unselected,
    reduce,
    run_pipeline,
    sidecar_dict,
)
from .selection import (
    QuartileSummary,
    SelectionResult,
    Strategy,
    quartiles,
    select_iqr,
    select_pool,
    select_random,
    select_topk,
)
from .significance import (
    SignificanceScores,
    cosine_similarity,
    score_tokens,
    similarity_grid,
    softmax,
)
from .tensor_io import Matrix, TensorFormatError, parse_tensor, read_tensor, write_tensor, write_vector

__all__ = [
    "__version__",
    "Matrix",
    "TensorFormatError",
    "read_tensor",
    "write_tensor",
    "write_vector",
    "parse_tensor",
    "SignificanceScores",
    "cosine_similarity",
    "softmax",
    "score_tokens",
    "similarity_grid",
    "QuartileSummary",
    "SelectionResult",
    "Strategy",
    "quartiles",
    "select_iqr",
    "select_topk",
    "select_random",
    "select_pool",
    "ReducedSequence",
    "PipelineResult",
    "aggregate_unselected",
    "reduce",
    "run_pipeline",
    "sidecar_dict",
    "ModelSpec",
    "HardwareSpec",
    "CostPoint",
    "CostReport",
    "kv_cache_bytes",
    "first_token_ms",
    "next_token_ms",
    "cost_point",
    "compare_costs",
    "model_preset",
    "hardware_preset",
]
