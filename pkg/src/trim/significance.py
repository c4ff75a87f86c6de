"""Per-token significance scores from image-token and text embeddings.

Every token row is compared against a single pooled text embedding in the
shared embedding space: raw score = cosine similarity, then a softmax over
the raw scores turns them into a probability-like weighting. Selection
strategies downstream consume the softmax scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_io import Matrix


@dataclass(frozen=True)
class SignificanceScores:
    """Raw cosine similarities and their softmax, one entry per token.

    Scores produced by :func:`score_tokens` have ``raw`` values in [-1, 1];
    the constructor itself only requires finite inputs so that score vectors
    from other sources can be analyzed with the same selection machinery.
    The softmax is strictly monotone in the raw scores, so both vectors
    sort identically.
    """

    raw: np.ndarray
    softmax: np.ndarray

    @property
    def n_tokens(self) -> int:
        return self.raw.size

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> "SignificanceScores":
        arr = np.asarray(raw, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValueError("need at least one score")
        if not np.isfinite(arr).all():
            raise ValueError("raw scores contain NaN or Inf")
        arr = arr.copy()
        arr.setflags(write=False)
        sm = softmax(arr)
        sm.setflags(write=False)
        return cls(raw=arr, softmax=sm)


def cosine_similarity(v: np.ndarray, u: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    The clamp absorbs float rounding just past the boundary for
    near-parallel inputs. Zero-norm vectors are rejected.
    """
    a = np.asarray(v, dtype=np.float64).reshape(-1)
    b = np.asarray(u, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm input")
    return float(np.clip(float(a @ b) / (na * nb), -1.0, 1.0))


def softmax(x: np.ndarray) -> np.ndarray:
    """Numerically stable softmax: exp(x - max(x)) normalized to sum 1.

    Max subtraction keeps the output free of zeros and NaN for any input
    whose spread is within ~700 natural-log units; it is mathematically
    identical to the unshifted form.
    """
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError("softmax of an empty vector is undefined")
    if not np.isfinite(arr).all():
        raise ValueError("softmax input contains NaN or Inf")
    shifted = np.exp(arr - arr.max())
    return shifted / shifted.sum()


def score_tokens(image_tokens: Matrix, text_pooled: np.ndarray) -> SignificanceScores:
    """Score every token row against the pooled text embedding.

    raw[i] is the cosine similarity between row i and ``text_pooled``;
    the softmax field is the softmax over those cosines. A zero-norm token
    row is an upstream export bug and is reported with its index.
    """
    text = np.asarray(text_pooled, dtype=np.float64).reshape(-1)
    if not np.isfinite(text).all():
        raise ValueError("text embedding contains NaN or Inf")
    if image_tokens.cols != text.size:
        raise ValueError(
            f"dimension mismatch: tokens have {image_tokens.cols} features, "
            f"text embedding has {text.size}"
        )
    text_norm = float(np.linalg.norm(text))
    if text_norm == 0.0:
        raise ValueError("text embedding has zero norm")

    rows = image_tokens.data.astype(np.float64)
    row_norms = np.linalg.norm(rows, axis=1)
    zero = np.flatnonzero(row_norms == 0.0)
    if zero.size:
        raise ValueError(f"token row {int(zero[0])} has zero norm")

    raw = np.clip((rows @ text) / (row_norms * text_norm), -1.0, 1.0)
    return SignificanceScores.from_raw(raw)


def similarity_grid(scores: SignificanceScores, grid_side: int) -> np.ndarray:
    """Reshape softmax scores into a grid_side x grid_side patch raster.

    Tokens are assumed to be in row-major raster order; values pass
    through untouched.
    """
    if grid_side < 1:
        raise ValueError("grid side must be positive")
    if scores.n_tokens != grid_side * grid_side:
        raise ValueError(
            f"{scores.n_tokens} tokens do not fill a {grid_side}x{grid_side} grid"
        )
    return scores.softmax.reshape(grid_side, grid_side)


def infer_grid_side(n_tokens: int) -> int:
    """Side length of the square patch grid, or an error if not square."""
    side = int(np.sqrt(n_tokens) + 0.5)
    if side * side != n_tokens:
        raise ValueError(f"token count {n_tokens} is not a perfect square")
    return side
