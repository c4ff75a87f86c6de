"""Pydantic request/response models for the HTTP service.

Tensor payloads travel as base64-encoded tensor files (the same binary
format used on disk), so the wire format and the file format are one.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ModelSpecModel(BaseModel):
    name: str
    n_params: int
    n_layers: int
    d_model: int
    bytes_per_param: int = 2
    kv_width: Optional[int] = None
    vision_overhead_flops: float = 0.0


class HardwareSpecModel(BaseModel):
    name: str
    peak_flops: float
    mem_bandwidth: float


class ReduceRequest(BaseModel):
    image_tokens: str = Field(description="base64 tensor file, N x D token matrix")
    text_embedding: str = Field(description="base64 tensor file, pooled text vector")
    strategy: str = "iqr"


class SelectionModel(BaseModel):
    strategy: str
    threshold: Optional[float] = None
    n_total: int
    indices: list[int]


class SidecarModel(BaseModel):
    kept_indices: list[int]
    has_aggregate: bool
    source_n: int
    strategy: str


class ReduceSummary(BaseModel):
    n_total: int
    n_kept: int
    output_rows: int
    compression_ratio: float = Field(description="kept tokens / source tokens")
    threshold: Optional[float] = None


class ReduceResponse(BaseModel):
    reduced_tensor: str = Field(description="base64 tensor file of the reduced rows")
    sidecar: SidecarModel
    selection: SelectionModel
    summary: ReduceSummary
    report_text: str


class HeatmapRequest(BaseModel):
    image_tokens: str
    text_embedding: str


class HeatmapResponse(BaseModel):
    grid_side: int
    grid_text: str
    pgm: str = Field(description="base64 binary PGM (P5) image")


class CostRequest(BaseModel):
    baseline_tokens: int
    reduced_tokens: int
    text_len: int = 0
    precision: Literal["fp16", "int8"] = "fp16"
    model_spec: Optional[ModelSpecModel] = None
    hw_spec: Optional[HardwareSpecModel] = None


class CostPointModel(BaseModel):
    n_tokens_prompt: int
    kv_cache_bytes: int
    weights_bytes: int
    first_token_ms: float
    next_token_ms: float


class CostRatios(BaseModel):
    kv_cache: float
    first_token: float
    next_token: float
    tokens: float


class CostResponse(BaseModel):
    model: str
    hardware: str
    baseline: CostPointModel
    reduced: CostPointModel
    ratios: CostRatios
    text_len: int
    visual_token_reduction: float
    report_text: str


class CompareRequest(BaseModel):
    image_tokens: str
    text_embedding: str
    ratio: float = Field(gt=0.0, le=1.0, description="token budget for the fixed strategies")
    seed: int
    text_len: int = 40
    precision: Literal["fp16", "int8"] = "fp16"
    model_spec: Optional[ModelSpecModel] = None
    hw_spec: Optional[HardwareSpecModel] = None


class CompareRow(BaseModel):
    strategy: str
    n_kept: int
    output_rows: int
    retained_mass: float = Field(description="sum of softmax scores over kept tokens")
    mass_per_token: float
    kv_cache_ratio: float
    first_token_ratio: float
    next_token_ratio: float


class CompareResponse(BaseModel):
    n_total: int
    rows: list[CompareRow]
    report_text: str


class HealthResponse(BaseModel):
    status: str
    version: str
