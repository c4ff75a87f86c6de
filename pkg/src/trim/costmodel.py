"""Analytical transformer-inference cost model.

Roofline-style estimates as closed-form functions of token count, model
spec, and hardware spec:

  * KV cache: 2 (K and V) * layers * kv_width * bytes_per_param per token.
  * First token (prefill, compute-bound):
        (vision_overhead + 2 * params * T + 4 * layers * d_model * T^2)
        / peak_flops
    i.e. a linear weight term, a quadratic attention term, and a fixed
    token-count-independent vision term.
  * Next token (decode, memory-bound): one full pass over the weights plus
    the cache, divided by memory bandwidth.

All arithmetic is in 64-bit floats; reports round milliseconds to three
decimals. These are planning estimates from theoretical peaks, not
measurements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

PRECISION_BYTES = {"fp16": 2, "int8": 1}


@dataclass(frozen=True)
class ModelSpec:
    """Transformer shape and precision used by the cost formulas.

    ``kv_width`` is the per-layer key/value width (n_kv_heads * d_head);
    it defaults to d_model. ``vision_overhead_flops`` is a fixed cost for
    the vision tower and projector, independent of token count; it
    defaults to 0 and can be calibrated from one measured baseline pair.
    """

    name: str
    n_params: int
    n_layers: int
    d_model: int
    bytes_per_param: int = 2
    kv_width: int | None = None
    vision_overhead_flops: float = 0.0

    def __post_init__(self) -> None:
        if min(self.n_params, self.n_layers, self.d_model) < 1:
            raise ValueError("model counts must be at least 1")
        if self.bytes_per_param not in (1, 2):
            raise ValueError(f"bytes_per_param must be 1 or 2, got {self.bytes_per_param}")
        if self.kv_width is not None and self.kv_width < 1:
            raise ValueError("kv_width must be at least 1")
        if self.vision_overhead_flops < 0:
            raise ValueError("vision_overhead_flops must be non-negative")

    @property
    def kv_width_resolved(self) -> int:
        return self.d_model if self.kv_width is None else self.kv_width

    @property
    def weights_bytes(self) -> int:
        return self.n_params * self.bytes_per_param

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown model spec fields: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ModelSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_params": self.n_params,
            "n_layers": self.n_layers,
            "d_model": self.d_model,
            "bytes_per_param": self.bytes_per_param,
            "kv_width": self.kv_width,
            "vision_overhead_flops": self.vision_overhead_flops,
        }


@dataclass(frozen=True)
class HardwareSpec:
    """Theoretical peak compute and memory bandwidth of one device."""

    name: str
    peak_flops: float
    mem_bandwidth: float

    def __post_init__(self) -> None:
        if self.peak_flops <= 0 or self.mem_bandwidth <= 0:
            raise ValueError("hardware rates must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "HardwareSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown hardware spec fields: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "HardwareSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "peak_flops": self.peak_flops,
            "mem_bandwidth": self.mem_bandwidth,
        }


# Built-in presets; theoretical shapes and peaks, not measurements.
_MODEL_PRESETS = {
    "llava-7b": dict(n_params=7_000_000_000, n_layers=32, d_model=4096),
    "llava-13b": dict(n_params=13_000_000_000, n_layers=40, d_model=5120),
}

_HARDWARE_PRESETS = {
    "v100": dict(peak_flops=112e12, mem_bandwidth=900e9),
}

DEFAULT_MODEL_PRESET = "llava-7b"
DEFAULT_HARDWARE_PRESET = "v100"


def model_preset(name: str = DEFAULT_MODEL_PRESET, precision: str = "fp16") -> ModelSpec:
    """Built-in 7B/13B-class model presets at the requested precision."""
    if name not in _MODEL_PRESETS:
        raise ValueError(f"unknown model preset {name!r}; have {sorted(_MODEL_PRESETS)}")
    if precision not in PRECISION_BYTES:
        raise ValueError(f"precision must be one of {sorted(PRECISION_BYTES)}")
    return ModelSpec(
        name=f"{name}-{precision}",
        bytes_per_param=PRECISION_BYTES[precision],
        **_MODEL_PRESETS[name],
    )


def hardware_preset(name: str = DEFAULT_HARDWARE_PRESET) -> HardwareSpec:
    """Built-in V100-class device preset (112 TFLOPS fp16, 900 GB/s)."""
    if name not in _HARDWARE_PRESETS:
        raise ValueError(f"unknown hardware preset {name!r}; have {sorted(_HARDWARE_PRESETS)}")
    return HardwareSpec(name=name, **_HARDWARE_PRESETS[name])


def kv_cache_bytes(model: ModelSpec, n_tokens: int) -> int:
    """Bytes of K and V activations cached for n_tokens; linear in tokens."""
    if n_tokens < 0:
        raise ValueError("token count must be non-negative")
    return 2 * model.n_layers * model.kv_width_resolved * model.bytes_per_param * n_tokens


def first_token_ms(model: ModelSpec, hw: HardwareSpec, n_tokens: int) -> float:
    """Compute-bound prefill latency for an n_tokens prompt, in ms."""
    if n_tokens < 1:
        raise ValueError("prefill needs at least one token")
    flops = (
        model.vision_overhead_flops
        + 2.0 * model.n_params * n_tokens
        + 4.0 * model.n_layers * model.d_model * n_tokens**2
    )
    return flops / hw.peak_flops * 1e3


def next_token_ms(model: ModelSpec, hw: HardwareSpec, n_cached: int) -> float:
    """Memory-bound decode latency with n_cached tokens in the cache, in ms."""
    if n_cached < 0:
        raise ValueError("cached token count must be non-negative")
    traffic = model.weights_bytes + kv_cache_bytes(model, n_cached)
    return traffic / hw.mem_bandwidth * 1e3


@dataclass(frozen=True)
class CostPoint:
    """All three cost figures at one prompt length."""

    n_tokens_prompt: int
    kv_cache_bytes: int
    weights_bytes: int
    first_token_ms: float
    next_token_ms: float

    def to_dict(self) -> dict:
        return {
            "n_tokens_prompt": self.n_tokens_prompt,
            "kv_cache_bytes": self.kv_cache_bytes,
            "weights_bytes": self.weights_bytes,
            "first_token_ms": round(self.first_token_ms, 3),
            "next_token_ms": round(self.next_token_ms, 3),
        }


@dataclass(frozen=True)
class CostReport:
    """Baseline vs reduced cost points plus their ratios.

    ``visual_token_reduction`` discounts ``text_len`` prompt tokens from
    both runs before computing 1 - reduced/baseline over the remaining
    (visual) tokens; with text_len = 0 it equals the overall reduction.
    """

    model: str
    hardware: str
    baseline: CostPoint
    reduced: CostPoint
    kv_cache_ratio: float
    first_token_ratio: float
    next_token_ratio: float
    token_ratio: float
    text_len: int
    visual_token_reduction: float

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "hardware": self.hardware,
            "baseline": self.baseline.to_dict(),
            "reduced": self.reduced.to_dict(),
            "ratios": {
                "kv_cache": self.kv_cache_ratio,
                "first_token": self.first_token_ratio,
                "next_token": self.next_token_ratio,
                "tokens": self.token_ratio,
            },
            "text_len": self.text_len,
            "visual_token_reduction": self.visual_token_reduction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        """Aligned-column comparison table."""
        rows = [
            ("prompt tokens", f"{self.baseline.n_tokens_prompt}",
             f"{self.reduced.n_tokens_prompt}", f"{self.token_ratio:.3f}"),
            ("kv cache (MiB)", f"{self.baseline.kv_cache_bytes / 2**20:.2f}",
             f"{self.reduced.kv_cache_bytes / 2**20:.2f}", f"{self.kv_cache_ratio:.3f}"),
            ("weights (MiB)", f"{self.baseline.weights_bytes / 2**20:.2f}",
             f"{self.reduced.weights_bytes / 2**20:.2f}", "1.000"),
            ("first token (ms)", f"{self.baseline.first_token_ms:.3f}",
             f"{self.reduced.first_token_ms:.3f}", f"{self.first_token_ratio:.3f}"),
            ("next token (ms)", f"{self.baseline.next_token_ms:.3f}",
             f"{self.reduced.next_token_ms:.3f}", f"{self.next_token_ratio:.3f}"),
        ]
        head = ("", "baseline", "reduced", "ratio")
        widths = [max(len(r[i]) for r in rows + [head]) for i in range(4)]
        lines = [f"cost model: {self.model} on {self.hardware}"]
        lines.append("  ".join(h.rjust(w) if i else h.ljust(w)
                               for i, (h, w) in enumerate(zip(head, widths))))
        for r in rows:
            lines.append("  ".join(c.rjust(w) if i else c.ljust(w)
                                   for i, (c, w) in enumerate(zip(r, widths))))
        lines.append(
            f"visual token reduction (text_len={self.text_len}): "
            f"{self.visual_token_reduction * 100:.1f}%"
        )
        return "\n".join(lines) + "\n"


def cost_point(model: ModelSpec, hw: HardwareSpec, n_tokens: int) -> CostPoint:
    """Evaluate every cost operation at a single prompt length."""
    return CostPoint(
        n_tokens_prompt=n_tokens,
        kv_cache_bytes=kv_cache_bytes(model, n_tokens),
        weights_bytes=model.weights_bytes,
        first_token_ms=first_token_ms(model, hw, n_tokens),
        next_token_ms=next_token_ms(model, hw, n_tokens),
    )


def compare_costs(
    model: ModelSpec,
    hw: HardwareSpec,
    baseline_tokens: int,
    reduced_tokens: int,
    text_len: int = 0,
) -> CostReport:
    """Cost points at both prompt lengths with reduced/baseline ratios."""
    if baseline_tokens < 1 or reduced_tokens < 1:
        raise ValueError("token counts must be at least 1")
    if text_len < 0 or text_len >= min(baseline_tokens, reduced_tokens):
        raise ValueError("text_len must be non-negative and below both token counts")
    base = cost_point(model, hw, baseline_tokens)
    red = cost_point(model, hw, reduced_tokens)
    return CostReport(
        model=model.name,
        hardware=hw.name,
        baseline=base,
        reduced=red,
        kv_cache_ratio=red.kv_cache_bytes / base.kv_cache_bytes,
        first_token_ratio=red.first_token_ms / base.first_token_ms,
        next_token_ratio=red.next_token_ms / base.next_token_ms,
        token_ratio=reduced_tokens / baseline_tokens,
        text_len=text_len,
        visual_token_reduction=1.0 - (reduced_tokens - text_len) / (baseline_tokens - text_len),
    )
