"""Analytical cost model: formulas, presets, scaling laws, reports."""

import json

import numpy as np
import pytest

from trim.costmodel import (
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

SEVEN_B = ModelSpec(name="7b", n_params=7_000_000_000, n_layers=32, d_model=4096)
V100 = HardwareSpec(name="v100", peak_flops=112e12, mem_bandwidth=900e9)
# negligible attention term: isolates the weight term in prefill
WEIGHT_ONLY = ModelSpec(name="w", n_params=7_000_000_000, n_layers=1, d_model=1)


class TestKvCache:
    def test_empty_cache(self):
        assert kv_cache_bytes(SEVEN_B, 0) == 0

    def test_single_token(self):
        assert kv_cache_bytes(SEVEN_B, 1) == 2 * 32 * 4096 * 2

    def test_exactly_linear(self):
        per_token = kv_cache_bytes(SEVEN_B, 1)
        for n in (2, 163, 616, 4096):
            assert kv_cache_bytes(SEVEN_B, n) == n * per_token

    def test_operating_point_ratio(self):
        ratio = kv_cache_bytes(SEVEN_B, 163) / kv_cache_bytes(SEVEN_B, 616)
        assert ratio == pytest.approx(163 / 616, rel=1e-12)
        assert ratio == pytest.approx(0.2646, abs=5e-4)

    def test_kv_width_override(self):
        narrow = ModelSpec(name="gqa", n_params=10, n_layers=2, d_model=8, kv_width=2)
        assert kv_cache_bytes(narrow, 3) == 2 * 2 * 2 * 2 * 3

    def test_negative_tokens_rejected(self):
        with pytest.raises(ValueError):
            kv_cache_bytes(SEVEN_B, -1)


class TestFirstToken:
    def test_weight_term_value(self):
        # 2 * 7e9 * 616 / 112e12 seconds, attention term negligible
        got = first_token_ms(WEIGHT_ONLY, V100, 616)
        assert got == pytest.approx(2 * 7e9 * 616 / 112e12 * 1e3, rel=1e-4)
        assert got == pytest.approx(77.0, abs=0.1)

    def test_dominant_term_ratio(self):
        ratio = first_token_ms(WEIGHT_ONLY, V100, 163) / first_token_ms(WEIGHT_ONLY, V100, 616)
        assert ratio == pytest.approx(163 / 616, rel=1e-6)
        assert ratio == pytest.approx(0.265, abs=1e-3)

    def test_doubling_params_doubles_weight_term(self):
        double = ModelSpec(name="w2", n_params=14_000_000_000, n_layers=1, d_model=1)
        assert first_token_ms(double, V100, 616) == pytest.approx(
            2 * first_token_ms(WEIGHT_ONLY, V100, 616), rel=1e-6
        )

    def test_vision_overhead_is_additive(self):
        with_overhead = ModelSpec(
            name="v", n_params=7_000_000_000, n_layers=32, d_model=4096,
            vision_overhead_flops=1e12,
        )
        delta = first_token_ms(with_overhead, V100, 616) - first_token_ms(SEVEN_B, V100, 616)
        assert delta == pytest.approx(1e12 / 112e12 * 1e3, rel=1e-9)

    def test_needs_a_token(self):
        with pytest.raises(ValueError):
            first_token_ms(SEVEN_B, V100, 0)

    def test_attention_term_stays_minor_at_context_scale(self):
        # quadratic term < 10% of prefill FLOPs for 7B up to 2k tokens
        for n in (64, 616, 1024, 2048):
            attn = 4.0 * SEVEN_B.n_layers * SEVEN_B.d_model * n**2
            total = attn + 2.0 * SEVEN_B.n_params * n
            assert attn / total < 0.10


class TestNextToken:
    def test_cache_free_floor(self):
        assert next_token_ms(SEVEN_B, V100, 0) == pytest.approx(
            SEVEN_B.weights_bytes / 900e9 * 1e3, rel=1e-12
        )

    def test_operating_point_ratio(self):
        ratio = next_token_ms(SEVEN_B, V100, 163) / next_token_ms(SEVEN_B, V100, 616)
        assert ratio == pytest.approx(0.9834, abs=5e-4)

    def test_affine_in_cached_tokens(self):
        base = next_token_ms(SEVEN_B, V100, 0)
        slope = kv_cache_bytes(SEVEN_B, 1) / 900e9 * 1e3
        for n in (1, 100, 616):
            assert next_token_ms(SEVEN_B, V100, n) == pytest.approx(
                base + n * slope, rel=1e-12
            )

    def test_int8_halves_weight_traffic(self):
        int8 = ModelSpec(name="q", n_params=7_000_000_000, n_layers=32, d_model=4096,
                         bytes_per_param=1)
        assert int8.weights_bytes * 2 == SEVEN_B.weights_bytes


class TestMonotonicity:
    def test_costs_non_decreasing_in_tokens(self):
        points = [cost_point(SEVEN_B, V100, n) for n in (1, 10, 163, 616, 2048)]
        for a, b in zip(points, points[1:]):
            assert b.kv_cache_bytes >= a.kv_cache_bytes
            assert b.first_token_ms >= a.first_token_ms
            assert b.next_token_ms >= a.next_token_ms

    def test_costs_non_decreasing_in_model_size(self):
        small = ModelSpec(name="s", n_params=10**9, n_layers=16, d_model=2048)
        big = ModelSpec(name="b", n_params=2 * 10**9, n_layers=32, d_model=2048)
        assert kv_cache_bytes(big, 100) >= kv_cache_bytes(small, 100)
        assert first_token_ms(big, V100, 100) >= first_token_ms(small, V100, 100)
        assert next_token_ms(big, V100, 100) >= next_token_ms(small, V100, 100)


class TestCompareCosts:
    def test_identity_comparison(self):
        report = compare_costs(SEVEN_B, V100, 616, 616)
        assert report.kv_cache_ratio == 1.0
        assert report.first_token_ratio == 1.0
        assert report.next_token_ratio == 1.0
        assert report.token_ratio == 1.0
        assert report.visual_token_reduction == 0.0

    def test_visual_reduction_at_operating_point(self):
        report = compare_costs(SEVEN_B, V100, 616, 163, text_len=40)
        assert report.visual_token_reduction == 1 - 123 / 576
        assert report.visual_token_reduction == pytest.approx(0.786, abs=1e-3)

    def test_ratios_invariant_to_hardware(self):
        fast = HardwareSpec(name="fast", peak_flops=7.3 * 112e12, mem_bandwidth=2.5 * 900e9)
        a = compare_costs(SEVEN_B, V100, 616, 163)
        b = compare_costs(SEVEN_B, fast, 616, 163)
        assert b.first_token_ratio == pytest.approx(a.first_token_ratio, rel=1e-12)
        assert b.next_token_ratio == pytest.approx(a.next_token_ratio, rel=1e-12)
        assert b.kv_cache_ratio == a.kv_cache_ratio

    def test_text_len_validation(self):
        with pytest.raises(ValueError, match="text_len"):
            compare_costs(SEVEN_B, V100, 616, 163, text_len=163)

    def test_report_text_and_json_share_values(self):
        report = compare_costs(SEVEN_B, V100, 616, 163, text_len=40)
        d = report.to_dict()
        text = report.to_text()
        assert f"{d['ratios']['next_token']:.3f}" in text
        assert f"{d['reduced']['first_token_ms']:.3f}" in text
        assert str(d["baseline"]["n_tokens_prompt"]) in text


class TestPresetsAndSpecs:
    def test_7b_preset_precisions(self):
        fp16 = model_preset("llava-7b", "fp16")
        int8 = model_preset("llava-7b", "int8")
        assert fp16.weights_bytes == 2 * int8.weights_bytes
        assert kv_cache_bytes(fp16, 616) == 2 * kv_cache_bytes(int8, 616)

    def test_13b_preset_is_larger(self):
        assert model_preset("llava-13b").n_params > model_preset("llava-7b").n_params

    def test_unknown_presets(self):
        with pytest.raises(ValueError, match="preset"):
            model_preset("llava-70b")
        with pytest.raises(ValueError, match="preset"):
            hardware_preset("tpu")

    def test_bad_precision(self):
        with pytest.raises(ValueError, match="precision"):
            model_preset("llava-7b", "fp8")

    def test_hardware_preset_values(self):
        hw = hardware_preset()
        assert hw.peak_flops == 112e12 and hw.mem_bandwidth == 900e9

    def test_spec_json_round_trip(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps(SEVEN_B.to_dict()))
        assert ModelSpec.from_json_file(path) == SEVEN_B
        hw_path = tmp_path / "hw.json"
        hw_path.write_text(json.dumps(V100.to_dict()))
        assert HardwareSpec.from_json_file(hw_path) == V100

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            ModelSpec.from_dict({"name": "x", "n_params": 1, "n_layers": 1,
                                 "d_model": 1, "gpu": "a100"})

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelSpec(name="x", n_params=0, n_layers=1, d_model=1)
        with pytest.raises(ValueError):
            ModelSpec(name="x", n_params=1, n_layers=1, d_model=1, bytes_per_param=4)
        with pytest.raises(ValueError):
            HardwareSpec(name="x", peak_flops=0, mem_bandwidth=1)
