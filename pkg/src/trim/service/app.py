"""FastAPI application exposing the reduction pipeline and cost model.

The service is stateless: every request carries its tensors (base64
tensor-file bytes) or spec objects, and every response carries both the
structured values and a ready-to-print text report with the same numbers.
"""

from __future__ import annotations

import base64
import binascii

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..costmodel import (
    CostReport,
    HardwareSpec,
    ModelSpec,
    compare_costs,
    hardware_preset,
    model_preset,
)
from ..reduction import reduce, run_pipeline, sidecar_dict
from ..render import grid_to_pgm, grid_to_text
from ..selection import (
    Strategy,
    select_iqr,
    select_pool,
    select_random,
    select_topk,
)
from ..significance import infer_grid_side, score_tokens, similarity_grid
from ..tensor_io import Matrix, TensorFormatError, parse_tensor
from . import schemas


def _decode_tensor(field: str, payload: str) -> Matrix:
    try:
        blob = base64.b64decode(payload, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise HTTPException(400, f"{field}: invalid base64 ({exc})")
    try:
        return parse_tensor(blob)
    except TensorFormatError as exc:
        raise HTTPException(400, f"{field}: {exc}")


def _encode_tensor(m: Matrix) -> str:
    return base64.b64encode(m.tobytes()).decode("ascii")


def _resolve_specs(req) -> tuple[ModelSpec, HardwareSpec]:
    try:
        if req.model_spec is None:
            model = model_preset(precision=req.precision)
        else:
            model = ModelSpec.from_dict(req.model_spec.model_dump())
        hw = hardware_preset() if req.hw_spec is None else HardwareSpec.from_dict(
            req.hw_spec.model_dump()
        )
    except ValueError as exc:
        raise HTTPException(400, str(exc))
    return model, hw


def _cost_fields(report: CostReport) -> dict:
    d = report.to_dict()
    d["ratios"] = schemas.CostRatios(**d["ratios"])
    return d


def create_app() -> FastAPI:
    app = FastAPI(title="trim service", version=__version__)

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/v1/reduce", response_model=schemas.ReduceResponse)
    def reduce_endpoint(req: schemas.ReduceRequest) -> schemas.ReduceResponse:
        tokens = _decode_tensor("image_tokens", req.image_tokens)
        text = _decode_tensor("text_embedding", req.text_embedding)
        try:
            strategy = Strategy.parse(req.strategy)
            scores, selection, reduced = run_pipeline(tokens, text.data[0], strategy)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        summary = schemas.ReduceSummary(
            n_total=selection.n_total,
            n_kept=selection.n_kept,
            output_rows=reduced.tokens.rows,
            compression_ratio=selection.n_kept / selection.n_total,
            threshold=selection.threshold,
        )
        report = (
            f"strategy: {strategy}\n"
            f"tokens: {summary.n_total} -> {summary.n_kept} kept"
            f" ({summary.compression_ratio * 100:.1f}%), "
            f"{summary.output_rows} output rows"
            f"{' (aggregate appended)' if reduced.has_aggregate else ''}\n"
            f"threshold: {'' if selection.threshold is None else repr(selection.threshold)}\n"
        )
        return schemas.ReduceResponse(
            reduced_tensor=_encode_tensor(reduced.tokens),
            sidecar=schemas.SidecarModel(**sidecar_dict(reduced, selection)),
            selection=schemas.SelectionModel(**selection.to_dict()),
            summary=summary,
            report_text=report,
        )

    @app.post("/v1/heatmap", response_model=schemas.HeatmapResponse)
    def heatmap_endpoint(req: schemas.HeatmapRequest) -> schemas.HeatmapResponse:
        tokens = _decode_tensor("image_tokens", req.image_tokens)
        text = _decode_tensor("text_embedding", req.text_embedding)
        try:
            scores = score_tokens(tokens, text.data[0])
            side = infer_grid_side(scores.n_tokens)
            grid = similarity_grid(scores, side)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return schemas.HeatmapResponse(
            grid_side=side,
            grid_text=grid_to_text(grid),
            pgm=base64.b64encode(grid_to_pgm(grid)).decode("ascii"),
        )

    @app.post("/v1/cost", response_model=schemas.CostResponse)
    def cost_endpoint(req: schemas.CostRequest) -> schemas.CostResponse:
        model, hw = _resolve_specs(req)
        try:
            report = compare_costs(
                model, hw, req.baseline_tokens, req.reduced_tokens, text_len=req.text_len
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return schemas.CostResponse(**_cost_fields(report), report_text=report.to_text())

    @app.post("/v1/compare", response_model=schemas.CompareResponse)
    def compare_endpoint(req: schemas.CompareRequest) -> schemas.CompareResponse:
        tokens = _decode_tensor("image_tokens", req.image_tokens)
        text = _decode_tensor("text_embedding", req.text_embedding)
        model, hw = _resolve_specs(req)
        try:
            scores = score_tokens(tokens, text.data[0])
            selections = [
                select_iqr(scores),
                select_topk(scores, req.ratio),
                select_random(scores.n_tokens, req.ratio, req.seed),
                select_pool(scores.n_tokens, req.ratio),
            ]
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        n = scores.n_tokens
        baseline_prompt = n + req.text_len
        rows = []
        for sel in selections:
            reduced = reduce(tokens, sel)
            mass = float(scores.softmax[sel.indices].sum())
            cost = compare_costs(
                model, hw, baseline_prompt, reduced.tokens.rows + req.text_len,
                text_len=req.text_len,
            )
            rows.append(
                schemas.CompareRow(
                    strategy=sel.strategy,
                    n_kept=sel.n_kept,
                    output_rows=reduced.tokens.rows,
                    retained_mass=mass,
                    mass_per_token=mass / sel.n_kept,
                    kv_cache_ratio=cost.kv_cache_ratio,
                    first_token_ratio=cost.first_token_ratio,
                    next_token_ratio=cost.next_token_ratio,
                )
            )
        head = ("strategy", "kept", "rows", "mass", "mass/token",
                "kv ratio", "first ratio", "next ratio")
        table = [head] + [
            (r.strategy, str(r.n_kept), str(r.output_rows), f"{r.retained_mass:.4f}",
             f"{r.mass_per_token:.6f}", f"{r.kv_cache_ratio:.3f}",
             f"{r.first_token_ratio:.3f}", f"{r.next_token_ratio:.3f}")
            for r in rows
        ]
        widths = [max(len(row[i]) for row in table) for i in range(len(head))]
        text_report = "\n".join(
            "  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                      for i, (c, w) in enumerate(zip(row, widths)))
            for row in table
        ) + "\n"
        return schemas.CompareResponse(n_total=n, rows=rows, report_text=text_report)

    return app
