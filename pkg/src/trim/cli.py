"""Command-line client for the reduction pipeline and cost model.

Each command packs its inputs into a service request, runs it against an
in-process service instance (or a remote one via ``--server``), and writes
the returned artifacts next to a short report. Everything is deterministic
given the flags; the random baseline requires an explicit seed.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import click

from .client import ServiceError, call_service


def _read_file_b64(path: str) -> str:
    try:
        return base64.b64encode(Path(path).read_bytes()).decode("ascii")
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc.strerror or exc}")


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{path}: invalid JSON ({exc})")


def _post(path: str, payload: dict, server: str | None) -> dict:
    try:
        return call_service(path, payload, server=server)
    except ServiceError as exc:
        raise click.ClickException(str(exc))
    except OSError as exc:
        raise click.ClickException(f"cannot reach service: {exc}")


def _write(path: Path, data: bytes | str) -> None:
    try:
        if isinstance(data, str):
            path.write_text(data)
        else:
            path.write_bytes(data)
    except OSError as exc:
        raise click.ClickException(f"cannot write {path}: {exc.strerror or exc}")


_server_option = click.option(
    "--server", default=None, metavar="URL",
    help="Base URL of a running service; default runs in-process.",
)
_format_option = click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text",
    help="Report style printed to stdout.",
)


@click.group()
@click.version_option(package_name="trim")
def main() -> None:
    """Visual token reduction and inference-cost estimation."""


@main.command()
@click.option("--image-tokens", required=True, metavar="PATH", help="Token matrix tensor file.")
@click.option("--text-embedding", required=True, metavar="PATH", help="Pooled text tensor file.")
@click.option("--strategy", default="iqr", show_default=True,
              help="iqr | topk:R | random:R:SEED | pool:R")
@click.option("--out", required=True, metavar="DIR", help="Output directory.")
@_format_option
@_server_option
def reduce(image_tokens: str, text_embedding: str, strategy: str, out: str,
           fmt: str, server: str | None) -> None:
    """Score, select, and reduce a token matrix; writes tensor + sidecar."""
    payload = {
        "image_tokens": _read_file_b64(image_tokens),
        "text_embedding": _read_file_b64(text_embedding),
        "strategy": strategy,
    }
    result = _post("/v1/reduce", payload, server)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tensor_path = out_dir / "reduced.trimt"
    sidecar_path = out_dir / "reduced.json"
    _write(tensor_path, base64.b64decode(result["reduced_tensor"]))
    _write(sidecar_path, json.dumps(result["sidecar"], indent=2) + "\n")
    if fmt == "json":
        click.echo(json.dumps({"summary": result["summary"],
                               "outputs": [str(tensor_path), str(sidecar_path)]}, indent=2))
    else:
        click.echo(result["report_text"], nl=False)
        click.echo(f"wrote {tensor_path} and {sidecar_path}")


@main.command()
@click.option("--image-tokens", required=True, metavar="PATH")
@click.option("--text-embedding", required=True, metavar="PATH")
@click.option("--out", required=True, metavar="DIR", help="Output directory.")
@_format_option
@_server_option
def heatmap(image_tokens: str, text_embedding: str, out: str,
            fmt: str, server: str | None) -> None:
    """Write the similarity grid as a text matrix and a PGM graymap."""
    payload = {
        "image_tokens": _read_file_b64(image_tokens),
        "text_embedding": _read_file_b64(text_embedding),
    }
    result = _post("/v1/heatmap", payload, server)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    txt_path = out_dir / "heatmap.txt"
    pgm_path = out_dir / "heatmap.pgm"
    _write(txt_path, result["grid_text"])
    _write(pgm_path, base64.b64decode(result["pgm"]))
    if fmt == "json":
        click.echo(json.dumps({"grid_side": result["grid_side"],
                               "outputs": [str(txt_path), str(pgm_path)]}, indent=2))
    else:
        click.echo(f"grid: {result['grid_side']}x{result['grid_side']}")
        click.echo(f"wrote {txt_path} and {pgm_path}")


@main.command()
@click.option("--baseline-tokens", type=int, default=None,
              help="Total baseline prompt tokens (visual + text).")
@click.option("--reduced-tokens", type=int, default=None,
              help="Total reduced prompt tokens (visual + text).")
@click.option("--sidecar", "sidecar_path", default=None, metavar="PATH",
              help="Take token counts from a reduce sidecar instead of flags.")
@click.option("--text-len", type=int, default=40, show_default=True,
              help="Text prompt tokens included in both counts.")
@click.option("--model-spec", default=None, metavar="PATH",
              help="Model spec JSON; default is the 7B-class preset.")
@click.option("--hw-spec", default=None, metavar="PATH",
              help="Hardware spec JSON; default is the V100-class preset.")
@click.option("--precision", type=click.Choice(["fp16", "int8"]), default="fp16",
              show_default=True)
@_format_option
@_server_option
def cost(baseline_tokens: int | None, reduced_tokens: int | None,
         sidecar_path: str | None, text_len: int, model_spec: str | None,
         hw_spec: str | None, precision: str, fmt: str, server: str | None) -> None:
    """Estimate memory and latency at two prompt lengths and their ratios."""
    if sidecar_path is not None:
        sidecar = _read_json(sidecar_path)
        try:
            source_n = int(sidecar["source_n"])
            output_rows = len(sidecar["kept_indices"]) + bool(sidecar["has_aggregate"])
        except (KeyError, TypeError) as exc:
            raise click.ClickException(f"{sidecar_path}: not a reduce sidecar ({exc})")
        baseline_tokens = baseline_tokens or source_n + text_len
        reduced_tokens = reduced_tokens or output_rows + text_len
    if baseline_tokens is None or reduced_tokens is None:
        raise click.ClickException(
            "token counts required: pass --baseline-tokens/--reduced-tokens or --sidecar"
        )
    payload = {
        "baseline_tokens": baseline_tokens,
        "reduced_tokens": reduced_tokens,
        "text_len": text_len,
        "precision": precision,
        "model_spec": _read_json(model_spec) if model_spec else None,
        "hw_spec": _read_json(hw_spec) if hw_spec else None,
    }
    result = _post("/v1/cost", payload, server)
    if fmt == "json":
        result.pop("report_text")
        click.echo(json.dumps(result, indent=2))
    else:
        click.echo(result["report_text"], nl=False)


@main.command()
@click.option("--image-tokens", required=True, metavar="PATH")
@click.option("--text-embedding", required=True, metavar="PATH")
@click.option("--ratio", type=float, required=True,
              help="Token budget for the topk/random/pool rows, in (0, 1].")
@click.option("--seed", type=int, required=True, help="Seed for the random baseline.")
@click.option("--text-len", type=int, default=40, show_default=True)
@click.option("--model-spec", default=None, metavar="PATH")
@click.option("--hw-spec", default=None, metavar="PATH")
@click.option("--precision", type=click.Choice(["fp16", "int8"]), default="fp16",
              show_default=True)
@_format_option
@_server_option
def compare(image_tokens: str, text_embedding: str, ratio: float, seed: int,
            text_len: int, model_spec: str | None, hw_spec: str | None,
            precision: str, fmt: str, server: str | None) -> None:
    """Run all four strategies on one input; one row per strategy."""
    payload = {
        "image_tokens": _read_file_b64(image_tokens),
        "text_embedding": _read_file_b64(text_embedding),
        "ratio": ratio,
        "seed": seed,
        "text_len": text_len,
        "precision": precision,
        "model_spec": _read_json(model_spec) if model_spec else None,
        "hw_spec": _read_json(hw_spec) if hw_spec else None,
    }
    result = _post("/v1/compare", payload, server)
    if fmt == "json":
        click.echo(json.dumps({"n_total": result["n_total"], "rows": result["rows"]}, indent=2))
    else:
        click.echo(result["report_text"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
