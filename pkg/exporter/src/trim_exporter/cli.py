"""Command-line entry point for the embedding exporter."""

from __future__ import annotations

import click

from .export import ExportError, export_pair


@click.command()
@click.option("--image", required=True, metavar="PATH", help="Image file to encode.")
@click.option("--prompt", required=True, help="Text prompt to encode.")
@click.option("--checkpoint", required=True, metavar="ID",
              help="CLIP checkpoint: hub id or local directory.")
@click.option("--out", required=True, metavar="DIR", help="Output directory.")
def main(image: str, prompt: str, checkpoint: str, out: str) -> None:
    """Export CLIP patch and pooled-text embeddings as tensor files."""
    try:
        manifest = export_pair(image, prompt, checkpoint, out)
    except ExportError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"exported {manifest.grid_side}x{manifest.grid_side} patch grid "
        f"(dim {manifest.embedding_dim}) to {out}"
    )


if __name__ == "__main__":
    main()
