"""Encode one (image, prompt) pair into joint-space embedding tensors.

The image side takes every patch token from the vision tower's final
layer, applies the final layernorm, and projects through the visual
projection head; the text side is the pooled end-of-text representation
after the text projection head. Both land in the checkpoint's shared
embedding dimension, so the downstream scorer needs no knowledge of
encoder internals.

Patch rows are emitted in row-major raster order (the order the vision
tower flattens its patch grid), and the class token is excluded: only the
spatial tokens are scored downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError
from transformers import CLIPImageProcessor, CLIPModel, CLIPTokenizer

PATCHES_FILENAME = "patches.trimt"
TEXT_FILENAME = "text.trimt"
MANIFEST_FILENAME = "manifest.json"


class ExportError(Exception):
    """Checkpoint loading or image decoding failed."""


@dataclass(frozen=True)
class ExportManifest:
    """What was exported, from where, and to where."""

    image: str
    prompt: str
    checkpoint: str
    patches_path: str
    text_path: str
    grid_side: int
    embedding_dim: int

    def to_dict(self) -> dict:
        return {
            "image": self.image,
            "prompt": self.prompt,
            "checkpoint": self.checkpoint,
            "patches_path": self.patches_path,
            "text_path": self.text_path,
            "grid_side": self.grid_side,
            "embedding_dim": self.embedding_dim,
        }


def _load_checkpoint(checkpoint: str) -> tuple[CLIPModel, CLIPImageProcessor, CLIPTokenizer]:
    try:
        model = CLIPModel.from_pretrained(checkpoint)
        processor = CLIPImageProcessor.from_pretrained(checkpoint)
        tokenizer = CLIPTokenizer.from_pretrained(checkpoint)
    except Exception as exc:  # transformers raises a zoo of types here
        raise ExportError(f"cannot load checkpoint {checkpoint!r}: {exc}") from exc
    model.eval()
    return model, processor, tokenizer


def _load_image(path: str | Path) -> Image.Image:
    try:
        with Image.open(path) as img:
            return img.convert("RGB")
    except (OSError, UnidentifiedImageError) as exc:
        raise ExportError(f"cannot decode image {path}: {exc}") from exc


@torch.no_grad()
def encode_pair(
    model: CLIPModel,
    processor: CLIPImageProcessor,
    tokenizer: CLIPTokenizer,
    image: Image.Image,
    prompt: str,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Run both encoders; returns (patches NxD, text 1xD, grid_side)."""
    pixel_values = processor(images=image, return_tensors="pt").pixel_values
    vision_out = model.vision_model(pixel_values)
    patch_states = vision_out.last_hidden_state[:, 1:, :]  # drop the class token
    patches = model.visual_projection(model.vision_model.post_layernorm(patch_states))[0]

    tokens = tokenizer(prompt, return_tensors="pt", truncation=True)
    text = model.get_text_features(**tokens)

    vision_cfg = model.config.vision_config
    grid_side = vision_cfg.image_size // vision_cfg.patch_size
    if patches.shape[0] != grid_side * grid_side:
        raise ExportError(
            f"vision tower produced {patches.shape[0]} patch tokens, "
            f"expected {grid_side * grid_side}"
        )
    return (
        patches.to(torch.float32).numpy(),
        text.to(torch.float32).numpy(),
        grid_side,
    )


def export_pair(
    image: str | Path, prompt: str, checkpoint: str, out_dir: str | Path
) -> ExportManifest:
    """Write patches.trimt, text.trimt, and manifest.json into out_dir."""
    from .tensor_writer import write_tensor

    model, processor, tokenizer = _load_checkpoint(checkpoint)
    pil_image = _load_image(image)
    patches, text, grid_side = encode_pair(model, processor, tokenizer, pil_image, prompt)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    patches_path = out / PATCHES_FILENAME
    text_path = out / TEXT_FILENAME
    write_tensor(patches_path, patches)
    write_tensor(text_path, text)

    manifest = ExportManifest(
        image=str(image),
        prompt=prompt,
        checkpoint=checkpoint,
        patches_path=str(patches_path),
        text_path=str(text_path),
        grid_side=grid_side,
        embedding_dim=int(patches.shape[1]),
    )
    (out / MANIFEST_FILENAME).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    return manifest
