import json
from pathlib import Path

import pytest
import torch
from transformers import CLIPConfig, CLIPImageProcessor, CLIPModel, CLIPTokenizer

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _byte_alphabet() -> list[str]:
    """The byte-to-unicode alphabet used by CLIP's byte-level BPE."""
    bs = (list(range(ord("!"), ord("~") + 1))
          + list(range(ord("\xa1"), ord("\xac") + 1))
          + list(range(ord("\xae"), ord("\xff") + 1)))
    cs = bs[:]
    n = 0
    for b in range(2**8):
        if b not in bs:
            bs.append(b)
            cs.append(2**8 + n)
            n += 1
    return [chr(c) for c in cs]


def build_tiny_checkpoint(dest: Path, image_size: int, seed: int = 0) -> Path:
    """Save a small randomly initialized CLIP checkpoint with a
    character-level tokenizer; loads through the standard from_pretrained
    path exactly like a published checkpoint."""
    vocab = {"<|startoftext|>": 0, "<|endoftext|>": 1}
    for ch in _byte_alphabet():
        vocab[ch] = len(vocab)
    for ch in _byte_alphabet():
        vocab[ch + "</w>"] = len(vocab)
    tokenizer = CLIPTokenizer(vocab=vocab, merges=[])

    torch.manual_seed(seed)
    config = CLIPConfig(
        projection_dim=16,
        text_config=dict(
            hidden_size=32, intermediate_size=64, num_hidden_layers=2,
            num_attention_heads=2, max_position_embeddings=77,
            vocab_size=len(vocab), bos_token_id=0, eos_token_id=1, pad_token_id=1,
        ),
        vision_config=dict(
            hidden_size=32, intermediate_size=64, num_hidden_layers=2,
            num_attention_heads=2, image_size=image_size, patch_size=14,
        ),
    )
    model = CLIPModel(config)
    model.eval()
    processor = CLIPImageProcessor(
        size={"shortest_edge": image_size},
        crop_size={"height": image_size, "width": image_size},
    )
    dest.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(dest)
    tokenizer.save_pretrained(dest)
    processor.save_pretrained(dest)
    return dest


@pytest.fixture(scope="session")
def checkpoint_336(tmp_path_factory) -> Path:
    return build_tiny_checkpoint(tmp_path_factory.mktemp("ckpt336"), image_size=336)


@pytest.fixture(scope="session")
def checkpoint_224(tmp_path_factory) -> Path:
    return build_tiny_checkpoint(tmp_path_factory.mktemp("ckpt224"), image_size=224)


@pytest.fixture(scope="session")
def sample_image() -> Path:
    return FIXTURES / "sample_336.png"


@pytest.fixture(scope="session")
def sample_annotation() -> dict:
    return json.loads((FIXTURES / "sample_336.json").read_text())
