"""CLIP-to-tensor-file bridge for the trim pipeline."""

__version__ = "0.1.0"

from .export import ExportError, ExportManifest, encode_pair, export_pair
from .tensor_writer import encode_tensor, write_tensor

__all__ = [
    "__version__",
    "ExportError",
    "ExportManifest",
    "encode_pair",
    "export_pair",
    "encode_tensor",
    "write_tensor",
]
