"""Chaos-map image encryption, CA diffusion, framelet steganography, metrics."""

from .chaos import HybridMap, HybridMapConfig, case_config, load_config
from .cipher import CipherHeader, decrypt, encrypt
from .imgio import ImageBuffer, load, save
from .keygen import KeySpace, generate_keys, load_keys, save_keys
from .stego import EmbedPlan, embed, embed_binary, embed_gray, extract, extract_gray

__version__ = "0.1.0"

__all__ = [
    "CipherHeader",
    "EmbedPlan",
    "HybridMap",
    "HybridMapConfig",
    "ImageBuffer",
    "KeySpace",
    "case_config",
    "decrypt",
    "embed",
    "embed_binary",
    "embed_gray",
    "encrypt",
    "extract",
    "extract_gray",
    "generate_keys",
    "load",
    "load_config",
    "load_keys",
    "save",
    "save_keys",
    "__version__",
]
