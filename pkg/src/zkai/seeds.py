"""Domain-separated seed derivation: one root seed feeds every random stream."""

from __future__ import annotations

import hashlib
import os
import random

import numpy as np

from .field import P

SEED_ENV = "ZKAI_SEED"


def _root_bytes(root) -> bytes:
    if isinstance(root, bytes):
        return root
    return str(root).encode()


def derive_bytes(root, *labels) -> bytes:
    h = hashlib.sha256(b"zkai/seed\x00" + _root_bytes(root))
    for label in labels:
        h.update(b"\x00" + str(label).encode())
    return h.digest()


def derive_int(root, *labels, modulus: int = P) -> int:
    """Uniform-ish nonzero integer mod ``modulus`` (512 bits folded down)."""
    wide = derive_bytes(root, *labels, "hi") + derive_bytes(root, *labels, "lo")
    v = int.from_bytes(wide, "big") % modulus
    return v or 1


def derive_rng(root, *labels) -> random.Random:
    return random.Random(int.from_bytes(derive_bytes(root, *labels), "big"))


def derive_np(root, *labels) -> np.random.Generator:
    return np.random.default_rng(int.from_bytes(derive_bytes(root, *labels)[:16], "big"))


def seed_from_env(default: int | None = None) -> int | None:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else default
