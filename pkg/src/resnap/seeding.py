"""Deterministic child-seed derivation.

Child seeds come from hashing the master seed together with a component
name and index, which gives every tree, fold, and experiment cell its own
reproducible stream without correlating them.
"""
from __future__ import annotations

import hashlib


def derive_seed(master: int, *parts) -> int:
    """Stable 32-bit child seed from the master seed plus any labels."""
    text = "|".join(str(p) for p in (master, *parts))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")
