"""Labeled seed derivation: one root seed, independent streams per purpose."""

from __future__ import annotations

import hashlib

import numpy as np


def fork_seed(root: int, label: str, *index: int | str) -> int:
    """Derive a 63-bit seed from ``root`` and a purpose label.

    Stable across processes and platforms (no reliance on ``hash()``).
    """
    text = ":".join([str(int(root)), label, *map(str, index)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def counter_rng(seed: int, digest: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, request digest).

    Philox draws depend only on the key, so results do not depend on which
    worker handles a request or in what order.
    """
    material = hashlib.sha256(f"{int(seed)}:{digest}".encode("utf-8")).digest()
    key = [int.from_bytes(material[:8], "little"), int.from_bytes(material[8:16], "little")]
    return np.random.Generator(np.random.Philox(key=key))
