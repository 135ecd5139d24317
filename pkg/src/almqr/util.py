"""Shared small utilities: deterministic RNG streams and canonical JSON."""

from __future__ import annotations

import hashlib
import json

import numpy as np


def seeded_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for a (seed, task-path) pair; streams are independent per path."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]
