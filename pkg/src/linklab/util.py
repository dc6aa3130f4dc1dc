"""Deterministic hashing helpers shared across the pipeline."""

from __future__ import annotations

import hashlib
import json


def stable_seed(*parts) -> int:
    """Derive a 63-bit seed from arbitrary parts, stable across processes."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.blake2s(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") & 0x7FFF_FFFF_FFFF_FFFF


def example_id(repo_id: str, key_a: str, key_b: str) -> str:
    """Stable 16-hex-char id for an unordered issue pair."""
    text = "\x1f".join((repo_id, key_a, key_b))
    return hashlib.blake2s(text.encode("utf-8"), digest_size=8).hexdigest()


def config_hash(config: dict) -> str:
    """Hash of a JSON-serializable config, invariant to key order."""
    canon = json.dumps(config, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
