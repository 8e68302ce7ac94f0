"""
dS QFT Lab - Utility Functions

Hashing, canonical serialization and small numeric helpers used across the package.
"""

import hashlib
import json
from typing import Any

import numpy as np


# ============================================================================
# Hashing
# ============================================================================

def sha256_hash(data: str) -> str:
    """Compute SHA-256 hash of string data."""
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


def json_serialize(obj: Any) -> str:
    """Serialize object to canonical JSON string."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def canonical_hash(obj: Any) -> str:
    """Prefixed SHA-256 of the canonical JSON form of obj."""
    return f"sha256:{sha256_hash(json_serialize(obj))}"


def seed_from_hash(digest: str) -> int:
    """Deterministic 32-bit RNG seed derived from a prefixed hash."""
    hex_part = digest.split(":", 1)[-1]
    return int(hex_part[:8], 16)


# ============================================================================
# Numeric helpers
# ============================================================================

def mode_indices(K: int) -> np.ndarray:
    """Fourier mode numbers -K..K in storage order."""
    return np.arange(-K, K + 1)


def max_abs(a: np.ndarray) -> float:
    """Largest entry modulus, 0 for empty arrays."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def wrap_angle(theta: float) -> float:
    """Representative of theta mod 2*pi in [0, 2*pi)."""
    two_pi = 2.0 * np.pi
    value = float(np.mod(theta, two_pi))
    return 0.0 if value >= two_pi else value
