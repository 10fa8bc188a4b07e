"""Pure-numpy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable.
Both backends must produce bit-identical results: the pipeline's
determinism contract (same config + seed => byte-identical output
documents) has to hold regardless of which backend got selected at
import time.

Kernels:
    splitmix64        - vectorized 64-bit mix, used to hash integer columns
                        and to derive per-position sampling keys
    fnv1a64           - FNV-1a over UTF-8 bytes, used for everything that
                        is not an integer
    hll_update        - scatter-max of rank values into HLL registers
    sample_indices    - bottom-k-by-random-key uniform sample without
                        replacement (positions, sorted ascending)
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_U64 = np.uint64
_MASK64 = _U64(0xFFFFFFFFFFFFFFFF)

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to a uint64 array."""
    x = x.astype(_U64, copy=True)
    with np.errstate(over="ignore"):
        x += _U64(0x9E3779B97F4B7C15)
        x = (x ^ (x >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> _U64(27))) * _U64(0x94D049BB133111EB)
        x = x ^ (x >> _U64(31))
    return x


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def fnv1a64_many(items: list[bytes]) -> np.ndarray:
    out = np.empty(len(items), dtype=_U64)
    for i, data in enumerate(items):
        out[i] = fnv1a64(data)
    return out


def _clz64(w: np.ndarray) -> np.ndarray:
    """Exact count-of-leading-zeros for a uint64 array (no float tricks)."""
    bl = np.zeros(w.shape, dtype=_U64)
    v = w.copy()
    for s in (32, 16, 8, 4, 2, 1):
        big = v >= (_U64(1) << _U64(s))
        bl[big] += _U64(s)
        v[big] >>= _U64(s)
    bl += (v > 0).astype(_U64)
    return _U64(64) - bl


def hll_update(registers: np.ndarray, hashes: np.ndarray, p: int) -> None:
    """Fold a batch of 64-bit hashes into 2**p uint8 HLL registers."""
    if hashes.size == 0:
        return
    h = hashes.astype(_U64, copy=False)
    idx = (h >> _U64(64 - p)).astype(np.int64)
    with np.errstate(over="ignore"):
        w = (h << _U64(p)) & _MASK64
    rho = np.where(w == 0, _U64(64 - p + 1), _clz64(w) + _U64(1)).astype(np.uint8)
    np.maximum.at(registers, idx, rho)


def sample_indices(n: int, k: int, seed: int) -> np.ndarray:
    """Positions of the k smallest per-position random keys, sorted.

    Keys are splitmix64(seed' ^ i), which is injective in i for fixed seed,
    so there are never ties and the selected set is unique.
    """
    if k >= n:
        return np.arange(n, dtype=np.int64)
    base = splitmix64(np.array([seed], dtype=np.int64).astype(_U64))[0]
    keys = splitmix64(np.arange(n, dtype=_U64) ^ base)
    picked = np.argpartition(keys, k)[:k]
    picked.sort()
    return picked.astype(np.int64)
