"""Kernel backend selection.

Imports the compiled extension when present, otherwise falls back to the
numpy implementations. Both expose the same functions with bit-identical
results; only speed differs. `BACKEND` tells you which one you got.
"""

from . import pure

try:
    from . import _native as _impl  # type: ignore[attr-defined]
except ImportError:
    _impl = pure

BACKEND = _impl.BACKEND

splitmix64 = _impl.splitmix64
fnv1a64 = _impl.fnv1a64
fnv1a64_many = _impl.fnv1a64_many
hll_update = _impl.hll_update
sample_indices = _impl.sample_indices

__all__ = [
    "BACKEND",
    "pure",
    "splitmix64",
    "fnv1a64",
    "fnv1a64_many",
    "hll_update",
    "sample_indices",
]
