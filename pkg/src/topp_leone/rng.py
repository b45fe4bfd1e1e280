"""Counter-based uniform streams for reproducible, parallel-safe replicates.

Replicate ``r`` of a study with seed ``s`` draws from Philox4x64-10 keyed by
``(s, r)``; draw ``j`` is word ``j % 4`` of the block at counter
``j // 4 + 1``. This is bit-compatible with
``numpy.random.Philox(key=[s, r])``, but evaluated on whole arrays of keys
at once so thousands of replicates cost a handful of numpy calls.

Each 64-bit word ``w`` maps to ``((w >> 12) + 0.5) / 2**52``, which lies
strictly inside (0, 1).
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = [
    "GENERATOR",
    "philox4x64",
    "raw_block",
    "uniform_block",
    "PhiloxStream",
    "replicate_stream",
]

GENERATOR = "philox4x64-10/key=(seed,replicate)/u=((w>>12)+0.5)*2^-52"

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S12 = np.uint64(12)
_ROUNDS = 10


def _mulhilo(a: np.ndarray, b: np.uint64):
    # 64x64 -> 128 bit product from 32-bit halves
    lo = a * b
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = a_hi * b_hi + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    return hi, lo


def philox4x64(counter, key):
    """Philox4x64-10 bijection on arrays.

    ``counter`` is a 4-tuple and ``key`` a 2-tuple of broadcastable uint64
    arrays; returns the 4 output words.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in counter)
    k0, k1 = (np.asarray(k, dtype=np.uint64) for k in key)
    with np.errstate(over="ignore"):
        for r in range(_ROUNDS):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(c0, _M0)
            hi1, lo1 = _mulhilo(c2, _M1)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


def _check_seed(seed) -> np.uint64:
    if int(seed) != seed or not 0 <= int(seed) < 2**64:
        raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return np.uint64(int(seed))


def raw_block(seed, indices, start: int, count: int) -> np.ndarray:
    """Raw 64-bit words ``start .. start+count-1`` of each replicate stream.

    Returns shape ``(len(indices), count)``.
    """
    s = _check_seed(seed)
    idx = np.asarray(indices, dtype=np.uint64).reshape(-1, 1)
    if count <= 0:
        return np.empty((idx.shape[0], 0), dtype=np.uint64)
    first = start // 4
    last = (start + count - 1) // 4
    blocks = np.arange(first + 1, last + 2, dtype=np.uint64)[None, :]
    zero = np.zeros(1, dtype=np.uint64)
    words = philox4x64((blocks, zero, zero, zero), (s, idx))
    shape = (idx.shape[0], blocks.shape[1])
    out = np.stack([np.broadcast_to(w, shape) for w in words], axis=-1)
    out = out.reshape(idx.shape[0], -1)
    off = start - 4 * first
    return out[:, off:off + count]


def _to_unit(words: np.ndarray) -> np.ndarray:
    return ((words >> _S12).astype(np.float64) + 0.5) * 2.0**-52


def uniform_block(seed, indices, count: int) -> np.ndarray:
    """First ``count`` uniforms of each listed replicate, shape ``(m, count)``."""
    if count < 1:
        raise DomainError("count must be >= 1")
    return _to_unit(raw_block(seed, indices, 0, count))


class PhiloxStream:
    """Sequential view of one replicate stream (``random(size)`` like numpy)."""

    name = GENERATOR

    def __init__(self, seed, index: int):
        _check_seed(seed)
        if int(index) != index or index < 0:
            raise DomainError(f"replicate index must be a nonnegative integer, got {index!r}")
        self.seed = int(seed)
        self.index = int(index)
        self.position = 0

    def random_raw(self, size: int) -> np.ndarray:
        words = raw_block(self.seed, [self.index], self.position, size)[0]
        self.position += size
        return words

    def random(self, size=None):
        if size is None:
            return float(_to_unit(self.random_raw(1))[0])
        return _to_unit(self.random_raw(int(size)))


def replicate_stream(seed, replicate_index: int) -> PhiloxStream:
    """The uniform stream of replicate ``replicate_index`` under ``seed``."""
    return PhiloxStream(seed, replicate_index)
