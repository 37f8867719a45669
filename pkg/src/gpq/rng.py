"""Seeded, counter-based pseudorandom generation.

Everything random in this package flows through splitmix64 so that results
are reproducible from a single 64-bit seed and independent of call order
(the stream is a pure function of (seed, counter)).
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# 2^-53; uniforms live on a 53-bit grid like IEEE doubles
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(x):
    """splitmix64 finalizer, elementwise over uint64 arrays or scalars.
    uint64 arithmetic wraps mod 2^64 by design."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64).copy()
        z ^= z >> np.uint64(30)
        z *= _MIX1
        z ^= z >> np.uint64(27)
        z *= _MIX2
        z ^= z >> np.uint64(31)
        return z


def derive_seed(seed: int, *parts: int) -> int:
    """Derive a child seed from a base seed and integer labels.

    Used for per-group and per-restart streams so concurrent work is
    schedule-independent.
    """
    h = np.uint64(seed & _MASK)
    for p in parts:
        with np.errstate(over="ignore"):
            h = mix64(h + _GOLDEN * np.uint64(p & _MASK) + _GOLDEN)
    return int(mix64(h))


def row_hashes(points: np.ndarray, seed: int) -> np.ndarray:
    """64-bit content hash of each row of a float64 matrix.

    Identical rows hash identically, which makes hash-keyed sampling
    independent of row order.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    bits = pts.view(np.uint64)
    h = np.full(pts.shape[0], mix64(np.uint64(seed & _MASK)), dtype=np.uint64)
    for j in range(pts.shape[1]):
        h = mix64(h ^ bits[:, j])
    return h


class SplitMix64:
    """Counter-based splitmix64 stream with uniform and Gaussian output."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & _MASK)
        self._ctr = 0

    def next_u64(self, n: int) -> np.ndarray:
        idx = np.arange(self._ctr, self._ctr + n, dtype=np.uint64)
        self._ctr += n
        with np.errstate(over="ignore"):
            return mix64(self._seed + _GOLDEN * (idx + np.uint64(1)))

    def uniforms(self, n: int) -> np.ndarray:
        """n uniforms in [0, 1)."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def uniforms_open(self, n: int) -> np.ndarray:
        """n uniforms in (0, 1]; safe to feed into log."""
        x = (self.next_u64(n) >> np.uint64(11)).astype(np.float64)
        return (x + 1.0) * _INV_2_53

    def normals(self, n: int) -> np.ndarray:
        """n standard normal deviates via the Box-Muller transform."""
        k = (n + 1) // 2
        u1 = self.uniforms_open(k)
        u2 = self.uniforms(k)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * k, dtype=np.float64)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]
