"""Counter-based deterministic random numbers.

Every random quantity in this package is derived from a 64-bit key through
the splitmix64 output function, so that a (master seed, sample size, trial)
triple always reproduces the same data on any platform.  Streams are pure
counters: no hidden global state, safe to use from concurrent tasks.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def mix(*parts: int) -> int:
    """Fold integers into one 64-bit key (order-sensitive)."""
    z = 0
    for part in parts:
        z = _finalize(z + _GAMMA + (int(part) & _MASK64))
    return z


def _mix_array(z: np.ndarray) -> np.ndarray:
    # vectorized splitmix64 finalizer; uint64 arithmetic wraps mod 2**64
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


class Stream:
    """Keyed counter stream of 64-bit words, uniforms and normals."""

    def __init__(self, key: int):
        self.key = int(key) & _MASK64
        self._counter = 0

    def words(self, count: int) -> np.ndarray:
        """Next `count` raw 64-bit words as a uint64 array."""
        idx = np.arange(self._counter + 1, self._counter + count + 1, dtype=np.uint64)
        self._counter += count
        with np.errstate(over="ignore"):
            state = np.uint64(self.key) + idx * np.uint64(_GAMMA)
        return _mix_array(state)

    def uniforms(self, count: int) -> np.ndarray:
        """I.i.d. uniforms on (0, 1], 53-bit resolution."""
        return ((self.words(count) >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53

    def normals(self, count: int) -> np.ndarray:
        """I.i.d. standard normals via the Box-Muller transform."""
        pairs = (count + 1) // 2
        u1 = self.uniforms(pairs)
        u2 = self.uniforms(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        return z[:count]

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n)."""
        return np.argsort(self.uniforms(n), kind="stable")
