"""Counter-based random streams.

Every value is a pure function of ``(seed, stream, counter, draw)``, so a
sample can be regenerated from its id alone and parallel workers never share
generator state. Mixing follows splitmix64.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

from treelike_geometry.core_types import check_seed

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL_1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL_2 = np.uint64(0x94D049BB133111EB)
_DRAW_STEP = np.uint64(0xD1B54A32D192ED03)
_TWO_POW_M53 = 1.0 / float(1 << 53)


class Stream(IntEnum):
    QUADRUPLES = 1
    TRIPLES = 2
    TRIPLE_ORDER = 3
    SPHERE = 4
    DISK = 5
    TREE = 6
    ULTRAMETRIC = 7


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MUL_1
    z = (z ^ (z >> np.uint64(27))) * _MUL_2
    return z ^ (z >> np.uint64(31))


class CounterStream:
    def __init__(self, seed: int, stream: Stream) -> None:
        self.seed = check_seed(seed)
        self.stream = stream
        with np.errstate(over="ignore"):
            base = np.array([self.seed], dtype=np.uint64)
            base = base + np.array([int(stream)], dtype=np.uint64) * _GOLDEN
            self._key = _mix(_mix(base))

    def bits(self, counters: np.ndarray | int, draw: np.ndarray | int = 0) -> np.ndarray:
        counters = np.atleast_1d(np.asarray(counters, dtype=np.uint64))
        draws = np.broadcast_to(np.asarray(draw, dtype=np.uint64), counters.shape)
        with np.errstate(over="ignore"):
            z = self._key + counters * _GOLDEN + draws * _DRAW_STEP
            return _mix(_mix(z))

    def uniform(self, counters: np.ndarray | int, draw: np.ndarray | int = 0) -> np.ndarray:
        """Floats in [0, 1) with 53 random bits."""
        return (self.bits(counters, draw) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53

    def integers(self, counters: np.ndarray | int, draw: np.ndarray | int, high: int) -> np.ndarray:
        """Integers in [0, high)."""
        values = np.floor(self.uniform(counters, draw) * high).astype(np.int64)
        return np.minimum(values, high - 1)

    def normal(self, counters: np.ndarray | int, draw: int = 0) -> np.ndarray:
        """Standard normals by Box–Muller over two consecutive draws."""
        u1 = 1.0 - self.uniform(counters, 2 * draw)
        u2 = self.uniform(counters, 2 * draw + 1)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
