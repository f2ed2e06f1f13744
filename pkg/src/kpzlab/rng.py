"""Deterministic random-number streams.

Every stochastic routine in this package draws from an :class:`RngStream`,
which names a ``(master_seed, stream_index)`` pair.  Replaying a stream
reproduces its draws bit for bit regardless of what other streams were
consumed, which is what makes run manifests reproducible.

Two consumers exist side by side:

* numpy code uses :meth:`RngStream.generator` (PCG64 seeded through
  ``SeedSequence`` so distinct stream indices are independent);
* numba kernels cannot hold a ``Generator``, so they get plain ``uint64``
  seeds (:meth:`RngStream.kernel_seeds`) and run the splitmix64 helpers
  below.  splitmix64 passes BigCrush and is trivially reproducible across
  platforms, which matters more here than raw period.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM64_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_MUL2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = float(2.0 ** -53)


@dataclass(frozen=True)
class RngStream:
    """A named, replayable source of randomness."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.stream_index < 0:
            raise ValueError("master_seed and stream_index must be non-negative")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream_index,)
        )

    def generator(self) -> np.random.Generator:
        """Fresh numpy generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def kernel_seeds(self, n: int) -> np.ndarray:
        """``n`` uint64 seeds for numba kernels (one per run)."""
        if n <= 0:
            raise ValueError("need at least one seed")
        return self.seed_sequence().generate_state(n, np.uint64)

    def child(self, offset: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_index + offset)


# Explicit unsigned signatures: without them a state value with the top bit
# set boxes as a negative Python int and numba specializes the next call for
# int64, silently promoting the mixed arithmetic to float64.
@njit("UniTuple(uint64, 2)(uint64)", cache=True)
def sm64_next(state):
    """Advance splitmix64; returns (new_state, uint64 output)."""
    state = state + _SM64_GAMMA
    z = state
    z = (z ^ (z >> np.uint64(30))) * _SM64_MUL1
    z = (z ^ (z >> np.uint64(27))) * _SM64_MUL2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit("Tuple((uint64, float64))(uint64)", cache=True)
def sm64_unit01(state):
    """Uniform on [0, 1) with 53-bit resolution."""
    state, z = sm64_next(state)
    return state, float(z >> np.uint64(11)) * _TWO_M53


@njit("Tuple((uint64, float64))(uint64)", cache=True)
def sm64_exponential(state):
    """Standard exponential variate (rate 1)."""
    state, z = sm64_next(state)
    u = (float(z >> np.uint64(11)) + 1.0) * _TWO_M53  # in (0, 1]
    return state, -np.log(u)


@njit("Tuple((uint64, int64))(uint64, int64)", cache=True)
def sm64_index(state, n):
    """Uniform integer in [0, n).  Modulo bias is ~n/2**64, irrelevant here."""
    state, z = sm64_next(state)
    return state, np.int64(z % np.uint64(n))


@njit("Tuple((uint64, float64, float64))(uint64)", cache=True)
def sm64_normal_pair(state):
    """Two independent standard normals (Marsaglia polar method)."""
    while True:
        state, u = sm64_unit01(state)
        state, v = sm64_unit01(state)
        x = 2.0 * u - 1.0
        y = 2.0 * v - 1.0
        s = x * x + y * y
        if 0.0 < s < 1.0:
            f = np.sqrt(-2.0 * np.log(s) / s)
            return state, x * f, y * f
