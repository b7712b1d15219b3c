"""Deterministic counter-based random streams.

Every stochastic component (episode layout, target motion, switcher noise,
action sampling) draws from its own stream derived from a (master seed,
stream id) pair, so results are reproducible no matter how environments are
interleaved or parallelized.
"""
from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    """splitmix64 finalizer: avalanches a 64-bit value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """splitmix64 generator whose seed is mixed from (master_seed, stream_id).

    Distinct stream ids under the same master seed give statistically
    independent sequences; identical (seed, id) pairs replay identically.
    """

    __slots__ = ("_state",)

    def __init__(self, master_seed: int, stream_id: int = 0):
        self._state = _mix((master_seed ^ (_GOLDEN * stream_id)) & _MASK64)

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, RngStream) and self._state == other._state

    def __repr__(self) -> str:
        return f"RngStream(state=0x{self._state:016x})"
