"""SplitMix64: the fixed 64-bit PRNG behind every seeded generator."""

from __future__ import annotations

from .errors import PreconditionError

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG.

    State update: s += 0x9E3779B97F4A7C15 (mod 2^64). Output mix:
    z = s; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31).
    Bounded draws use plain modulo so any implementation of the same
    constants reproduces identical instances.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise PreconditionError("below() needs a positive bound")
        return self.next64() % n

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def distinct(self, k: int, n: int) -> list[int]:
        """k distinct values from range(n), in draw order."""
        if k > n:
            raise PreconditionError("cannot draw more distinct values than the range")
        seen: set[int] = set()
        out = []
        while len(out) < k:
            v = self.below(n)
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out


