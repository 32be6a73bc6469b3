"""xorshift64 generator used for every pseudo-random input sequence.

Python's ``random`` is not used so that the vector sequence stays fixed by
this file alone and is easy to reproduce in any other tool.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


class Xorshift64:
    """Marsaglia xorshift64 with shifts (13, 7, 17)."""

    def __init__(self, seed: int = 1):
        state = seed & _MASK64
        if state == 0:
            raise ValueError("xorshift64 seed must be nonzero modulo 2**64")
        self.state = state

    def next(self) -> int:
        x = self.state
        x ^= (x << 13) & _MASK64
        x ^= x >> 7
        x ^= (x << 17) & _MASK64
        self.state = x
        return x

    def vector(self, n: int) -> tuple[int, ...]:
        """Draw one ``n``-bit input vector, first input from the most significant bit.

        One 64-bit draw covers up to 64 inputs; its low ``n`` bits are used.
        """
        draws = max(1, -(-n // 64))
        value = 0
        for _ in range(draws):
            value = (value << 64) | self.next()
        return tuple((value >> (n - 1 - k)) & 1 for k in range(n))


def random_vectors(n_inputs: int, count: int, seed: int = 1) -> list[tuple[int, ...]]:
    gen = Xorshift64(seed)
    return [gen.vector(n_inputs) for _ in range(count)]


def pack_vectors(vectors, n_inputs: int) -> tuple[list[int], int]:
    """Transpose vectors into per-input words; bit ``t`` of each word is vector ``t``."""
    words = [0] * n_inputs
    for t, vec in enumerate(vectors):
        for k, bit in enumerate(vec):
            if bit:
                words[k] |= 1 << t
    return words, (1 << len(vectors)) - 1
