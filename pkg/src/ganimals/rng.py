"""Pinned deterministic PRNG for replayable sampling.

The engine pins xoshiro256** (Blackman & Vigna) with splitmix64 seeding,
implemented here over plain Python integers so the draw sequence is
bit-identical across platforms and interpreter versions.  Stdlib and numpy
generators are deliberately avoided for anything replay-visible: their
distribution streams are not pinned across versions.

Streams are cheap to derive: every randomized operation in the service takes
a fresh stream keyed by (master seed, purpose, identifiers), which is what
makes event-log replay independent of generator state.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> tuple[int, int]:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x, (z ^ (z >> 31)) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from an arbitrary tuple of labels/ints."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(repr(p).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


class RngState:
    """xoshiro256** stream; identical seed => identical draw sequence."""

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        x = seed & _MASK64
        s = []
        for _ in range(4):
            x, word = _splitmix64(x)
            s.append(word)
        if not any(s):  # all-zero state is the one forbidden state
            s[0] = 0x9E3779B97F4A7C15
        self._s = s

    @classmethod
    def from_key(cls, *parts: object) -> "RngState":
        return cls(derive_seed(*parts))

    def u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.u64() >> 11) * (2.0 ** -53)

    def raw_bytes(self, n: int) -> bytes:
        """n pseudo-random bytes (little-endian u64 draws, truncated)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        out = bytearray()
        while len(out) < n:
            out += self.u64().to_bytes(8, "little")
        return bytes(out[:n])

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("randrange() arg must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.u64()
            if u < limit:
                return u % n

    def choice(self, seq):
        if not seq:
            raise IndexError("choice from empty sequence")
        return seq[self.randrange(len(seq))]

    def distinct_pair(self, n: int) -> tuple[int, int]:
        """Uniform unordered pair of distinct indices in [0, n)."""
        if n < 2:
            raise ValueError("need n >= 2 for a distinct pair")
        i = self.randrange(n)
        j = self.randrange(n - 1)
        if j >= i:
            j += 1
        return i, j

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def weighted_index(self, weights) -> int:
        """Index drawn proportional to non-negative weights."""
        total = float(sum(weights))
        if total <= 0.0:
            raise ValueError("weights must have positive sum")
        r = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                return i
        return len(weights) - 1
