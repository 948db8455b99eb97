"""Platform-independent pseudo-random stream for reproducible splits.

SHA-256 in counter mode: block ``i`` is ``sha256(key || i as 8-byte big-endian)``,
consumed as four 64-bit big-endian words.  Bounded integers use rejection
sampling, shuffles are Fisher-Yates from the last index down.  Nothing here
depends on the Python version, the platform or ``random``'s internals.
"""
from __future__ import annotations

import hashlib
from typing import MutableSequence

ALGORITHM = "sha256-ctr/fisher-yates/v1"

_U64 = 1 << 64


def derive_key(seed: int, language: str) -> bytes:
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return hashlib.sha256(
        b"lemmasplit\x00" + seed.to_bytes(8, "big") + language.encode("utf-8")
    ).digest()


class HashStream:
    def __init__(self, key: bytes):
        self._key = key
        self._counter = 0
        self._words: list[int] = []

    def next_u64(self) -> int:
        if not self._words:
            block = hashlib.sha256(self._key + self._counter.to_bytes(8, "big")).digest()
            self._counter += 1
            self._words = [
                int.from_bytes(block[i : i + 8], "big") for i in range(24, -1, -8)
            ]
        return self._words.pop()

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _U64 - (_U64 % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, items: MutableSequence) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def stream_for(seed: int, language: str) -> HashStream:
    return HashStream(derive_key(seed, language))
