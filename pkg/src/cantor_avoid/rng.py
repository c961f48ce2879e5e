"""Counter-based random stream.

Each draw is a keyed BLAKE2b hash of its coordinates, so the value for
(generation, attempt, cell) does not depend on evaluation order or on how
work is split between processes.
"""

from __future__ import annotations

import hashlib
import struct
from fractions import Fraction

_MASK64 = (1 << 64) - 1
_SCALE = 1 << 64

RETENTION = 0
SAMPLING = 1


class CounterStream:
    def __init__(self, seed: int, tag: int = RETENTION):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self.tag = tag
        self._key = struct.pack("<QQ", seed, tag)

    def bits(self, *counter: int) -> int:
        """Uniform 64-bit integer for the given counter tuple."""
        h = hashlib.blake2b(digest_size=8, key=self._key)
        h.update(struct.pack(f"<{len(counter)}Q", *counter))
        return int.from_bytes(h.digest(), "little")

    def bernoulli(self, q: Fraction, *counter: int) -> bool:
        """Exact ``P(True) = q`` up to the 2**-64 grid: ``bits < q * 2**64``."""
        if q <= 0:
            return False
        if q >= 1:
            return True
        return self.bits(*counter) * q.denominator < q.numerator * _SCALE

    def dyadic(self, lo: Fraction, hi: Fraction, bits: int, *counter: int) -> Fraction:
        """Dyadic rational ``lo + (hi - lo) * j / 2**bits`` with ``j`` uniform."""
        j = self.bits(*counter) >> (64 - bits)
        return lo + (hi - lo) * Fraction(j, 1 << bits)
