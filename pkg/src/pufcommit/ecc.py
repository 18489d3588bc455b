"""Repetition codes with majority decoding.

The block layout is bit-major: message bit j occupies code positions
[j*r, (j+1)*r).  An odd repeat factor r gives minimum distance D = r and
tie-free majority decoding, so every property stays exhaustively
checkable at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .bits import BitString, hamming_distance

__all__ = ["RepetitionCode", "measured_min_distance"]


@lru_cache(maxsize=8)
def _majority_table(repeat: int, chunk: int) -> list[int]:
    """Majority votes for `chunk` blocks at once, indexed by their raw bits."""
    need = repeat // 2 + 1
    table = []
    for raw in range(1 << (repeat * chunk)):
        out = 0
        for j in range(chunk):
            block = (raw >> (j * repeat)) & ((1 << repeat) - 1)
            if block.bit_count() >= need:
                out |= 1 << j
        table.append(out)
    return table


@dataclass(frozen=True)
class RepetitionCode:
    msg_len: int
    repeat: int

    def __post_init__(self):
        if self.msg_len < 1:
            raise ValueError("msg_len must be positive")
        if self.repeat < 1 or self.repeat % 2 == 0:
            raise ValueError(f"repeat factor must be odd and positive, got {self.repeat}")

    @property
    def code_len(self) -> int:
        return self.msg_len * self.repeat

    @property
    def min_dist(self) -> int:
        return self.repeat

    @property
    def correctable(self) -> int:
        """Guaranteed correction radius floor((D-1)/2)."""
        return (self.min_dist - 1) // 2

    def enc(self, m: BitString) -> BitString:
        if m.n != self.msg_len:
            raise ValueError(f"LEN_MISMATCH: message of {m.n} bits, expected {self.msg_len}")
        block = (1 << self.repeat) - 1
        value = 0
        mv = m.value
        j = 0
        while mv:
            if mv & 1:
                value |= block << (j * self.repeat)
            mv >>= 1
            j += 1
        return BitString(value, self.code_len)

    def dec(self, c: BitString) -> BitString:
        """Per-block majority vote; total on all of {0,1}^L."""
        if c.n != self.code_len:
            raise ValueError(f"LEN_MISMATCH: word of {c.n} bits, expected {self.code_len}")
        r = self.repeat
        chunk = max(1, 15 // r)  # blocks resolved per table lookup
        table = _majority_table(r, chunk)
        span = r * chunk
        span_mask = (1 << span) - 1
        value = 0
        cv = c.value
        out = 0
        while out < self.msg_len:
            value |= table[cv & span_mask] << out
            cv >>= span
            out += chunk
        if out > self.msg_len:  # drop vote bits beyond the message
            value &= (1 << self.msg_len) - 1
        return BitString(value, self.msg_len)


def measured_min_distance(code: RepetitionCode, max_msg_len: int = 10) -> int:
    """Exhaustive pairwise minimum distance of the code table."""
    if code.msg_len > max_msg_len:
        raise ValueError("exhaustive scan limited to small message lengths")
    words = [code.enc(BitString(v, code.msg_len)) for v in range(1 << code.msg_len)]
    return min(hamming_distance(a, b) for a, b in combinations(words, 2))
