"""Average-case fuzzy extractor: code-offset sketch plus a universal hash.

Gen(w) draws a random inner-code message msg and a fresh hash seed, and
outputs

    sketch = w XOR Enc(msg)
    st     = H_seed(w)            (out_len bits)

with helper data p = (sketch, seed).  Rep(w', p) decodes w' XOR sketch to
the nearest codeword, re-derives w, and re-applies the seeded hash, so
any reading within the correction radius t reproduces st exactly.

H_seed is a Toeplitz (shifted-window) GF(2) family with a random offset,
a standard pairwise-independent construction; the stored seed is short
and the long Toeplitz string is expanded from it deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitString
from .ecc import RepetitionCode
from .prf import prf_bits

__all__ = ["HelperData", "FuzzyExtractor", "check_matching"]


@dataclass(frozen=True)
class HelperData:
    sketch: BitString
    hash_seed: BitString

    def concat(self) -> BitString:
        """Wire form: sketch followed by seed."""
        return self.sketch.concat(self.hash_seed)

    @classmethod
    def from_concat(cls, data: BitString, source_len: int) -> "HelperData":
        if data.n < source_len:
            raise ValueError("LEN_MISMATCH: helper data shorter than the sketch")
        return cls(data.slice(0, source_len), data.slice(source_len, data.n))


@dataclass(frozen=True)
class FuzzyExtractor:
    """(m, out_len, t, eps) extractor on {0,1}^source_len with Hamming distance.

    eps is not asserted analytically; the almost-uniformity experiment in
    the harness bounds it empirically.
    """

    source_len: int
    out_len: int
    t: int
    m_req: int = 0
    seed_bits: int = 128

    def __post_init__(self):
        if self.out_len < 1:
            raise ValueError("out_len must be at least 1")
        if self.t < 0:
            raise ValueError("negative correction radius")
        r = 2 * self.t + 1
        if self.source_len % r:
            raise ValueError(
                f"source_len {self.source_len} not a multiple of the inner block {r}"
            )
        inner = RepetitionCode(self.source_len // r, r)
        if self.out_len > inner.msg_len:
            raise ValueError(
                "extractor must compress: out_len "
                f"{self.out_len} exceeds the {inner.msg_len} sketch-free bits"
            )
        object.__setattr__(self, "_inner", inner)

    @property
    def inner_code(self) -> RepetitionCode:
        return self._inner

    @property
    def helper_len(self) -> int:
        return self.source_len + self.seed_bits

    def gen(self, w: BitString, rng) -> tuple[BitString, HelperData]:
        if w.n != self.source_len:
            raise ValueError(f"LEN_MISMATCH: source of {w.n} bits, expected {self.source_len}")
        msg = BitString.random(self._inner.msg_len, rng)
        sketch = w ^ self._inner.enc(msg)
        seed = BitString.random(self.seed_bits, rng)
        return self._hash(seed, w), HelperData(sketch, seed)

    def rep(self, w_prime: BitString, p: HelperData) -> BitString:
        if w_prime.n != self.source_len:
            raise ValueError(
                f"LEN_MISMATCH: source of {w_prime.n} bits, expected {self.source_len}"
            )
        if p.sketch.n != self.source_len:
            raise ValueError("LEN_MISMATCH: sketch length does not match the source")
        recovered = p.sketch ^ self._inner.enc(self._inner.dec(w_prime ^ p.sketch))
        return self._hash(p.hash_seed, recovered)

    def _hash(self, seed: BitString, w: BitString) -> BitString:
        n_in, n_out = self.source_len, self.out_len
        stream = prf_bits(seed.to_bytes(), b"uhash", n_in + 2 * n_out - 1)
        toeplitz = stream & ((1 << (n_in + n_out - 1)) - 1)
        offset = stream >> (n_in + n_out - 1)
        wv = w.value
        value = 0
        for i in range(n_out):
            value |= (((toeplitz >> i) & wv).bit_count() & 1) << i
        return BitString(value ^ offset, n_out)


def check_matching(fe: FuzzyExtractor, puf_params) -> bool:
    """True iff the extractor is provisioned for the given PUF family.

    The correction radius must cover the response noise, the required
    source entropy must equal the family's claimed residual min-entropy,
    and both must live on the same metric space.
    """
    return (
        fe.t >= puf_params.d_noise
        and fe.m_req == puf_params.m
        and fe.source_len == puf_params.rg
    )
