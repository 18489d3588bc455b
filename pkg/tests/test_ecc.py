from itertools import combinations


import pytest

from pufcommit.bits import BitString, hamming_distance
from pufcommit.ecc import RepetitionCode, measured_min_distance


def test_enc_block_layout():
    code = RepetitionCode(2, 3)
    assert code.enc(BitString.from01("10")).to01() == "111000"
    assert code.enc(BitString.from01("01")).to01() == "000111"


def test_zero_maps_to_zero():
    code = RepetitionCode(6, 3)
    assert code.enc(BitString.zeros(6)) == BitString.zeros(18)


def test_parameters():
    code = RepetitionCode(4, 5)
    assert (code.msg_len, code.code_len, code.min_dist) == (4, 20, 5)
    assert code.correctable == 2
    with pytest.raises(ValueError):
        RepetitionCode(4, 4)  # even repeat factor would allow ties
    with pytest.raises(ValueError):
        RepetitionCode(0, 3)


def test_codewords_pairwise_distance():
    # all 2^6 codewords for msg_len 6, repeat 3: distance at least 3
    code = RepetitionCode(6, 3)
    words = [code.enc(BitString(v, 6)) for v in range(64)]
    assert min(
        hamming_distance(a, b) for a, b in combinations(words, 2)) == 3
    assert measured_min_distance(RepetitionCode(5, 5)) == 5


def test_dec_enc_identity_exhaustive():
    for msg_len, repeat in [(10, 3), (6, 5), (4, 7)]:
        code = RepetitionCode(msg_len, repeat)
        for v in range(1 << msg_len):
            m = BitString(v, msg_len)
            assert code.dec(code.enc(m)) == m


def test_correct_decoding_within_radius_exhaustive():
    # every message, every error pattern of weight <= (D-1)/2, code length <= 18
    for msg_len, repeat in [(6, 3), (3, 5)]:
        code = RepetitionCode(msg_len, repeat)
        assert code.code_len <= 18
        patterns = [()]
        positions = range(code.code_len)
        for w in range(1, code.correctable + 1):
            patterns.extend(combinations(positions, w))
        for v in range(1 << msg_len):
            m = BitString(v, msg_len)
            c = code.enc(m)
            for pattern in patterns:
                assert code.dec(c.flip(pattern)) == m


def test_block_majority_behavior():
    code = RepetitionCode(3, 5)
    m = BitString.from01("101")
    c = code.enc(m)
    # two flips inside one block: still recovered
    assert code.dec(c.flip([5, 7])) == m
    # three of five flips in one block: that message bit flips
    assert code.dec(c.flip([5, 6, 7])) == BitString.from01("111")


def test_length_checks():
    code = RepetitionCode(4, 3)
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        code.enc(BitString.zeros(5))
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        code.dec(BitString.zeros(11))


def test_enc_is_injective():
    code = RepetitionCode(8, 3)
    words = {code.enc(BitString(v, 8)) for v in range(256)}
    assert len(words) == 256
