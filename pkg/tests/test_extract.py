from itertools import product
from random import Random

import pytest

from pufcommit.bits import BitString, stride_indices
from pufcommit.adversaries import AmbiguousQuerySender, NeverQuerySender
from pufcommit.extract import (
    extract_from_query,
    probe_queries,
    run_extractor_collective,
    run_extractor_modified,
    run_extractor_original,
)
from pufcommit.protocols import (
    ExtPufParams,
    OriginalExtPufParams,
    run_collective,
    run_extpuf,
    run_original_extpuf,
)

EP = ExtPufParams.standard(16, 4)
OP = OriginalExtPufParams.standard(8, 1)


def test_unmasked_query_extracts_zero_string():
    rng = Random(1)
    k, n = 3, 8
    st = BitString.random(k * n, rng)
    r = None
    while r is None or any(
        r.restrict(stride_indices(j, k, n)).weight == 0 for j in range(k)
    ):
        r = BitString.random(k * n, rng)
    assert extract_from_query(st, st, r, k) == BitString.zeros(k)
    assert extract_from_query(st, st ^ r, r, k) == BitString.ones(k)


def test_zero_mask_stride_yields_bot():
    k, n = 2, 4
    rng = Random(2)
    st = BitString.random(k * n, rng)
    # r zero on stride 0, dense elsewhere
    r = BitString.from_bits([0, 1] * n)
    assert all(r.restrict(stride_indices(0, k, n))[i] == 0 for i in range(n))
    assert extract_from_query(st, st, r, k) is None


def test_bot_block_characterization_exhaustive():
    # block j yields no bit exactly when its mask stride is zero or the
    # commitment stride is neither the plain nor the masked secret
    k, n = 2, 2
    for st_v, c_v, r_v in product(range(16), repeat=3):
        st, c, r = BitString(st_v, 4), BitString(c_v, 4), BitString(r_v, 4)
        result = extract_from_query(st, c, r, k)
        expect_bot = False
        for j in range(k):
            idx = stride_indices(j, k, n)
            c_j, st_j, r_j = c.restrict(idx), st.restrict(idx), r.restrict(idx)
            if r_j.weight == 0 or (c_j != st_j and c_j != st_j ^ r_j):
                expect_bot = True
        assert (result is None) == expect_bot


def test_length_checks():
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        extract_from_query(BitString.zeros(4), BitString.zeros(4),
                           BitString.zeros(5), 2)
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        extract_from_query(BitString.zeros(5), BitString.zeros(5),
                           BitString.zeros(5), 2)


def test_honest_sender_extraction():
    rng = Random(3)
    for i in range(25):
        x = BitString.random(4, rng)
        out = run_extpuf(EP, x, seed=20000 + i)
        assert out.accepted
        assert run_extractor_modified(out.extraction_inputs()) == x


def test_never_query_sender_gives_bot_and_cannot_open():
    for i in range(25):
        out = run_extpuf(EP, BitString.from01("1011"), seed=21000 + i,
                         sender_factory=NeverQuerySender)
        assert run_extractor_modified(out.extraction_inputs()) is None
        assert out.accepted is False


def test_extraction_is_a_pure_tap():
    # running the extractor does not touch the transcript: same-seed runs
    # serialize identically whether or not extraction happens afterwards
    out1 = run_extpuf(EP, BitString.from01("0101"), seed=22000)
    before = out1.session.log.serialize()
    run_extractor_modified(out1.extraction_inputs())
    assert out1.session.log.serialize() == before
    out2 = run_extpuf(EP, BitString.from01("0101"), seed=22000)
    assert out2.session.log.serialize() == before


def test_collective_extraction_componentwise():
    rng = Random(4)
    values = [BitString.random(4, rng) for _ in range(4)]
    out = run_collective(EP, values, seed=23000)
    assert run_extractor_collective(out.extraction_inputs()) == values
    empty = run_collective(EP, [], seed=23001)
    assert run_extractor_collective(empty.extraction_inputs()) == []


def test_original_extractor_honest_and_dedup():
    out = run_original_extpuf(OP, BitString.from01("0"), seed=24000)
    assert run_extractor_original(out.extraction_inputs()) == BitString.from01("0")

    # a retried identical query must not spoil extraction: duplicate by hand
    from pufcommit.protocols import OriginalSender

    class RetryingSender(OriginalSender):
        def setup(self):
            result = super().setup()
            self.api.eval(self.probe_sid, self.params.code.enc(self.st1))
            return result

    out = run_original_extpuf(OP, BitString.from01("1"), seed=24001,
                              sender_factory=RetryingSender)
    inputs = out.extraction_inputs()
    queries = probe_queries(inputs["log"], inputs["probe_sid"], "S",
                            inputs["commit_end"])
    assert len(queries) == 2
    assert run_extractor_original(inputs) == BitString.from01("1")


def test_original_extractor_requires_bit_commitments():
    out = run_original_extpuf(OP, BitString.from01("0"), seed=24002)
    inputs = out.extraction_inputs()
    inputs["k"] = 2
    with pytest.raises(ValueError, match="k = 1"):
        run_extractor_original(inputs)


def test_ambiguous_query_attack_confuses_original_extractor():
    for i in range(10):
        out = run_original_extpuf(OP, BitString.zeros(1), seed=25000 + i,
                                  sender_factory=AmbiguousQuerySender)
        assert out.accepted and out.value == BitString.zeros(1)
        assert run_extractor_original(out.extraction_inputs()) is None
