from random import Random

import pytest

from pufcommit.bits import BitString, hamming_distance
from pufcommit.fuzzy import FuzzyExtractor, HelperData, check_matching
from pufcommit.puf import PufParams


def make_fe(t=2, out_len=8, blocks=24, seed_bits=64):
    return FuzzyExtractor(source_len=(2 * t + 1) * blocks, out_len=out_len,
                          t=t, m_req=(2 * t + 1) * blocks, seed_bits=seed_bits)


def test_roundtrip_without_noise():
    fe = make_fe()
    rng = Random(0)
    w = BitString.random(fe.source_len, rng)
    st, p = fe.gen(w, rng)
    assert fe.rep(w, p) == st
    assert len(st) == fe.out_len


def test_roundtrip_at_full_radius():
    fe = make_fe(t=2)
    rng = Random(1)
    for _ in range(100):
        w = BitString.random(fe.source_len, rng)
        st, p = fe.gen(w, rng)
        flips = rng.sample(range(fe.source_len), fe.t)
        assert fe.rep(w.flip(flips), p) == st


def test_concentrated_flips_break_one_block():
    # t + ceil(t/2) flips inside a single inner block exceed its majority
    fe = make_fe(t=2)  # inner blocks are 5 wide
    rng = Random(2)
    w = BitString.random(fe.source_len, rng)
    st, p = fe.gen(w, rng)
    got = fe.rep(w.flip([0, 1, 2]), p)
    assert got != st


def test_independent_gens_differ_but_both_reproduce():
    fe = make_fe()
    rng = Random(3)
    w = BitString.random(fe.source_len, rng)
    helpers = set()
    for _ in range(200):
        st, p = fe.gen(w, rng)
        helpers.add((p.sketch, p.hash_seed))
        assert fe.rep(w, p) == st
    assert len(helpers) == 200


def test_construction_guards():
    with pytest.raises(ValueError, match="compress"):
        # out_len beyond the sketch-free bits: nothing would be hidden
        FuzzyExtractor(source_len=15, out_len=6, t=1, m_req=15)
    with pytest.raises(ValueError, match="multiple"):
        FuzzyExtractor(source_len=16, out_len=2, t=1, m_req=16)
    with pytest.raises(ValueError):
        FuzzyExtractor(source_len=15, out_len=0, t=1, m_req=15)


def test_input_length_checks():
    fe = make_fe()
    rng = Random(4)
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        fe.gen(BitString.zeros(fe.source_len + 1), rng)
    w = BitString.random(fe.source_len, rng)
    _, p = fe.gen(w, rng)
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        fe.rep(BitString.zeros(fe.source_len - 1), p)


def test_helper_data_wire_roundtrip():
    fe = make_fe()
    rng = Random(5)
    w = BitString.random(fe.source_len, rng)
    st, p = fe.gen(w, rng)
    cat = p.concat()
    assert len(cat) == fe.helper_len
    back = HelperData.from_concat(cat, fe.source_len)
    assert back == p
    assert fe.rep(w, back) == st


def test_check_matching():
    fe = FuzzyExtractor(source_len=90, out_len=4, t=4, m_req=90)
    assert check_matching(fe, PufParams(n=16, rg=90, d_noise=4, d_min=2, m=90))
    # under-provisioned radius
    fe3 = FuzzyExtractor(source_len=70, out_len=4, t=3, m_req=70)
    assert not check_matching(fe3, PufParams(n=16, rg=70, d_noise=4, d_min=2, m=70))
    # different metric space
    assert not check_matching(fe, PufParams(n=16, rg=98, d_noise=4, d_min=2, m=90))
    # claimed entropy mismatch
    assert not check_matching(fe, PufParams(n=16, rg=90, d_noise=4, d_min=2, m=89))


def test_response_consistency_with_matched_token():
    from pufcommit.puf import sample_puf

    params = PufParams(n=16, rg=7 * 24, d_noise=3, d_min=2, m=7 * 24)
    fe = FuzzyExtractor(source_len=7 * 24, out_len=8, t=3, m_req=7 * 24)
    assert check_matching(fe, params)
    rng = Random(6)
    for _ in range(500):
        inst = sample_puf(params, rng)
        s = BitString.random(16, rng)
        sigma = inst.respond(s, rng)
        sigma2 = inst.respond(s, rng)
        assert hamming_distance(sigma, sigma2) < params.d_noise
        st, p = fe.gen(sigma, rng)
        assert fe.rep(sigma2, p) == st
