from itertools import combinations
from random import Random

import pytest

from pufcommit.bits import BitString, hamming_distance
from pufcommit.fuzzy import FuzzyExtractor
from pufcommit.puf import (
    MachineProgram,
    MaliciousPufMachine,
    PufParams,
    chatty_program,
    close_query_experiment,
    constant_program,
    estimate_preimage_entropy,
    estimate_unpredictability,
    passthrough_program,
    query_logging_program,
    sample_puf,
    silent_program,
    run_test_query_experiment,
)


def params(n=16, rg=64, d_noise=5, **kw):
    return PufParams.standard(n, rg, d_noise=d_noise, **kw)


def test_same_seed_same_map():
    rng1, rng2 = Random(1), Random(1)
    a = sample_puf(params(), rng1)
    b = sample_puf(params(), rng2)
    probe = Random(9)
    for _ in range(50):
        s = BitString.random(16, probe)
        assert a.ideal(s) == b.ideal(s)


def test_distinct_seeds_give_distinct_maps():
    rng = Random(2)
    a = sample_puf(params(), rng)
    b = sample_puf(params(), rng)
    probe = Random(10)
    for _ in range(100):
        s = BitString.random(16, probe)
        assert hamming_distance(a.ideal(s), b.ideal(s)) >= 1


def test_noiseless_when_bound_is_tight():
    rng = Random(3)
    for d_noise in (0, 1):
        inst = sample_puf(params(d_noise=d_noise), rng)
        s = BitString.random(16, rng)
        first = inst.respond(s, rng)
        assert all(inst.respond(s, rng) == first for _ in range(20))
        assert first == inst.ideal(s)


def test_bounded_noise_pairwise():
    rng = Random(4)
    inst = sample_puf(params(d_noise=5), rng)
    s = BitString.random(16, rng)
    responses = [inst.respond(s, rng) for _ in range(1000)]
    assert len(responses[0]) == 64
    # spot-exhaustive pairwise check on a slice, full check on a sample
    for a, b in combinations(responses[:60], 2):
        assert hamming_distance(a, b) < 5
    for _ in range(2000):
        a, b = rng.choice(responses), rng.choice(responses)
        assert hamming_distance(a, b) < 5


def test_statelessness_under_interleaving():
    rng = Random(5)
    inst = sample_puf(params(), rng)
    s = BitString.random(16, rng)
    ideal_before = inst.ideal(s)
    for _ in range(25):
        inst.respond(BitString.random(16, rng), rng)
    assert inst.ideal(s) == ideal_before


def test_challenge_length_check():
    rng = Random(6)
    inst = sample_puf(params(), rng)
    with pytest.raises(ValueError, match="LEN_MISMATCH"):
        inst.respond(BitString.zeros(15), rng)


def test_params_validation():
    with pytest.raises(ValueError):
        PufParams(n=8, rg=16, d_noise=17, d_min=2, m=16)
    with pytest.raises(ValueError):
        PufParams(n=8, rg=16, d_noise=3, d_min=0, m=16)
    with pytest.raises(ValueError):
        PufParams(n=8, rg=16, d_noise=3, d_min=2, m=17)
    assert PufParams.default_d_min(32) == 4
    assert PufParams.default_d_min(8) == 2


# -- malicious machines -------------------------------------------------------

def test_passthrough_machine_tracks_inner_instance():
    rng = Random(7)
    inner = sample_puf(params(d_noise=3, rg=64), rng)
    machine = MaliciousPufMachine(passthrough_program(64), k_state=0, inner=inner)
    s = BitString.random(16, rng)
    response, outgoing = machine.step("query", s, rng)
    assert outgoing is None
    assert hamming_distance(response, inner.ideal(s)) <= inner.params.max_flips


def test_constant_machine():
    rng = Random(8)
    machine = MaliciousPufMachine(constant_program(32), k_state=0, inner=None)
    for _ in range(5):
        response, _ = machine.step("query", BitString.random(16, rng), rng)
        assert response == BitString.zeros(32)


def test_query_logger_rejected_without_state_budget():
    with pytest.raises(ValueError, match="STATE_BUDGET"):
        MaliciousPufMachine(query_logging_program(32, log_bits=16), k_state=0)


def test_runtime_state_writes_are_audited():
    def fn(kind, payload, state, oracle):
        return BitString.zeros(8), BitString.zeros(12), None

    program = MachineProgram("overwriter", 4, fn, 8, wants_inner=False)
    machine = MaliciousPufMachine(program, k_state=4)
    with pytest.raises(ValueError, match="STATE_BUDGET"):
        machine.step("query", BitString.zeros(4), Random(0))


def test_chatty_and_silent_programs():
    rng = Random(9)
    inner = sample_puf(params(rg=32), rng)
    chatty = MaliciousPufMachine(chatty_program(32), k_state=0, inner=inner)
    s = BitString.random(16, rng)
    response, outgoing = chatty.step("query", s, rng)
    assert outgoing == s
    silent = MaliciousPufMachine(silent_program(32), k_state=0)
    assert silent.step("query", s, rng) == (None, None)


# -- family experiments --------------------------------------------------------

def test_unpredictability_estimate_close_to_response_width():
    p = PufParams.standard(12, 8, d_noise=1)
    report = estimate_unpredictability(p, trials=1 << 14, seed=0)
    assert report.status == "ok"
    assert report.details["estimated_bits"] >= 8 - 1.0
    assert report.details["clears_m"]
    # conditioning on far responses gives the predictor no edge
    assert report.details["probe_success"] <= 4 / 256


def test_unpredictability_refuses_violated_precondition():
    p = PufParams.standard(12, 8, d_noise=1)
    report = estimate_unpredictability(p, trials=64, seed=1, include_challenge=True)
    assert report.status == "PRECONDITION_UNMET"


def test_unpredictability_vacuous_radius():
    p = PufParams.standard(12, 8, d_noise=1, d_min=13)
    report = estimate_unpredictability(p, trials=64, seed=2)
    assert report.status == "vacuous"


def test_preimage_entropy_estimate():
    p = PufParams.standard(8, 24, d_noise=1)
    estimate = estimate_preimage_entropy(p, trials=1 << 14, seed=3)
    assert estimate >= 8 - 1.0


def test_close_query_baseline_within_budget():
    p = PufParams.standard(8, 24, d_noise=1)
    report = close_query_experiment(p, trials=1000, queries_per_trial=8, seed=4)
    assert report.details["within_bound"]
    assert report.details["hit_rate"] > 0  # the ball is big at n=8, hits happen


def test_test_query_detects_substitution():
    p = PufParams.standard(16, 3 * 32, d_noise=1)
    fe = FuzzyExtractor(source_len=3 * 32, out_len=16, t=1, m_req=3 * 32)
    swapped = run_test_query_experiment(p, fe, trials=300, seed=5, substitute=True)
    assert swapped.successes >= 297  # >= 99%
    honest = run_test_query_experiment(p, fe, trials=300, seed=6, substitute=False)
    assert honest.successes == 300  # no false positives
