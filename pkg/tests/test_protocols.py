from random import Random

import pytest

from pufcommit.bits import BitString, spread, stride_indices
from pufcommit.adversaries import (
    AbortingProbeReceiver,
    EquivocatingCollectiveSender,
    EquivocatingCpufSender,
    EquivocatingExtPufSender,
    SubstitutingReturnSender,
)
from pufcommit.protocols import (
    CollectiveOutcome,
    CpufParams,
    ExtPufParams,
    OriginalExtPufParams,
    open_index,
    run_blob_equalities,
    run_collective,
    run_cpuf,
    run_extpuf,
    run_original_extpuf,
    run_uccompiler,
)
from pufcommit.protocols.compiler import blob_equalities_check, share_index
from pufcommit.session import count_resources

CP = CpufParams.standard(16, 4)
EP = ExtPufParams.standard(16, 4)
EP2 = ExtPufParams.standard(16, 2)
OP = OriginalExtPufParams.standard(8, 1)


def test_cpuf_completeness():
    rng = Random(0)
    for i in range(25):
        x = BitString.random(4, rng)
        out = run_cpuf(CP, x, seed=1000 + i)
        assert out.accepted and out.value == x


def test_cpuf_zero_string_masking_vanishes():
    # x = 0^k: the mask term disappears and c is the bare extracted secret
    out = run_cpuf(CP, BitString.zeros(4), seed=3)
    assert out.accepted
    view = out.receiver_view
    s_open = next(rec.payload[0] for rec in out.session.log.records
                  if rec.kind == "protocol-msg" and rec.note == "opening")
    sigma = out.session.handle_for("R").eval("cpuf/token", s_open)
    assert view["c"] == CP.pair.fe.rep(sigma, view["helper"])


def test_cpuf_wrong_value_rejected():
    for i in range(25):
        x = BitString.from01("1010")
        out = run_cpuf(CP, x, seed=2000 + i, sender_factory=EquivocatingCpufSender)
        assert out.accepted is False


def test_extpuf_completeness_and_order_discipline():
    from pufcommit.harness.experiments import check_order_discipline

    rng = Random(1)
    for i in range(25):
        x = BitString.random(4, rng)
        out = run_extpuf(EP, x, seed=3000 + i)
        assert out.accepted and out.value == x
        assert check_order_discipline(out.session.log, out.probe_sid, "S")


def test_extpuf_mask_stride_semantics():
    # c restricted to stride j depends only on bit j of x: flip one bit of x
    # under a fixed seed and watch exactly that stride move
    x = BitString.from01("0110")
    base = run_extpuf(EP, x, seed=77, open_phase=False)
    flipped = run_extpuf(EP, x.flip([2]), seed=77, open_phase=False)
    c0, c1 = base.receiver_view["c"], flipped.receiver_view["c"]
    k, width = 4, EP.n
    for j in range(k):
        idx = stride_indices(j, k, width)
        if j == 2:
            assert c0.restrict(idx) != c1.restrict(idx)
        else:
            assert c0.restrict(idx) == c1.restrict(idx)
    # and the strides partition the commitment positions
    seen = sorted(i for j in range(k) for i in stride_indices(j, k, width))
    assert seen == list(range(k * width))


def test_extpuf_binding_attack_rejected():
    for i in range(25):
        out = run_extpuf(EP, BitString.from01("1100"), seed=4000 + i,
                         sender_factory=EquivocatingExtPufSender)
        assert out.accepted is False


def test_extpuf_substituted_probe_fails_return_check():
    hits = 0
    for i in range(100):
        out = run_extpuf(EP, BitString.from01("0001"), seed=5000 + i,
                         sender_factory=SubstitutingReturnSender)
        assert out.accepted is False
        if out.abort_step == "TQ_FAIL":
            hits += 1
    assert hits >= 99


def test_extpuf_probe_abort_does_not_stop_the_sender():
    # a probe that refuses to answer: the sender must still complete the
    # commit phase with all-zero probe outputs
    out = run_extpuf(EP, BitString.from01("1010"), seed=6001,
                     receiver_factory=AbortingProbeReceiver, open_phase=False)
    assert out.commit_end > 0
    assert out.abort_step is None
    sender = out.sender
    assert sender.st_e == BitString.zeros(EP.probe.fe.out_len)


def test_collective_completeness_and_reopening():
    rng = Random(2)
    values = [BitString.random(2, rng) for _ in range(5)]
    out = run_collective(EP2, values, seed=7002, open_indices=[3, 0, 4, 1, 2])
    assert out.committed
    assert all(out.opened[i] == values[i] for i in range(5))
    # decommitments may repeat at a later time
    assert open_index(out, 3) == values[3]


def test_collective_wrong_value_rejected():
    rng = Random(3)
    values = [BitString.random(2, rng) for _ in range(3)]
    out = run_collective(EP2, values, seed=7500,
                         sender_factory=EquivocatingCollectiveSender)
    assert out.committed
    assert all(v is None for v in out.opened.values())


def test_collective_single_string_matches_single_protocol_messages():
    # degenerate collective run with one string: same message names and
    # payload sizes as the single-string protocol
    def message_trace(log):
        out = []
        for rec in log.records:
            if rec.kind == "protocol-msg":
                payload = rec.payload
                if isinstance(payload, BitString):
                    bits = payload.n
                elif isinstance(payload, (list, tuple)):
                    bits = sum(p.n for p in payload if isinstance(p, BitString))
                else:
                    bits = 0
                out.append((rec.note, bits))
        return out

    x = BitString.from01("01")
    single = run_extpuf(EP2, x, seed=8000)
    coll = run_collective(EP2, [x], seed=8000)
    single_trace = message_trace(single.session.log)
    coll_trace = message_trace(coll.session.log)
    # the collective opening carries its index as an extra non-bit field
    assert single_trace == coll_trace


def test_original_flow_completeness_and_mask_lengths():
    out = run_original_extpuf(OP, BitString.from01("0"), seed=9000)
    assert out.accepted and out.value == BitString.from01("0")
    # the second mask covers |st_E || p_E| strides of width l
    assert out.receiver_view["r2"].n == OP.cat_len * OP.l
    assert out.receiver_view["c2"].n == OP.cat_len * OP.l
    assert out.receiver_view["r"].n == OP.k * OP.l


def test_original_strict_figure_decommit_breaks_completeness():
    strict = OriginalExtPufParams.standard(8, 1, strict_figure_decommit=True)
    rejected = 0
    for i in range(10):
        out = run_original_extpuf(strict, BitString.from01("1"), seed=9100 + i)
        rejected += int(out.accepted is False)
    assert rejected == 10


def test_costs_per_protocol():
    out = run_extpuf(EP2, BitString.from01("10"), seed=10000)
    res = count_resources(out.session.log)
    assert (res["pufs_created"], res["exchange_phases"]) == (2, 2)

    out = run_cpuf(CP, BitString.from01("1111"), seed=10001)
    res = count_resources(out.session.log)
    assert (res["pufs_created"], res["exchange_phases"]) == (1, 1)

    comp = run_uccompiler(6, 1, seed=10002)
    res = count_resources(comp.session.log)
    assert (res["pufs_created"], res["exchange_phases"]) == (4, 4)

    comp = run_uccompiler(4, 0, seed=10003, mode="per-string")
    res = count_resources(comp.session.log)
    assert (res["pufs_created"], res["exchange_phases"]) == (8 * 4 + 2, 8 * 4 + 2)
    assert comp.accepted and comp.value == 0


def test_uccompiler_completeness_both_bits():
    for b in (0, 1):
        for i in range(8):
            out = run_uccompiler(6, b, seed=11000 + 10 * i + b)
            assert out.accepted and out.value == b


def test_blob_equalities_pure_check_exhaustive_per_pair():
    # exhaustive over the challenge bit of an affected pair: an unequal
    # pair passes for exactly one challenge value
    rng = Random(4)
    for _ in range(200):
        b = rng.getrandbits(1)
        shares = {}
        # pair 0 honest, pair 1 unequal
        for blob, value in [(0, b), (1, b), (2, b), (3, b ^ 1)]:
            b0 = rng.getrandbits(1)
            shares[share_index(blob, 0)] = b0
            shares[share_index(blob, 1)] = value ^ b0
        y = [shares[share_index(0, 0)] ^ shares[share_index(1, 0)],
             shares[share_index(2, 0)] ^ shares[share_index(3, 0)]]
        outcomes = [blob_equalities_check(y, [e0, e1], shares)
                    for e0 in (0, 1) for e1 in (0, 1)]
        # e1 = 0 passes, e1 = 1 fails, regardless of e0
        assert outcomes == [True, False, True, False]


def test_blob_equalities_protocol_runs():
    # honest: passes
    out = run_blob_equalities(4, 1, seed=12000)
    assert out.committed
    # tampered equality bit: fails for both challenge values
    out = run_blob_equalities(4, 1, seed=12001, tamper_y_pairs=(2,))
    assert not out.committed and out.abort_step == "blob-equalities"
    # one unequal pair: fails for half of the challenges
    fails = 0
    for i in range(60):
        out = run_blob_equalities(4, 0, seed=12100 + i, unequal_pairs=(1,))
        fails += int(not out.committed)
    assert 15 <= fails <= 45  # approx half; exact law checked exhaustively above


def test_parameter_bundle_validation():
    with pytest.raises(ValueError, match="k\\*n"):
        ExtPufParams(n=8, k=2, main=EP2.main, probe=EP2.probe, code=EP2.code)
    bad_code = ExtPufParams.standard(8, 2).code
    with pytest.raises(ValueError):
        ExtPufParams(n=16, k=2, main=EP2.main, probe=EP2.probe,
                     code=type(bad_code)(32, 5))
