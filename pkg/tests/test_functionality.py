from random import Random

import pytest

from pufcommit.bits import BitString
from pufcommit.functionality import (
    ADVERSARY,
    BitCommitmentFunctionality,
    Budgets,
    CommPufFunctionality,
    EventLog,
    NoCommPufFunctionality,
    audit_budgets,
    audit_single_ownership,
)
from pufcommit.puf import PufParams, chatty_program, passthrough_program

P = PufParams.standard(8, 16, d_noise=1)


def make(comm=True, budgets=Budgets(k_state=0, k_in=None, k_out=0), seed=0):
    log = EventLog()
    cls = CommPufFunctionality if comm else NoCommPufFunctionality
    return cls(Random(seed), log, budgets), log


def transfer(func, sid, frm, to):
    func.handle(("handover", sid, frm, to))
    func.handle(("ready", sid, ADVERSARY))
    func.handle(("received", sid, ADVERSARY, frm))


def test_init_and_duplicate_sid_silently_ignored():
    func, log = make()
    first = func.handle(("init", "a", "P1", "honest", P))
    assert first == [("P1", ("initialized", "a"))]
    again = func.handle(("init", "a", "P2", "honest", P))
    assert again == []
    assert "waiting-state" in log.records[-1].note


def test_eval_owner_only():
    func, _ = make()
    func.handle(("init", "a", "P1", "honest", P))
    s = BitString.zeros(8)
    ok = func.handle(("eval", "a", "P1", s))
    assert ok and ok[0][1][0] == "response" and len(ok[0][1][3]) == 16
    assert func.handle(("eval", "a", "P2", s)) == []
    assert func.handle(("eval", "missing", "P1", s)) == []


def test_handover_three_step_transfer():
    func, _ = make()
    func.handle(("init", "a", "P1", "honest", P))
    s = BitString.zeros(8)

    invoked = func.handle(("handover", "a", "P1", "P2"))
    assert invoked == [(ADVERSARY, ("invoke", "a", "P1", "P2"))]
    # in transit: owner evals are refused, the adversary may still look
    assert func.handle(("eval", "a", "P1", s)) == []
    assert func.handle(("eval", "a", "P2", s)) == []
    adv = func.handle(("eval", "a", ADVERSARY, s))
    assert adv and adv[0][1][0] == "response"

    ready = func.handle(("ready", "a", ADVERSARY))
    assert ready == [("P2", ("handover", "a", "P1"))]
    ack = func.handle(("received", "a", ADVERSARY, "P1"))
    assert ack == [("P1", ("received", "a"))]

    assert func.handle(("eval", "a", "P2", s)) != []
    assert func.handle(("eval", "a", "P1", s)) == []
    # the adversary lost its in-transit window
    assert func.handle(("eval", "a", ADVERSARY, s)) == []


def test_handover_guards():
    func, _ = make()
    func.handle(("init", "a", "P1", "honest", P))
    assert func.handle(("handover", "a", "P2", "P3")) == []   # not the owner
    assert func.handle(("ready", "a", ADVERSARY)) == []        # nothing in flight
    assert func.handle(("received", "a", ADVERSARY, "P1")) == []


def test_malformed_messages_raise():
    func, _ = make()
    with pytest.raises(ValueError, match="MALFORMED"):
        func.handle(("frobnicate", "a", "P1"))
    with pytest.raises(ValueError, match="MALFORMED"):
        func.handle(("init", "a", "P1", "sideways", P))
    with pytest.raises(ValueError, match="MALFORMED"):
        func.handle(("eval", "a", "P1", "not-bits"))
    with pytest.raises(ValueError, match="MALFORMED"):
        func.handle("eval")


def test_malicious_machine_and_outgoing_budget():
    budgets = Budgets(k_state=0, k_in=None, k_out=20)
    func, _ = make(budgets=budgets)
    func.handle(("init", "m", "P1", "malicious", P, chatty_program(16)))
    s = BitString.random(8, Random(5))
    deliveries = func.handle(("eval", "m", "P1", s))
    kinds = [msg[0] for _, msg in deliveries]
    assert kinds == ["response", "outmsg"]
    # 8 bits used, 12 remain; next query exhausts, third is dropped
    func.handle(("eval", "m", "P1", s))
    third = func.handle(("eval", "m", "P1", s))
    assert [msg[0] for _, msg in third] == ["response"]
    assert func.counters("m") == (0, 16)
    audit_budgets(func)


def test_outgoing_dropped_entirely_at_zero_budget():
    func, _ = make(budgets=Budgets(k_state=0, k_in=None, k_out=0))
    func.handle(("init", "m", "P1", "malicious", P, chatty_program(16)))
    deliveries = func.handle(("eval", "m", "P1", BitString.zeros(8)))
    assert [msg[0] for _, msg in deliveries] == ["response"]
    assert func.counters("m") == (0, 0)


def test_incoming_budget_debited_before_machine_runs():
    func, log = make(budgets=Budgets(k_state=0, k_in=10, k_out=None))
    func.handle(("init", "m", "P1", "malicious", P, chatty_program(16)))
    first = func.handle(("inmsg", "m", "P1", BitString.zeros(8)))
    assert [msg[0] for _, msg in first] == ["outmsg"]
    over = func.handle(("inmsg", "m", "P1", BitString.zeros(8)))
    assert over == []
    assert "k_in" in log.records[-1].note
    assert func.counters("m")[0] == 8  # the refused message was not debited
    # only the creator may use the channel
    assert func.handle(("inmsg", "m", "P2", BitString.zeros(4))) == []
    audit_budgets(func)


def test_state_budget_enforced_at_creation():
    from pufcommit.puf import query_logging_program

    func, _ = make(budgets=Budgets(k_state=0, k_in=None, k_out=0))
    with pytest.raises(ValueError, match="STATE_BUDGET"):
        func.handle(("init", "m", "P1", "malicious", P, query_logging_program(16, 8)))


def test_stateless_machine_replay_is_order_independent():
    queries = [BitString.random(8, Random(100 + i)) for i in range(12)]

    def run(order, seed):
        func, _ = make(budgets=Budgets(k_state=0, k_in=None, k_out=0), seed=seed)
        func.handle(("init", "m", "P1", "malicious", P, passthrough_program(16)))
        out = {}
        for idx in order:
            deliveries = func.handle(("eval", "m", "P1", queries[idx]))
            out[idx] = deliveries[0][1][3]
        return out

    # noiseless family: responses per query are identical under permutation
    forward = run(range(12), seed=1)
    shuffled_order = [7, 2, 11, 0, 5, 9, 1, 10, 3, 8, 6, 4]
    shuffled = run(shuffled_order, seed=1)
    assert forward == shuffled


def test_nocomm_router_matches_zero_budget_comm_router():
    msgs = []
    rng = Random(77)
    for i in range(60):
        roll = rng.random()
        s = BitString.random(8, rng)
        if roll < 0.35:
            msgs.append(("eval", "m", "P1", s))
        elif roll < 0.5:
            msgs.append(("eval", "m", "P2", s))
        elif roll < 0.7:
            msgs.append(("inmsg", "m", "P1", s))
        elif roll < 0.85:
            msgs.append(("handover", "m", "P1", "P2"))
        else:
            msgs.append(("ready", "m", ADVERSARY))

    def run(comm):
        func, _ = make(comm=comm, budgets=Budgets(k_state=0, k_in=0, k_out=0), seed=3)
        func.handle(("init", "m", "P1", "malicious", P, passthrough_program(16)))
        return [func.handle(m) for m in msgs]

    assert run(True) == run(False)


def test_budget_and_ownership_audits_on_a_busy_log():
    func, _ = make(budgets=Budgets(k_state=0, k_in=32, k_out=16))
    func.handle(("init", "a", "P1", "honest", P))
    func.handle(("init", "m", "P2", "malicious", P, chatty_program(16)))
    rng = Random(6)
    for _ in range(10):
        func.handle(("eval", "a", "P1", BitString.random(8, rng)))
        func.handle(("eval", "m", "P2", BitString.random(8, rng)))
        func.handle(("inmsg", "m", "P2", BitString.random(8, rng)))
    transfer(func, "a", "P1", "P2")
    func.handle(("eval", "a", "P2", BitString.random(8, rng)))
    audit_budgets(func)
    audit_single_ownership(func)


def test_bit_commitment_reference():
    log = EventLog()
    fcom = BitCommitmentFunctionality(log)
    # open before commit: nothing
    assert fcom.handle(("open", fcom.sender)) == []
    out = fcom.handle(("commit", fcom.sender, 1))
    assert (fcom.receiver, ("committed",)) in out
    # second commit ignored
    assert fcom.handle(("commit", fcom.sender, 0)) == []
    opened = fcom.handle(("open", fcom.sender))
    assert (fcom.receiver, ("open", 1)) in opened
    assert (ADVERSARY, ("open", 1)) in opened
    # halted: further messages do nothing
    assert fcom.handle(("open", fcom.sender)) == []
    with pytest.raises(ValueError, match="MALFORMED"):
        fcom.handle(("commit", fcom.sender, 2))
