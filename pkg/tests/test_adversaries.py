from random import Random

import pytest

from pufcommit.bits import BitString
from pufcommit.adversaries import (
    AmbiguousQuerySender,
    ChattyTokenSender,
    EGuessCompilerSender,
    SimulatorCompilerReceiver,
    SimulatorCompilerSender,
    StatefulProbeReceiver,
    strategy_by_id,
    zoo,
)
from pufcommit.functionality import Budgets, audit_budgets
from pufcommit.protocols import (
    ExtPufParams,
    OriginalExtPufParams,
    run_collective,
    run_cpuf,
    run_extpuf,
    run_original_extpuf,
    run_uccompiler,
)
from pufcommit.protocols.params import CpufParams
from pufcommit.session import ProtocolAbort

EP = ExtPufParams.standard(16, 4)
OP = OriginalExtPufParams.standard(8, 1)
CP = CpufParams.standard(16, 4)


def run_strategy(strategy, seed):
    if strategy.protocol == "cpuf":
        return run_cpuf(CP, BitString.from01("1010"), seed,
                        sender_factory=strategy.factory)
    if strategy.protocol == "extpuf":
        kwargs = {}
        kwargs["sender_factory" if strategy.role == "sender"
               else "receiver_factory"] = strategy.factory
        return run_extpuf(EP, BitString.from01("0110"), seed, **kwargs)
    if strategy.protocol == "collextpuf":
        values = [BitString.from01("1001"), BitString.from01("0100")]
        return run_collective(EP, values, seed, sender_factory=strategy.factory)
    if strategy.protocol == "original-extpuf":
        return run_original_extpuf(OP, BitString.zeros(1), seed,
                                   sender_factory=strategy.factory)
    if strategy.protocol == "uccompiler":
        return run_uccompiler(6, 0, seed, sender_factory=strategy.factory)
    raise AssertionError(strategy.protocol)


def test_zoo_is_well_stocked():
    members = zoo()
    assert len(members) >= 8
    assert len({m.strategy_id for m in members}) == len(members)
    assert strategy_by_id("ambiguous-query-attacker").role == "sender"
    with pytest.raises(KeyError):
        strategy_by_id("nonexistent")


def test_every_member_runs_to_its_expected_end():
    for strategy in zoo():
        for seed in range(5):
            if strategy.expect == "construction-error":
                with pytest.raises(ValueError, match="STATE_BUDGET"):
                    run_strategy(strategy, 31000 + seed)
                continue
            out = run_strategy(strategy, 31000 + seed)
            if strategy.expect == "accept":
                accepted = (out.accepted if hasattr(out, "accepted") else None)
                if hasattr(out, "opened") and out.opened:
                    accepted = all(v is not None for v in out.opened.values())
                assert accepted, strategy.strategy_id
            elif strategy.expect == "reject":
                if hasattr(out, "opened") and out.opened:
                    assert all(v is None for v in out.opened.values()), \
                        strategy.strategy_id
                else:
                    assert out.accepted is False, strategy.strategy_id
            elif strategy.expect.startswith("abort:"):
                assert out.abort_step == strategy.expect.split(":", 1)[1], \
                    strategy.strategy_id
            elif strategy.expect == "sender-completes":
                assert out.commit_end > 0, strategy.strategy_id


def test_ambiguous_query_strategy_unconstructible_against_revised_flow():
    with pytest.raises(ProtocolAbort, match="unconstructible"):
        AmbiguousQuerySender.against_revised_flow(EP, BitString.zeros(1), None)
    with pytest.raises(ValueError, match="bit 0"):
        AmbiguousQuerySender(OP, BitString.from01("1"), None)


def test_chatty_token_outgoing_dropped_at_zero_budget():
    out = run_extpuf(EP, BitString.from01("0011"), seed=32000,
                     sender_factory=ChattyTokenSender)
    assert out.accepted  # the machine answers honestly via its inner instance
    assert out.sender.leaked_messages() == []
    audit_budgets(out.session.functionality)


def test_chatty_token_leaks_within_a_positive_budget():
    budgets = Budgets(k_state=0, k_in=None, k_out=EP.n)
    out = run_extpuf(EP, BitString.from01("0011"), seed=32001,
                     sender_factory=ChattyTokenSender, budgets=budgets)
    leaked = out.sender.leaked_messages()
    assert len(leaked) == 1  # exactly one challenge fits the budget
    audit_budgets(out.session.functionality)


def test_stateful_probe_leaks_when_state_is_allowed():
    # the demonstration behind the zero-state requirement: with state, the
    # returned probe replays the sender's codeword query to its creator
    budgets = Budgets(k_state=None, k_in=None, k_out=0)
    out = run_extpuf(EP, BitString.from01("1110"), seed=33000,
                     receiver_factory=StatefulProbeReceiver, budgets=budgets,
                     open_phase=False)
    assert out.commit_end > 0
    receiver = out.receiver
    replayed = receiver.read_probe_memory()
    sender = out.sender
    codeword = EP.code.enc(sender.st)
    assert replayed.slice(0, codeword.n) == codeword  # the codeword leaked


def test_eguess_sender_survival_is_rare():
    survived = 0
    for i in range(120):
        out = run_uccompiler(4, 1, seed=34000 + i,
                             sender_factory=EGuessCompilerSender)
        survived += int(out.committed)
    # guessing 4 bits: about 1/16 of runs
    assert 1 <= survived <= 25


def test_simulator_sender_abort_branch():
    sim = SimulatorCompilerSender.__new__(SimulatorCompilerSender)
    sim.e_star = [0, 1, None]
    with pytest.raises(ProtocolAbort, match="sim-e-mismatch"):
        sim.on_e_opened([0, 1, 1])


def test_simulator_receiver_decision_cases():
    class Api:
        rng = Random(0)

    sim = SimulatorCompilerReceiver(2, Api())
    # all blobs carry the bit 1
    sim.set_extracted([0, 1, 1, 0, 0, 1, 1, 0])
    assert sim.after_commit() == "accept" and sim.b_star == 1
    # alternating pair values: empty intersection, defaults to 0
    sim.set_extracted([0, 0, 1, 1, 0, 1, 1, 0])
    assert sim.after_commit() == "accept" and sim.b_star == 0
    # both values alive in every pair: the cheat case, abort
    sim.set_extracted([0, 0, 0, 1, 0, 1, 0, 0])
    assert sim.after_commit() == "sim-A-ambiguous"
