"""Adversary zoo: attack senders, cheating receivers, and the ideal-world
simulator strategies.

Every member is a drop-in replacement for one party of one protocol,
addressable by a stable string id from the harness.  Each declares what
it is expected to achieve so the test suite can assert the whole zoo at
once: the ambiguous-query sender breaks extraction of the original flow
and is unconstructible against the revised one; the equivocating openers
probe binding; the substituting returner trips the return check; the
stateful probe is refused outright under the zero-state regime; the
chatty token probes the outgoing-bit budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .bits import BitString
from .functionality import Budgets
from .fuzzy import HelperData
from .puf import chatty_program, replay_on_marker_program, silent_program
from .session import PartyHandle, ProtocolAbort
from .protocols.compiler import (
    HonestCompilerReceiver,
    HonestCompilerSender,
    share_index,
)
from .protocols.collective import CollectiveSender
from .protocols.cpuf import CpufSender
from .protocols.extpuf import ExtPufReceiver, ExtPufSender
from .protocols.original import OriginalSender

__all__ = [
    "AdversaryStrategy",
    "zoo",
    "strategy_by_id",
    "AmbiguousQuerySender",
    "EquivocatingCpufSender",
    "EquivocatingExtPufSender",
    "EquivocatingCollectiveSender",
    "CollectiveNeverQuerySender",
    "CollectiveSubstitutingReturner",
    "SubstitutingReturnSender",
    "LateQuerySender",
    "NeverQuerySender",
    "ChattyTokenSender",
    "StatefulProbeReceiver",
    "AbortingProbeReceiver",
    "EGuessCompilerSender",
    "AlternatingBlobSender",
    "SimulatorCompilerSender",
    "SimulatorCompilerReceiver",
]


# ---------------------------------------------------------------------------
# Attack on the original flow
# ---------------------------------------------------------------------------

class AmbiguousQuerySender(OriginalSender):
    """Commits honestly to the bit 0, then also queries the probe on the
    codeword of st_1 XOR r_1 once the mask is known.

    Both candidate bits then pass the per-query check (c_1 equals the
    unmasked secret for one query and the masked one for the other), so
    extraction sees two candidates and gives up; the decommitment to 0
    still verifies.  Works only while the sender holds the probe after
    seeing r, which the original message order allows.
    """

    def __init__(self, params, x, api: PartyHandle):
        if x.n != 1 or x.value != 0:
            raise ValueError("this strategy commits to the single bit 0")
        super().__init__(params, x, api)

    def commitments(self, r1, r2):
        c1, c2 = super().commitments(r1, r2)
        self.api.eval(self.probe_sid, self.params.code.enc(self.st1 ^ r1))
        return c1, c2

    @classmethod
    def against_revised_flow(cls, params, x, api):
        """The strategy cannot be stated for the revised order: the probe
        goes back before r exists, and queries after the return are not
        answered."""
        raise ProtocolAbort("strategy-unconstructible")


# ---------------------------------------------------------------------------
# Binding attackers: commit honestly, open to something else
# ---------------------------------------------------------------------------

class EquivocatingCpufSender(CpufSender):
    def opening(self):
        s_fake = BitString.random(self.params.n, self.api.rng)
        return s_fake, ~self.x


class EquivocatingExtPufSender(ExtPufSender):
    def opening(self):
        s_fake = BitString.random(self.params.n, self.api.rng)
        return s_fake, ~self.x, self.st_e, self.p_e.concat()


class EquivocatingCollectiveSender(CollectiveSender):
    def opening(self, index):
        s_fake = BitString.random(self.params.n, self.api.rng)
        return (index, s_fake, ~self.values[index],
                self.st_e[index], self.p_e[index].concat())


class CollectiveNeverQuerySender(CollectiveSender):
    """Collective variant of the sender that skips the probe."""

    def query_probe(self):
        p = self.params
        self.probe_sid = self.api.take_handover()
        if self.probe_sid is None:
            raise ProtocolAbort("await-probe")
        self.st_e = [BitString.zeros(p.probe.fe.out_len)] * self.n_strings
        self.p_e = [HelperData(
            BitString.zeros(p.probe.fe.source_len),
            BitString.zeros(p.probe.fe.seed_bits),
        )] * self.n_strings


class CollectiveSubstitutingReturner(CollectiveSender):
    """Collective variant of the token swap at return time."""

    DECOY_SID = "coll/decoy"

    def return_probe(self, receiver):
        self.api.create_honest(self.DECOY_SID, self.params.probe.puf)
        self.api.handover(self.DECOY_SID, receiver)


# ---------------------------------------------------------------------------
# Return-check and budget probes (revised flow)
# ---------------------------------------------------------------------------

class SubstitutingReturnSender(ExtPufSender):
    """Returns a fresh token of the probe family instead of the probe and
    keeps the real probe; the receiver's fingerprint check should catch
    the swap before any mask is revealed."""

    DECOY_SID = "extpuf/decoy"

    def return_probe(self, receiver):
        self.api.create_honest(self.DECOY_SID, self.params.probe.puf)
        self.api.handover(self.DECOY_SID, receiver)


class LateQuerySender(ExtPufSender):
    """Honest except for one probe query aimed at the masked secret after
    r arrives; by then the probe is back with the receiver and the router
    stays silent, so the attempt is a no-op."""

    def commitment(self, r):
        self.late_answer = self.api.eval(self.probe_sid, self.params.code.enc(self.st ^ r))
        return super().commitment(r)


class NeverQuerySender(ExtPufSender):
    """Skips the probe entirely and commits with all-zero probe outputs;
    can never open, and extraction has nothing to work with."""

    def query_probe(self):
        p = self.params
        self.probe_sid = self.api.take_handover()
        if self.probe_sid is None:
            raise ProtocolAbort("await-probe")
        self.st_e = BitString.zeros(p.probe.fe.out_len)
        self.p_e = HelperData(
            BitString.zeros(p.probe.fe.source_len),
            BitString.zeros(p.probe.fe.seed_bits),
        )


class ChattyTokenSender(ExtPufSender):
    """Creates its own token as a malicious machine that answers honestly
    but tries to send every incoming challenge back to its creator,
    probing the outgoing-bit budget."""

    def setup(self):
        api, p = self.api, self.params
        api.create_malicious(self.sid, p.main.puf, chatty_program(p.main.puf.rg))
        self.s = BitString.random(p.n, api.rng)
        self.st, self.helper = p.main.fe.gen(api.eval(self.sid, self.s), api.rng)
        return self.helper.concat()

    def leaked_messages(self) -> list:
        return [m for m in self.api.inbox() if m[0] == "outmsg"]


class StatefulProbeReceiver(ExtPufReceiver):
    """Tries to field a probe that records what it is queried on, so the
    receiver could learn the committed string after the probe returns.
    Under the zero-state regime the router refuses the machine at
    creation time; this class exists to prove that refusal fires."""

    def create_probe(self):
        p = self.params
        marker = BitString.zeros(p.probe.puf.n)
        self.api.create_malicious(
            self.probe_sid, p.probe.puf,
            replay_on_marker_program(p.probe.fe.source_len, marker),
        )
        self.tq = None

    def verify_return(self):
        returned = self.api.take_handover()
        if returned is None:
            raise ProtocolAbort("await-probe-return")
        self.returned_probe = returned

    def read_probe_memory(self) -> Optional[BitString]:
        """After the return, ask the stateful probe to replay the last
        query it saw (the marker challenge triggers the leak)."""
        marker = BitString.zeros(self.params.probe.puf.n)
        return self.api.eval(self.returned_probe, marker)


class AbortingProbeReceiver(ExtPufReceiver):
    """Fields a probe that refuses every query; the sender must complete
    the commit phase with all-zero probe outputs rather than abort."""

    def create_probe(self):
        p = self.params
        self.api.create_malicious(self.probe_sid, p.probe.puf,
                                  silent_program(p.probe.fe.source_len))
        self.tq = None

    def verify_return(self):
        returned = self.api.take_handover()
        if returned is None:
            raise ProtocolAbort("await-probe-return")
        self.returned_probe = returned

    def check_opening(self, *args):
        return None  # nothing this receiver accepts is meaningful


# ---------------------------------------------------------------------------
# Compiler-level cheats
# ---------------------------------------------------------------------------

class EGuessCompilerSender(HonestCompilerSender):
    """Keeps both bit values alive in every pair and forges the equality
    bits for a guessed challenge string; survives the equality subprotocol
    exactly when the guess matches all n challenge bits."""

    def make_blobs(self):
        rng = self.api.rng
        self.guess = [rng.getrandbits(1) for _ in range(self.n)]
        self.shares = []
        for j in range(2 * self.n):
            pair, second = divmod(j, 2)
            value = self.b ^ (j % 2)  # first blob of the pair carries b, second not-b
            b0 = rng.getrandbits(1)
            self.shares.extend([b0, value ^ b0])
        return [BitString(v, 1) for v in self.shares]

    def equality_message(self):
        return [
            self.shares[share_index(2 * t, g)] ^ self.shares[share_index(2 * t + 1, g)]
            for t, g in enumerate(self.guess)
        ]

    def decommit_choice(self, b_hint=None):
        want = self.b if b_hint is None else b_hint
        self.chosen = []
        for t in range(self.n):
            blob = 2 * t if want == self.b else 2 * t + 1
            self.chosen.append(blob)
        return self.chosen


class AlternatingBlobSender(HonestCompilerSender):
    """Honest inside each pair but the pair values alternate 0,1,0,1,...
    across pairs; passes the equality subprotocol yet can never open a
    common bit, and extraction of the pairs yields an empty intersection."""

    def make_blobs(self):
        rng = self.api.rng
        self.shares = []
        for j in range(2 * self.n):
            pair = j // 2
            value = pair % 2
            b0 = rng.getrandbits(1)
            self.shares.extend([b0, value ^ b0])
        return [BitString(v, 1) for v in self.shares]


# ---------------------------------------------------------------------------
# Ideal-world simulator strategies
# ---------------------------------------------------------------------------

class SimulatorCompilerSender(HonestCompilerSender):
    """Sender-side simulation against a corrupted receiver.

    Extracts the challenge bits from the receiver's commitment, plants
    one blob of 0 and one blob of 1 at shuffled positions in every pair,
    patches the equality bits to match the extracted challenges (random
    where extraction failed), aborts if the receiver opens anything else,
    and at decommit time opens the blobs matching whatever bit the ideal
    commitment reveals."""

    needs_extraction = True

    def __init__(self, n, b, api):
        super().__init__(n, 0, api)  # the real bit is unknown here
        self.e_star: Optional[list] = None

    def set_extracted(self, e_star):
        self.e_star = list(e_star)

    def make_blobs(self):
        rng = self.api.rng
        self.slot_for_bit = []  # per pair: (blob holding 0, blob holding 1)
        self.shares = [0] * (4 * self.n)
        for t in range(self.n):
            first, second = 2 * t, 2 * t + 1
            if rng.getrandbits(1):
                zero_blob, one_blob = first, second
            else:
                zero_blob, one_blob = second, first
            self.slot_for_bit.append((zero_blob, one_blob))
            b0 = rng.getrandbits(1)
            self.shares[share_index(zero_blob, 0)] = b0
            self.shares[share_index(zero_blob, 1)] = b0
            b0 = rng.getrandbits(1)
            self.shares[share_index(one_blob, 0)] = b0
            self.shares[share_index(one_blob, 1)] = b0 ^ 1
        return [BitString(v, 1) for v in self.shares]

    def equality_message(self):
        y = []
        for t in range(self.n):
            e_t = self.e_star[t]
            if e_t is None:
                y.append(self.api.rng.getrandbits(1))
            else:
                y.append(self.shares[share_index(2 * t, e_t)]
                         ^ self.shares[share_index(2 * t + 1, e_t)])
        return y

    def on_e_opened(self, e_bits):
        if list(e_bits) != self.e_star:
            raise ProtocolAbort("sim-e-mismatch")
        self.e_bits = list(e_bits)

    def decommit_choice(self, b_hint=None):
        if b_hint not in (0, 1):
            raise ProtocolAbort("sim-missing-bit")
        self.chosen = [self.slot_for_bit[t][b_hint] for t in range(self.n)]
        return self.chosen


class SimulatorCompilerReceiver(HonestCompilerReceiver):
    """Receiver-side simulation against a corrupted sender.

    Extracts all blob shares, forms the per-blob values, intersects the
    per-pair value sets, and decides what the dummy sender hands to the
    ideal commitment: the unique common bit, 0 if the intersection is
    empty, abort if both bits survived (the sender cheated the equality
    subprotocol).  A later decommitment is forwarded only when it opens
    the extracted bit."""

    needs_extraction = True

    def __init__(self, n, api):
        super().__init__(n, api)
        self.b_star: Optional[int] = None
        self.ambiguous = False

    def set_extracted(self, shares_star):
        values = []
        for j in range(2 * self.n):
            s0 = shares_star[share_index(j, 0)]
            s1 = shares_star[share_index(j, 1)]
            values.append(None if s0 is None or s1 is None else s0 ^ s1)
        self.blob_values = values

    def after_commit(self):
        common = {0, 1}
        for t in range(self.n):
            pair_values = {self.blob_values[2 * t], self.blob_values[2 * t + 1]}
            common &= pair_values
        common.discard(None)
        if common == {0, 1}:
            self.ambiguous = True
            return "sim-A-ambiguous"
        self.b_star = common.pop() if common else 0
        return "accept"


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdversaryStrategy:
    strategy_id: str
    role: str                  # sender | receiver
    protocol: str              # cpuf | extpuf | collextpuf | original-extpuf | uccompiler
    factory: Callable
    expect: str                # what a run against the honest peer should yield
    budgets: Budgets = field(default_factory=lambda: Budgets(k_state=0, k_in=None, k_out=0))
    notes: str = ""


def zoo() -> list[AdversaryStrategy]:
    return [
        AdversaryStrategy("honest-sender", "sender", "extpuf",
                          ExtPufSender, expect="accept"),
        AdversaryStrategy("honest-receiver", "receiver", "extpuf",
                          ExtPufReceiver, expect="accept"),
        AdversaryStrategy("ambiguous-query-attacker", "sender", "original-extpuf",
                          AmbiguousQuerySender, expect="accept",
                          notes="extraction yields no unique candidate while the "
                                "decommitment to 0 is accepted"),
        AdversaryStrategy("equivocating-open-cpuf", "sender", "cpuf",
                          EquivocatingCpufSender, expect="reject"),
        AdversaryStrategy("equivocating-open-extpuf", "sender", "extpuf",
                          EquivocatingExtPufSender, expect="reject"),
        AdversaryStrategy("equivocating-open-collective", "sender", "collextpuf",
                          EquivocatingCollectiveSender, expect="reject"),
        AdversaryStrategy("honest-collective-sender", "sender", "collextpuf",
                          CollectiveSender, expect="accept"),
        AdversaryStrategy("never-query-collective", "sender", "collextpuf",
                          CollectiveNeverQuerySender, expect="reject"),
        AdversaryStrategy("substituting-returner-collective", "sender", "collextpuf",
                          CollectiveSubstitutingReturner, expect="abort:TQ_FAIL"),
        AdversaryStrategy("substituting-returner", "sender", "extpuf",
                          SubstitutingReturnSender, expect="abort:TQ_FAIL"),
        AdversaryStrategy("late-query-sender", "sender", "extpuf",
                          LateQuerySender, expect="accept",
                          notes="the post-return probe query is dropped unanswered"),
        AdversaryStrategy("never-query-sender", "sender", "extpuf",
                          NeverQuerySender, expect="reject"),
        AdversaryStrategy("chatty-token-sender", "sender", "extpuf",
                          ChattyTokenSender, expect="accept",
                          notes="outgoing messages must be dropped under k_out = 0"),
        AdversaryStrategy("stateful-probe-receiver", "receiver", "extpuf",
                          StatefulProbeReceiver, expect="construction-error",
                          notes="zero-state regime refuses the machine at creation"),
        AdversaryStrategy("aborting-probe-receiver", "receiver", "extpuf",
                          AbortingProbeReceiver, expect="sender-completes",
                          notes="sender substitutes zeros and finishes the commit"),
        AdversaryStrategy("e-guessing-sender", "sender", "uccompiler",
                          EGuessCompilerSender, expect="abort:blob-equalities",
                          notes="survives the equality subprotocol with "
                                "probability 2^-n"),
        AdversaryStrategy("alternating-blob-sender", "sender", "uccompiler",
                          AlternatingBlobSender, expect="reject",
                          notes="passes the commit phase, no common bit to open"),
    ]


def strategy_by_id(strategy_id: str) -> AdversaryStrategy:
    for strategy in zoo():
        if strategy.strategy_id == strategy_id:
            return strategy
    raise KeyError(f"unknown adversary id {strategy_id!r}")
