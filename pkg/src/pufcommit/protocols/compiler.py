"""Bit commitment compiled from extractable collective commitments.

Blob layout: for a committed bit b the sender draws 2n blobs, blob j
being the share pair (b_j^0, b_j^1) with b_j^1 = b XOR b_j^0, and
commits all 4n share bits.  Blobs are grouped into n consecutive pairs
(2t, 2t+1).  The receiver commits its challenge bits e, one per pair,
before the sender commits anything; that ordering is what lets the
ideal-world simulation extract e first and build its blobs around it.

Commit phase: receiver commits e; sender commits the shares; then the
equality subprotocol runs: the sender sends y_t = b_{2t}^0 XOR
b_{2t+1}^0 for every pair, the receiver opens e, and the sender opens
the e_t-shares of both blobs in each pair, which the receiver checks
against y_t.  A sender whose paired blobs disagree passes only by
having guessed e outright.

Decommit: the sender picks l_t in {2t, 2t+1} per pair and opens both
shares of blob l_t; the receiver accepts if some single bit b explains
every opened pair.

Channels: the commitments ride either on one collective instance per
direction (two tokens, two exchange phases each) or, in the per-string
compatibility mode, on one single-string instance per committed string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..bits import BitString
from ..session import ProtocolAbort, Session
from .collective import (
    CollectiveOutcome,
    CollectiveReceiver,
    CollectiveSender,
    open_index,
    run_collective_commit,
)
from .extpuf import (
    EXTPUF_BUDGETS,
    ExtPufOutcome,
    open_extpuf,
    run_extpuf_commit,
)
from .params import ExtPufParams

__all__ = [
    "share_index",
    "CollectiveChannel",
    "PerStringChannel",
    "HonestCompilerSender",
    "HonestCompilerReceiver",
    "CompilerOutcome",
    "run_uccompiler",
    "open_uccompiler",
    "run_blob_equalities",
    "blob_equalities_check",
]


def share_index(blob: int, eps: int) -> int:
    """Index of share b_blob^eps in the sender's committed vector."""
    return 2 * blob + eps


# ---------------------------------------------------------------------------
# Commitment channels
# ---------------------------------------------------------------------------

class CollectiveChannel:
    """All strings of one direction under a single collective instance."""

    def __init__(self, session: Session, params: ExtPufParams,
                 sender_name: str, receiver_name: str, label: str,
                 sender_factory: Callable = CollectiveSender,
                 receiver_factory: Callable = CollectiveReceiver):
        self.session = session
        self.params = params
        self.sender_name = sender_name
        self.receiver_name = receiver_name
        self.label = label
        self.sender_factory = sender_factory
        self.receiver_factory = receiver_factory
        self.outcome: Optional[CollectiveOutcome] = None

    def commit(self, values: list[BitString]) -> bool:
        self.outcome = run_collective_commit(
            self.params, values, self.session,
            sender_factory=self.sender_factory,
            receiver_factory=self.receiver_factory,
            sender_name=self.sender_name, receiver_name=self.receiver_name,
            label=self.label,
        )
        return self.outcome.committed

    def open(self, index: int) -> Optional[BitString]:
        return open_index(self.outcome, index, receiver_name=self.receiver_name)

    def extraction_inputs(self) -> dict:
        return self.outcome.extraction_inputs()


class PerStringChannel:
    """Compatibility mode: one single-string instance per committed string."""

    def __init__(self, session: Session, params: ExtPufParams,
                 sender_name: str, receiver_name: str, label: str):
        self.session = session
        self.params = params
        self.sender_name = sender_name
        self.receiver_name = receiver_name
        self.label = label
        self.instances: list[ExtPufOutcome] = []

    def commit(self, values: list[BitString]) -> bool:
        for i, value in enumerate(values):
            outcome = run_extpuf_commit(
                self.params, value, self.session,
                sender_name=self.sender_name, receiver_name=self.receiver_name,
                label=f"{self.label}{i}/",
            )
            self.instances.append(outcome)
            if outcome.abort_step is not None:
                return False
        return True

    def open(self, index: int) -> Optional[BitString]:
        return open_extpuf(self.instances[index], receiver_name=self.receiver_name)


# ---------------------------------------------------------------------------
# Compiler-level parties
# ---------------------------------------------------------------------------

class HonestCompilerSender:
    needs_extraction = False

    def __init__(self, n: int, b: int, api):
        if b not in (0, 1):
            raise ValueError(f"bit expected, got {b!r}")
        self.n = n
        self.b = b
        self.api = api
        self.e_bits: Optional[list[int]] = None

    def set_extracted(self, e_star):
        pass

    def make_blobs(self) -> list[BitString]:
        rng = self.api.rng
        self.shares = []
        for _ in range(2 * self.n):
            b0 = rng.getrandbits(1)
            self.shares.extend([b0, self.b ^ b0])
        return [BitString(v, 1) for v in self.shares]

    def equality_message(self) -> list[int]:
        return [
            self.shares[share_index(2 * t, 0)] ^ self.shares[share_index(2 * t + 1, 0)]
            for t in range(self.n)
        ]

    def on_e_opened(self, e_bits: list[int]) -> None:
        self.e_bits = e_bits

    def equality_open_indices(self) -> list[int]:
        idx = []
        for t, e_t in enumerate(self.e_bits):
            idx.append(share_index(2 * t, e_t))
            idx.append(share_index(2 * t + 1, e_t))
        return idx

    def decommit_choice(self, b_hint: Optional[int] = None) -> list[int]:
        rng = self.api.rng
        self.chosen = [2 * t + rng.getrandbits(1) for t in range(self.n)]
        return self.chosen


class HonestCompilerReceiver:
    needs_extraction = False

    def __init__(self, n: int, api):
        self.n = n
        self.api = api

    def set_extracted(self, shares_star):
        pass

    def choose_e(self) -> list[int]:
        self.e_bits = [self.api.rng.getrandbits(1) for _ in range(self.n)]
        return self.e_bits

    def check_equalities(self, y_bits: list[int], opened: dict) -> bool:
        if len(y_bits) != self.n:
            return False
        for t, e_t in enumerate(self.e_bits):
            a = opened.get(share_index(2 * t, e_t))
            b = opened.get(share_index(2 * t + 1, e_t))
            if a is None or b is None or y_bits[t] != a.value ^ b.value:
                return False
        return True

    def after_commit(self) -> str:
        return "accept"

    def check_decommit(self, opened_pairs: dict) -> Optional[int]:
        """opened_pairs: blob index -> (share0, share1); needs a common bit."""
        values = set()
        for t in range(self.n):
            entry = None
            for blob in (2 * t, 2 * t + 1):
                if blob in opened_pairs:
                    entry = opened_pairs[blob]
            if entry is None:
                return None
            s0, s1 = entry
            if s0 is None or s1 is None:
                return None
            values.add(s0.value ^ s1.value)
        if len(values) != 1:
            return None
        return values.pop()


# ---------------------------------------------------------------------------
# The compiled protocol
# ---------------------------------------------------------------------------

@dataclass
class CompilerOutcome:
    session: Session
    committed: bool = False
    accepted: Optional[bool] = None
    value: Optional[int] = None
    abort_step: Optional[str] = None
    commit_end: int = -1
    e_channel: object = None
    blob_channel: object = None
    sender: object = None
    receiver: object = None
    details: dict = field(default_factory=dict)


def _make_channel(mode, session, params_bits, params_string, sender, receiver, label):
    if mode == "collective":
        return CollectiveChannel(session, params_bits, sender, receiver, label)
    if mode == "per-string":
        params = params_string if label == "e/" else params_bits
        return PerStringChannel(session, params, sender, receiver, label)
    raise ValueError(f"unknown channel mode {mode!r}")


def run_uccompiler(n: int, b: int, seed: int, mode: str = "collective",
                   sender_factory: Callable = HonestCompilerSender,
                   receiver_factory: Callable = HonestCompilerReceiver,
                   open_phase: bool = True,
                   d_noise: int = 3,
                   extract_e: bool = False,
                   extract_blobs: bool = False,
                   open_bit_hint: Optional[int] = None) -> CompilerOutcome:
    """Run the compiled bit commitment end to end.

    extract_e / extract_blobs wire the straight-line extractor of the
    respective channel into the opposite party (simulators use this; the
    honest parties ignore what they are given).
    """
    from ..extract import run_extractor_collective

    session = Session(seed, comm=True, budgets=EXTPUF_BUDGETS)
    params_bits = ExtPufParams.standard(n, 1, d_noise=d_noise)
    params_string = (ExtPufParams.standard(n, n, d_noise=d_noise)
                     if mode == "per-string" else None)

    S = sender_factory(n, b, session.handle_for("S"))
    R = receiver_factory(n, session.handle_for("R"))
    outcome = CompilerOutcome(session, sender=S, receiver=R)

    # direction R -> S: the challenge bits; R is the channel sender
    e_channel = _make_channel(mode, session, params_bits, params_string, "R", "S", "e/")
    # direction S -> R: the blob shares
    blob_channel = _make_channel(mode, session, params_bits, params_string, "S", "R",
                                 "blob/")
    outcome.e_channel = e_channel
    outcome.blob_channel = blob_channel

    try:
        session.phase("R", "choose-e")
        e_bits = R.choose_e()
        if mode == "per-string":
            e_values = [BitString.from_bits(e_bits)]
        else:
            e_values = [BitString(bit, 1) for bit in e_bits]
        if not e_channel.commit(e_values):
            raise ProtocolAbort("e-commit")
        if extract_e and S.needs_extraction:
            if mode != "collective":
                raise ProtocolAbort("extract-needs-collective")
            extracted = run_extractor_collective(e_channel.extraction_inputs())
            S.set_extracted([x.value if x is not None else None for x in extracted])

        session.phase("S", "make-blobs")
        blobs = S.make_blobs()
        if not blob_channel.commit(blobs):
            raise ProtocolAbort("blob-commit")
        if extract_blobs and R.needs_extraction:
            if mode != "collective":
                raise ProtocolAbort("extract-needs-collective")
            extracted = run_extractor_collective(blob_channel.extraction_inputs())
            R.set_extracted([x.value if x is not None else None for x in extracted])

        # equality subprotocol
        session.phase("S", "equalities")
        y_bits = session.msg("S", "R", "y", list(S.equality_message()))
        if mode == "per-string":
            e_str = e_channel.open(0)
            if e_str is None:
                raise ProtocolAbort("e-open")
            e_opened = list(e_str)
        else:
            e_opened = []
            for t in range(n):
                bit = e_channel.open(t)
                if bit is None:
                    raise ProtocolAbort("e-open")
                e_opened.append(bit.value)
        S.on_e_opened(e_opened)
        opened: dict[int, Optional[BitString]] = {}
        for idx in S.equality_open_indices():
            opened[idx] = blob_channel.open(idx)
        if not R.check_equalities(y_bits, opened):
            raise ProtocolAbort("blob-equalities")
        decision = R.after_commit()
        if decision != "accept":
            raise ProtocolAbort(decision)
        outcome.commit_end = session.mark("commit-complete")
        outcome.committed = True
    except ProtocolAbort as abort:
        session.mark(f"abort:{abort.step}")
        outcome.abort_step = abort.step
        return outcome

    if open_phase:
        open_uccompiler(outcome, open_bit_hint=open_bit_hint)
    return outcome


def open_uccompiler(outcome: CompilerOutcome,
                    open_bit_hint: Optional[int] = None) -> Optional[int]:
    """Decommit phase; callable later, e.g. once an ideal commitment opens."""
    session, S, R = outcome.session, outcome.sender, outcome.receiver
    session.phase("S", "open")
    try:
        chosen = S.decommit_choice(b_hint=open_bit_hint)
    except ProtocolAbort as abort:
        session.mark(f"abort:{abort.step}")
        outcome.accepted, outcome.abort_step = False, abort.step
        return None
    session.msg("S", "R", "open-choice", list(chosen))
    opened_pairs: dict[int, tuple] = {}
    for blob in chosen:
        s0 = outcome.blob_channel.open(share_index(blob, 0))
        s1 = outcome.blob_channel.open(share_index(blob, 1))
        opened_pairs[blob] = (s0, s1)
    value = R.check_decommit(opened_pairs)
    outcome.accepted = value is not None
    outcome.value = value
    session.outcome("R", accepted=outcome.accepted, value=value)
    return value


# ---------------------------------------------------------------------------
# The equality subprotocol in isolation
# ---------------------------------------------------------------------------

def blob_equalities_check(y_bits: list[int], e_bits: list[int],
                          opened_shares: dict) -> bool:
    """Pure equality check: y_t must equal the XOR of the opened e_t-shares
    of pair t.  opened_shares maps share_index -> bit."""
    n = len(y_bits)
    for t in range(n):
        e_t = e_bits[t]
        a = opened_shares.get(share_index(2 * t, e_t))
        c = opened_shares.get(share_index(2 * t + 1, e_t))
        if a is None or c is None or y_bits[t] != a ^ c:
            return False
    return True


def run_blob_equalities(n: int, b: int, seed: int,
                        unequal_pairs: tuple = (),
                        tamper_y_pairs: tuple = (),
                        d_noise: int = 3) -> CompilerOutcome:
    """Commit-phase-only run exercising the equality subprotocol.

    unequal_pairs: pair indices whose second blob carries the flipped bit.
    tamper_y_pairs: pair indices whose equality bit the sender inverts.
    """
    unequal = set(unequal_pairs)
    tampered = set(tamper_y_pairs)

    class TweakedSender(HonestCompilerSender):
        def make_blobs(self):
            rng = self.api.rng
            self.shares = []
            for j in range(2 * self.n):
                pair = j // 2
                value = self.b ^ 1 if (pair in unequal and j % 2 == 1) else self.b
                b0 = rng.getrandbits(1)
                self.shares.extend([b0, value ^ b0])
            return [BitString(v, 1) for v in self.shares]

        def equality_message(self):
            y = super().equality_message()
            return [y_t ^ 1 if t in tampered else y_t for t, y_t in enumerate(y)]

    return run_uccompiler(n, b, seed, sender_factory=TweakedSender,
                          open_phase=False, d_noise=d_noise)
