"""Collective extractable commitment: N strings under one token pair.

The revised single-string flow, vectorized: one sender token serves all
N strings (one challenge s^i per string), one probe token answers all N
codeword queries while the sender holds it, and each string gets its own
mask r^i and commitment string c^i.  Decommitments are per index and can
happen at any later time, in any order, repeatedly.

Token traffic stays at two tokens and two exchange phases total no
matter how many strings are committed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..bits import BitString
from ..functionality import Budgets
from ..fuzzy import HelperData
from ..session import PartyHandle, ProtocolAbort, Session
from .common import TestQuery, mask_commitment, record_test_query
from .extpuf import EXTPUF_BUDGETS
from .params import ExtPufParams

__all__ = ["CollectiveSender", "CollectiveReceiver", "CollectiveOutcome",
           "run_collective"]


class CollectiveSender:
    SID = "coll/token"

    def __init__(self, params: ExtPufParams, values: list[BitString],
                 api: PartyHandle, label: str = ""):
        for v in values:
            if v.n != params.k:
                raise ValueError(f"LEN_MISMATCH: value of {v.n} bits, expected {params.k}")
        self.params = params
        self.values = list(values)
        self.n_strings = len(values)
        self.api = api
        self.sid = f"{label}{self.SID}"
        self.probe_sid: Optional[str] = None

    def setup(self) -> list[BitString]:
        api, p = self.api, self.params
        api.create_honest(self.sid, p.main.puf)
        self.s = []
        self.st = []
        self.helpers = []
        for _ in range(self.n_strings):
            s_i = BitString.random(p.n, api.rng)
            st_i, p_i = p.main.fe.gen(api.eval(self.sid, s_i), api.rng)
            self.s.append(s_i)
            self.st.append(st_i)
            self.helpers.append(p_i)
        return [h.concat() for h in self.helpers]

    def send_token(self, receiver: str) -> None:
        self.api.handover(self.sid, receiver)

    def query_probe(self) -> None:
        p = self.params
        self.probe_sid = self.api.take_handover()
        if self.probe_sid is None:
            raise ProtocolAbort("await-probe")
        self.st_e = []
        self.p_e = []
        for st_i in self.st:
            response = self.api.eval(self.probe_sid, p.code.enc(st_i))
            if response is None or response.n != p.probe.fe.source_len:
                self.st_e.append(BitString.zeros(p.probe.fe.out_len))
                self.p_e.append(HelperData(
                    BitString.zeros(p.probe.fe.source_len),
                    BitString.zeros(p.probe.fe.seed_bits),
                ))
            else:
                st_e_i, p_e_i = p.probe.fe.gen(response, self.api.rng)
                self.st_e.append(st_e_i)
                self.p_e.append(p_e_i)

    def return_probe(self, receiver: str) -> None:
        self.api.handover(self.probe_sid, receiver)

    def commitments(self, masks: list[BitString]) -> list[BitString]:
        self.masks = list(masks)
        return [
            mask_commitment(self.st[i], self.values[i], masks[i], self.params.n)
            for i in range(self.n_strings)
        ]

    def opening(self, index: int):
        return (index, self.s[index], self.values[index],
                self.st_e[index], self.p_e[index].concat())


class CollectiveReceiver:
    PROBE_SID = "coll/probe"

    def __init__(self, params: ExtPufParams, n_strings: int, api: PartyHandle,
                 label: str = ""):
        self.params = params
        self.n_strings = n_strings
        self.api = api
        self.probe_sid = f"{label}{self.PROBE_SID}"
        self.tq: Optional[TestQuery] = None

    def create_probe(self) -> None:
        p = self.params
        self.api.create_honest(self.probe_sid, p.probe.puf)
        self.tq = record_test_query(self.api, self.probe_sid, p.probe.puf.n, p.probe.fe)

    def send_probe(self, sender: str) -> None:
        self.api.handover(self.probe_sid, sender)

    def receive_token_and_helpers(self, helper_cats: list[BitString]) -> None:
        p = self.params
        self.token_sid = self.api.take_handover()
        if self.token_sid is None or len(helper_cats) != self.n_strings:
            raise ProtocolAbort("await-token")
        self.helpers = [
            HelperData.from_concat(h, p.main.fe.source_len) for h in helper_cats
        ]

    def verify_return(self) -> None:
        returned = self.api.take_handover()
        if returned is None:
            raise ProtocolAbort("await-probe-return")
        self.returned_probe = returned
        if not self.tq.verify(self.api, returned, self.params.probe.fe):
            raise ProtocolAbort("TQ_FAIL")

    def draw_masks(self) -> list[BitString]:
        self.masks = [
            BitString.random(self.params.mask_len, self.api.rng)
            for _ in range(self.n_strings)
        ]
        return self.masks

    def receive_commitments(self, cs: list[BitString]) -> None:
        if len(cs) != self.n_strings or any(
            c is None or c.n != self.params.mask_len for c in cs
        ):
            raise ProtocolAbort("await-c")
        self.cs = list(cs)

    def check_opening(self, index, s, x, st_e, p_e_cat) -> Optional[BitString]:
        p = self.params
        if index is None or not 0 <= index < self.n_strings:
            return None
        if any(v is None for v in (s, x, st_e, p_e_cat)):
            return None
        if s.n != p.n or x.n != p.k:
            return None
        if st_e.n != p.probe.fe.out_len or p_e_cat.n != p.probe.fe.helper_len:
            return None
        st = p.main.fe.rep(self.api.eval(self.token_sid, s), self.helpers[index])
        if self.cs[index] != mask_commitment(st, x, self.masks[index], p.n):
            return None
        probe_response = self.api.eval(self.returned_probe, p.code.enc(st))
        p_e = HelperData.from_concat(p_e_cat, p.probe.fe.source_len)
        if st_e != p.probe.fe.rep(probe_response, p_e):
            return None
        return x


@dataclass
class CollectiveOutcome:
    session: Session
    committed: bool
    abort_step: Optional[str] = None
    commit_end: int = -1
    opened: dict = field(default_factory=dict)     # index -> accepted value or None
    receiver_view: dict = field(default_factory=dict)
    probe_sid: Optional[str] = None
    sender_name: str = "S"
    sender: object = None
    receiver: object = None

    def extraction_inputs(self) -> dict:
        return {
            "cs": self.receiver_view["cs"],
            "masks": self.receiver_view["masks"],
            "k": self.receiver_view["k"],
            "code": self.receiver_view["code"],
            "probe_sid": self.probe_sid,
            "sender": self.sender_name,
            "commit_end": self.commit_end,
            "log": self.session.log,
        }


def run_collective_commit(params: ExtPufParams, values: list[BitString],
                          session: Session,
                          sender_factory: Callable = CollectiveSender,
                          receiver_factory: Callable = CollectiveReceiver,
                          sender_name: str = "S", receiver_name: str = "R",
                          label: str = "") -> CollectiveOutcome:
    """Commit phase only, inside a caller-owned session; decommits go
    through open_index afterwards."""
    S = sender_factory(params, values, session.handle_for(sender_name), label=label)
    R = receiver_factory(params, len(values), session.handle_for(receiver_name),
                         label=label)
    outcome = CollectiveOutcome(session, committed=False, sender_name=sender_name,
                                sender=S, receiver=R)
    try:
        session.phase(receiver_name, f"{label}probe-setup")
        R.create_probe()
        session.phase(sender_name, f"{label}setup")
        helpers = S.setup()
        session.begin_exchange_phase(f"{label}token-swap")
        S.send_token(receiver_name)
        R.receive_token_and_helpers(
            session.msg(sender_name, receiver_name, "helper", helpers))
        R.send_probe(sender_name)
        session.phase(sender_name, f"{label}probe-query")
        S.query_probe()
        session.begin_exchange_phase(f"{label}probe-return")
        S.return_probe(receiver_name)
        session.phase(receiver_name, f"{label}verify-return")
        R.verify_return()
        masks = session.msg(receiver_name, sender_name, "mask", R.draw_masks())
        session.phase(sender_name, f"{label}commit")
        R.receive_commitments(
            session.msg(sender_name, receiver_name, "c", S.commitments(masks)))
        outcome.commit_end = session.mark(f"{label}commit-complete")
    except ProtocolAbort as abort:
        session.mark(f"abort:{label}{abort.step}")
        outcome.abort_step = abort.step
        return outcome
    outcome.committed = True
    outcome.probe_sid = R.returned_probe
    outcome.receiver_view = {
        "cs": R.cs, "masks": R.masks, "k": params.k, "code": params.code,
    }
    return outcome


def open_index(outcome: CollectiveOutcome, index: int,
               receiver_name: str = "R") -> Optional[BitString]:
    """One decommitment; may be called at any time after commit, repeatedly."""
    session = outcome.session
    S, R = outcome.sender, outcome.receiver
    opening = S.opening(index)
    session.msg(outcome.sender_name, receiver_name, "opening", opening)
    value = R.check_opening(*opening)
    outcome.opened[index] = value
    session.outcome(receiver_name, index=index, accepted=value is not None,
                    value=value.to01() if value is not None else None)
    return value


def run_collective(params: ExtPufParams, values: list[BitString], seed: int,
                   sender_factory: Callable = CollectiveSender,
                   receiver_factory: Callable = CollectiveReceiver,
                   open_indices: Optional[list[int]] = None,
                   budgets: Budgets = EXTPUF_BUDGETS) -> CollectiveOutcome:
    """Whole-protocol convenience runner: commit, then open the given
    indices (all of them by default)."""
    session = Session(seed, comm=True, budgets=budgets)
    outcome = run_collective_commit(params, values, session,
                                    sender_factory, receiver_factory)
    if not outcome.committed:
        return outcome
    indices = list(range(len(values))) if open_indices is None else open_indices
    for i in indices:
        open_index(outcome, i)
    return outcome
