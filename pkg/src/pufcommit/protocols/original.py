"""Extractable token commitment, original flow (kept as an attack target).

The receiver sends its probe token first and only gets it back at
decommit time, so the sender holds the probe while the mask r is already
known.  The sender carries the committed string under one token and the
probe outputs st_E || p_E under a second one:

Commit: probe travels to the sender; the sender extracts (st_1, p_1) and
(st_2, p_2) from its two tokens, queries the probe on Enc(st_1), hands
both tokens over with p_1, p_2; the receiver replies with masks r_1
(k*l bits) and r_2 (|st_E || p_E| * l bits); the sender publishes
c_1 = st_1 XOR (x^l AND r_1) and c_2 = st_2 XOR ((st_E||p_E)^l AND r_2).

Open: the probe returns together with (s_1, s_2, x, st_E, p_E); the
receiver checks the return fingerprint, both masking equations, and
re-queries the probe on Enc(st_1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..bits import BitString
from ..functionality import Budgets
from ..fuzzy import HelperData
from ..session import PartyHandle, ProtocolAbort, Session
from .common import TestQuery, mask_commitment, record_test_query
from .params import OriginalExtPufParams

__all__ = ["OriginalSender", "OriginalReceiver", "OriginalOutcome",
           "run_original_extpuf"]


class OriginalSender:
    SID_FIRST = "orig/token-1"
    SID_SECOND = "orig/token-2"

    def __init__(self, params: OriginalExtPufParams, x: BitString, api: PartyHandle):
        if x.n != params.k:
            raise ValueError(f"LEN_MISMATCH: value of {x.n} bits, expected {params.k}")
        self.params = params
        self.x = x
        self.api = api
        self.probe_sid: Optional[str] = None

    def receive_probe(self) -> None:
        self.probe_sid = self.api.take_handover()
        if self.probe_sid is None:
            raise ProtocolAbort("await-probe")

    def setup(self) -> tuple:
        api, p = self.api, self.params
        api.create_honest(self.SID_FIRST, p.first.puf)
        api.create_honest(self.SID_SECOND, p.second.puf)
        self.s1 = BitString.random(p.n, api.rng)
        self.s2 = BitString.random(p.n, api.rng)
        self.st1, self.p1 = p.first.fe.gen(api.eval(self.SID_FIRST, self.s1), api.rng)
        self.st2, self.p2 = p.second.fe.gen(api.eval(self.SID_SECOND, self.s2), api.rng)
        response = api.eval(self.probe_sid, p.code.enc(self.st1))
        if response is None or response.n != p.probe.fe.source_len:
            self.st_e = BitString.zeros(p.probe.fe.out_len)
            self.p_e = HelperData(
                BitString.zeros(p.probe.fe.source_len),
                BitString.zeros(p.probe.fe.seed_bits),
            )
        else:
            self.st_e, self.p_e = p.probe.fe.gen(response, api.rng)
        return self.p1.concat(), self.p2.concat()

    def send_tokens(self, receiver: str) -> None:
        self.api.handover(self.SID_FIRST, receiver)
        self.api.handover(self.SID_SECOND, receiver)

    def commitments(self, r1: BitString, r2: BitString) -> tuple:
        p = self.params
        self.r1, self.r2 = r1, r2
        c1 = mask_commitment(self.st1, self.x, r1, p.l)
        c2 = mask_commitment(self.st2, self.st_e.concat(self.p_e.concat()), r2, p.l)
        return c1, c2

    def return_probe(self, receiver: str) -> None:
        self.api.handover(self.probe_sid, receiver)

    def opening(self):
        return self.s1, self.s2, self.x, self.st_e, self.p_e.concat()


class OriginalReceiver:
    PROBE_SID = "orig/probe"

    def __init__(self, params: OriginalExtPufParams, api: PartyHandle):
        self.params = params
        self.api = api
        self.tq: Optional[TestQuery] = None

    def create_probe(self) -> None:
        p = self.params
        self.api.create_honest(self.PROBE_SID, p.probe.puf)
        self.tq = record_test_query(self.api, self.PROBE_SID, p.probe.puf.n, p.probe.fe)

    def send_probe(self, sender: str) -> None:
        self.api.handover(self.PROBE_SID, sender)

    def receive_tokens_and_helpers(self, p1_cat: BitString, p2_cat: BitString) -> None:
        p = self.params
        self.first_sid = self.api.take_handover()
        self.second_sid = self.api.take_handover()
        if self.first_sid is None or self.second_sid is None:
            raise ProtocolAbort("await-tokens")
        self.p1 = HelperData.from_concat(p1_cat, p.first.fe.source_len)
        self.p2 = HelperData.from_concat(p2_cat, p.second.fe.source_len)

    def draw_masks(self) -> tuple:
        p = self.params
        self.r1 = BitString.random(p.k * p.l, self.api.rng)
        self.r2 = BitString.random(p.cat_len * p.l, self.api.rng)
        return self.r1, self.r2

    def receive_commitments(self, c1: BitString, c2: BitString) -> None:
        p = self.params
        if c1 is None or c1.n != p.k * p.l or c2 is None or c2.n != p.cat_len * p.l:
            raise ProtocolAbort("await-c")
        self.c1, self.c2 = c1, c2

    def check_opening(self, s1, s2, x, st_e, p_e_cat) -> Optional[BitString]:
        p = self.params
        returned = self.api.take_handover()
        if returned is None:
            raise ProtocolAbort("await-probe-return")
        if not self.tq.verify(self.api, returned, p.probe.fe):
            raise ProtocolAbort("TQ_FAIL")
        if any(v is None for v in (s1, s2, x, st_e, p_e_cat)):
            return None
        if s1.n != p.n or s2.n != p.n or x.n != p.k:
            return None
        if st_e.n != p.probe.fe.out_len or p_e_cat.n != p.probe.fe.helper_len:
            return None
        st1 = p.first.fe.rep(self.api.eval(self.first_sid, s1), self.p1)
        # The published step reproduces st_2 from the first token, which
        # cannot succeed for honest runs; corrected reading uses the second.
        source_sid = self.first_sid if p.strict_figure_decommit else self.second_sid
        fe2 = p.second.fe
        response2 = self.api.eval(source_sid, s2)
        if response2 is None or response2.n != fe2.source_len:
            return None  # the literal replay is not even well-typed here
        st2 = fe2.rep(response2, self.p2)
        if self.c1 != mask_commitment(st1, x, self.r1, p.l):
            return None
        cat = st_e.concat(p_e_cat)
        if self.c2 != mask_commitment(st2, cat, self.r2, p.l):
            return None
        probe_response = self.api.eval(returned, p.code.enc(st1))
        p_e = HelperData.from_concat(p_e_cat, p.probe.fe.source_len)
        if st_e != p.probe.fe.rep(probe_response, p_e):
            return None
        return x


@dataclass
class OriginalOutcome:
    session: Session
    accepted: Optional[bool]
    value: Optional[BitString]
    abort_step: Optional[str] = None
    commit_end: int = -1
    receiver_view: dict = field(default_factory=dict)
    probe_sid: Optional[str] = None
    sender_name: str = "S"
    sender: object = None
    receiver: object = None

    def extraction_inputs(self) -> dict:
        return {
            "c": self.receiver_view["c"],
            "r": self.receiver_view["r"],
            "k": self.receiver_view["k"],
            "code": self.receiver_view["code"],
            "probe_sid": self.probe_sid,
            "sender": self.sender_name,
            "commit_end": self.commit_end,
            "log": self.session.log,
        }


def run_original_extpuf(params: OriginalExtPufParams, x: BitString, seed: int,
                        sender_factory: Callable = OriginalSender,
                        receiver_factory: Callable = OriginalReceiver,
                        open_phase: bool = True) -> OriginalOutcome:
    # no creator channel in the original model; sender tokens may be stateful
    session = Session(seed, comm=False, budgets=Budgets(k_state=None))
    S = sender_factory(params, x, session.handle_for("S"))
    R = receiver_factory(params, session.handle_for("R"))
    outcome = OriginalOutcome(session, accepted=False, value=None,
                              probe_sid=R.PROBE_SID, sender=S, receiver=R)
    try:
        session.phase("R", "probe-setup")
        R.create_probe()
        session.begin_exchange_phase("probe-to-sender")
        R.send_probe("S")
        session.phase("S", "setup")
        S.receive_probe()
        p1_cat, p2_cat = S.setup()
        session.begin_exchange_phase("tokens-to-receiver")
        S.send_tokens("R")
        session.msg("S", "R", "helpers", (p1_cat, p2_cat))
        R.receive_tokens_and_helpers(p1_cat, p2_cat)
        session.phase("R", "masks")
        r1, r2 = R.draw_masks()
        session.msg("R", "S", "masks", (r1, r2))
        session.phase("S", "commit")
        c1, c2 = S.commitments(r1, r2)
        session.msg("S", "R", "c", (c1, c2))
        R.receive_commitments(c1, c2)
        outcome.commit_end = session.mark("commit-complete")
    except ProtocolAbort as abort:
        session.mark(f"abort:{abort.step}")
        outcome.abort_step = abort.step
        return outcome

    outcome.receiver_view = {
        "r": R.r1, "c": R.c1, "k": params.k, "code": params.code,
        "r2": R.r2, "c2": R.c2,
    }
    outcome.accepted = None
    if not open_phase:
        return outcome

    session.phase("S", "open")
    try:
        session.begin_exchange_phase("probe-return")
        S.return_probe("R")
        s1, s2, x_open, st_e, p_e_cat = S.opening()
        session.msg("S", "R", "opening", (s1, s2, x_open, st_e, p_e_cat))
        value = R.check_opening(s1, s2, x_open, st_e, p_e_cat)
    except ProtocolAbort as abort:
        session.mark(f"abort:{abort.step}")
        outcome.accepted, outcome.abort_step = False, abort.step
        return outcome
    outcome.accepted = value is not None
    outcome.value = value
    session.outcome("R", accepted=outcome.accepted,
                    value=value.to01() if value is not None else None)
    return outcome
