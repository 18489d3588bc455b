"""Plain token commitment.

Commit: the sender samples a token and a challenge s, extracts
(st, p) from the response, hands the token over together with p, gets a
uniform mask r of k*l bits back, and publishes c = st XOR (x^l AND r).
Open: the sender reveals (s, x); the receiver re-derives st from the
token it now holds and checks the masking equation.

Runs without a creator channel; the sender's token may keep unbounded
state, which is why the mask is l = 3n bits per committed bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..bits import BitString
from ..functionality import Budgets
from ..session import PartyHandle, ProtocolAbort, Session
from .common import mask_commitment
from .params import CpufParams

__all__ = ["CpufSender", "CpufReceiver", "CpufOutcome", "run_cpuf"]


class CpufSender:
    SID = "cpuf/token"

    def __init__(self, params: CpufParams, x: BitString, api: PartyHandle):
        if x.n != params.k:
            raise ValueError(f"LEN_MISMATCH: value of {x.n} bits, expected {params.k}")
        self.params = params
        self.x = x
        self.api = api

    def setup(self) -> BitString:
        """Create the token, pick s, extract; returns the helper string."""
        api, p = self.api, self.params
        api.create_honest(self.SID, p.pair.puf)
        self.s = BitString.random(p.n, api.rng)
        sigma = api.eval(self.SID, self.s)
        self.st, self.helper = p.pair.fe.gen(sigma, api.rng)
        return self.helper.concat()

    def send_token(self, receiver: str) -> None:
        self.api.handover(self.SID, receiver)

    def commitment(self, r: BitString) -> BitString:
        self.r = r
        return mask_commitment(self.st, self.x, r, self.params.l)

    def opening(self):
        return self.s, self.x


class CpufReceiver:
    def __init__(self, params: CpufParams, api: PartyHandle):
        self.params = params
        self.api = api
        self.token_sid: Optional[str] = None

    def receive_token_and_helper(self, helper: BitString) -> None:
        from ..fuzzy import HelperData
        self.token_sid = self.api.take_handover()
        if self.token_sid is None:
            raise ProtocolAbort("await-token")
        self.helper = HelperData.from_concat(helper, self.params.pair.fe.source_len)

    def draw_mask(self) -> BitString:
        self.r = BitString.random(self.params.mask_len, self.api.rng)
        return self.r

    def receive_commitment(self, c: BitString) -> None:
        if c is None or c.n != self.params.mask_len:
            raise ProtocolAbort("await-c")
        self.c = c

    def check_opening(self, s: BitString, x: BitString) -> Optional[BitString]:
        p = self.params
        if s is None or x is None or s.n != p.n or x.n != p.k:
            return None
        sigma = self.api.eval(self.token_sid, s)
        st = p.pair.fe.rep(sigma, self.helper)
        if self.c == mask_commitment(st, x, self.r, p.l):
            return x
        return None


@dataclass
class CpufOutcome:
    session: Session
    accepted: Optional[bool]      # None when decommit never ran
    value: Optional[BitString]
    abort_step: Optional[str] = None
    commit_end: int = -1
    receiver_view: dict = field(default_factory=dict)
    sender: object = None
    receiver: object = None


def run_cpuf(params: CpufParams, x: BitString, seed: int,
             sender_factory: Callable = CpufSender,
             receiver_factory: Callable = CpufReceiver,
             open_phase: bool = True,
             budgets: Budgets | None = None) -> CpufOutcome:
    session = Session(seed, comm=False,
                      budgets=budgets if budgets is not None else Budgets(k_state=None))
    S = sender_factory(params, x, session.handle_for("S"))
    R = receiver_factory(params, session.handle_for("R"))
    try:
        session.phase("S", "setup")
        helper = S.setup()
        session.begin_exchange_phase("token-to-receiver")
        S.send_token("R")
        R.receive_token_and_helper(session.msg("S", "R", "helper", helper))
        session.phase("R", "mask")
        r = session.msg("R", "S", "mask", R.draw_mask())
        session.phase("S", "commit")
        R.receive_commitment(session.msg("S", "R", "c", S.commitment(r)))
        commit_end = session.mark("commit-complete")
    except ProtocolAbort as abort:
        session.mark(f"abort:{abort.step}")
        return CpufOutcome(session, accepted=False, value=None,
                           abort_step=abort.step, sender=S, receiver=R)

    outcome = CpufOutcome(
        session, accepted=None, value=None, commit_end=commit_end,
        receiver_view={"r": R.r, "c": R.c, "helper": R.helper},
        sender=S, receiver=R,
    )
    if not open_phase:
        return outcome

    session.phase("S", "open")
    try:
        s_open, x_open = S.opening()
        session.msg("S", "R", "opening", (s_open, x_open))
        value = R.check_opening(s_open, x_open)
    except ProtocolAbort as abort:
        session.mark(f"abort:{abort.step}")
        outcome.accepted, outcome.abort_step = False, abort.step
        return outcome
    outcome.accepted = value is not None
    outcome.value = value
    session.outcome("R", accepted=outcome.accepted,
                    value=value.to01() if value is not None else None)
    return outcome
