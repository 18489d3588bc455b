"""One protocol session: deterministic scheduler, party handles, transcript.

A session owns a functionality instance, a shared event log, and one
labeled randomness stream per participant, all derived from a single
master seed.  Protocol runners drive the parties phase by phase in a
fixed order; the only scheduling freedom (when a handed-over token is
actually delivered) belongs to the adversary hook, whose default
completes every transfer immediately.

Everything that happens lands in the same ordered log: router events,
direct protocol messages, phase annotations, exchange-phase markers and
outcomes.  With a fixed seed the serialized log is byte-identical across
runs.
"""

from __future__ import annotations

from random import Random
from typing import Optional

from .bits import BitString
from .functionality import (
    ADVERSARY,
    Budgets,
    CommPufFunctionality,
    EventLog,
    NoCommPufFunctionality,
)
from .prf import derive_seed
from .puf import MachineProgram, PufParams

__all__ = [
    "ProtocolAbort",
    "Session",
    "PartyHandle",
    "ImmediateDelivery",
    "count_resources",
    "transcript_features",
]


class ProtocolAbort(Exception):
    """Raised when an honest party gives up; carries the aborting step."""

    def __init__(self, step: str):
        super().__init__(f"PROTOCOL_ABORT({step})")
        self.step = step


class ImmediateDelivery:
    """Default adversary: completes every token transfer at once."""

    def on_invoke(self, session: "Session", sid: str, frm: str, to: str) -> None:
        session.route(session.functionality.handle(("ready", sid, ADVERSARY)))
        session.route(session.functionality.handle(("received", sid, ADVERSARY, frm)))


class CuriousDelivery(ImmediateDelivery):
    """Evaluates every in-transit token once before delivering it."""

    def __init__(self, challenge_for):
        self.challenge_for = challenge_for
        self.observed: list = []

    def on_invoke(self, session, sid, frm, to):
        challenge = self.challenge_for(sid)
        if challenge is not None:
            deliveries = session.functionality.handle(("eval", sid, ADVERSARY, challenge))
            for recipient, message in list(deliveries):
                if message[0] == "response" and recipient == ADVERSARY:
                    self.observed.append((sid, message[2], message[3]))
                    deliveries.remove((recipient, message))
            session.route(deliveries)
        super().on_invoke(session, sid, frm, to)


class Session:
    def __init__(self, seed: int, comm: bool = True, budgets: Budgets | None = None,
                 adversary=None):
        self.seed = seed
        self.log = EventLog()
        budgets = budgets if budgets is not None else Budgets()
        func_cls = CommPufFunctionality if comm else NoCommPufFunctionality
        self.functionality = func_cls(Random(derive_seed(seed, "func")), self.log, budgets)
        self.adversary = adversary or ImmediateDelivery()
        self.mailboxes: dict[str, list] = {}
        self.exchange_phases = 0
        self._handles: dict[str, PartyHandle] = {}

    def handle_for(self, name: str) -> "PartyHandle":
        if name not in self._handles:
            self._handles[name] = PartyHandle(self, name)
            self.mailboxes.setdefault(name, [])
        return self._handles[name]

    # -- transcript annotations --------------------------------------------

    def phase(self, role: str, name: str) -> None:
        self.log.append("phase", sender=role, payload=name)

    def msg(self, frm: str, to: str, name: str, payload) -> object:
        """Record a direct protocol message and hand the payload over."""
        self.log.append("protocol-msg", sender=frm, payload=payload,
                        deliveries=[(to, (name,))], note=name)
        return payload

    def begin_exchange_phase(self, label: str) -> None:
        self.exchange_phases += 1
        self.log.append("exchange-phase", payload=label,
                        note=f"index={self.exchange_phases}")

    def outcome(self, role: str, **fields) -> None:
        self.log.append("outcome", sender=role, payload=dict(sorted(fields.items())))

    def mark(self, label: str) -> int:
        """Named position in the log; returns the step index."""
        return self.log.append("mark", payload=label).step

    # -- functionality plumbing ---------------------------------------------

    def route(self, deliveries: list, expect_for: str | None = None):
        """Queue deliveries into mailboxes; return the response payload
        addressed to expect_for, if any."""
        answer = None
        for recipient, message in deliveries:
            if message[0] == "response" and recipient == expect_for:
                answer = message[3]
            elif recipient == ADVERSARY and message[0] == "invoke":
                _, sid, frm, to = message
                self.adversary.on_invoke(self, sid, frm, to)
            else:
                self.mailboxes.setdefault(recipient, []).append(message)
        return answer

    def transfer(self, sid: str, frm: str, to: str) -> None:
        deliveries = self.functionality.handle(("handover", sid, frm, to))
        self.route(deliveries)


class PartyHandle:
    """Capability a party uses to touch the functionality and the wire."""

    def __init__(self, session: Session, name: str):
        self.session = session
        self.name = name
        self.rng = Random(derive_seed(session.seed, "party", name))

    # -- token lifecycle ------------------------------------------------------

    def create_honest(self, sid: str, params: PufParams) -> str:
        deliveries = self.session.functionality.handle(
            ("init", sid, self.name, "honest", params))
        if not deliveries:
            raise ProtocolAbort(f"init({sid})")
        self.session.route(deliveries, expect_for=self.name)
        return sid

    def create_malicious(self, sid: str, params: PufParams, program: MachineProgram,
                         budgets: Budgets | None = None) -> str:
        deliveries = self.session.functionality.handle(
            ("init", sid, self.name, "malicious", params, program, budgets))
        if not deliveries:
            raise ProtocolAbort(f"init({sid})")
        self.session.route(deliveries, expect_for=self.name)
        return sid

    def eval(self, sid: str, challenge: BitString) -> Optional[BitString]:
        """Query a token; None when the router stays silent or the token
        refuses to answer."""
        deliveries = self.session.functionality.handle(
            ("eval", sid, self.name, challenge))
        if not deliveries:
            return None
        return self.session.route(deliveries, expect_for=self.name)

    def send_to_token(self, sid: str, payload: BitString) -> None:
        deliveries = self.session.functionality.handle(
            ("inmsg", sid, self.name, payload))
        self.session.route(deliveries)

    def handover(self, sid: str, to: str) -> None:
        self.session.transfer(sid, self.name, to)

    # -- wire and inbox ----------------------------------------------------------

    def send(self, to: str, name: str, payload):
        return self.session.msg(self.name, to, name, payload)

    def inbox(self) -> list:
        return self.session.mailboxes.setdefault(self.name, [])

    def take_handover(self) -> Optional[str]:
        """Pop the next delivered token sid from the inbox, if any."""
        box = self.inbox()
        for i, message in enumerate(box):
            if message[0] == "handover":
                box.pop(i)
                return message[1]
        return None


# ---------------------------------------------------------------------------
# Log-derived summaries
# ---------------------------------------------------------------------------

def count_resources(log: EventLog) -> dict:
    """Tokens created and exchange phases, measured from the log."""
    pufs = sum(
        1 for rec in log.records
        if rec.kind == "init" and not rec.note.startswith("waiting-state")
    )
    phases = sum(1 for rec in log.records if rec.kind == "exchange-phase")
    queries = sum(
        1 for rec in log.records
        if rec.kind == "eval" and not rec.note.startswith("waiting-state")
    )
    return {"pufs_created": pufs, "exchange_phases": phases, "queries": queries}


def _payload_len(payload) -> int:
    if isinstance(payload, BitString):
        return payload.n
    if isinstance(payload, (list, tuple)):
        return sum(_payload_len(p) for p in payload)
    return 0


def transcript_features(log: EventLog) -> tuple:
    """Finite, seed-stable summary of one session for histogram comparison:
    message names with lengths, outcomes, and abort markers."""
    feats: list = []
    for rec in log.records:
        if rec.kind == "protocol-msg":
            feats.append((rec.note, _payload_len(rec.payload)))
        elif rec.kind == "outcome":
            feats.append(("outcome", rec.sender, tuple(sorted(rec.payload.items()))))
        elif rec.kind == "mark" and str(rec.payload).startswith("abort"):
            feats.append(("abort", rec.payload))
    return tuple(feats)
