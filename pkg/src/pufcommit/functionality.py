"""Trusted-setup message routers for PUF creation, evaluation and handover.

The communicating router mediates six message kinds: init, eval, inmsg,
handover, ready, received.  Creation registers either a sampled honest
instance or a malicious machine (which always receives its own fresh
embedded honest instance).  Evaluation answers only the current owner,
or the adversary while a token is in transit.  A three-step transfer
(handover by the owner, ready and received by the adversary) moves
ownership.  Malicious tokens may exchange bits with their creator within
per-sid budgets: incoming bits are debited before the machine runs, and
outgoing messages are dropped once the budget is gone.

Every handled message is appended to a shared event log, including the
silent drops: an invalid message never raises, it simply leaves the
router in the waiting state, which is what honest parties experience as
a timeout.  Structurally malformed messages are the one exception and
raise MALFORMED.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from random import Random
from typing import Optional

from .bits import BitString
from .puf import MachineProgram, MaliciousPufMachine, PufInstance, PufParams, sample_puf

__all__ = [
    "ADVERSARY",
    "EventLog",
    "Budgets",
    "CommPufFunctionality",
    "NoCommPufFunctionality",
    "BitCommitmentFunctionality",
    "audit_budgets",
    "audit_single_ownership",
]

ADVERSARY = "ADV"


def _encode(obj):
    if isinstance(obj, BitString):
        return {"len": obj.n, "hex": obj.hex()}
    if isinstance(obj, (list, tuple)):
        return [_encode(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if obj is None or isinstance(obj, (str, int, bool, float)):
        return obj
    return repr(obj)


@dataclass
class EventRecord:
    step: int
    kind: str
    sid: Optional[str]
    sender: Optional[str]
    payload: object
    deliveries: list
    note: str = ""

    def to_line(self) -> str:
        return json.dumps(
            {
                "step": self.step,
                "kind": self.kind,
                "sid": self.sid,
                "sender": self.sender,
                "payload": _encode(self.payload),
                "deliveries": _encode(self.deliveries),
                "note": self.note,
            },
            sort_keys=True,
        )


class EventLog:
    """Append-only, serially numbered record of one session."""

    def __init__(self):
        self.records: list[EventRecord] = []

    def append(self, kind: str, sid=None, sender=None, payload=None,
               deliveries=(), note: str = "") -> EventRecord:
        rec = EventRecord(
            step=len(self.records), kind=kind, sid=sid, sender=sender,
            payload=payload, deliveries=list(deliveries), note=note,
        )
        self.records.append(rec)
        return rec

    def __len__(self):
        return len(self.records)

    def serialize(self) -> str:
        return "\n".join(rec.to_line() for rec in self.records) + "\n"


@dataclass(frozen=True)
class Budgets:
    """Bit budgets for malicious tokens; None means unbounded."""

    k_state: Optional[int] = 0
    k_in: Optional[int] = None
    k_out: Optional[int] = 0


@dataclass
class _TokenRecord:
    sid: str
    mode: str                      # honest | malicious
    instance: PufInstance          # the sampled instance (embedded one if malicious)
    owner: Optional[str]
    transit_to: Optional[str] = None
    prev_owner: Optional[str] = None
    creator: str = ""
    machine: Optional[MaliciousPufMachine] = None
    budgets: Budgets = field(default_factory=Budgets)
    in_used: int = 0
    out_used: int = 0
    receipts: list = field(default_factory=list)


class CommPufFunctionality:
    """Router for possibly-communicating malicious tokens."""

    allow_inmsg = True

    def __init__(self, rng: Random, log: EventLog, budgets: Budgets = Budgets()):
        self.rng = rng
        self.log = log
        self.budgets = budgets
        self.tokens: dict[str, _TokenRecord] = {}

    # -- helpers ----------------------------------------------------------

    def _drop(self, kind, sid, sender, payload, note) -> list:
        self.log.append(kind, sid=sid, sender=sender, payload=payload,
                        deliveries=[], note=f"waiting-state: {note}")
        return []

    def _done(self, kind, sid, sender, payload, deliveries, note="") -> list:
        self.log.append(kind, sid=sid, sender=sender, payload=payload,
                        deliveries=deliveries, note=note)
        return deliveries

    # -- the single entry point -------------------------------------------

    def handle(self, msg: tuple) -> list:
        """Route one message; returns [(recipient, message_tuple), ...]."""
        if not isinstance(msg, tuple) or not msg or not isinstance(msg[0], str):
            raise ValueError(f"MALFORMED: {msg!r}")
        kind = msg[0]
        try:
            handler = getattr(self, f"_on_{kind}")
        except AttributeError:
            raise ValueError(f"MALFORMED: unknown message kind {kind!r}") from None
        try:
            return handler(*msg[1:])
        except TypeError as exc:
            raise ValueError(f"MALFORMED: bad arity for {kind!r}: {exc}") from None

    # -- init ---------------------------------------------------------------

    def _on_init(self, sid: str, sender: str, mode: str,
                 params: PufParams, program: MachineProgram | None = None,
                 budgets: Budgets | None = None) -> list:
        if mode not in ("honest", "malicious"):
            raise ValueError(f"MALFORMED: init mode {mode!r}")
        if mode == "malicious" and program is None:
            raise ValueError("MALFORMED: malicious init without a program")
        if sid in self.tokens:
            return self._drop("init", sid, sender, mode, "sid already registered")
        budgets = budgets or self.budgets
        instance = sample_puf(params, self.rng)
        machine = None
        if mode == "malicious":
            inner = instance if program.wants_inner else None
            machine = MaliciousPufMachine(program, budgets.k_state, inner)
        self.tokens[sid] = _TokenRecord(
            sid=sid, mode=mode, instance=instance, owner=sender,
            creator=sender, machine=machine, budgets=budgets,
        )
        return self._done("init", sid, sender, mode,
                          [(sender, ("initialized", sid))],
                          note=f"instance={instance.puf_id}")

    # -- eval ----------------------------------------------------------------

    def _may_eval(self, rec: _TokenRecord, sender: str) -> bool:
        if rec.owner == sender and rec.transit_to is None:
            return True
        return sender == ADVERSARY and rec.owner is None

    def _on_eval(self, sid: str, sender: str, challenge: BitString) -> list:
        if not isinstance(challenge, BitString):
            raise ValueError("MALFORMED: eval challenge must be a BitString")
        rec = self.tokens.get(sid)
        if rec is None:
            return self._drop("eval", sid, sender, challenge, "unknown sid")
        if not self._may_eval(rec, sender):
            return self._drop("eval", sid, sender, challenge, "not the owner")
        if rec.mode == "honest":
            sigma = rec.instance.respond(challenge, self.rng)
            return self._done("eval", sid, sender, challenge,
                              [(sender, ("response", sid, challenge, sigma))],
                              note="honest")
        sigma, m_out = rec.machine.step("query", challenge, self.rng)
        deliveries = [(sender, ("response", sid, challenge, sigma))]
        note = "malicious"
        if m_out is not None:
            sent, why = self._try_outmsg(rec, m_out, deliveries)
            note += f" outmsg={'sent' if sent else 'dropped:' + why}"
        return self._done("eval", sid, sender, challenge, deliveries, note=note)

    def _try_outmsg(self, rec: _TokenRecord, m_out: BitString, deliveries: list):
        k_out = rec.budgets.k_out
        if k_out is not None and rec.out_used + m_out.n > k_out:
            return False, "k_out"
        rec.out_used += m_out.n
        deliveries.append((rec.creator, ("outmsg", rec.sid, m_out)))
        return True, ""

    # -- creator-to-token messages -------------------------------------------

    def _on_inmsg(self, sid: str, sender: str, m_in: BitString) -> list:
        if not isinstance(m_in, BitString):
            raise ValueError("MALFORMED: inmsg payload must be a BitString")
        if not self.allow_inmsg:
            return self._drop("inmsg", sid, sender, m_in, "no creator channel")
        rec = self.tokens.get(sid)
        if rec is None or rec.machine is None or rec.creator != sender:
            return self._drop("inmsg", sid, sender, m_in, "no such malicious sid for sender")
        k_in = rec.budgets.k_in
        if k_in is not None and rec.in_used + m_in.n > k_in:
            return self._drop("inmsg", sid, sender, m_in, "k_in budget")
        rec.in_used += m_in.n
        _, m_out = rec.machine.step("msg", m_in, self.rng)
        deliveries: list = []
        note = "debited"
        if m_out is not None:
            sent, why = self._try_outmsg(rec, m_out, deliveries)
            note += f" outmsg={'sent' if sent else 'dropped:' + why}"
        return self._done("inmsg", sid, sender, m_in, deliveries, note=note)

    # -- three-step ownership transfer -----------------------------------------

    def _on_handover(self, sid: str, sender: str, target: str) -> list:
        rec = self.tokens.get(sid)
        if rec is None or rec.owner != sender or rec.transit_to is not None:
            return self._drop("handover", sid, sender, target, "sender does not hold sid")
        rec.prev_owner = rec.owner
        rec.owner = None
        rec.transit_to = target
        return self._done("handover", sid, sender, target,
                          [(ADVERSARY, ("invoke", sid, sender, target))])

    def _on_ready(self, sid: str, sender: str) -> list:
        rec = self.tokens.get(sid)
        if sender != ADVERSARY or rec is None or rec.transit_to is None:
            return self._drop("ready", sid, sender, None, "no transfer in flight")
        new_owner = rec.transit_to
        rec.owner = new_owner
        rec.transit_to = None
        rec.receipts.append(rec.prev_owner)
        return self._done("ready", sid, sender, None,
                          [(new_owner, ("handover", sid, rec.prev_owner))])

    def _on_received(self, sid: str, sender: str, original_owner: str) -> list:
        rec = self.tokens.get(sid)
        if sender != ADVERSARY or rec is None or original_owner not in rec.receipts:
            return self._drop("received", sid, sender, original_owner, "no receipt")
        return self._done("received", sid, sender, original_owner,
                          [(original_owner, ("received", sid))])

    # -- introspection (not part of the message interface) ---------------------

    def owner_of(self, sid: str) -> Optional[str]:
        rec = self.tokens.get(sid)
        return rec.owner if rec else None

    def counters(self, sid: str) -> tuple[int, int]:
        rec = self.tokens[sid]
        return rec.in_used, rec.out_used


class NoCommPufFunctionality(CommPufFunctionality):
    """Router without the creator channel: inmsg is not a recognized case
    and tokens never get bits out.  Behaviorally identical to the
    communicating router with zero in/out budgets."""

    allow_inmsg = False

    def __init__(self, rng: Random, log: EventLog, budgets: Budgets = Budgets()):
        super().__init__(rng, log, Budgets(k_state=budgets.k_state, k_in=0, k_out=0))


class BitCommitmentFunctionality:
    """Reference ideal bit commitment.

    commit(b) records the bit once and announces the commitment; open
    reveals (open, b) to the receiver and the adversary and halts.
    """

    def __init__(self, log: EventLog, sender: str = "S~", receiver: str = "R~"):
        self.log = log
        self.sender = sender
        self.receiver = receiver
        self.recorded: Optional[int] = None
        self.halted = False

    def handle(self, msg: tuple) -> list:
        if not isinstance(msg, tuple) or not msg:
            raise ValueError(f"MALFORMED: {msg!r}")
        kind = msg[0]
        if kind == "commit":
            _, sender, b = msg
            if b not in (0, 1):
                raise ValueError(f"MALFORMED: commit bit {b!r}")
            if self.halted or sender != self.sender or self.recorded is not None:
                self.log.append("fcom-commit", sender=sender, payload=b,
                                deliveries=[], note="ignored")
                return []
            self.recorded = b
            deliveries = [(self.receiver, ("committed",)), (ADVERSARY, ("committed",))]
            self.log.append("fcom-commit", sender=sender, payload=b, deliveries=deliveries)
            return deliveries
        if kind == "open":
            _, sender = msg
            if self.halted or sender != self.sender or self.recorded is None:
                self.log.append("fcom-open", sender=sender, deliveries=[], note="ignored")
                return []
            self.halted = True
            b = self.recorded
            deliveries = [(self.receiver, ("open", b)), (ADVERSARY, ("open", b))]
            self.log.append("fcom-open", sender=sender, payload=b, deliveries=deliveries)
            return deliveries
        raise ValueError(f"MALFORMED: unknown message kind {kind!r}")


# ---------------------------------------------------------------------------
# Log audits
# ---------------------------------------------------------------------------

def audit_budgets(func: CommPufFunctionality) -> None:
    """Recompute delivered in/out bits per sid from the log and assert they
    never exceed the registered budgets."""
    in_bits: dict[str, int] = {}
    out_bits: dict[str, int] = {}
    for rec in func.log.records:
        if rec.kind == "inmsg" and not rec.note.startswith("waiting-state"):
            in_bits[rec.sid] = in_bits.get(rec.sid, 0) + rec.payload.n
        for _, message in rec.deliveries:
            if message[0] == "outmsg":
                sid = message[1]
                out_bits[sid] = out_bits.get(sid, 0) + message[2].n
    for sid, used in in_bits.items():
        limit = func.tokens[sid].budgets.k_in
        if limit is not None and used > limit:
            raise AssertionError(f"k_in exceeded for {sid}: {used} > {limit}")
    for sid, used in out_bits.items():
        limit = func.tokens[sid].budgets.k_out
        if limit is not None and used > limit:
            raise AssertionError(f"k_out exceeded for {sid}: {used} > {limit}")


def audit_single_ownership(func: CommPufFunctionality) -> None:
    """Replay the log and assert each sid always has exactly one owner or is
    in transit, never both, at every step."""
    state: dict[str, tuple] = {}
    for rec in func.log.records:
        if rec.note.startswith("waiting-state"):
            continue
        if rec.kind == "init":
            if rec.sid in state:
                raise AssertionError(f"duplicate init accepted for {rec.sid}")
            state[rec.sid] = (rec.sender, None)
        elif rec.kind == "handover":
            owner, transit = state[rec.sid]
            if owner != rec.sender or transit is not None:
                raise AssertionError(f"handover from non-owner at step {rec.step}")
            state[rec.sid] = (None, rec.payload)
        elif rec.kind == "ready":
            owner, transit = state[rec.sid]
            if owner is not None or transit is None:
                raise AssertionError(f"ready without transfer at step {rec.step}")
            state[rec.sid] = (transit, None)
        if rec.sid in state:
            owner, transit = state[rec.sid]
            if (owner is None) == (transit is None):
                raise AssertionError(
                    f"sid {rec.sid} neither owned nor in transit at step {rec.step}"
                )
