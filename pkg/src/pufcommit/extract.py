"""Straight-line extractors with interface access.

The extractor plays the honest receiver; interface access means it can
additionally read every query any party routed to honest tokens, which
here is a read-only scan of the session event log.  For each sender
query q to the probe token during the commit phase it decodes the
codeword and tests, stride by stride, whether the commitment string c
matches the unmasked or the masked secret:

    c|I_j == st|I_j   and differs from st xor r there  -> bit 0
    c|I_j == (st xor r)|I_j  and differs from st there -> bit 1
    anything else (in particular r|I_j all-zero)       -> no candidate

Candidates are deduplicated by value; a retried query that decodes to
the same string must not spoil extraction.  Exactly one distinct
candidate is the committed string; zero or several mean the sender is
bound to nothing it can open.
"""

from __future__ import annotations

from typing import Optional

from .bits import BitString
from .functionality import EventLog

__all__ = [
    "extract_from_query",
    "probe_queries",
    "run_extractor_modified",
    "run_extractor_original",
    "run_extractor_collective",
]


def extract_from_query(st: BitString, c: BitString, r: BitString,
                       k: int) -> Optional[BitString]:
    """Candidate string from one decoded query, or None."""
    if not (st.n == c.n == r.n):
        raise ValueError(
            f"LEN_MISMATCH: st={st.n}, c={c.n}, r={r.n} must agree")
    if k < 1 or st.n % k:
        raise ValueError(f"LEN_MISMATCH: length {st.n} is not a multiple of k={k}")
    if k == 1:  # single stride spanning the whole string
        masked = st ^ r
        if c == st and c != masked:
            return BitString(0, 1)
        if c == masked and c != st:
            return BitString(1, 1)
        return None
    bits = []
    for j in range(k):
        c_j = c.take_stride(j, k)
        st_j = st.take_stride(j, k)
        masked_j = st_j ^ r.take_stride(j, k)
        if c_j == st_j and c_j != masked_j:
            bits.append(0)
        elif c_j == masked_j and c_j != st_j:
            bits.append(1)
        else:
            return None
    return BitString.from_bits(bits)


def probe_queries(log: EventLog, probe_sid: str, sender: str,
                  before_step: int) -> list[BitString]:
    """All challenges the sender routed to the probe token before the
    commit phase closed; the read-only tap of interface access."""
    out = []
    for rec in log.records:
        if rec.step >= before_step:
            break
        if (rec.kind == "eval" and rec.sid == probe_sid and rec.sender == sender
                and not rec.note.startswith("waiting-state")):
            out.append(rec.payload)
    return out


def _candidates(queries, code, c, r, k) -> set[BitString]:
    found = set()
    for q in queries:
        candidate = extract_from_query(code.dec(q), c, r, k)
        if candidate is not None:
            found.add(candidate)
    return found


def run_extractor_modified(inputs: dict) -> Optional[BitString]:
    """Extraction for the revised single-string protocol."""
    queries = probe_queries(inputs["log"], inputs["probe_sid"], inputs["sender"],
                            inputs["commit_end"])
    found = _candidates(queries, inputs["code"], inputs["c"], inputs["r"], inputs["k"])
    if len(found) == 1:
        return found.pop()
    return None


def run_extractor_original(inputs: dict) -> Optional[BitString]:
    """Extraction for the original flow; bit commitments only."""
    if inputs["k"] != 1:
        raise ValueError("the original extraction procedure is defined for k = 1")
    queries = probe_queries(inputs["log"], inputs["probe_sid"], inputs["sender"],
                            inputs["commit_end"])
    found = _candidates(queries, inputs["code"], inputs["c"], inputs["r"], 1)
    if len(found) == 1:
        return found.pop()
    return None


def run_extractor_collective(inputs: dict) -> list[Optional[BitString]]:
    """Componentwise extraction: every query is tried against every index."""
    queries = probe_queries(inputs["log"], inputs["probe_sid"], inputs["sender"],
                            inputs["commit_end"])
    k = inputs["k"]
    code = inputs["code"]
    decoded = [code.dec(q) for q in queries]
    if k == 1:
        return _collective_bits(decoded, inputs["cs"], inputs["masks"])
    results: list[Optional[BitString]] = []
    for c_i, r_i in zip(inputs["cs"], inputs["masks"]):
        found = set()
        for st in decoded:
            candidate = extract_from_query(st, c_i, r_i, k)
            if candidate is not None:
                found.add(candidate)
        results.append(found.pop() if len(found) == 1 else None)
    return results


def _collective_bits(decoded, cs, masks) -> list[Optional[BitString]]:
    """k = 1 shortcut: a query extracts bit 0 at index i when it decodes to
    c_i, bit 1 when it decodes to c_i xor r_i; index the candidates once
    instead of scanning every (index, query) pair.  A zero mask puts both
    entries on the same key, which correctly yields both candidates."""
    hits: dict[int, list] = {}
    for i, (c_i, r_i) in enumerate(zip(cs, masks)):
        hits.setdefault(c_i.value, []).append((i, 0))
        hits.setdefault((c_i ^ r_i).value, []).append((i, 1))
    found: list[set] = [set() for _ in cs]
    for st in decoded:
        for i, bit in hits.get(st.value, ()):
            found[i].add(bit)
    return [BitString(candidates.pop(), 1) if len(candidates) == 1 else None
            for candidates in found]
