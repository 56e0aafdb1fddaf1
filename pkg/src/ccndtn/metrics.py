"""Metrics aggregated from a simulation trace, plus trace/metrics file I/O.

Everything here is a pure function of the trace records, so metrics can be
recomputed from a saved trace file and will match byte for byte.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

REQUIRED_KEYS = ("t", "node", "event")


class TraceError(ValueError):
    """A trace record is missing required keys or is not an object."""


@dataclass
class Metrics:
    requests: int = 0
    delivered: int = 0
    delivery_ratio: float = 1.0
    mean_delivery_delay_ms: Optional[float] = None
    interest_transmissions: int = 0
    retransmissions: int = 0
    bundle_transmissions: int = 0
    frame_transmissions: int = 0
    frames_dropped: int = 0
    cache_hits: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def _check(record) -> dict:
    if not isinstance(record, dict) or any(k not in record for k in REQUIRED_KEYS):
        raise TraceError(f"malformed trace record: {record!r}")
    return record


def collect_metrics(trace: Iterable[dict]) -> Metrics:
    """Aggregate a trace.

    Delivery delay runs from a request's first expression to the first Data
    reaching the requesting application.  With no requests the delivery
    ratio is 1.0 and the mean delay is ``None``.
    """
    m = Metrics()
    first_sent = {}
    delays = {}
    hits = Counter()
    for rec in trace:
        ev = _check(rec)["event"]
        if ev == "request":
            m.interest_transmissions += 1
            if rec["attempt"] == 0:
                first_sent.setdefault(rec["req"], rec["t"])
            else:
                m.retransmissions += 1
        elif ev == "app_data":
            req = rec["req"]
            if req in first_sent and req not in delays:
                delays[req] = rec["t"] - first_sent[req]
        elif ev == "bundle_tx":
            m.bundle_transmissions += 1
        elif ev == "frame_tx":
            m.frame_transmissions += 1
        elif ev == "frame_drop":
            m.frames_dropped += 1
        elif ev == "cs_hit" or (ev == "bpq_response" and rec.get("source") != "ccn"):
            hits[rec["node"]] += 1

    m.requests = len(first_sent)
    m.delivered = len(delays)
    if m.requests:
        m.delivery_ratio = m.delivered / m.requests
    if delays:
        m.mean_delivery_delay_ms = sum(delays.values()) / len(delays)
    m.cache_hits = dict(sorted(hits.items()))
    return m


def trace_to_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)


def read_trace(text: str) -> list[dict]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(_check(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {lineno}: {exc.msg}") from None
    return out
