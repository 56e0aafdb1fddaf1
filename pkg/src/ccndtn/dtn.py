"""DTN bundle node: store-carry-forward with BPQ query answering.

Forwarding is epidemic.  When a contact comes up the node pushes every
cached bundle the neighbor has not been sent yet, decrementing the hop
limit; bundles whose hop limit is exhausted stay put.  A query that can be
answered from the cache with a complete response is answered and never
forwarded further.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .names import ANY, Eid, node_eid
from .wire.bundle import BpqBlock, BpqKind, Bundle, bundle_id_text

DEFAULT_HOP_LIMIT = 8

RESPONSE_KINDS = (BpqKind.RESPONSE, BpqKind.RESPONSE_DO_NOT_FRAGMENT)


@dataclass
class BundleCacheEntry:
    bundle: Bundle
    received_at: int
    forwarded_to: set = field(default_factory=set)


@dataclass(frozen=True)
class Deliver:
    """Hand a bundle up to the local gateway."""

    bundle: Bundle


@dataclass(frozen=True)
class Transmit:
    neighbor: str
    bundle: Bundle


Action = Union[Deliver, Transmit]


def kind_label(bundle: Bundle) -> str:
    return bundle.bpq.kind.name.lower() if bundle.bpq else "plain"


def _answers(entry: BundleCacheEntry, query: BpqBlock) -> bool:
    q = entry.bundle.bpq
    if q is None or q.value != query.value or not q.is_complete:
        return False
    if q.kind in RESPONSE_KINDS:
        return True
    # publish bundles count as responses only when they carry the content
    return q.kind is BpqKind.PUBLISH and bool(entry.bundle.payload)


def bpq_match(cache, query: BpqBlock) -> Optional[Bundle]:
    """Newest complete response in ``cache`` whose value equals the query's.

    ``cache`` is any iterable of :class:`BundleCacheEntry` (or a mapping of
    them).  Fragmented responses are never returned.
    """
    entries = cache.values() if hasattr(cache, "values") else cache
    hits = [e.bundle for e in entries if _answers(e, query)]
    if not hits:
        return None
    return max(hits, key=lambda b: (b.creation_timestamp, str(b.source)))


def _nop_trace(now, event, **fields):
    pass


class BundleNode:
    """Bundle daemon of one node.

    ``responder`` lets a co-located gateway answer queries the cache cannot:
    it receives the query bundle and returns a response bundle or ``None``.
    """

    def __init__(
        self,
        node_id: str,
        default_hop_limit: int = DEFAULT_HOP_LIMIT,
        trace: Optional[Callable] = None,
    ):
        self.node_id = node_id
        self.eid = node_eid(node_id)
        self.default_hop_limit = default_hop_limit
        self.registrations: set[Eid] = {self.eid}
        self.cache: dict = {}
        self.seen: set = set()
        self.up_neighbors: set[str] = set()
        self.responder: Optional[Callable[[Bundle, int], Optional[Bundle]]] = None
        self.trace = trace or _nop_trace
        self._seq = 0

    def register_any(self) -> None:
        """Accept bundles sent to the pseudo destination ``dtn:any``."""
        self.registrations.add(ANY)

    def next_timestamp(self, now: int) -> tuple[int, int]:
        ts = (now, self._seq)
        self._seq += 1
        return ts

    def holds(self, bundle_id) -> bool:
        return bundle_id in self.cache

    # -- storage --------------------------------------------------------

    def _push(self, entry: BundleCacheEntry, neighbor: str, now: int) -> Optional[Transmit]:
        b = entry.bundle
        if b.hop_limit == 0 or now >= b.expires_at or neighbor in entry.forwarded_to:
            return None
        entry.forwarded_to.add(neighbor)
        out = b.with_hop_limit(b.hop_limit - 1)
        self.trace(now, "bundle_tx", id=bundle_id_text(b.id), to=neighbor,
                   hop=out.hop_limit, kind=kind_label(b))
        return Transmit(neighbor, out)

    def store(self, bundle: Bundle, now: int, from_node: Optional[str] = None) -> list[Action]:
        """Cache ``bundle`` and offer it to every neighbor currently in contact."""
        entry = BundleCacheEntry(bundle, now, {from_node} if from_node else set())
        self.cache[bundle.id] = entry
        self.trace(now, "bundle_store", id=bundle_id_text(bundle.id), kind=kind_label(bundle))
        out = []
        for neighbor in sorted(self.up_neighbors):
            tx = self._push(entry, neighbor, now)
            if tx is not None:
                out.append(tx)
        return out

    def originate(self, bundle: Bundle, now: int) -> list[Action]:
        """Inject a locally created bundle."""
        self.seen.add(bundle.id)
        return self.store(bundle, now)

    def suppress(self, query_id, now: int) -> None:
        """Stop carrying a query that has been answered here."""
        if self.cache.pop(query_id, None) is not None:
            self.trace(now, "bundle_suppress", id=bundle_id_text(query_id))

    def make_response(self, query: Bundle, payload: bytes, original_ts, now: int) -> Bundle:
        return Bundle(
            source=self.eid,
            destination=query.source,
            creation_timestamp=self.next_timestamp(now),
            lifetime_ms=query.lifetime_ms,
            hop_limit=self.default_hop_limit,
            payload=payload,
            bpq=BpqBlock(BpqKind.RESPONSE, query.bpq.value, tuple(original_ts), 0, ()),
        )

    def respond(self, query: Bundle, response: Bundle, now: int, source: str) -> list[Action]:
        """Emit ``response`` for ``query`` and drop the query from the cache."""
        self.trace(now, "bpq_response", query=bundle_id_text(query.id),
                   response=bundle_id_text(response.id), source=source)
        self.suppress(query.id, now)
        return self.originate(response, now)

    # -- events ---------------------------------------------------------

    def receive_bundle(self, from_node: str, bundle: Bundle, now: int) -> list[Action]:
        bid = bundle.id
        text = bundle_id_text(bid)
        if bid in self.seen:
            self.trace(now, "bundle_dup", id=text, **{"from": from_node})
            return []
        self.seen.add(bid)
        if now >= bundle.expires_at:
            self.trace(now, "bundle_drop_expired", id=text, **{"from": from_node})
            return []
        self.trace(now, "bundle_rx", id=text, kind=kind_label(bundle),
                   hop=bundle.hop_limit, **{"from": from_node})

        bpq = bundle.bpq
        local = bundle.destination in self.registrations
        if bpq is not None and bpq.kind is BpqKind.QUERY:
            match = bpq_match(self.cache, bpq)
            if match is not None:
                response = self.make_response(bundle, match.payload, match.creation_timestamp, now)
                return self.respond(bundle, response, now, "cache")
            if self.responder is not None:
                response = self.responder(bundle, now)
                if response is not None:
                    return self.respond(bundle, response, now, "repo")
            actions: list[Action] = []
            if local:
                self.trace(now, "bundle_deliver", id=text, kind="query")
                actions.append(Deliver(bundle))
            return actions + self.store(bundle, now, from_node)

        if local or (bpq is not None and bpq.kind is not BpqKind.QUERY):
            self.trace(now, "bundle_deliver", id=text, kind=kind_label(bundle))
            return [Deliver(bundle)] + self.store(bundle, now, from_node)
        return self.store(bundle, now, from_node)

    def on_contact_up(self, neighbor: str, now: int) -> list[Transmit]:
        self.up_neighbors.add(neighbor)
        self.sweep_expired(now)
        target = node_eid(neighbor)
        batch = sorted(
            self.cache.values(),
            key=lambda e: (
                e.bundle.destination != target,
                e.bundle.creation_timestamp,
                str(e.bundle.source),
            ),
        )
        out = []
        for entry in batch:
            tx = self._push(entry, neighbor, now)
            if tx is not None:
                out.append(tx)
        return out

    def on_contact_down(self, neighbor: str, now: int) -> None:
        self.up_neighbors.discard(neighbor)

    def sweep_expired(self, now: int) -> list[dict]:
        events = []
        for bid in [k for k, e in self.cache.items() if now >= e.bundle.expires_at]:
            del self.cache[bid]
            events.append({"event": "bundle_expire", "id": bundle_id_text(bid)})
            self.trace(now, "bundle_expire", id=bundle_id_text(bid))
        return events
