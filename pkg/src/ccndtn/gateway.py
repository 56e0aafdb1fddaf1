"""CCN/DTN integration: the bundle face, BPQ conversions and a shared repository.

A :class:`Gateway` binds a :class:`~ccndtn.ccn.CcnNode` and a
:class:`~ccndtn.dtn.BundleNode` living on the same host.  Interests the CCN
strategy sends out of the bundle face become BPQ query bundles; query,
response and publish bundles delivered by the bundle daemon are turned back
into CCN operations.  Content from either side lands in one
:class:`Repository`, so the CCN and DTN views always agree on what is held
and for how long.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .ccn import CcnNode, FaceKind
from .dtn import BundleNode
from .names import (
    ANY,
    Eid,
    InvalidName,
    Name,
    bpq_value_to_name,
    format_name,
    is_prefix_of,
    name_to_bpq_value,
)
from .wire import WireError
from .wire.bundle import BpqBlock, BpqKind, Bundle, bundle_id_text
from .wire.ccn import Data, Interest, StatusResponse, decode_ccn_packet, encode_ccn_packet

DEFAULT_K = 100
DEFAULT_BACKOFF = 4
DEFAULT_INTEREST_LIFETIME_MS = 4000
DEFAULT_REPO_CAPACITY = 1024


@dataclass(frozen=True)
class GatewayConfig:
    lifetime_multiplier_k: int = DEFAULT_K
    default_hop_limit: int = 8
    pseudo_destination: Eid = ANY
    status_response_enabled: bool = True
    backoff: int = DEFAULT_BACKOFF
    default_interest_lifetime_ms: int = DEFAULT_INTEREST_LIFETIME_MS
    # route everything without a better FIB match into the bundle layer
    default_route: bool = True

    def __post_init__(self):
        if self.lifetime_multiplier_k < 1:
            raise ValueError("lifetime_multiplier_k must be >= 1")
        if self.pseudo_destination != ANY:
            raise ValueError(f"pseudo destination must be {ANY}")
        if self.backoff < 1:
            raise ValueError("backoff must be >= 1")


class Repository:
    """Content store shared by the CCN and DTN sides of a node.

    Each name has exactly one entry and one expiry; ``None`` means the
    entry never expires.
    """

    def __init__(self, capacity: int = DEFAULT_REPO_CAPACITY):
        self.capacity = capacity
        self.entries: dict[Name, tuple[Data, Optional[int]]] = {}

    def __len__(self):
        return len(self.entries)

    def put(self, data: Data, now: int, expires_at: Optional[int] = None) -> None:
        if self.capacity <= 0:
            return
        if expires_at is None and data.freshness_ms:
            expires_at = now + data.freshness_ms
        if data.name not in self.entries and len(self.entries) >= self.capacity:
            self.sweep(now)
            if len(self.entries) >= self.capacity:
                # evict the oldest insertion
                del self.entries[next(iter(self.entries))]
        self.entries.pop(data.name, None)
        self.entries[data.name] = (data, expires_at)

    def get(self, name: Name, now: int) -> Optional[Data]:
        """Longest live entry whose name has ``name`` as a prefix."""
        best = None
        for stored, (data, expires_at) in self.entries.items():
            if expires_at is not None and now >= expires_at:
                continue
            if not is_prefix_of(name, stored):
                continue
            if best is None or (-len(stored), stored) < (-len(best.name), best.name):
                best = data
        return best

    def sweep(self, now: int) -> list[Name]:
        stale = [n for n, (_, exp) in self.entries.items() if exp is not None and now >= exp]
        for n in stale:
            del self.entries[n]
        return stale


def repo_put(r: Repository, d: Data, now: int, expires_at: Optional[int] = None) -> None:
    r.put(d, now, expires_at)


def repo_get(r: Repository, n: Name, now: int) -> Optional[Data]:
    return r.get(n, now)


def interest_to_bpq_query(cfg: GatewayConfig, i: Interest, self_eid: Eid, now: int, seq: int = 0) -> Bundle:
    """Wrap an Interest into a BPQ query bundle for the pseudo destination."""
    ts = (now, seq)
    return Bundle(
        source=self_eid,
        destination=cfg.pseudo_destination,
        creation_timestamp=ts,
        lifetime_ms=cfg.lifetime_multiplier_k * i.lifetime_ms,
        hop_limit=cfg.default_hop_limit,
        payload=encode_ccn_packet(i),
        bpq=BpqBlock(BpqKind.QUERY, name_to_bpq_value(i.name), ts, 0, ()),
    )


def publish_prefix(
    cfg: GatewayConfig,
    prefix: Name,
    content: Optional[Data],
    self_eid: Eid,
    now: int,
    seq: int = 0,
) -> Bundle:
    """Announce ``prefix`` into the DTN, optionally carrying the content."""
    ts = (now, seq)
    return Bundle(
        source=self_eid,
        destination=cfg.pseudo_destination,
        creation_timestamp=ts,
        lifetime_ms=cfg.lifetime_multiplier_k * cfg.default_interest_lifetime_ms,
        hop_limit=cfg.default_hop_limit,
        payload=encode_ccn_packet(content) if content is not None else b"",
        bpq=BpqBlock(BpqKind.PUBLISH, name_to_bpq_value(prefix), ts, 0, ()),
    )


def emit_status_response(cfg: GatewayConfig, face_id: int, name: Name):
    """StatusResponse 450 for an interest that was just handed to the bundle layer."""
    if not cfg.status_response_enabled:
        return None
    return (face_id, StatusResponse(name, 450))


def _nop_trace(now, event, **fields):
    pass


class Gateway:
    """Couples a CCN forwarder and a bundle daemon through the bundle face.

    All entry points return a mixed list of actions: ``(face_id, packet)``
    pairs for CCN faces other than the bundle face, and
    :class:`~ccndtn.dtn.Transmit` items for the bundle daemon.
    """

    def __init__(
        self,
        ccn: CcnNode,
        dtn: BundleNode,
        cfg: Optional[GatewayConfig] = None,
        repo: Optional[Repository] = None,
        trace: Optional[Callable] = None,
    ):
        self.cfg = cfg or GatewayConfig()
        self.ccn = ccn
        self.dtn = dtn
        self.repo = repo if repo is not None else Repository()
        self.trace = trace or _nop_trace
        self.bundle_face = ccn.add_face(FaceKind.BUNDLE).id
        # queries handed to CCN, waiting for Data to come back on the bundle face
        self.pending: dict[Name, list[Bundle]] = {}

        dtn.register_any()
        dtn.responder = self.answer_query
        ccn.backing_store = self.repo.get
        if self.cfg.default_route:
            ccn.fib_add_route(Name(), self.bundle_face)

    # -- CCN side -------------------------------------------------------

    def ccn_receive(self, face_id: int, packet, now: int) -> list:
        """Run a packet through the CCN pipeline and convert bundle-face output."""
        return self._route(self.ccn.receive(face_id, packet, now), face_id, now)

    def _route(self, actions, arrival_face: int, now: int) -> list:
        out = []
        for face_id, packet in actions:
            if face_id != self.bundle_face:
                out.append((face_id, packet))
            elif isinstance(packet, Interest):
                out += self._send_query(packet, now)
                status = emit_status_response(self.cfg, arrival_face, packet.name)
                if status is not None:
                    self.trace(now, "status_out", name=format_name(packet.name), face=arrival_face)
                    out.append(status)
            elif isinstance(packet, Data):
                out += self._answer_pending(packet, now)
        return out

    def _send_query(self, interest: Interest, now: int) -> list:
        _, seq = self.dtn.next_timestamp(now)
        query = interest_to_bpq_query(self.cfg, interest, self.dtn.eid, now, seq)
        self.trace(now, "query_create", id=bundle_id_text(query.id), name=format_name(interest.name))
        return self.dtn.originate(query, now)

    def _answer_pending(self, data: Data, now: int) -> list:
        out = []
        for name in sorted(self.pending):
            if not is_prefix_of(name, data.name):
                continue
            for query in self.pending.pop(name):
                if now >= query.expires_at:
                    continue
                response = self.dtn.make_response(query, encode_ccn_packet(data), query.creation_timestamp, now)
                out += self.dtn.respond(query, response, now, "ccn")
        return out

    def publish(self, prefix: Name, content: Optional[Data], now: int, announce_only: bool = False) -> list:
        """Local publication: keep the content and announce the prefix.

        With ``announce_only`` the publish bundle carries just the prefix and
        the content stays in the local repository.
        """
        if content is not None:
            self.repo.put(content, now)
        carried = None if announce_only else content
        _, seq = self.dtn.next_timestamp(now)
        bundle = publish_prefix(self.cfg, prefix, carried, self.dtn.eid, now, seq)
        self.trace(now, "publish_create", id=bundle_id_text(bundle.id), name=format_name(prefix),
                   content=carried is not None)
        return self.dtn.originate(bundle, now)

    # -- DTN side -------------------------------------------------------

    def answer_query(self, query: Bundle, now: int) -> Optional[Bundle]:
        """Response bundle from the repository, or ``None``."""
        try:
            name = bpq_value_to_name(query.bpq.value)
        except InvalidName:
            return None
        data = self.repo.get(name, now)
        if data is None:
            return None
        return self.dtn.make_response(query, encode_ccn_packet(data), query.creation_timestamp, now)

    def _drop(self, bundle: Bundle, now: int, reason: str) -> list:
        self.trace(now, "gateway_drop", id=bundle_id_text(bundle.id), reason=reason)
        return []

    def handle_bpq_bundle(self, u: Bundle, now: int) -> list:
        """Dispatch a bundle delivered by the bundle daemon by BPQ kind."""
        if u.bpq is None:
            return self._drop(u, now, "no bpq block")
        try:
            name = bpq_value_to_name(u.bpq.value)
        except InvalidName:
            return self._drop(u, now, "bad bpq value")
        kind = u.bpq.kind
        text = bundle_id_text(u.id)

        if kind is BpqKind.PUBLISH:
            self.ccn.fib_add_route(name, self.bundle_face)
            self.trace(now, "route_learned", name=format_name(name), id=text)
            if u.payload:
                data = self._decode(u, Data, name, now)
                if data is not None:
                    self.repo.put(data, now, u.expires_at)
                    self.trace(now, "repo_store", name=format_name(data.name), id=text)
            return []

        if kind is BpqKind.QUERY:
            response = self.answer_query(u, now)
            if response is not None:
                return self.dtn.respond(u, response, now, "repo")
            interest = self._decode(u, Interest, name, now, exact=True)
            if interest is None:
                return []
            self.pending.setdefault(interest.name, []).append(u)
            self.trace(now, "query_inject", id=text, name=format_name(interest.name))
            out = self.ccn_receive(self.bundle_face, interest, now)
            if interest.name not in self.ccn.pit:
                # nowhere to send it (or answered synchronously): nothing to wait for
                self.pending.pop(interest.name, None)
            return out

        data = self._decode(u, Data, name, now)
        if data is None:
            return []
        self.repo.put(data, now, u.expires_at)
        self.trace(now, "repo_store", name=format_name(data.name), id=text)
        self.trace(now, "response_inject", id=text, name=format_name(data.name))
        return self.ccn_receive(self.bundle_face, data, now)

    def _decode(self, u: Bundle, expected: type, name: Name, now: int, exact: bool = False):
        try:
            packet = decode_ccn_packet(u.payload)
        except WireError:
            self._drop(u, now, "payload decode failure")
            return None
        if not isinstance(packet, expected):
            self._drop(u, now, "unexpected payload packet")
            return None
        if packet.name != name if exact else not is_prefix_of(name, packet.name):
            self._drop(u, now, "value/name mismatch")
            return None
        return packet


__all__ = [
    "Gateway",
    "GatewayConfig",
    "Repository",
    "emit_status_response",
    "interest_to_bpq_query",
    "publish_prefix",
    "repo_get",
    "repo_put",
]
