"""Run a :class:`~ccndtn.scenario.Scenario` on the event engine.

Each simulated host bundles whichever daemons its roles call for: a CCN
forwarder, a bundle daemon, and a gateway joining the two.  Frames crossing
links are real wire encodings, decoded again on arrival.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Optional

from .ccn import CcnNode, FaceKind
from .dtn import RESPONSE_KINDS, BundleNode, Deliver, Transmit
from .gateway import Gateway, Repository
from .metrics import Metrics, collect_metrics
from .names import Name, format_name, is_prefix_of, name_to_bpq_value
from .scenario import Publish, Request, Scenario
from .simnet import Engine, EventKind, Handler, Link, LinkKind
from .wire import (
    BpqKind,
    Bundle,
    Data,
    Interest,
    StatusResponse,
    WireError,
    decode_frame,
    encode_bundle,
    encode_ccn_packet,
)
from .wire.ccn import KIND_NAMES

logger = logging.getLogger(__name__)


@dataclass
class RequestState:
    req_id: str
    spec: Request
    attempts: int = 0
    last_sent: int = 0
    satisfied: bool = False
    got_status: bool = False
    deferred: bool = False


def content_bytes(seed: int, name: Name, size: int) -> bytes:
    """Deterministic pseudo-random content for ``name``."""
    return random.Random(f"{seed}:{format_name(name)}").randbytes(size)


class Host:
    """One simulated machine and its daemons."""

    def __init__(self, spec, scenario: Scenario, trace):
        self.id = spec.id
        self.spec = spec
        self.ccn: Optional[CcnNode] = None
        self.dtn: Optional[BundleNode] = None
        self.gateway: Optional[Gateway] = None
        self.repo: Optional[Repository] = None
        self.app_face: Optional[int] = None
        self.face_links: dict[int, str] = {}
        self.neighbor_faces: dict[str, int] = {}
        self.dtn_links: dict[str, str] = {}
        self.requests: dict[str, RequestState] = {}

        node_trace = lambda now, event, **f: trace(now, self.id, event, **f)  # noqa: E731
        if spec.ccn:
            self.ccn = CcnNode(self.id, cs_capacity=scenario.cs_capacity, trace=node_trace)
            self.app_face = self.ccn.add_face(FaceKind.APP).id
        if spec.dtn:
            self.dtn = BundleNode(self.id, scenario.gateway.default_hop_limit, trace=node_trace)
        if spec.gateway:
            self.gateway = Gateway(self.ccn, self.dtn, scenario.gateway, trace=node_trace)
            self.repo = self.gateway.repo
        elif spec.ccn:
            # plain CCN hosts still serve their own published content
            self.repo = Repository()
            self.ccn.backing_store = self.repo.get

    def ccn_receive(self, face_id: int, packet, now: int) -> list:
        if self.gateway is not None:
            return self.gateway.ccn_receive(face_id, packet, now)
        return self.ccn.receive(face_id, packet, now)

    def holds_content(self, name: Name, now: int) -> bool:
        """Whether any local store (CS, repository, bundle cache) has ``name``."""
        if self.ccn is not None and self.ccn.cs.lookup(name, now) is not None:
            return True
        if self.repo is not None and self.repo.get(name, now) is not None:
            return True
        if self.dtn is not None:
            value = name_to_bpq_value(name)
            for entry in self.dtn.cache.values():
                q = entry.bundle.bpq
                if q and q.value == value and entry.bundle.payload and (
                        q.kind in RESPONSE_KINDS or q.kind is BpqKind.PUBLISH):
                    return True
        return False


class Simulation(Handler):
    """Build hosts and links for a scenario and drive the engine."""

    def __init__(self, scenario: Scenario, seed: Optional[int] = None):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.rng = random.Random(self.seed)
        self.records: list[dict] = []
        self.engine = Engine(self)
        self.hosts: dict[str, Host] = {}
        self.summary: dict = {}
        self._first_sent: dict[str, int] = {}

        for spec in scenario.nodes:
            self.hosts[spec.id] = Host(spec, scenario, self.on_trace)
        for ls in scenario.links:
            link = self.engine.add_link(Link(ls.a, ls.b, ls.latency_ms, ls.kind, ls.schedule))
            for end in (ls.a, ls.b):
                host = self.hosts[end]
                peer = link.peer(end)
                if ls.kind is LinkKind.CCN:
                    face = host.ccn.add_face(FaceKind.LINK, peer).id
                    host.face_links[face] = link.id
                    host.neighbor_faces[peer] = face
                else:
                    host.dtn_links[peer] = link.id
        for host in self.hosts.values():
            if host.ccn is not None:
                host.ccn.face_up = self._face_up_fn(host)
        for r in scenario.routes:
            host = self.hosts[r.node]
            host.ccn.fib_add_route(r.prefix, host.neighbor_faces[r.via])
        for i, action in enumerate(scenario.workload):
            self.engine.schedule(action.at, EventKind.WORKLOAD, (i, action))

    def _face_up_fn(self, host: Host):
        links = self.engine.links

        def face_up(face_id: int) -> bool:
            link_id = host.face_links.get(face_id)
            return link_id is None or links[link_id].up

        return face_up

    # -- tracing --------------------------------------------------------

    def on_trace(self, t: int, node: str, event: str, **fields) -> None:
        record = {"t": t, "node": node, "event": event}
        record.update(fields)
        self.records.append(record)

    # -- action plumbing ------------------------------------------------

    def _apply(self, host: Host, actions: list, now: int) -> None:
        queue = list(actions)
        while queue:
            action = queue.pop(0)
            if isinstance(action, Transmit):
                b = action.bundle
                self.engine.transmit(host.dtn_links[action.neighbor], host.id, encode_bundle(b), now,
                                     frame="bundle", kind=b.bpq.kind.name.lower() if b.bpq else "plain")
            elif isinstance(action, Deliver):
                if host.gateway is not None and action.bundle.bpq is not None:
                    queue.extend(host.gateway.handle_bpq_bundle(action.bundle, now))
            else:
                face_id, packet = action
                if face_id == host.app_face:
                    self._to_app(host, packet, now)
                elif face_id in host.face_links:
                    self.engine.transmit(host.face_links[face_id], host.id, encode_ccn_packet(packet), now,
                                         frame=KIND_NAMES[packet.kind], name=format_name(packet.name))
                else:
                    logger.debug("%s: no route for action on face %s", host.id, face_id)

    def _to_app(self, host: Host, packet, now: int) -> None:
        if isinstance(packet, Data):
            for st in host.requests.values():
                if st.satisfied or not is_prefix_of(st.spec.name, packet.name):
                    continue
                st.satisfied = True
                first = self._first_sent[st.req_id]
                self.on_trace(now, host.id, "app_data", req=st.req_id, name=format_name(packet.name),
                              delay=now - first)
        elif isinstance(packet, StatusResponse):
            for st in host.requests.values():
                if not st.satisfied and st.spec.name == packet.name:
                    st.got_status = True
            self.on_trace(now, host.id, "app_status", name=format_name(packet.name), code=packet.code)

    # -- consumer -------------------------------------------------------

    def _express(self, host: Host, st: RequestState, now: int) -> None:
        nonce = self.rng.getrandbits(64).to_bytes(8, "big")
        interest = Interest(st.spec.name, nonce, st.spec.lifetime_ms)
        self.on_trace(now, host.id, "request", req=st.req_id, name=format_name(st.spec.name),
                      attempt=st.attempts)
        st.attempts += 1
        st.last_sent = now
        st.got_status = False
        st.deferred = False
        self._apply(host, host.ccn_receive(host.app_face, interest, now), now)
        if not st.satisfied:
            self.engine.timer(now + self._interval(st.spec.reexpress_interval_ms), host.id, st.req_id)

    def _interval(self, base: int) -> int:
        if not self.scenario.jitter:
            return base
        return max(1, round(base * self.rng.uniform(0.9, 1.1)))

    def on_timer(self, node: str, tag, t: int) -> None:
        host = self.hosts[node]
        st = host.requests[tag]
        if st.satisfied:
            return
        backoff = self.scenario.gateway.backoff
        if st.got_status and not st.deferred and backoff > 1:
            # a 450 came back: stretch this wait to backoff x the interval
            st.deferred = True
            base = st.spec.reexpress_interval_ms
            self.engine.timer(st.last_sent + self._interval(base * backoff), node, tag)
            return
        if st.attempts > st.spec.max_reexpressions:
            self.on_trace(t, node, "request_give_up", req=st.req_id, name=format_name(st.spec.name))
            return
        self._express(host, st, t)

    # -- engine callbacks -----------------------------------------------

    def before_time(self, t: int) -> None:
        for node_id in sorted(self.hosts):
            host = self.hosts[node_id]
            if host.ccn is not None:
                host.ccn.sweep_timeouts(t)
            if host.dtn is not None:
                host.dtn.sweep_expired(t)

    def on_deliver(self, link: Link, to_node: str, frame: bytes, t: int) -> None:
        host = self.hosts[to_node]
        sender = link.peer(to_node)
        try:
            packet = decode_frame(frame)
        except WireError as exc:
            self.on_trace(t, to_node, "frame_error", link=link.id, error=str(exc))
            return
        if isinstance(packet, Bundle):
            if link.kind is not LinkKind.DTN or host.dtn is None:
                self.on_trace(t, to_node, "frame_error", link=link.id, error="bundle on ccn link")
                return
            self._apply(host, host.dtn.receive_bundle(sender, packet, t), t)
            return
        if link.kind is not LinkKind.CCN or host.ccn is None:
            self.on_trace(t, to_node, "frame_error", link=link.id, error="ccn packet on dtn link")
            return
        face = host.neighbor_faces[sender]
        self.on_trace(t, to_node, f"{KIND_NAMES[packet.kind]}_in", name=format_name(packet.name), face=face)
        self._apply(host, host.ccn_receive(face, packet, t), t)

    def on_contact_up(self, node: str, neighbor: str, link: Link, t: int) -> None:
        host = self.hosts[node]
        self.on_trace(t, node, "contact_up", peer=neighbor)
        self._apply(host, host.dtn.on_contact_up(neighbor, t), t)

    def on_link_down(self, link: Link, t: int) -> None:
        if link.kind is LinkKind.DTN:
            for node in sorted((link.a, link.b)):
                self.on_trace(t, node, "contact_down", peer=link.peer(node))
                self.hosts[node].dtn.on_contact_down(link.peer(node), t)

    def on_workload(self, payload, t: int) -> None:
        index, action = payload
        host = self.hosts[action.node]
        if isinstance(action, Publish):
            data = Data(action.prefix, content_bytes(self.seed, action.prefix, action.content_size),
                        action.freshness_ms)
            self.on_trace(t, host.id, "publish", name=format_name(action.prefix), size=action.content_size)
            if host.gateway is not None:
                self._apply(host, host.gateway.publish(action.prefix, data, t, action.announce_only), t)
            else:
                host.repo.put(data, t)
        else:
            req_id = f"{action.node}#{index}"
            st = RequestState(req_id, action)
            host.requests[req_id] = st
            self._first_sent[req_id] = t
            self._express(host, st, t)

    # -- driver ---------------------------------------------------------

    def run(self) -> tuple[list[dict], Metrics]:
        self.summary = self.engine.run_until(self.scenario.t_end)
        return self.records, collect_metrics(self.records)


def run_scenario(scenario: Scenario, seed: Optional[int] = None) -> tuple[list[dict], Metrics]:
    """Run ``scenario`` to its end time; returns ``(trace records, metrics)``."""
    return Simulation(scenario, seed).run()
