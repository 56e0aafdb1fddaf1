"""CCN forwarding node: content store, pending interest table, FIB.

The node is a plain state machine.  Handlers take the arrival face, the
packet and the current time, mutate the tables, and return the packets to
emit as ``(face_id, packet)`` pairs.  Every decision is also reported to the
``trace`` callable so simulations can reconstruct what happened.
"""

from __future__ import annotations

import enum
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Optional

from .names import Name, format_name, is_prefix_of
from .wire.ccn import Data, Interest, StatusResponse

DEFAULT_CS_CAPACITY = 1024
DEFAULT_TTL_MS = 60_000

Action = tuple[int, object]


class FaceKind(enum.Enum):
    LINK = "link"
    APP = "app"
    BUNDLE = "bundle"


@dataclass(frozen=True)
class Face:
    id: int
    kind: FaceKind
    peer: Optional[str] = None


@dataclass
class CsEntry:
    name: Name
    data: Data
    inserted_at: int
    expires_at: int


@dataclass
class PitEntry:
    name: Name
    in_faces: set = field(default_factory=set)
    out_faces: set = field(default_factory=set)
    expires_at: int = 0
    nonces_seen: set = field(default_factory=set)


@dataclass
class FibEntry:
    prefix: Name
    faces: set = field(default_factory=set)


class Fib:
    """Name-prefix routing table, at most one entry per prefix."""

    def __init__(self):
        self._entries: dict[Name, FibEntry] = {}

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: e.prefix))

    def get(self, prefix: Name) -> Optional[FibEntry]:
        return self._entries.get(prefix)

    def add_route(self, prefix: Name, face_id: int) -> FibEntry:
        entry = self._entries.get(prefix)
        if entry is None:
            entry = self._entries[prefix] = FibEntry(prefix, set())
        entry.faces.add(face_id)
        return entry

    def remove_face(self, face_id: int) -> None:
        for prefix in list(self._entries):
            entry = self._entries[prefix]
            entry.faces.discard(face_id)
            if not entry.faces:
                del self._entries[prefix]

    def longest_prefix_match(self, name: Name) -> Optional[FibEntry]:
        comps = name.components
        for k in range(len(comps), -1, -1):
            entry = self._entries.get(Name(comps[:k]))
            if entry is not None:
                return entry
        return None


def fib_add_route(fib: Fib, prefix: Name, face_id: int) -> Fib:
    fib.add_route(prefix, face_id)
    return fib


def fib_longest_prefix_match(fib: Fib, name: Name) -> Optional[FibEntry]:
    return fib.longest_prefix_match(name)


class ContentStore:
    """LRU cache of Data packets with per-entry expiry.

    A Data with ``freshness_ms == 0`` lives for ``default_ttl_ms``.
    """

    def __init__(self, capacity: int = DEFAULT_CS_CAPACITY, default_ttl_ms: int = DEFAULT_TTL_MS):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self.default_ttl_ms = default_ttl_ms
        self._entries: OrderedDict[Name, CsEntry] = OrderedDict()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, name):
        return name in self._entries

    def names(self) -> list[Name]:
        """Names from least to most recently used."""
        return list(self._entries)

    def insert(self, data: Data, now: int) -> Optional[CsEntry]:
        """Insert or refresh ``data``; returns the evicted entry, if any."""
        if self.capacity == 0:
            return None
        ttl = data.freshness_ms or self.default_ttl_ms
        entry = CsEntry(data.name, data, now, now + ttl)
        if data.name in self._entries:
            self._entries[data.name] = entry
            self._entries.move_to_end(data.name)
            return None
        evicted = None
        if len(self._entries) >= self.capacity:
            _, evicted = self._entries.popitem(last=False)
        self._entries[data.name] = entry
        return evicted

    def lookup(self, name: Name, now: int) -> Optional[CsEntry]:
        """Freshest-longest match: the longest stored name under ``name``."""
        candidates = [
            e for e in self._entries.values()
            if now < e.expires_at and is_prefix_of(name, e.name)
        ]
        if not candidates:
            return None
        best = min(candidates, key=lambda e: (-len(e.name), e.name))
        self._entries.move_to_end(best.name)
        return best

    def sweep(self, now: int) -> list[CsEntry]:
        stale = [e for e in self._entries.values() if e.expires_at <= now]
        for e in stale:
            del self._entries[e.name]
        return stale


def _nop_trace(now, event, **fields):
    pass


class CcnNode:
    """One CCN forwarder.

    ``face_up`` reports whether a face can currently carry traffic (link
    state); forwarding skips faces that are down.  ``backing_store`` is an
    optional lookup consulted on a content-store miss, used to expose a
    repository to the pipeline.
    """

    def __init__(
        self,
        node_id: str = "",
        cs_capacity: int = DEFAULT_CS_CAPACITY,
        default_ttl_ms: int = DEFAULT_TTL_MS,
        trace: Optional[Callable] = None,
    ):
        self.node_id = node_id
        self.faces: dict[int, Face] = {}
        self.fib = Fib()
        self.pit: dict[Name, PitEntry] = {}
        self.cs = ContentStore(cs_capacity, default_ttl_ms)
        self.trace = trace or _nop_trace
        self.face_up: Callable[[int], bool] = lambda face_id: True
        self.backing_store: Optional[Callable[[Name, int], Optional[Data]]] = None

    def add_face(self, kind: FaceKind, peer: Optional[str] = None) -> Face:
        face = Face(len(self.faces), kind, peer)
        self.faces[face.id] = face
        return face

    def face_of_kind(self, kind: FaceKind) -> Optional[Face]:
        for face in self.faces.values():
            if face.kind is kind:
                return face
        return None

    def _kind(self, face_id: int) -> str:
        face = self.faces.get(face_id)
        return face.kind.value if face else FaceKind.LINK.value

    # -- tables ---------------------------------------------------------

    def fib_add_route(self, prefix: Name, face_id: int) -> None:
        self.fib.add_route(prefix, face_id)

    def cs_insert(self, data: Data, now: int) -> None:
        evicted = self.cs.insert(data, now)
        if evicted is not None:
            self.trace(now, "cs_evict", name=format_name(evicted.name))

    def sweep_timeouts(self, now: int) -> list[dict]:
        """Drop expired PIT entries and stale content; one event per removal."""
        events = []
        for name in [n for n, e in self.pit.items() if e.expires_at <= now]:
            del self.pit[name]
            events.append({"event": "pit_expire", "name": format_name(name)})
        for entry in self.cs.sweep(now):
            events.append({"event": "cs_expire", "name": format_name(entry.name)})
        for ev in events:
            self.trace(now, ev["event"], name=ev["name"])
        return events

    # -- pipeline -------------------------------------------------------

    def on_interest(self, face_id: int, interest: Interest, now: int) -> list[Action]:
        self.sweep_timeouts(now)
        name = interest.name
        text = format_name(name)
        pending = self.pit.get(name)

        if pending is not None and interest.nonce in pending.nonces_seen:
            self.trace(now, "interest_dup", name=text, face=face_id)
            return []

        hit = self.cs.lookup(name, now)
        source = "cs"
        if hit is None and self.backing_store is not None:
            data = self.backing_store(name, now)
            source = "repo"
        else:
            data = hit.data if hit is not None else None
        if data is not None:
            self.trace(now, "cs_hit", name=text, face=face_id, source=source)
            return [(face_id, data)]

        if pending is not None:
            pending.in_faces.add(face_id)
            pending.nonces_seen.add(interest.nonce)
            self.trace(now, "pit_aggregate", name=text, face=face_id)
            return []

        entry = self.fib.longest_prefix_match(name)
        out = []
        if entry is not None:
            out = sorted(f for f in entry.faces if f != face_id and self.face_up(f))
        if not out:
            self.trace(now, "no_route", name=text, face=face_id)
            return []

        self.pit[name] = PitEntry(
            name=name,
            in_faces={face_id},
            out_faces=set(out),
            expires_at=now + interest.lifetime_ms,
            nonces_seen={interest.nonce},
        )
        self.trace(now, "pit_create", name=text, face=face_id)
        for f in out:
            self.trace(now, "interest_out", name=text, face=f, kind=self._kind(f))
        return [(f, interest) for f in out]

    def on_data(self, face_id: int, data: Data, now: int) -> list[Action]:
        self.sweep_timeouts(now)
        text = format_name(data.name)
        matched = [n for n in self.pit if is_prefix_of(n, data.name)]
        if not matched:
            self.trace(now, "data_unsolicited", name=text, face=face_id)
            return []
        self.cs_insert(data, now)
        downstream = set()
        for n in sorted(matched):
            downstream |= self.pit.pop(n).in_faces
            self.trace(now, "pit_satisfy", name=format_name(n), face=face_id)
        downstream.discard(face_id)
        out = sorted(downstream)
        for f in out:
            self.trace(now, "data_out", name=text, face=f)
        return [(f, data) for f in out]

    def on_status(self, face_id: int, status: StatusResponse, now: int) -> list[Action]:
        """Relay a StatusResponse toward the requesters; the PIT entry stays."""
        self.sweep_timeouts(now)
        entry = self.pit.get(status.name)
        if entry is None:
            self.trace(now, "status_drop", name=format_name(status.name), face=face_id)
            return []
        out = sorted(f for f in entry.in_faces if f != face_id)
        return [(f, status) for f in out]

    def receive(self, face_id: int, packet, now: int) -> list[Action]:
        if isinstance(packet, Interest):
            return self.on_interest(face_id, packet, now)
        if isinstance(packet, Data):
            return self.on_data(face_id, packet, now)
        if isinstance(packet, StatusResponse):
            return self.on_status(face_id, packet, now)
        raise TypeError(f"not a CCN packet: {packet!r}")
