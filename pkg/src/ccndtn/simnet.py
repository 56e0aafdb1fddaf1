"""Deterministic discrete-event engine with scheduled links.

Events run in strict ``(at, seq)`` order, ``seq`` being a global counter
assigned when the event is scheduled, so equal timestamps run FIFO.  Links
are bidirectional with a fixed latency and an up/down schedule.  Whether a
frame gets through is decided when it is sent: frames sent on a down link
are dropped, frames already in flight when a link goes down still arrive.

The engine draws no random numbers.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Any, Optional


class SchedulingError(RuntimeError):
    """An event was scheduled before the current clock."""


class LinkKind(enum.Enum):
    CCN = "ccn"
    DTN = "dtn"


class EventKind(enum.Enum):
    DELIVER = "deliver"
    LINK_UP = "link_up"
    LINK_DOWN = "link_down"
    TIMER = "timer"
    WORKLOAD = "workload"


@dataclass(frozen=True)
class ContactSchedule:
    """Ordered, non-overlapping ``(up_at, down_at)`` intervals; empty means always up."""

    intervals: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev_end = None
        for up, down in self.intervals:
            if up < 0 or down <= up:
                raise ValueError(f"bad contact interval ({up}, {down})")
            if prev_end is not None and up <= prev_end:
                raise ValueError("contact intervals must be strictly increasing and disjoint")
            prev_end = down

    @property
    def always_up(self) -> bool:
        return not self.intervals

    def is_up(self, t: int) -> bool:
        if self.always_up:
            return True
        return any(up <= t < down for up, down in self.intervals)


@dataclass
class Link:
    a: str
    b: str
    latency_ms: int = 10
    kind: LinkKind = LinkKind.DTN
    schedule: ContactSchedule = field(default_factory=ContactSchedule)
    up: bool = False

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a link needs two distinct endpoints")
        if self.latency_ms < 0:
            raise ValueError("latency must be >= 0")
        self.up = self.schedule.always_up

    @property
    def id(self) -> str:
        return f"{self.a}-{self.b}/{self.kind.value}"

    def peer(self, node: str) -> str:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise ValueError(f"{node} is not an endpoint of {self.id}")


@dataclass(order=True)
class Event:
    at: int
    seq: int
    kind: EventKind = field(compare=False)
    payload: Any = field(compare=False, default=None)


class Handler:
    """Callbacks the engine dispatches to; subclass and override as needed."""

    def before_time(self, t: int) -> None:
        """Called once whenever the clock advances to a new instant."""

    def on_deliver(self, link: Link, to_node: str, frame: bytes, t: int) -> None:
        pass

    def on_link_up(self, link: Link, t: int) -> None:
        pass

    def on_contact_up(self, node: str, neighbor: str, link: Link, t: int) -> None:
        pass

    def on_link_down(self, link: Link, t: int) -> None:
        pass

    def on_timer(self, node: str, tag: Any, t: int) -> None:
        pass

    def on_workload(self, action: Any, t: int) -> None:
        pass

    def on_trace(self, t: int, node: str, event: str, **fields) -> None:
        pass


class Engine:
    def __init__(self, handler: Optional[Handler] = None):
        self.handler = handler or Handler()
        self.clock = 0
        self.links: dict[str, Link] = {}
        self._queue: list[Event] = []
        self._seq = 0
        self._last_instant: Optional[int] = None
        self.dispatched = 0

    # -- setup ----------------------------------------------------------

    def add_link(self, link: Link) -> Link:
        if link.id in self.links:
            raise ValueError(f"duplicate link {link.id}")
        self.links[link.id] = link
        for up, down in link.schedule.intervals:
            self.schedule(up, EventKind.LINK_UP, link)
            self.schedule(down, EventKind.LINK_DOWN, link)
        return link

    def schedule(self, at: int, kind: EventKind, payload: Any = None) -> Event:
        if at < self.clock:
            raise SchedulingError(f"cannot schedule at t={at}, clock is {self.clock}")
        ev = Event(at, self._seq, kind, payload)
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    def timer(self, at: int, node: str, tag: Any) -> Event:
        return self.schedule(at, EventKind.TIMER, (node, tag))

    @property
    def pending(self) -> int:
        return len(self._queue)

    # -- frames ---------------------------------------------------------

    def transmit(self, link_id: str, from_node: str, payload: bytes, now: Optional[int] = None, **info) -> bool:
        """Send ``payload`` from ``from_node`` across a link; False if dropped.

        Extra keyword arguments are copied into the trace record.
        """
        link = self.links.get(link_id)
        if link is None:
            raise KeyError(f"unknown link {link_id}")
        now = self.clock if now is None else now
        to_node = link.peer(from_node)
        if not link.up:
            self.handler.on_trace(now, from_node, "frame_drop", link=link.id, to=to_node,
                                  reason="link_down", bytes=len(payload), **info)
            return False
        self.handler.on_trace(now, from_node, "frame_tx", link=link.id, to=to_node, bytes=len(payload), **info)
        self.schedule(now + link.latency_ms, EventKind.DELIVER, (link, to_node, bytes(payload)))
        return True

    # -- loop -----------------------------------------------------------

    def step(self) -> Event:
        ev = heapq.heappop(self._queue)
        self.clock = ev.at
        if ev.at != self._last_instant:
            self._last_instant = ev.at
            self.handler.before_time(ev.at)
        self.dispatched += 1
        h = self.handler
        if ev.kind is EventKind.DELIVER:
            link, to_node, frame = ev.payload
            h.on_deliver(link, to_node, frame, ev.at)
        elif ev.kind is EventKind.LINK_UP:
            link = ev.payload
            link.up = True
            h.on_link_up(link, ev.at)
            if link.kind is LinkKind.DTN:
                for node in sorted((link.a, link.b)):
                    h.on_contact_up(node, link.peer(node), link, ev.at)
        elif ev.kind is EventKind.LINK_DOWN:
            link = ev.payload
            link.up = False
            h.on_link_down(link, ev.at)
        elif ev.kind is EventKind.TIMER:
            node, tag = ev.payload
            h.on_timer(node, tag, ev.at)
        else:
            h.on_workload(ev.payload, ev.at)
        return ev

    def run_until(self, t_end: int) -> dict:
        """Dispatch events with ``at <= t_end``; returns a small summary."""
        while self._queue and self._queue[0].at <= t_end:
            self.step()
        return {"clock": self.clock, "dispatched": self.dispatched, "unexecuted": len(self._queue)}


def run_until(engine: Engine, t_end: int) -> dict:
    return engine.run_until(t_end)
