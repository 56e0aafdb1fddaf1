"""Scenario files: topology, contact schedules, static routes and workload.

Scenarios are JSON documents.  :func:`load_scenario` accepts a path or the
name of a built-in scenario shipped in ``ccndtn/scenarios``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Union

from .ccn import DEFAULT_CS_CAPACITY
from .gateway import GatewayConfig
from .names import InvalidName, Name, parse_name
from .simnet import ContactSchedule, LinkKind

ROLES = ("ccn", "dtn", "gateway")


class ScenarioError(ValueError):
    """Scenario failed to parse or validate."""


@dataclass(frozen=True)
class NodeSpec:
    id: str
    roles: frozenset

    @property
    def ccn(self) -> bool:
        return "ccn" in self.roles

    @property
    def dtn(self) -> bool:
        return "dtn" in self.roles

    @property
    def gateway(self) -> bool:
        return "gateway" in self.roles


@dataclass(frozen=True)
class LinkSpec:
    a: str
    b: str
    kind: LinkKind
    latency_ms: int
    schedule: ContactSchedule


@dataclass(frozen=True)
class RouteSpec:
    node: str
    prefix: Name
    via: str


@dataclass(frozen=True)
class Publish:
    node: str
    prefix: Name
    content_size: int
    at: int
    announce_only: bool = False
    freshness_ms: int = 0


@dataclass(frozen=True)
class Request:
    node: str
    name: Name
    at: int
    reexpress_interval_ms: int = 4000
    max_reexpressions: int = 0
    lifetime_ms: int = 4000


@dataclass
class Scenario:
    name: str
    nodes: list[NodeSpec]
    links: list[LinkSpec] = field(default_factory=list)
    routes: list[RouteSpec] = field(default_factory=list)
    workload: list[Union[Publish, Request]] = field(default_factory=list)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    cs_capacity: int = DEFAULT_CS_CAPACITY
    t_end: int = 60_000
    seed: int = 0
    jitter: bool = False
    description: str = ""

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


# -- parsing --------------------------------------------------------------


def _get(obj: dict, key: str, where: str, kind=None, default: Any = ...):
    if key not in obj:
        if default is ...:
            raise ScenarioError(f"{where}.{key}: missing required field")
        return default
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ScenarioError(f"{where}.{key}: expected integer, got {value!r}")
    if kind is not None and kind is not int and not isinstance(value, kind):
        raise ScenarioError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _nonneg(value: int, where: str) -> int:
    if value < 0:
        raise ScenarioError(f"{where}: must be >= 0, got {value}")
    return value


def _name(text, where: str) -> Name:
    if not isinstance(text, str):
        raise ScenarioError(f"{where}: expected name text, got {text!r}")
    try:
        return parse_name(text)
    except InvalidName as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _gateway(obj: dict) -> GatewayConfig:
    w = "gateway"
    if not isinstance(obj, dict):
        raise ScenarioError(f"{w}: expected object")
    try:
        return GatewayConfig(
            lifetime_multiplier_k=_get(obj, "k", w, int, 100),
            default_hop_limit=_nonneg(_get(obj, "hop_limit", w, int, 8), f"{w}.hop_limit"),
            status_response_enabled=_get(obj, "status_response", w, bool, True),
            backoff=_get(obj, "backoff", w, int, 4),
            default_interest_lifetime_ms=_get(obj, "interest_lifetime_ms", w, int, 4000),
            default_route=_get(obj, "default_route", w, bool, True),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{w}: {exc}") from None


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and validate a :class:`Scenario` from decoded JSON."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be an object")

    nodes = []
    seen = set()
    for i, raw in enumerate(_get(doc, "nodes", "scenario", list)):
        w = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise ScenarioError(f"{w}: expected object")
        node_id = _get(raw, "id", w, str)
        if not node_id or "/" in node_id or node_id in seen:
            raise ScenarioError(f"{w}.id: empty, malformed or duplicate node id {node_id!r}")
        seen.add(node_id)
        roles = _get(raw, "roles", w, list)
        bad = [r for r in roles if r not in ROLES]
        if bad or not roles:
            raise ScenarioError(f"{w}.roles: unknown or empty roles {roles!r}")
        spec = NodeSpec(node_id, frozenset(roles))
        if spec.gateway and not (spec.ccn and spec.dtn):
            raise ScenarioError(f"{w}.roles: gateway nodes need both ccn and dtn roles")
        nodes.append(spec)
    by_id = {n.id: n for n in nodes}

    def declared(node_id, where):
        if node_id not in by_id:
            raise ScenarioError(f"{where}: undeclared node {node_id!r}")
        return by_id[node_id]

    links = []
    link_keys = set()
    for i, raw in enumerate(_get(doc, "links", "scenario", list, [])):
        w = f"links[{i}]"
        if not isinstance(raw, dict):
            raise ScenarioError(f"{w}: expected object")
        a = declared(_get(raw, "a", w, str), f"{w}.a")
        b = declared(_get(raw, "b", w, str), f"{w}.b")
        if a.id == b.id:
            raise ScenarioError(f"{w}.b: link endpoints must differ")
        kind_text = _get(raw, "kind", w, str, "dtn")
        try:
            kind = LinkKind(kind_text)
        except ValueError:
            raise ScenarioError(f"{w}.kind: expected 'ccn' or 'dtn', got {kind_text!r}") from None
        role = "ccn" if kind is LinkKind.CCN else "dtn"
        for end in (a, b):
            if role not in end.roles:
                raise ScenarioError(f"{w}.kind: node {end.id!r} lacks the {role} role")
        key = (frozenset((a.id, b.id)), kind)
        if key in link_keys:
            raise ScenarioError(f"{w}: duplicate {kind.value} link between {a.id} and {b.id}")
        link_keys.add(key)
        intervals = []
        for j, iv in enumerate(_get(raw, "schedule", w, list, [])):
            if (not isinstance(iv, list) or len(iv) != 2
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in iv)):
                raise ScenarioError(f"{w}.schedule[{j}]: expected [up_at, down_at]")
            intervals.append((iv[0], iv[1]))
        try:
            schedule = ContactSchedule(tuple(intervals))
        except ValueError as exc:
            raise ScenarioError(f"{w}.schedule: {exc}") from None
        latency = _nonneg(_get(raw, "latency_ms", w, int, 10), f"{w}.latency_ms")
        links.append(LinkSpec(a.id, b.id, kind, latency, schedule))

    ccn_neighbors = {n.id: set() for n in nodes}
    for ln in links:
        if ln.kind is LinkKind.CCN:
            ccn_neighbors[ln.a].add(ln.b)
            ccn_neighbors[ln.b].add(ln.a)

    routes = []
    for i, raw in enumerate(_get(doc, "routes", "scenario", list, [])):
        w = f"routes[{i}]"
        node = declared(_get(raw, "node", w, str), f"{w}.node")
        via = _get(raw, "via", w, str)
        if via not in ccn_neighbors[node.id]:
            raise ScenarioError(f"{w}.via: {via!r} is not a ccn neighbor of {node.id!r}")
        routes.append(RouteSpec(node.id, _name(_get(raw, "prefix", w), f"{w}.prefix"), via))

    workload = []
    for i, raw in enumerate(_get(doc, "workload", "scenario", list, [])):
        w = f"workload[{i}]"
        if not isinstance(raw, dict):
            raise ScenarioError(f"{w}: expected object")
        kind = _get(raw, "type", w, str)
        node = declared(_get(raw, "node", w, str), f"{w}.node")
        at = _nonneg(_get(raw, "at", w, int), f"{w}.at")
        if not node.ccn:
            raise ScenarioError(f"{w}.node: {kind} needs a node with the ccn role")
        if kind == "publish":
            workload.append(Publish(
                node=node.id,
                prefix=_name(_get(raw, "prefix", w), f"{w}.prefix"),
                content_size=_nonneg(_get(raw, "content_size", w, int, 1024), f"{w}.content_size"),
                at=at,
                announce_only=_get(raw, "announce_only", w, bool, False),
                freshness_ms=_nonneg(_get(raw, "freshness_ms", w, int, 0), f"{w}.freshness_ms"),
            ))
        elif kind == "request":
            lifetime = _get(raw, "lifetime_ms", w, int, 4000)
            if lifetime <= 0:
                raise ScenarioError(f"{w}.lifetime_ms: must be > 0")
            interval = _get(raw, "reexpress_interval_ms", w, int, lifetime)
            if interval <= 0:
                raise ScenarioError(f"{w}.reexpress_interval_ms: must be > 0")
            workload.append(Request(
                node=node.id,
                name=_name(_get(raw, "name", w), f"{w}.name"),
                at=at,
                reexpress_interval_ms=interval,
                max_reexpressions=_nonneg(_get(raw, "max_reexpressions", w, int, 0),
                                          f"{w}.max_reexpressions"),
                lifetime_ms=lifetime,
            ))
        else:
            raise ScenarioError(f"{w}.type: expected 'publish' or 'request', got {kind!r}")

    return Scenario(
        name=_get(doc, "name", "scenario", str, "unnamed"),
        description=_get(doc, "description", "scenario", str, ""),
        nodes=nodes,
        links=links,
        routes=routes,
        workload=workload,
        gateway=_gateway(_get(doc, "gateway", "scenario", dict, {})),
        cs_capacity=_nonneg(_get(doc, "cs_capacity", "scenario", int, DEFAULT_CS_CAPACITY), "cs_capacity"),
        t_end=_nonneg(_get(doc, "t_end", "scenario", int, 60_000), "t_end"),
        seed=_get(doc, "seed", "scenario", int, 0),
        jitter=_get(doc, "jitter", "scenario", bool, False),
    )


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ScenarioError(
            f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {context}"
        ) from None
    return scenario_from_dict(doc)


def builtin_names() -> list[str]:
    root = resources.files("ccndtn") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def builtin_text(name: str) -> str:
    return (resources.files("ccndtn") / "scenarios" / f"{name}.json").read_text("utf-8")


def load_scenario(path_or_name: Union[str, Path]) -> Scenario:
    """Load a scenario file, or a built-in scenario by name."""
    path = Path(path_or_name)
    if path.is_file():
        return parse_scenario(path.read_text("utf-8"), str(path))
    name = str(path_or_name)
    if name in builtin_names():
        return parse_scenario(builtin_text(name), f"builtin:{name}")
    raise ScenarioError(f"no such scenario file or builtin: {name}")
