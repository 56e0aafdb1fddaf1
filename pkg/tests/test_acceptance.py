"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (visible even with output capture)
and enforces its runtime budget.
"""

import copy
import itertools
import json
import random
import time
from contextlib import contextmanager

import pytest

from ccndtn.ccn import CcnNode, FaceKind, Fib
from ccndtn.metrics import trace_to_jsonl
from ccndtn.names import Name, parse_name
from ccndtn.scenario import builtin_names, builtin_text, load_scenario, scenario_from_dict
from ccndtn.sim import Simulation, run_scenario
from ccndtn.wire import (
    BpqBlock,
    BpqKind,
    Bundle,
    Data,
    Interest,
    StatusResponse,
    WireError,
    decode_bundle,
    decode_ccn_packet,
    encode_bundle,
    encode_ccn_packet,
    sdnv_decode,
    sdnv_encode,
)
from ccndtn.names import Eid
from oracles import reference_pipeline, sdnv_groups, sdnv_ungroup
from scenario_gen import random_scenario

DOC = parse_name("/pub/doc")


@contextmanager
def criterion(capsys, number, title, limit_s):
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit_s, f"took {elapsed:.2f}s, budget {limit_s}s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        with capsys.disabled():
            print(f"\n[{status}] criterion {number:2d}: {title} ({elapsed:.2f}s, limit {limit_s}s)")


def events(records, event, **match):
    return [r for r in records if r["event"] == event and all(r.get(k) == v for k, v in match.items())]


# -- 1 --------------------------------------------------------------------


def test_01_sdnv_codec(capsys):
    with criterion(capsys, 1, "SDNV exhaustive < 2^21, random 64-bit, known vectors", 5):
        # collect mismatches rather than asserting per value: keeps the
        # two million iterations free of assertion-rewrite overhead
        bad = [v for v in range(1 << 21) if sdnv_decode(enc := sdnv_encode(v)) != (v, len(enc))]
        assert bad == []
        rng = random.Random(1)
        for _ in range(20_000):
            v = rng.getrandbits(rng.randint(1, 64))
            enc = sdnv_encode(v)
            assert enc == sdnv_groups(v)
            assert sdnv_decode(enc) == sdnv_ungroup(enc) == (v, len(enc))
        for v, hexed in ((0, "00"), (127, "7f"), (128, "8100")):
            assert sdnv_encode(v).hex() == sdnv_groups(v).hex() == hexed


# -- 2 --------------------------------------------------------------------


def _rand_name(rng):
    return Name([rng.randbytes(rng.randint(1, 8)) for _ in range(rng.randint(0, 5))])


def _rand_packet(rng):
    k = rng.randrange(3)
    if k == 0:
        return Interest(_rand_name(rng), rng.randbytes(8), rng.randint(1, 2**40))
    if k == 1:
        return Data(_rand_name(rng), rng.randbytes(rng.randint(0, 200)), rng.randint(0, 2**40),
                    rng.randbytes(rng.randint(0, 16)))
    return StatusResponse(_rand_name(rng), rng.randint(100, 999))


def _rand_eid(rng):
    return Eid(rng.choice(["dtn", "ipn", "x1"]), rng.choice(["any", "//n", "//node" + str(rng.randint(0, 99)), ""]))


def _rand_bundle(rng):
    bpq = None
    if rng.random() < 0.8:
        frags = tuple((rng.getrandbits(20), rng.getrandbits(20)) for _ in range(rng.randint(0, 3)))
        bpq = BpqBlock(BpqKind(rng.randrange(4)), rng.randbytes(rng.randint(0, 30)),
                       (rng.getrandbits(40), rng.getrandbits(8)), len(frags), frags)
    return Bundle(_rand_eid(rng), _rand_eid(rng), (rng.getrandbits(40), rng.getrandbits(10)),
                  rng.getrandbits(32), rng.randint(0, 255), rng.randbytes(rng.randint(0, 200)), bpq)


def _fuzz(decode, encode, blob):
    try:
        value = decode(blob)
    except WireError:
        return "error"
    assert decode(encode(value)) == value
    return "ok"


def test_02_codec_round_trips_and_fuzz(capsys):
    with criterion(capsys, 2, "10k packet/bundle round-trips and 10k fuzz inputs per decoder", 30):
        rng = random.Random(2)
        packets = [_rand_packet(rng) for _ in range(10_000)]
        bundles = [_rand_bundle(rng) for _ in range(10_000)]
        for p in packets:
            raw = encode_ccn_packet(p)
            assert decode_ccn_packet(raw) == p and encode_ccn_packet(decode_ccn_packet(raw)) == raw
        for u in bundles:
            raw = encode_bundle(u)
            assert decode_bundle(raw) == u and encode_bundle(decode_bundle(raw)) == raw

        outcomes = {"ccn": set(), "bundle": set()}
        for i in range(10_000):
            # half pure noise, half mutated valid encodings
            for label, decode, encode, source in (
                ("ccn", decode_ccn_packet, encode_ccn_packet, packets),
                ("bundle", decode_bundle, encode_bundle, bundles),
            ):
                if i % 2:
                    blob = rng.randbytes(rng.randint(0, 48))
                else:
                    blob = bytearray(encode(source[i]))
                    j = rng.randrange(len(blob))
                    if rng.random() < 0.5:
                        del blob[j:]
                    else:
                        blob[j] = rng.randrange(256)
                    blob = bytes(blob)
                outcomes[label].add(_fuzz(decode, encode, blob))
        assert outcomes["ccn"] == outcomes["bundle"] == {"ok", "error"}


# -- 3 --------------------------------------------------------------------


def _ever_connected(scenario, a, b):
    """Is there any instant at which a and b are joined by up links?"""
    instants = sorted({t for ln in scenario.links for iv in ln.schedule.intervals for t in iv} | {0})
    for t in instants:
        up = [ln for ln in scenario.links if ln.schedule.is_up(t)]
        reach, frontier = {a}, [a]
        while frontier:
            x = frontier.pop()
            for ln in up:
                for u, v in ((ln.a, ln.b), (ln.b, ln.a)):
                    if u == x and v not in reach:
                        reach.add(v)
                        frontier.append(v)
        if b in reach:
            return True
    return False


def _response_path(records, consumer):
    """Nodes the delivered response crossed, from its creator to ``consumer``."""
    rx = {}
    for r in records:
        if r["event"] == "bundle_rx" and r["kind"] == "response":
            rx.setdefault((r["id"], r["node"]), r["from"])
    delivered = [r for r in records if r["event"] == "response_inject" and r["node"] == consumer]
    bid = delivered[0]["id"]
    creator = next(r["node"] for r in records if r["event"] == "bpq_response" and r["response"] == bid)
    path = [consumer]
    while path[-1] != creator:
        path.append(rx[(bid, path[-1])])
    return list(reversed(path))


def test_03_fig4_reproduction(capsys):
    with criterion(capsys, 3, "fig4: delivery without end-to-end path, on-path caching, local re-hit", 2):
        scenario = load_scenario("fig4")
        assert not _ever_connected(scenario, "publisher", "E")
        sim = Simulation(scenario)
        records, metrics = sim.run()

        first, second = "E#1", "E#2"
        assert events(records, "app_data", req=first)
        path = _response_path(records, "E")
        assert path[0] != "E" and len(path) >= 3
        end = scenario.t_end
        for node in path:
            assert sim.hosts[node].holds_content(DOC, end), node

        (req2,) = events(records, "request", req=second)
        (got2,) = events(records, "app_data", req=second)
        window = [r for r in records if req2["t"] <= r["t"] <= got2["t"]]
        assert not [r for r in window if r["event"] in ("frame_tx", "bundle_tx", "frame_drop")]
        assert got2["delay"] == 0
        assert metrics.delivery_ratio == 1.0


# -- 4 --------------------------------------------------------------------


def test_04_fig3_flows(capsys):
    with criterion(capsys, 4, "fig3a two-hop CCN legs; fig3b query-to-interest at E", 2):
        records, m = run_scenario(load_scenario("fig3a"))
        (done,) = events(records, "app_data", node="A")
        last = [r for r in events(records, "request", node="A")][-1]
        leg = [r for r in records if last["t"] <= r["t"] <= done["t"] and r["event"] == "frame_tx"]
        interests = [(r["node"], r["to"]) for r in leg if r["frame"] == "interest"]
        datas = [(r["node"], r["to"]) for r in leg if r["frame"] == "data"]
        assert interests == [("A", "C"), ("C", "E")]
        assert datas == [("E", "C"), ("C", "A")]
        # content came out of the DTN segment before that final exchange
        assert events(records, "response_inject", node="E")
        assert {r["kind"] for r in events(records, "bundle_tx")} >= {"query", "response"}
        assert m.delivery_ratio == 1.0

        records, m = run_scenario(load_scenario("fig3b"))
        at_e = [r for r in records if r["node"] == "E"]
        deliver_ix = next(i for i, r in enumerate(at_e)
                          if r["event"] == "bundle_deliver" and r["kind"] == "query")
        qid = at_e[deliver_ix]["id"]
        assert qid.startswith("dtn://H@")
        after = at_e[deliver_ix + 1:]
        assert any(r["event"] == "query_inject" and r["id"] == qid for r in after)
        assert any(r["event"] == "interest_out" and r["kind"] == "link" for r in after)
        assert events(records, "app_data", node="H")
        assert m.delivery_ratio == 1.0


# -- 5 --------------------------------------------------------------------


def test_05_bpq_suppression(capsys):
    with criterion(capsys, 5, "no node forwards a query after answering it (200 random scenarios)", 60):
        responses = 0
        for seed in range(200):
            records, _ = run_scenario(scenario_from_dict(random_scenario(seed)))
            answered = {}
            for i, r in enumerate(records):
                if r["event"] == "bpq_response":
                    answered.setdefault((r["node"], r["query"]), i)
                    responses += 1
                elif r["event"] == "bundle_tx" and r["kind"] == "query":
                    key = (r["node"], r["id"])
                    assert key not in answered, f"seed {seed}: {key} forwarded after its response"
        assert responses > 50  # the property was actually exercised


# -- 6 --------------------------------------------------------------------


def _chain_depths(records, limit):
    depth = {}
    for r in records:
        if r["event"] == "bundle_store" and r["id"].startswith(f"dtn://{r['node']}@"):
            depth.setdefault((r["id"], r["node"]), 0)
        elif r["event"] == "bundle_rx":
            parent = depth[(r["id"], r["from"])]
            depth[(r["id"], r["node"])] = parent + 1
            assert r["hop"] == limit - (parent + 1)
    return depth


def test_06_hop_limit_bound(capsys):
    with criterion(capsys, 6, "forwarding chains respect hop_limit in {0,1,2,4}", 30):
        for limit in (0, 1, 2, 4):
            longest = 0
            for seed in range(40):
                records, _ = run_scenario(scenario_from_dict(random_scenario(1000 + seed, hop_limit=limit)))
                depths = _chain_depths(records, limit)
                longest = max([longest, *depths.values()])
                assert all(d <= limit for d in depths.values())
                if limit == 0:
                    assert not events(records, "bundle_tx") and not events(records, "frame_tx")
            assert longest == limit  # the bound is reached, not just respected


# -- 7 --------------------------------------------------------------------

FAN_IN = {
    "name": "fan-in",
    "t_end": 10_000,
    "gateway": {"status_response": False},
    "nodes": [{"id": x, "roles": ["ccn"]} for x in ("c1", "c2", "c3", "R", "up1", "up2")],
    "links": [
        *[{"a": c, "b": "R", "kind": "ccn", "latency_ms": 5} for c in ("c1", "c2", "c3")],
        {"a": "R", "b": "up1", "kind": "ccn", "latency_ms": 5},
        {"a": "R", "b": "up2", "kind": "ccn", "latency_ms": 5},
    ],
    "routes": [
        {"node": c, "prefix": "/pub", "via": "R"} for c in ("c1", "c2", "c3")
    ] + [{"node": "R", "prefix": "/pub", "via": "up1"}, {"node": "R", "prefix": "/pub", "via": "up2"}],
    "workload": [
        {"type": "publish", "node": "up1", "prefix": "/pub/doc", "content_size": 100, "at": 0},
        *[{"type": "request", "node": c, "name": "/pub/doc", "at": 100} for c in ("c1", "c2", "c3")],
    ],
}


def test_07_pit_aggregation(capsys):
    with criterion(capsys, 7, "fan-in aggregation and 8-way pipeline reference equivalence", 5):
        records, m = run_scenario(scenario_from_dict(FAN_IN))
        up = [r["to"] for r in events(records, "frame_tx", node="R", frame="interest")]
        assert sorted(up) == ["up1", "up2"]
        down = [r["to"] for r in events(records, "frame_tx", node="R", frame="data")]
        assert sorted(down) == ["c1", "c2", "c3"]
        assert m.delivery_ratio == 1.0

        for cs_hit, pit_hit, fib_hit in itertools.product([False, True], repeat=3):
            node = CcnNode("n")
            f1, f2, f3 = (node.add_face(FaceKind.LINK).id for _ in range(3))
            bundle = node.add_face(FaceKind.BUNDLE).id
            if cs_hit:
                node.cs_insert(Data(DOC, b"c"), 0)
            if pit_hit:
                node.fib_add_route(DOC, f2)
                node.on_interest(f3, Interest(DOC, b"\x09" * 8), 0)
                node.fib = Fib()
            faces = []
            if fib_hit:
                for f in (f2, bundle):
                    node.fib_add_route(parse_name("/pub"), f)
                faces = [f2, bundle]
            out = node.on_interest(f1, Interest(DOC, b"\x01" * 8), 1)
            kind, expect = reference_pipeline(cs_hit, pit_hit, faces, f1)
            assert [f for f, _ in out] == expect, (cs_hit, pit_hit, fib_hit)
            if kind == "aggregate":
                assert f1 in node.pit[DOC].in_faces


# -- 8 --------------------------------------------------------------------


def _long_disruption(status):
    doc = json.loads(builtin_text("fig4"))
    for ln in doc["links"]:
        if {ln["a"], ln["b"]} == {"D", "E"}:
            ln["schedule"] = [[8000, 10000], [40000, 42000]]
    doc["workload"] = [w for w in doc["workload"] if w["type"] == "publish" or w["at"] < 10_000]
    doc["workload"][1]["max_reexpressions"] = 20
    doc["gateway"]["status_response"] = status
    return scenario_from_dict(doc)


def test_08_status_response_reduces_reexpression(capsys):
    with criterion(capsys, 8, "450 status cuts consumer interest transmissions, delivery kept", 5):
        _, with_status = run_scenario(_long_disruption(True))
        _, without = run_scenario(_long_disruption(False))
        assert with_status.delivery_ratio == without.delivery_ratio == 1.0
        assert with_status.interest_transmissions < without.interest_transmissions


# -- 9 --------------------------------------------------------------------


def test_09_baseline_contrast(capsys):
    with criterion(capsys, 9, "plain CCN fails on fig4 topology, CCN+DTN delivers", 2):
        _, base = run_scenario(load_scenario("baseline_ccn"))
        _, full = run_scenario(load_scenario("fig4"))
        assert base.delivery_ratio == 0.0
        assert full.delivery_ratio == 1.0


# -- 10 -------------------------------------------------------------------


def test_10_determinism(capsys):
    with criterion(capsys, 10, "byte-identical trace and metrics for every builtin", 10):
        for name in builtin_names():
            scenario = load_scenario(name)
            runs = []
            for _ in range(2):
                records, m = run_scenario(copy.deepcopy(scenario))
                runs.append((trace_to_jsonl(records).encode(), m.to_json().encode()))
            assert runs[0] == runs[1], name
