"""Bundle format with the BPQ (query) extension block.

Layout (all integers SDNV, text as SDNV-length-prefixed UTF-8)::

    0x06                       version
    SDNV                       length of everything that follows
    source EID, destination EID
    creation time_ms, creation seq, lifetime_ms, hop_limit
    0x00 | 0x01                BPQ block presence
    [BPQ block]                kind (1 byte), value (length-prefixed),
                               original creation time_ms and seq,
                               fragment count, (offset, length) per fragment
    payload                    length-prefixed bytes
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

from ..names import Eid, InvalidName, parse_eid
from ._reader import Reader
from .errors import WireError
from .sdnv import sdnv_encode

BUNDLE_VERSION = 0x06

Timestamp = tuple[int, int]


class BpqKind(enum.IntEnum):
    QUERY = 0
    RESPONSE = 1
    RESPONSE_DO_NOT_FRAGMENT = 2
    PUBLISH = 3


@dataclass(frozen=True)
class BpqBlock:
    kind: BpqKind
    value: bytes
    original_creation_timestamp: Timestamp = (0, 0)
    fragment_count: int = 0
    fragments: tuple[tuple[int, int], ...] = ()

    @property
    def is_complete(self) -> bool:
        return self.fragment_count == 0


@dataclass(frozen=True)
class Bundle:
    source: Eid
    destination: Eid
    creation_timestamp: Timestamp
    lifetime_ms: int
    hop_limit: int
    payload: bytes = b""
    bpq: Optional[BpqBlock] = None

    @property
    def id(self) -> tuple[Eid, Timestamp]:
        """Deduplication key: (source, creation timestamp)."""
        return (self.source, self.creation_timestamp)

    @property
    def expires_at(self) -> int:
        return self.creation_timestamp[0] + self.lifetime_ms

    def with_hop_limit(self, hop_limit: int) -> "Bundle":
        return replace(self, hop_limit=hop_limit)


def bundle_id_text(bundle_id) -> str:
    source, (t, seq) = bundle_id
    return f"{source}@{t}.{seq}"


def _chunk(b: bytes) -> bytes:
    return sdnv_encode(len(b)) + bytes(b)


def _validate_bpq(bpq: BpqBlock) -> None:
    if len(bpq.fragments) != bpq.fragment_count:
        raise WireError(
            f"BPQ fragment_count={bpq.fragment_count} but {len(bpq.fragments)} fragments listed"
        )


def encode_bundle(u: Bundle) -> bytes:
    parts = [
        _chunk(str(u.source).encode("utf-8")),
        _chunk(str(u.destination).encode("utf-8")),
        sdnv_encode(u.creation_timestamp[0]),
        sdnv_encode(u.creation_timestamp[1]),
        sdnv_encode(u.lifetime_ms),
        sdnv_encode(u.hop_limit),
    ]
    if u.bpq is None:
        parts.append(b"\x00")
    else:
        q = u.bpq
        _validate_bpq(q)
        parts += [
            b"\x01",
            bytes([int(q.kind)]),
            _chunk(q.value),
            sdnv_encode(q.original_creation_timestamp[0]),
            sdnv_encode(q.original_creation_timestamp[1]),
            sdnv_encode(q.fragment_count),
        ]
        for offset, length in q.fragments:
            parts += [sdnv_encode(offset), sdnv_encode(length)]
    parts.append(_chunk(u.payload))
    body = b"".join(parts)
    return bytes([BUNDLE_VERSION]) + sdnv_encode(len(body)) + body


def _read_eid(r: Reader) -> Eid:
    raw = r.chunk()
    try:
        return parse_eid(raw.decode("utf-8"))
    except (UnicodeDecodeError, InvalidName) as exc:
        raise WireError(f"bad EID text: {exc}") from exc


def decode_bundle(data) -> Bundle:
    r = Reader(data)
    version = r.byte()
    if version != BUNDLE_VERSION:
        raise WireError(f"unsupported bundle version 0x{version:02X}")
    body = r.sub(r.sdnv())
    r.expect_end("bundle")

    source = _read_eid(body)
    destination = _read_eid(body)
    created = (body.sdnv(), body.sdnv())
    lifetime = body.sdnv()
    hop_limit = body.sdnv()
    flag = body.byte()
    bpq = None
    if flag == 1:
        kind_code = body.byte()
        try:
            kind = BpqKind(kind_code)
        except ValueError:
            raise WireError(f"unknown BPQ kind {kind_code}") from None
        value = body.chunk()
        original = (body.sdnv(), body.sdnv())
        count = body.sdnv()
        # each fragment is two SDNVs, at least one byte apiece
        if count * 2 > body.remaining:
            raise WireError(f"BPQ claims {count} fragments, only {body.remaining} bytes left")
        fragments = tuple((body.sdnv(), body.sdnv()) for _ in range(count))
        bpq = BpqBlock(kind, value, original, count, fragments)
    elif flag != 0:
        raise WireError(f"bad BPQ presence flag {flag}")
    payload = body.chunk()
    body.expect_end("bundle body")
    return Bundle(source, destination, created, lifetime, hop_limit, payload, bpq)
