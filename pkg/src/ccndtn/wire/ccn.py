"""TLV encoding for CCN Interest, Data and StatusResponse packets.

Layout::

    type (1 byte: 1=Interest, 2=Data, 3=StatusResponse)
    SDNV body length
    body:
      name     SDNV component count, then (SDNV length, bytes) per component
      fields   each as (SDNV length, bytes); integers are SDNV-encoded
               inside their field

Interest fields: nonce (8 bytes), lifetime_ms.
Data fields: payload, freshness_ms, signature placeholder.
StatusResponse fields: code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..names import InvalidName, Name
from ._reader import Reader
from .errors import WireError
from .sdnv import sdnv_encode

INTEREST = 1
DATA = 2
STATUS_RESPONSE = 3

NONCE_LEN = 8
#: StatusResponse code for "temporarily unable to complete operation"
STATUS_TEMPORARILY_UNAVAILABLE = 450


@dataclass(frozen=True)
class Interest:
    name: Name
    nonce: bytes
    lifetime_ms: int = 4000

    def __post_init__(self):
        if len(self.nonce) != NONCE_LEN:
            raise WireError(f"interest nonce must be {NONCE_LEN} bytes")
        if self.lifetime_ms <= 0:
            raise WireError("interest lifetime must be positive")

    kind = INTEREST


@dataclass(frozen=True)
class Data:
    name: Name
    payload: bytes = b""
    freshness_ms: int = 0
    signature_placeholder: bytes = b""

    kind = DATA


@dataclass(frozen=True)
class StatusResponse:
    name: Name
    code: int = STATUS_TEMPORARILY_UNAVAILABLE

    def __post_init__(self):
        if not 100 <= self.code <= 999:
            raise WireError(f"status code must have three digits: {self.code}")

    kind = STATUS_RESPONSE


CcnPacket = Union[Interest, Data, StatusResponse]

KIND_NAMES = {INTEREST: "interest", DATA: "data", STATUS_RESPONSE: "status"}


def _chunk(b: bytes) -> bytes:
    return sdnv_encode(len(b)) + bytes(b)


def _int_field(v: int) -> bytes:
    return _chunk(sdnv_encode(v))


def encode_name(n: Name) -> bytes:
    parts = [sdnv_encode(len(n.components))]
    parts.extend(_chunk(c) for c in n.components)
    return b"".join(parts)


def read_name(r: Reader) -> Name:
    count = r.sdnv()
    # each component costs at least two bytes
    if count * 2 > r.remaining:
        raise WireError(f"name claims {count} components, only {r.remaining} bytes left")
    comps = [r.chunk() for _ in range(count)]
    try:
        return Name(comps)
    except InvalidName as exc:
        raise WireError(str(exc)) from exc


def read_int_field(r: Reader) -> int:
    sub = r.sub(r.sdnv())
    v = sub.sdnv()
    sub.expect_end("integer field")
    return v


def encode_ccn_packet(p: CcnPacket) -> bytes:
    body = [encode_name(p.name)]
    if isinstance(p, Interest):
        body += [_chunk(p.nonce), _int_field(p.lifetime_ms)]
    elif isinstance(p, Data):
        body += [_chunk(p.payload), _int_field(p.freshness_ms), _chunk(p.signature_placeholder)]
    elif isinstance(p, StatusResponse):
        body.append(_int_field(p.code))
    else:
        raise TypeError(f"not a CCN packet: {p!r}")
    blob = b"".join(body)
    return bytes([p.kind]) + sdnv_encode(len(blob)) + blob


def decode_ccn_packet(data) -> CcnPacket:
    r = Reader(data)
    kind = r.byte()
    if kind not in KIND_NAMES:
        raise WireError(f"unknown CCN packet type 0x{kind:02X}")
    body = r.sub(r.sdnv())
    r.expect_end("CCN packet")
    name = read_name(body)
    if kind == INTEREST:
        nonce = body.chunk()
        lifetime = read_int_field(body)
        body.expect_end("interest body")
        return Interest(name, nonce, lifetime)
    if kind == DATA:
        payload = body.chunk()
        freshness = read_int_field(body)
        sig = body.chunk()
        body.expect_end("data body")
        return Data(name, payload, freshness, sig)
    code = read_int_field(body)
    body.expect_end("status body")
    return StatusResponse(name, code)
