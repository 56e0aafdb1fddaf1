"""Byte-exact codecs: SDNV, CCN packets, bundles with the BPQ block."""

from .bundle import (
    BUNDLE_VERSION,
    BpqBlock,
    BpqKind,
    Bundle,
    bundle_id_text,
    decode_bundle,
    encode_bundle,
)
from .ccn import (
    DATA,
    INTEREST,
    STATUS_RESPONSE,
    STATUS_TEMPORARILY_UNAVAILABLE,
    CcnPacket,
    Data,
    Interest,
    StatusResponse,
    decode_ccn_packet,
    encode_ccn_packet,
)
from .errors import WireError
from .sdnv import sdnv_decode, sdnv_encode, sdnv_len


def decode_frame(data):
    """Decode either wire format, chosen by the leading type byte."""
    if not data:
        raise WireError("empty frame")
    if data[0] == BUNDLE_VERSION:
        return decode_bundle(data)
    return decode_ccn_packet(data)


__all__ = [
    "BUNDLE_VERSION",
    "BpqBlock",
    "BpqKind",
    "Bundle",
    "CcnPacket",
    "DATA",
    "Data",
    "INTEREST",
    "Interest",
    "STATUS_RESPONSE",
    "STATUS_TEMPORARILY_UNAVAILABLE",
    "StatusResponse",
    "WireError",
    "bundle_id_text",
    "decode_bundle",
    "decode_ccn_packet",
    "decode_frame",
    "encode_bundle",
    "encode_ccn_packet",
    "sdnv_decode",
    "sdnv_encode",
    "sdnv_len",
]
