"""Human-readable rendering of encoded frames (``ccndtn wire dump``)."""

from __future__ import annotations

import re

from ..names import format_name
from .bundle import Bundle
from .ccn import Data, Interest, StatusResponse
from .errors import WireError


def parse_hex(text: str) -> bytes:
    """Hex text to bytes; whitespace, ``0x`` prefixes and ``#`` comments are ignored."""
    lines = [line.split("#", 1)[0] for line in text.splitlines()]
    cleaned = re.sub(r"0[xX]|[\s:,]", "", " ".join(lines))
    try:
        return bytes.fromhex(cleaned)
    except ValueError:
        raise WireError("input is not valid hex") from None


def _preview(b: bytes, limit: int = 32) -> str:
    head = b[:limit].hex(" ")
    return f"{head} ..." if len(b) > limit else head


def render(packet) -> str:
    if isinstance(packet, Bundle):
        lines = [
            "Bundle",
            f"  source:      {packet.source}",
            f"  destination: {packet.destination}",
            f"  created:     {packet.creation_timestamp[0]} ms seq {packet.creation_timestamp[1]}",
            f"  lifetime:    {packet.lifetime_ms} ms",
            f"  hop_limit:   {packet.hop_limit}",
        ]
        q = packet.bpq
        if q is None:
            lines.append("  bpq:         none")
        else:
            lines += [
                f"  bpq.kind:    {q.kind.name}",
                f"  bpq.value:   {q.value.decode('ascii', 'backslashreplace')}",
                f"  bpq.orig_ts: {q.original_creation_timestamp[0]} ms seq {q.original_creation_timestamp[1]}",
                f"  bpq.frags:   {q.fragment_count} {list(q.fragments) if q.fragments else ''}".rstrip(),
            ]
        lines.append(f"  payload:     {len(packet.payload)} bytes  {_preview(packet.payload)}".rstrip())
        return "\n".join(lines)
    lines = [type(packet).__name__, f"  name:        {format_name(packet.name)}"]
    if isinstance(packet, Interest):
        lines += [f"  nonce:       {packet.nonce.hex()}", f"  lifetime:    {packet.lifetime_ms} ms"]
    elif isinstance(packet, Data):
        lines += [
            f"  freshness:   {packet.freshness_ms} ms",
            f"  signature:   {len(packet.signature_placeholder)} bytes",
            f"  payload:     {len(packet.payload)} bytes  {_preview(packet.payload)}".rstrip(),
        ]
    elif isinstance(packet, StatusResponse):
        lines.append(f"  code:        {packet.code}")
    return "\n".join(lines)
