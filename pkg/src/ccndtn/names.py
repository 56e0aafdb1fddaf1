"""Hierarchical content names and DTN endpoint identifiers.

Names are sequences of non-empty byte-string components.  Their canonical
text form is ``/`` followed by percent-encoded components joined by ``/``;
the empty name is ``/``.  Only ``/``, ``%`` and bytes outside the graphic
ASCII range (0x21-0x7E) are escaped, so every name has exactly one
canonical rendering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

__all__ = [
    "ANY",
    "Eid",
    "Name",
    "InvalidName",
    "bpq_value_to_name",
    "format_name",
    "is_prefix_of",
    "name_to_bpq_value",
    "node_eid",
    "parse_eid",
    "parse_name",
]


class InvalidName(ValueError):
    """Malformed name or endpoint identifier text."""


_HEX = "0123456789ABCDEF"
_SCHEME_RE = re.compile(r"^[A-Za-z0-9]+$")


def _needs_escape(byte: int) -> bool:
    return byte < 0x21 or byte > 0x7E or byte in (0x25, 0x2F)  # '%', '/'


@dataclass(frozen=True, order=True)
class Name:
    """An immutable hierarchical name.

    Components may be given as ``bytes`` or ``str`` (UTF-8 encoded).
    Ordering is component-wise lexicographic on the raw bytes.
    """

    components: tuple[bytes, ...] = ()

    def __init__(self, components: Iterable[Union[bytes, str]] = ()):
        comps = []
        for c in components:
            if isinstance(c, str):
                c = c.encode("utf-8")
            elif not isinstance(c, (bytes, bytearray)):
                raise TypeError(f"name component must be bytes or str, got {type(c).__name__}")
            if len(c) == 0:
                raise InvalidName("empty name component")
            comps.append(bytes(c))
        object.__setattr__(self, "components", tuple(comps))

    def __len__(self) -> int:
        return len(self.components)

    def __str__(self) -> str:
        return format_name(self)

    def __repr__(self) -> str:
        return f"Name({format_name(self)!r})"

    def append(self, component: Union[bytes, str]) -> "Name":
        return Name(self.components + (component,))

    def prefix(self, n: int) -> "Name":
        return Name(self.components[:n])


def _escape(component: bytes) -> str:
    out = []
    for b in component:
        if _needs_escape(b):
            out.append("%" + _HEX[b >> 4] + _HEX[b & 0xF])
        else:
            out.append(chr(b))
    return "".join(out)


def _unescape(segment: str) -> bytes:
    out = bytearray()
    i = 0
    while i < len(segment):
        ch = segment[i]
        if ch == "%":
            pair = segment[i + 1:i + 3]
            if len(pair) != 2 or any(c not in "0123456789abcdefABCDEF" for c in pair):
                raise InvalidName(f"malformed percent-encoding in {segment!r}")
            out.append(int(pair, 16))
            i += 3
        else:
            out.extend(ch.encode("utf-8"))
            i += 1
    return bytes(out)


def parse_name(text: str) -> Name:
    """Parse a name from its text form (percent escapes may use either case)."""
    if not isinstance(text, str):
        raise TypeError("name text must be str")
    if not text.startswith("/"):
        raise InvalidName(f"name must begin with '/': {text!r}")
    if text == "/":
        return Name()
    segments = text[1:].split("/")
    comps = []
    for seg in segments:
        if seg == "":
            raise InvalidName(f"empty component in {text!r}")
        comps.append(_unescape(seg))
    return Name(comps)


def format_name(n: Name) -> str:
    if not n.components:
        return "/"
    return "/" + "/".join(_escape(c) for c in n.components)


def is_prefix_of(prefix: Name, n: Name) -> bool:
    """True iff ``prefix`` is a component-wise initial segment of ``n``."""
    k = len(prefix.components)
    return k <= len(n.components) and n.components[:k] == prefix.components


@dataclass(frozen=True, order=True)
class Eid:
    """DTN endpoint identifier, rendered as ``scheme:ssp``."""

    scheme: str
    ssp: str

    def __post_init__(self):
        if not self.scheme or not _SCHEME_RE.match(self.scheme) or not self.scheme.isascii():
            raise InvalidName(f"invalid EID scheme {self.scheme!r}")

    def __str__(self) -> str:
        return f"{self.scheme}:{self.ssp}"


def parse_eid(text: str) -> Eid:
    scheme, sep, ssp = text.partition(":")
    if not sep:
        raise InvalidName(f"EID has no ':' separator: {text!r}")
    if not scheme:
        raise InvalidName(f"EID has empty scheme: {text!r}")
    return Eid(scheme, ssp)


#: Pseudo destination accepted by every bundle node.
ANY = Eid("dtn", "any")


def node_eid(node_id: str) -> Eid:
    """The canonical EID of a simulated node."""
    return Eid("dtn", "//" + node_id)


def name_to_bpq_value(n: Name) -> bytes:
    return format_name(n).encode("ascii")


def bpq_value_to_name(value: bytes) -> Name:
    """Inverse of :func:`name_to_bpq_value`; rejects anything non-canonical."""
    try:
        text = bytes(value).decode("ascii")
    except UnicodeDecodeError as exc:
        raise InvalidName("BPQ value is not ASCII name text") from exc
    n = parse_name(text)
    if format_name(n) != text:
        raise InvalidName(f"BPQ value is not in canonical form: {text!r}")
    return n
