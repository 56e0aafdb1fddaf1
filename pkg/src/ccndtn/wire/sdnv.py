"""Self-delimiting numeric values (SDNV).

Big-endian base-128: seven value bits per octet, continuation bit (0x80)
set on every octet except the last.  Encoding is always minimal; decoding
accepts leading zero groups but reports them through the module logger.
"""

import logging

from .errors import WireError

logger = logging.getLogger(__name__)

#: Bitmask for value portion of each octet
VAL_MASK = 0x7F
#: Bitmask for continuation bit of each octet
CNT_MASK = 0x80

MAX_VALUE = (1 << 64) - 1
# 64 bits need ten 7-bit groups
MAX_LEN = 10


def sdnv_len(value: int) -> int:
    """Number of octets :func:`sdnv_encode` produces for ``value``."""
    if value < 0:
        raise ValueError("SDNV can only encode non-negative values")
    return max(1, (value.bit_length() + 6) // 7)


# single-octet encodings, shared to avoid allocating on the hot path
_ONE_OCTET = [bytes((v,)) for v in range(0x80)]

# These two functions sit under every header field.  Short values (the
# common case) take unrolled paths; the masks are literals on purpose:
# 0x7F selects value bits, 0x80 is the continuation bit.


def sdnv_encode(value: int) -> bytes:
    if 0 <= value < 0x80:
        return _ONE_OCTET[value]
    if 0 < value < 0x4000:
        return (0x8000 | (value & 0x3F80) << 1 | value & 0x7F).to_bytes(2, "big")
    if 0 < value < 0x200000:
        return (0x808000 | (value >> 14) << 16 | (value & 0x3F80) << 1 | value & 0x7F).to_bytes(3, "big")
    value = int(value)
    if value < 0 or value > MAX_VALUE:
        raise ValueError(f"SDNV value out of range: {value}")
    # spread the 7-bit groups one per octet, flagging all but the last
    packed = value & 0x7F
    shift = 8
    value >>= 7
    while value:
        packed |= (0x80 | value & 0x7F) << shift
        shift += 8
        value >>= 7
    return packed.to_bytes(shift // 8, "big")


def sdnv_decode(data, at: int = 0, *, strict: bool = False) -> tuple[int, int]:
    """Decode one SDNV starting at offset ``at``.

    :return: ``(value, consumed)``
    :raises WireError: on truncation or a value wider than 64 bits; with
        ``strict`` also on non-minimal encodings.
    """
    if at < 0:
        raise WireError("negative SDNV offset")
    try:
        first = data[at]
        if first < 0x80:
            return first, 1
        if first != 0x80:
            second = data[at + 1]
            if second < 0x80:
                return (first & 0x7F) << 7 | second, 2
            third = data[at + 2]
            if third < 0x80:
                return (first & 0x7F) << 14 | (second & 0x7F) << 7 | third, 3
    except IndexError:
        raise WireError("truncated SDNV") from None
    return _decode_long(data, at, strict)


def _decode_long(data, at: int, strict: bool) -> tuple[int, int]:
    value = 0
    ix = at
    try:
        while True:
            octet = data[ix]
            ix += 1
            value = value << 7 | octet & 0x7F
            if value > MAX_VALUE:
                raise WireError("SDNV overflows 64 bits")
            if octet < 0x80:
                break
    except IndexError:
        raise WireError("truncated SDNV") from None
    if data[at] == 0x80:
        if strict:
            raise WireError("non-minimal SDNV encoding")
        logger.warning("non-minimal SDNV encoding at offset %d (value %d)", at, value)
    return value, ix - at
