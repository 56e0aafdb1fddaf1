import logging

import pytest
from hypothesis import given

from ccndtn.wire import WireError, sdnv_decode, sdnv_encode, sdnv_len
from oracles import sdnv_groups, sdnv_ungroup
from strategies import u64


@pytest.mark.parametrize("value,encoded", [(0, "00"), (127, "7f"), (128, "8100"), (16384, "818000")])
def test_known_vectors(value, encoded):
    assert sdnv_encode(value).hex() == encoded
    assert sdnv_groups(value).hex() == encoded
    assert sdnv_decode(bytes.fromhex(encoded)) == (value, len(encoded) // 2)


def test_truncated():
    with pytest.raises(WireError):
        sdnv_decode(b"\x81")
    with pytest.raises(WireError):
        sdnv_decode(b"")


def test_decode_at_offset():
    assert sdnv_decode(b"\xff\x81\x00\x05", 1) == (128, 2)


def test_overflow_rejected():
    assert sdnv_decode(sdnv_encode(2**64 - 1))[0] == 2**64 - 1
    with pytest.raises(WireError):
        sdnv_decode(b"\x82" + b"\x80" * 8 + b"\x00")
    with pytest.raises(ValueError):
        sdnv_encode(2**64)
    with pytest.raises(ValueError):
        sdnv_encode(-1)


def test_non_minimal_is_accepted_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        assert sdnv_decode(b"\x80\x05") == (5, 2)
    assert "non-minimal" in caplog.text
    with pytest.raises(WireError):
        sdnv_decode(b"\x80\x05", strict=True)


@given(u64)
def test_random_64bit_round_trip(v):
    enc = sdnv_encode(v)
    assert enc == sdnv_groups(v)
    assert len(enc) == sdnv_len(v)
    assert sdnv_decode(enc) == (v, len(enc))
    assert sdnv_ungroup(enc) == (v, len(enc))


def test_long_non_minimal_and_offset_guard():
    assert sdnv_decode(b"\x80\x80\x81\x00") == (128, 4)
    # ten groups of ones is 70 bits wide
    with pytest.raises(WireError):
        sdnv_decode(b"\xff" * 9 + b"\x7f")
    with pytest.raises(WireError):
        sdnv_decode(b"\x00", -1)
    with pytest.raises(WireError):
        sdnv_decode(b"\xff" * 12)
