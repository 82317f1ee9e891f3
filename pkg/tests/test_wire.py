import pytest

from authlab.errors import WireError
from authlab.wire import (
    JLoginMsg,
    JRegRequest,
    JServerReply,
    PConfirmMsg,
    PLoginMsg,
    PRegRequest,
    PReplyMsg,
    decode,
    pack,
    unpack,
)


def _samples(params):
    d = bytes(range(params.digest_len))
    return [
        JRegRequest("alice", "pw"),
        JLoginMsg("alice", 5, d, -3),
        JServerReply("alice", d, 2**40),
        PRegRequest("bob", d),
        PLoginMsg(b"\x01" * 16, params.p - 1, d),
        PReplyMsg(2, d),
        PConfirmMsg(d),
    ]


def test_round_trip(p512, tiny):
    for params in (p512, tiny):
        for msg in _samples(params):
            data = msg.to_bytes(params)
            assert type(msg).from_bytes(data, params) == msg
            assert decode(data, params) == msg


def test_element_fixed_width(p512):
    a = PReplyMsg(2, bytes(20)).to_bytes(p512)
    b = PReplyMsg(p512.p - 1, bytes(20)).to_bytes(p512)
    assert len(a) == len(b)


def test_proposed_login_has_no_timestamp(p512):
    _, fields = unpack(PLoginMsg(b"n" * 16, 3, bytes(20)).to_bytes(p512))
    assert len(fields) == 3


def test_unpack_errors():
    with pytest.raises(WireError):
        unpack(b"")
    with pytest.raises(WireError):
        unpack(b"\x01\x00\x00")
    with pytest.raises(WireError):
        unpack(b"\x01\x00\x00\x00\x05ab")
    assert unpack(pack(7, [b"", b"x"])) == (7, [b"", b"x"])


def test_decode_errors(p512):
    with pytest.raises(WireError):
        decode(b"\x7f", p512)
    with pytest.raises(WireError):
        decode(b"", p512)
    good = PLoginMsg(b"n" * 16, 3, bytes(20)).to_bytes(p512)
    with pytest.raises(WireError):
        JLoginMsg.from_bytes(good, p512)
    # element out of range
    bad = pack(PReplyMsg.TAG, [bytes(64), bytes(20)])
    with pytest.raises(WireError):
        PReplyMsg.from_bytes(bad, p512)
    with pytest.raises(WireError):
        PConfirmMsg.from_bytes(pack(PConfirmMsg.TAG, []))
