"""Byte-exact wire messages for both schemes.

Layout: one tag byte, then each field as a 4-byte big-endian length and
the field bytes.  Group elements use the canonical fixed-width encoding;
timestamps are 8-byte signed big-endian tick counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

from .crypto import GroupParams, decode_element, encode_element
from .errors import WireError


def pack(tag: int, fields: list[bytes]) -> bytes:
    return bytes([tag]) + b"".join(len(f).to_bytes(4, "big") + f for f in fields)


def unpack(data: bytes) -> tuple[int, list[bytes]]:
    if not data:
        raise WireError("empty message")
    tag, pos, fields = data[0], 1, []
    while pos < len(data):
        if pos + 4 > len(data):
            raise WireError("truncated length prefix")
        n = int.from_bytes(data[pos : pos + 4], "big")
        pos += 4
        if pos + n > len(data):
            raise WireError("field runs past end of message")
        fields.append(data[pos : pos + n])
        pos += n
    return tag, fields


def _ts(t: int) -> bytes:
    return t.to_bytes(8, "big", signed=True)


def _from_ts(b: bytes) -> int:
    if len(b) != 8:
        raise WireError("timestamp must be 8 bytes")
    return int.from_bytes(b, "big", signed=True)


def _text(b: bytes) -> str:
    try:
        return b.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise WireError("identity is not valid UTF-8") from exc


def _elem(b: bytes, params: GroupParams) -> int:
    try:
        return decode_element(b, params)
    except ValueError as exc:
        raise WireError(str(exc)) from exc


class _Message:
    TAG: ClassVar[int]
    NFIELDS: ClassVar[int]

    @classmethod
    def _fields(cls, data: bytes) -> list[bytes]:
        tag, fields = unpack(data)
        if tag != cls.TAG:
            raise WireError(f"expected tag {cls.TAG:#04x}, got {tag:#04x}")
        if len(fields) != cls.NFIELDS:
            raise WireError(f"{cls.__name__} takes {cls.NFIELDS} fields, got {len(fields)}")
        return fields


# -- Jiang --------------------------------------------------------------------


@dataclass(frozen=True)
class JRegRequest(_Message):
    """Registration request; carries the password in the clear."""

    ID: str
    PW: str
    TAG: ClassVar[int] = 0x01
    NFIELDS: ClassVar[int] = 2

    def to_bytes(self, params: GroupParams | None = None) -> bytes:
        return pack(self.TAG, [self.ID.encode(), self.PW.encode()])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams | None = None) -> JRegRequest:
        f = cls._fields(data)
        return cls(_text(f[0]), _text(f[1]))


@dataclass(frozen=True)
class JLoginMsg(_Message):
    ID: str
    D: int
    M: bytes
    T: int
    TAG: ClassVar[int] = 0x02
    NFIELDS: ClassVar[int] = 4

    def to_bytes(self, params: GroupParams) -> bytes:
        return pack(self.TAG, [self.ID.encode(), encode_element(self.D, params), self.M, _ts(self.T)])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams) -> JLoginMsg:
        f = cls._fields(data)
        return cls(_text(f[0]), _elem(f[1], params), f[2], _from_ts(f[3]))


@dataclass(frozen=True)
class JServerReply(_Message):
    ID: str
    M_S: bytes
    T_S: int
    TAG: ClassVar[int] = 0x03
    NFIELDS: ClassVar[int] = 3

    def to_bytes(self, params: GroupParams | None = None) -> bytes:
        return pack(self.TAG, [self.ID.encode(), self.M_S, _ts(self.T_S)])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams | None = None) -> JServerReply:
        f = cls._fields(data)
        return cls(_text(f[0]), f[1], _from_ts(f[2]))


# -- proposed scheme ------------------------------------------------------------


@dataclass(frozen=True)
class PRegRequest(_Message):
    """Registration (or reissue) request: identity plus ``W = h(PW || a)``."""

    ID: str
    W: bytes
    TAG: ClassVar[int] = 0x11
    NFIELDS: ClassVar[int] = 2

    def to_bytes(self, params: GroupParams | None = None) -> bytes:
        return pack(self.TAG, [self.ID.encode(), self.W])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams | None = None) -> PRegRequest:
        f = cls._fields(data)
        return cls(_text(f[0]), f[1])


@dataclass(frozen=True)
class PLoginMsg(_Message):
    NID: bytes
    D: int
    M1: bytes
    TAG: ClassVar[int] = 0x12
    NFIELDS: ClassVar[int] = 3

    def to_bytes(self, params: GroupParams) -> bytes:
        return pack(self.TAG, [self.NID, encode_element(self.D, params), self.M1])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams) -> PLoginMsg:
        f = cls._fields(data)
        return cls(f[0], _elem(f[1], params), f[2])


@dataclass(frozen=True)
class PReplyMsg(_Message):
    D_S: int
    M2: bytes
    TAG: ClassVar[int] = 0x13
    NFIELDS: ClassVar[int] = 2

    def to_bytes(self, params: GroupParams) -> bytes:
        return pack(self.TAG, [encode_element(self.D_S, params), self.M2])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams) -> PReplyMsg:
        f = cls._fields(data)
        return cls(_elem(f[0], params), f[1])


@dataclass(frozen=True)
class PConfirmMsg(_Message):
    M3: bytes
    TAG: ClassVar[int] = 0x14
    NFIELDS: ClassVar[int] = 1

    def to_bytes(self, params: GroupParams | None = None) -> bytes:
        return pack(self.TAG, [self.M3])

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams | None = None) -> PConfirmMsg:
        return cls(cls._fields(data)[0])


Message = Union[JRegRequest, JLoginMsg, JServerReply, PRegRequest, PLoginMsg, PReplyMsg, PConfirmMsg]

MESSAGE_TYPES: dict[int, type] = {
    cls.TAG: cls
    for cls in (JRegRequest, JLoginMsg, JServerReply, PRegRequest, PLoginMsg, PReplyMsg, PConfirmMsg)
}


def decode(data: bytes, params: GroupParams) -> Message:
    """Parse any message by its tag byte."""
    if not data:
        raise WireError("empty message")
    cls = MESSAGE_TYPES.get(data[0])
    if cls is None:
        raise WireError(f"unknown tag {data[0]:#04x}")
    return cls.from_bytes(data, params)
