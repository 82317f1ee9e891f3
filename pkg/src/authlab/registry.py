"""Durable storage for the proposed scheme's server state.

File layout (all integers big-endian)::

    "APLAB01"  version:u8
    label  p  q            length-prefixed (u32) byte strings
    digest_len:u16
    has_key:u8  [x]        x length-prefixed, only when has_key == 1
    rows:u32
    rows * (NID, N:u64, ID_SC, ID, status:u8)
    sha1(all preceding bytes)

The master key is left out unless explicitly requested; a file saved
without it can only be loaded by supplying the key again.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path
from typing import Callable

from .crypto import GroupParams
from .proposed import ProposedServer, Status, UserRecord
from .transcript import Transcript, TranscriptParseError, export_transcript, import_transcript

__all__ = [
    "MAGIC",
    "VERSION",
    "RegistryError",
    "ChecksumError",
    "UnsupportedVersionError",
    "MissingMasterKeyError",
    "save_state",
    "load_state",
    "dump_state",
    "parse_state",
    "Transcript",
    "TranscriptParseError",
    "export_transcript",
    "import_transcript",
]

MAGIC = b"APLAB01"
VERSION = 1
_CHECKSUM_LEN = 20
_STATUS_CODES = {Status.ACTIVE: 0, Status.REVOKED: 1}


class RegistryError(Exception):
    pass


class ChecksumError(RegistryError):
    pass


class UnsupportedVersionError(RegistryError):
    pass


class MissingMasterKeyError(RegistryError):
    pass


def _lp(b: bytes) -> bytes:
    return len(b).to_bytes(4, "big") + b


def _int_bytes(n: int) -> bytes:
    return n.to_bytes((n.bit_length() + 7) // 8 or 1, "big")


def dump_state(server: ProposedServer, persist_master_key: bool = False) -> bytes:
    params = server.params
    out = bytearray(MAGIC)
    out.append(VERSION)
    out += _lp(params.label.encode()) + _lp(_int_bytes(params.p)) + _lp(_int_bytes(params.q))
    out += params.digest_len.to_bytes(2, "big")
    if persist_master_key:
        out += b"\x01" + _lp(_int_bytes(server.x))
    else:
        out += b"\x00"
    out += len(server.records).to_bytes(4, "big")
    for rec in server.records.values():
        out += _lp(rec.NID) + rec.N.to_bytes(8, "big") + _lp(rec.ID_SC) + _lp(rec.ID.encode())
        out.append(_STATUS_CODES[rec.status])
    out += hashlib.sha1(out).digest()
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise RegistryError("unexpected end of state file")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def uint(self, width: int) -> int:
        return int.from_bytes(self.take(width), "big")

    def lp(self) -> bytes:
        return self.take(self.uint(4))


def _verify(data: bytes) -> None:
    if not data.startswith(MAGIC):
        raise RegistryError("bad magic")
    if len(data) < len(MAGIC) + 1 + _CHECKSUM_LEN:
        raise RegistryError("state file truncated")
    version = data[len(MAGIC)]
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported state file version {version}")
    body, trailer = data[:-_CHECKSUM_LEN], data[-_CHECKSUM_LEN:]
    if hashlib.sha1(body).digest() != trailer:
        raise ChecksumError("state file checksum mismatch")


def parse_state(data: bytes, master_key: int | None = None) -> ProposedServer:
    _verify(data)
    r = _Reader(data[: -_CHECKSUM_LEN])
    r.take(len(MAGIC) + 1)
    label = r.lp().decode()
    p = int.from_bytes(r.lp(), "big")
    q = int.from_bytes(r.lp(), "big")
    params = GroupParams(p=p, q=q, digest_len=r.uint(2), label=label)
    has_key = r.uint(1)
    stored_key = int.from_bytes(r.lp(), "big") if has_key else None
    if stored_key is None and master_key is None:
        raise MissingMasterKeyError("state saved without master key; supply it to load")
    if stored_key is not None and master_key is not None and stored_key != master_key:
        raise RegistryError("supplied master key differs from the stored one")
    server = ProposedServer(x=stored_key if stored_key is not None else master_key, params=params)
    codes = {v: k for k, v in _STATUS_CODES.items()}
    for _ in range(r.uint(4)):
        nid = r.lp()
        n = r.uint(8)
        id_sc = r.lp()
        ident = r.lp().decode()
        status = codes.get(r.uint(1))
        if status is None:
            raise RegistryError("unknown record status")
        server.records[nid] = UserRecord(nid, n, id_sc, ident, status)
        if status is Status.ACTIVE:
            server.id_index[ident] = n
    if r.pos != len(r.data):
        raise RegistryError("trailing bytes before checksum")
    return server


def save_state(
    server: ProposedServer,
    path: str | Path,
    *,
    persist_master_key: bool = False,
    force: bool = False,
    before_rename: Callable[[Path], None] | None = None,
) -> None:
    """Write atomically: temp file in the target directory, then rename.

    An existing file that fails its checksum is only overwritten with
    ``force``.  ``before_rename`` is a fault-injection hook called with the
    temp path just before the rename.
    """
    path = Path(path)
    if path.exists() and not force:
        try:
            _verify(path.read_bytes())
        except RegistryError as exc:
            raise RegistryError(f"refusing to overwrite damaged {path} ({exc}); use force") from exc
    data = dump_state(server, persist_master_key)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    tmp_path = Path(tmp)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        if before_rename is not None:
            before_rename(tmp_path)
        os.replace(tmp_path, path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise


def load_state(path: str | Path, master_key: int | None = None) -> ProposedServer:
    return parse_state(Path(path).read_bytes(), master_key)
