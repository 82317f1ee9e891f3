"""The improved nonce-based scheme with pseudonymous cards.

Cards hold ``{NID, B, L, V}`` where ``B = X_i xor W``, ``L = a xor
h(ID xor PW)`` and ``V = h(ID || a || PW)``.  The card checks ``V`` before
anything is sent, so wrong credentials never reach the network, and a
password change needs no server at all.  ``W`` is ``h(PW || a)`` in every
phase.
"""

from __future__ import annotations

import hmac
import random
import threading
from contextlib import nullcontext
from dataclasses import dataclass, field
from enum import Enum

from .channel import Channel
from .crypto import (
    SECURITY_LABELS,
    GroupParams,
    OpCounter,
    digest,
    encode_element,
    encode_scalar,
    encode_uint,
    gen_group_params,
    hash_to_group,
    mod_exp,
    sample_exponent,
    xor_digest,
    xor_strings,
)
from .errors import Reject, RejectReason, WireError
from .wire import PConfirmMsg, PLoginMsg, PRegRequest, PReplyMsg, pack, unpack

NID_LEN = 16
ID_SC_LEN = 16
CARD_MAGIC = b"APCARD"
CARD_VERSION = 1


class Status(str, Enum):
    ACTIVE = "active"
    REVOKED = "revoked"


@dataclass
class Card:
    NID: bytes
    B: bytes
    L: bytes
    V: bytes
    params: GroupParams

    def export(self) -> bytes:
        """Versioned binary blob: magic, version, then NID, B, L, V, label."""
        body = pack(CARD_VERSION, [self.NID, self.B, self.L, self.V, self.params.label.encode()])
        return CARD_MAGIC + body

    @classmethod
    def load(cls, blob: bytes) -> Card:
        if not blob.startswith(CARD_MAGIC):
            raise WireError("not a card blob")
        version, fields = unpack(blob[len(CARD_MAGIC) :])
        if version != CARD_VERSION:
            raise WireError(f"unsupported card version {version}")
        if len(fields) != 5:
            raise WireError("card blob must have 5 fields")
        label = fields[4].decode()
        if label not in SECURITY_LABELS:
            raise WireError(f"unknown params label {label!r}")
        return cls(*fields[:4], params=gen_group_params(label))


@dataclass(frozen=True)
class PartialCard:
    NID: bytes
    B: bytes
    params: GroupParams


@dataclass
class UserRecord:
    NID: bytes
    N: int
    ID_SC: bytes
    ID: str
    status: Status = Status.ACTIVE


@dataclass
class ProposedServer:
    x: int
    params: GroupParams
    records: dict[bytes, UserRecord] = field(default_factory=dict)
    id_index: dict[str, int] = field(default_factory=dict)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False, compare=False)

    def active_record(self, ID: str) -> UserRecord | None:
        for rec in self.records.values():
            if rec.ID == ID and rec.status is Status.ACTIVE:
                return rec
        return None


@dataclass
class ClientSession:
    ID: str
    alpha: int
    X: bytes
    D: int
    SK: bytes | None = None


@dataclass
class ServerSession:
    record: UserRecord
    beta: int
    X: bytes
    D: int
    D_S: int
    K_S: int
    SK: bytes
    complete: bool = False


def _phase(counter: OpCounter | None, name: str):
    return counter.phase(name) if counter is not None else nullcontext()


def setup(params: GroupParams | str, rng: random.Random) -> ProposedServer:
    if isinstance(params, str):
        params = gen_group_params(params)
    return ProposedServer(x=sample_exponent(params, rng), params=params)


# -- registration -------------------------------------------------------------


def _w(PW: str, a: bytes, params: GroupParams, counter) -> bytes:
    return digest([PW, a], params, counter)


def _id_pw_mask(ID: str, PW: str, params: GroupParams, counter) -> bytes:
    return digest([xor_strings(ID, PW)], params, counter)


def _verifier(ID: str, a: bytes, PW: str, params: GroupParams, counter) -> bytes:
    return digest([ID, a, PW], params, counter)


def user_secret(ID: str, N: int, ID_SC: bytes, x: int, params: GroupParams, counter=None) -> bytes:
    """``X_i = h(ID || N || ID_SC || x)``."""
    return digest([ID, encode_uint(N), ID_SC, encode_scalar(x, params)], params, counter)


def begin_registration(
    ID: str, PW: str, params: GroupParams, rng: random.Random, counter: OpCounter | None = None
) -> tuple[PRegRequest, bytes]:
    """Return the request ``(ID, W)`` and the user's secret ``a``."""
    a = rng.randbytes(params.digest_len)
    return PRegRequest(ID, _w(PW, a, params, counter)), a


def _fresh_nid(server: ProposedServer, rng: random.Random) -> bytes:
    while True:
        nid = rng.randbytes(NID_LEN)
        if nid not in server.records:
            return nid


def _issue(server: ProposedServer, ID: str, N: int, W: bytes, rng, counter) -> PartialCard:
    params = server.params
    nid = _fresh_nid(server, rng)
    id_sc = rng.randbytes(ID_SC_LEN)
    X = user_secret(ID, N, id_sc, server.x, params, counter)
    server.records[nid] = UserRecord(nid, N, id_sc, ID)
    server.id_index[ID] = N
    return PartialCard(nid, xor_digest(X, W, counter), params)


def server_register(
    server: ProposedServer, req: PRegRequest, rng: random.Random, counter: OpCounter | None = None
) -> PartialCard:
    with server.lock:
        if req.ID in server.id_index:
            raise Reject(RejectReason.DUPLICATE_ID, "identity already registered")
        return _issue(server, req.ID, 0, req.W, rng, counter)


def finalize_card(
    partial: PartialCard, ID: str, PW: str, a: bytes, counter: OpCounter | None = None
) -> Card:
    params = partial.params
    L = xor_digest(a, _id_pw_mask(ID, PW, params, counter), counter)
    V = _verifier(ID, a, PW, params, counter)
    return Card(partial.NID, partial.B, L, V, params)


def register_user(
    server: ProposedServer,
    ID: str,
    PW: str,
    rng: random.Random,
    counter: OpCounter | None = None,
    transcript: list[bytes] | None = None,
) -> Card:
    """Run all three registration steps; append the request bytes to ``transcript``."""
    req, a = begin_registration(ID, PW, server.params, rng, counter)
    if transcript is not None:
        transcript.append(req.to_bytes())
    partial = server_register(server, req, rng, counter)
    return finalize_card(partial, ID, PW, a, counter)


# -- login and authenticated key agreement ---------------------------------------


def _open_card(card: Card, ID: str, PW: str, counter) -> bytes:
    """Recover ``a`` and check ``V``; the same rejection for any wrong input."""
    params = card.params
    a = xor_digest(card.L, _id_pw_mask(ID, PW, params, counter), counter)
    if not hmac.compare_digest(_verifier(ID, a, PW, params, counter), card.V):
        raise Reject(RejectReason.BAD_CREDENTIALS)
    return a


def login_start(
    card: Card, ID: str, PW: str, rng: random.Random, counter: OpCounter | None = None
) -> tuple[PLoginMsg, ClientSession]:
    params = card.params
    a = _open_card(card, ID, PW, counter)
    X = xor_digest(card.B, _w(PW, a, params, counter), counter)
    alpha = sample_exponent(params, rng)
    D = mod_exp(hash_to_group(ID, params, counter), alpha, params, counter)
    M1 = digest([ID, encode_element(D, params), X], params, counter)
    return PLoginMsg(card.NID, D, M1), ClientSession(ID, alpha, X, D)


def _session_key(ID: str, K: int, X: bytes, params, counter) -> bytes:
    return digest([ID, encode_element(K, params), X], params, counter)


def _m2(ID: str, SK: bytes, D: int, D_S: int, params, counter) -> bytes:
    return digest([ID, SK, encode_element(D, params), encode_element(D_S, params)], params, counter)


def _m3(ID: str, SK: bytes, K: int, D_S: int, params, counter) -> bytes:
    return digest([ID, SK, encode_element(K, params), encode_element(D_S, params)], params, counter)


def server_respond(
    server: ProposedServer, msg: PLoginMsg, rng: random.Random, counter: OpCounter | None = None
) -> tuple[PReplyMsg, ServerSession]:
    params = server.params
    rec = server.records.get(msg.NID)
    if rec is None or rec.status is not Status.ACTIVE:
        raise Reject(RejectReason.UNKNOWN_NID)
    X = user_secret(rec.ID, rec.N, rec.ID_SC, server.x, params, counter)
    expected = digest([rec.ID, encode_element(msg.D, params), X], params, counter)
    if not hmac.compare_digest(expected, msg.M1):
        raise Reject(RejectReason.BAD_MAC, "M_1 mismatch")
    beta = sample_exponent(params, rng)
    D_S = mod_exp(hash_to_group(rec.ID, params, counter), beta, params, counter)
    K_S = mod_exp(msg.D, beta, params, counter)
    SK = _session_key(rec.ID, K_S, X, params, counter)
    M2 = _m2(rec.ID, SK, msg.D, D_S, params, counter)
    return PReplyMsg(D_S, M2), ServerSession(rec, beta, X, msg.D, D_S, K_S, SK)


def client_finish(
    sess: ClientSession, reply: PReplyMsg, params: GroupParams, counter: OpCounter | None = None
) -> tuple[PConfirmMsg, bytes]:
    """Authenticate the server and the session key; return ``<M_3>`` and SK."""
    K = mod_exp(reply.D_S, sess.alpha, params, counter)
    SK = _session_key(sess.ID, K, sess.X, params, counter)
    if not hmac.compare_digest(_m2(sess.ID, SK, sess.D, reply.D_S, params, counter), reply.M2):
        raise Reject(RejectReason.BAD_MAC, "M_2 mismatch")
    sess.SK = SK
    return PConfirmMsg(_m3(sess.ID, SK, K, reply.D_S, params, counter)), SK


def server_confirm(
    sess: ServerSession, confirm: PConfirmMsg, params: GroupParams, counter: OpCounter | None = None
) -> bytes:
    expected = _m3(sess.record.ID, sess.SK, sess.K_S, sess.D_S, params, counter)
    if not hmac.compare_digest(expected, confirm.M3):
        raise Reject(RejectReason.BAD_MAC, "M_3 mismatch")
    sess.complete = True
    return sess.SK


def serve_login(
    server: ProposedServer, channel: Channel, rng: random.Random, counter: OpCounter | None = None
) -> ServerSession:
    """Take a login message off the channel and answer it."""
    payload = channel.receive("server")
    try:
        msg = PLoginMsg.from_bytes(payload, server.params)
    except WireError as exc:
        raise Reject(RejectReason.MALFORMED, str(exc)) from exc
    reply, sess = server_respond(server, msg, rng, counter)
    channel.send("server", "user", reply.to_bytes(server.params))
    return sess


def serve_confirm(
    sess: ServerSession, channel: Channel, params: GroupParams, counter: OpCounter | None = None
) -> bytes:
    payload = channel.receive("server")
    try:
        msg = PConfirmMsg.from_bytes(payload)
    except WireError as exc:
        raise Reject(RejectReason.MALFORMED, str(exc)) from exc
    return server_confirm(sess, msg, params, counter)


def run_session(
    server: ProposedServer,
    card: Card,
    ID: str,
    PW: str,
    channel: Channel,
    rng: random.Random,
    counter: OpCounter | None = None,
) -> tuple[bytes, ServerSession]:
    """One honest login plus key agreement through ``channel``."""
    params = card.params
    with _phase(counter, "login"):
        msg, csess = login_start(card, ID, PW, rng, counter)
    channel.send("user", "server", msg.to_bytes(params))
    with _phase(counter, "authentication"):
        ssess = serve_login(server, channel, rng, counter)
        try:
            reply = PReplyMsg.from_bytes(channel.receive("user"), params)
        except WireError as exc:
            raise Reject(RejectReason.MALFORMED, str(exc)) from exc
        confirm, sk = client_finish(csess, reply, params, counter)
        channel.send("user", "server", confirm.to_bytes())
        serve_confirm(ssess, channel, params, counter)
    return sk, ssess


# -- card maintenance ---------------------------------------------------------------


def change_password(
    card: Card, ID: str, PW: str, PW_new: str, counter: OpCounter | None = None
) -> Card:
    """Local password change; the card is left untouched on failure."""
    params = card.params
    a = _open_card(card, ID, PW, counter)
    W = _w(PW, a, params, counter)
    W_new = _w(PW_new, a, params, counter)
    card.B = xor_digest(xor_digest(card.B, W, counter), W_new, counter)
    card.L = xor_digest(a, _id_pw_mask(ID, PW_new, params, counter), counter)
    card.V = _verifier(ID, a, PW_new, params, counter)
    return card


def revoke_and_reissue(
    server: ProposedServer, req: PRegRequest, rng: random.Random, counter: OpCounter | None = None
) -> PartialCard:
    """Revoke the user's active card and issue a new one with ``N + 1``."""
    with server.lock:
        if req.ID not in server.id_index:
            raise Reject(RejectReason.UNKNOWN_ID, "identity not registered")
        old = server.active_record(req.ID)
        if old is not None:
            old.status = Status.REVOKED
        return _issue(server, req.ID, server.id_index[req.ID] + 1, req.W, rng, counter)
