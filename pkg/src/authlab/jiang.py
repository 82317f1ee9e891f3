"""Jiang's timestamp-based smart-card scheme, flaws preserved.

The card never validates its inputs, the server accepts duplicate
registrations and does not count failed logins, the registration request
carries the password in the clear, and the login message names the user.
The attack harness depends on every one of these behaviours.
"""

from __future__ import annotations

import hmac
import random
from contextlib import nullcontext
from dataclasses import dataclass, field

from .channel import Channel, SimClock
from .crypto import (
    GroupParams,
    OpCounter,
    digest,
    encode_element,
    encode_tick,
    gen_group_params,
    hash_to_group,
    mod_div,
    mod_exp,
    mod_mul,
    password_scalar,
    sample_exponent,
)
from .errors import Reject, RejectReason, WireError
from .wire import JLoginMsg, JRegRequest, JServerReply

__all__ = [
    "JiangCard",
    "JiangServer",
    "ClientSession",
    "ServerSession",
    "SimClock",
    "setup",
    "registration_request",
    "register",
    "login",
    "authenticate",
    "client_finish",
    "serve",
    "run_session",
    "change_password",
]


@dataclass
class JiangCard:
    B: int
    params: GroupParams


@dataclass
class JiangServer:
    x: int
    params: GroupParams
    clock: SimClock
    delta_t: int = 2
    allow_duplicates: bool = True
    track_failures: bool = False
    lockout_after: int = 5
    id_table: set[str] = field(default_factory=set)
    failures: dict[str, int] = field(default_factory=dict)


@dataclass
class ClientSession:
    ID: str
    alpha: int
    C: int
    D: int
    W: int
    T: int


@dataclass
class ServerSession:
    ID: str
    W: int
    T_S: int
    SK: bytes


def _phase(counter: OpCounter | None, name: str):
    return counter.phase(name) if counter is not None else nullcontext()


def setup(
    params: GroupParams | str,
    rng: random.Random,
    clock: SimClock | None = None,
    delta_t: int = 2,
    allow_duplicates: bool = True,
    track_failures: bool = False,
) -> JiangServer:
    if isinstance(params, str):
        params = gen_group_params(params)
    return JiangServer(
        x=sample_exponent(params, rng),
        params=params,
        clock=clock or SimClock(),
        delta_t=delta_t,
        allow_duplicates=allow_duplicates,
        track_failures=track_failures,
    )


def registration_request(ID: str, PW: str) -> JRegRequest:
    return JRegRequest(ID, PW)


def register(server: JiangServer, req: JRegRequest, counter: OpCounter | None = None) -> JiangCard:
    """Issue a card holding ``B = h(ID)^(x + PW) mod p``."""
    if not server.allow_duplicates and req.ID in server.id_table:
        raise Reject(RejectReason.DUPLICATE_ID, req.ID)
    params = server.params
    g = hash_to_group(req.ID, params, counter)
    B = mod_exp(g, server.x + password_scalar(req.PW, params, counter), params, counter)
    server.id_table.add(req.ID)
    return JiangCard(B=B, params=params)


def _login_mac(ID: str, C: int, D: int, W: int, T: int, params: GroupParams, counter) -> bytes:
    enc = encode_element
    return digest(
        [ID, enc(C, params), enc(D, params), enc(W, params), encode_tick(T)],
        params,
        counter,
    )


def login(
    card: JiangCard,
    ID: str,
    PW: str,
    clock: SimClock,
    rng: random.Random,
    counter: OpCounter | None = None,
) -> tuple[JLoginMsg, ClientSession]:
    """Build ``{ID, D, M, T}``; whatever ``ID`` and ``PW`` are, a message goes out."""
    params = card.params
    g = hash_to_group(ID, params, counter)
    C = mod_div(card.B, mod_exp(g, password_scalar(PW, params, counter), params, counter), params, counter)
    alpha = sample_exponent(params, rng)
    D = mod_exp(g, alpha, params, counter)
    W = mod_exp(C, alpha, params, counter)
    T = clock.time("user")
    M = _login_mac(ID, C, D, W, T, params, counter)
    return JLoginMsg(ID, D, M, T), ClientSession(ID, alpha, C, D, W, T)


def _reply_mac(ID: str, W: int, T_S: int, params: GroupParams, counter) -> bytes:
    return digest([ID, encode_element(W, params), encode_tick(T_S)], params, counter)


def _session_key(W: int, params: GroupParams, counter) -> bytes:
    return digest([encode_element(W, params)], params, counter)


def authenticate(
    server: JiangServer, msg: JLoginMsg, counter: OpCounter | None = None
) -> tuple[JServerReply, ServerSession]:
    params = server.params
    if msg.ID not in server.id_table:
        raise Reject(RejectReason.UNKNOWN_ID, msg.ID)
    if server.track_failures and server.failures.get(msg.ID, 0) >= server.lockout_after:
        raise Reject(RejectReason.LOCKED_OUT, msg.ID)
    received = server.clock.time("server")
    if received - msg.T > server.delta_t:
        raise Reject(RejectReason.STALE_TIMESTAMP, f"received {received}, stamped {msg.T}")
    g = hash_to_group(msg.ID, params, counter)
    C = mod_exp(g, server.x, params, counter)
    W = mod_exp(msg.D, server.x, params, counter)
    expected = _login_mac(msg.ID, C, msg.D, W, msg.T, params, counter)
    if not hmac.compare_digest(expected, msg.M):
        if server.track_failures:
            server.failures[msg.ID] = server.failures.get(msg.ID, 0) + 1
        raise Reject(RejectReason.BAD_MAC, "M_i mismatch")
    T_S = received
    M_S = _reply_mac(msg.ID, W, T_S, params, counter)
    SK = _session_key(W, params, counter)
    return JServerReply(msg.ID, M_S, T_S), ServerSession(msg.ID, W, T_S, SK)


def client_finish(
    sess: ClientSession,
    reply: JServerReply,
    clock: SimClock,
    params: GroupParams,
    delta_t: int = 2,
    counter: OpCounter | None = None,
) -> bytes:
    """Check the server's reply; return ``SK = h(W)``."""
    received = clock.time("user")
    if received - reply.T_S > delta_t:
        raise Reject(RejectReason.STALE_TIMESTAMP, f"received {received}, stamped {reply.T_S}")
    expected = _reply_mac(sess.ID, sess.W, reply.T_S, params, counter)
    if not hmac.compare_digest(expected, reply.M_S):
        raise Reject(RejectReason.BAD_MAC, "M_S mismatch")
    return _session_key(sess.W, params, counter)


def serve(server: JiangServer, channel: Channel, counter: OpCounter | None = None) -> ServerSession:
    """Take one login message off the channel, authenticate it, send the reply."""
    payload = channel.receive("server")
    try:
        msg = JLoginMsg.from_bytes(payload, server.params)
    except WireError as exc:
        raise Reject(RejectReason.MALFORMED, str(exc)) from exc
    reply, sess = authenticate(server, msg, counter)
    channel.send("server", "user", reply.to_bytes())
    return sess


def _round_trip(server, card, ID, PW, channel, rng, counter):
    msg, sess = login(card, ID, PW, channel.clock, rng, counter)
    if server is None:
        raise Reject(RejectReason.NO_RESPONSE, "server unreachable")
    channel.send("user", "server", msg.to_bytes(card.params))
    server_sess = serve(server, channel, counter)
    reply = JServerReply.from_bytes(channel.receive("user"))
    sk = client_finish(sess, reply, channel.clock, card.params, server.delta_t, counter)
    return sk, server_sess


def run_session(
    server: JiangServer,
    card: JiangCard,
    ID: str,
    PW: str,
    channel: Channel,
    rng: random.Random,
    counter: OpCounter | None = None,
) -> tuple[bytes, ServerSession]:
    """One honest login and authentication through ``channel``.

    Returns the user's session key and the server's session object.
    """
    params = card.params
    with _phase(counter, "login"):
        msg, sess = login(card, ID, PW, channel.clock, rng, counter)
    channel.send("user", "server", msg.to_bytes(params))
    with _phase(counter, "authentication"):
        server_sess = serve(server, channel, counter)
        reply = JServerReply.from_bytes(channel.receive("user"))
        sk = client_finish(sess, reply, channel.clock, params, server.delta_t, counter)
    return sk, server_sess


def change_password(
    card: JiangCard,
    ID: str,
    PW: str,
    PW_new: str,
    server: JiangServer | None,
    channel: Channel,
    rng: random.Random,
    counter: OpCounter | None = None,
) -> JiangCard:
    """Confirm ``PW`` with a full server round trip, then rewrite ``B`` in place.

    ``server=None`` models an unreachable server; the change then fails.
    """
    params = card.params
    _round_trip(server, card, ID, PW, channel, rng, counter)
    g = hash_to_group(ID, params, counter)
    up = mod_exp(g, password_scalar(PW_new, params, counter), params, counter)
    down = mod_exp(g, password_scalar(PW, params, counter), params, counter)
    card.B = mod_div(mod_mul(card.B, up, params, counter), down, params, counter)
    return card
