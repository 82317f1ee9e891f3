"""Mechanized attacks and flaw demonstrations.

Every function returns an :class:`AttackReport`.  Success is only claimed
after the evidence checks out: a recovered secret equal to the ground
truth handed in by the caller, or a forged session that the genuine
server object accepted with a matching key.  Failure against the
proposed scheme is shown by exhausting the supplied dictionary or fuzz
budget, never assumed.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import replace
from typing import Iterable, Sequence

from .. import jiang, proposed
from ..crypto import (
    GroupParams,
    digest,
    encode_element,
    hash_to_group,
    mod_div,
    mod_exp,
    mod_mul,
    password_scalar,
    sample_exponent,
    xor_digest,
)
from ..channel import Channel, Envelope
from ..errors import Reject, RejectReason, WireError
from ..wire import (
    JLoginMsg,
    JRegRequest,
    JServerReply,
    PConfirmMsg,
    PLoginMsg,
    PRegRequest,
    PReplyMsg,
    decode,
)
from .report import AttackReport, Outcome, random_credential
from .worlds import JiangWorld, ProposedWorld


def _outcome(ok: bool) -> Outcome:
    return Outcome.SUCCEEDED if ok else Outcome.FAILED


def _first(recorded: Iterable[bytes], cls, params: GroupParams):
    for payload in recorded:
        if payload and payload[0] == cls.TAG:
            try:
                return cls.from_bytes(payload, params)
            except WireError:
                continue
    return None


def _group_candidates(params: GroupParams, *elements: int) -> list[int]:
    """Values an adversary can form from public elements without exponents."""
    out: list[int] = []
    for a in elements:
        out.append(a)
    for i, a in enumerate(elements):
        for b in elements[i + 1 :]:
            out += [mod_mul(a, b, params), mod_div(a, b, params), mod_div(b, a, params)]
        out.append(mod_mul(a, a, params))
    return list(dict.fromkeys(out))


# -- insider -------------------------------------------------------------------


def insider(
    observed: bytes, params: GroupParams, ground_truth_pw: str, dictionary: Sequence[str] = ()
) -> AttackReport:
    """A server insider reads a registration request."""
    msg = decode(observed, params)
    if isinstance(msg, JRegRequest):
        return AttackReport(
            "insider",
            "jiang",
            _outcome(msg.PW == ground_truth_pw),
            {"visible": "PW", "recovered": msg.PW},
            probes=1,
        )
    if not isinstance(msg, PRegRequest):
        raise ValueError(f"not a registration request: {type(msg).__name__}")
    probes, hit = 0, None
    zero = bytes(params.digest_len)
    for guess in dictionary:
        # without a, the best the insider can do is try guessable values of it
        for cand in (digest([guess], params), digest([guess, b""], params), digest([guess, zero], params)):
            probes += 1
            if cand == msg.W:
                hit = guess
    return AttackReport(
        "insider",
        "proposed",
        _outcome(hit is not None and hit == ground_truth_pw),
        {"visible": "W", "preimage_found": hit or "", "dictionary_size": len(dictionary)},
        probes=probes,
    )


# -- on-line guessing ----------------------------------------------------------


def online_guess_jiang(
    card: jiang.JiangCard,
    victim_id: str,
    dictionary: Sequence[str],
    server: jiang.JiangServer,
    channel: Channel,
    rng: random.Random,
    ground_truth_pw: str,
) -> AttackReport:
    """Forge one login per guess with the dumped ``B_i``; the server is the oracle."""
    params = card.params
    dumped = jiang.JiangCard(card.B, params)
    before = channel.messages_sent("adversary")
    reasons: Counter[str] = Counter()
    accepted = None
    probes = 0
    for guess in dictionary:
        probes += 1
        msg, _ = jiang.login(dumped, victim_id, guess, channel.clock, rng)
        channel.inject("server", msg.to_bytes(params))
        try:
            jiang.serve(server, channel)
        except Reject as rej:
            reasons[rej.reason.value] += 1
            continue
        channel.receive("user")  # adversary takes the reply off the wire
        accepted = guess
        break
    return AttackReport(
        "online-guess",
        "jiang",
        _outcome(accepted is not None and accepted == ground_truth_pw),
        {"recovered": accepted or "", "rejects": dict(reasons), "server_accepted": accepted is not None},
        probes=probes,
        messages=channel.messages_sent("adversary") - before,
    )


def online_guess_proposed(
    card: proposed.Card,
    id_dictionary: Sequence[str],
    dictionary: Sequence[str],
    server: proposed.ProposedServer,
    channel: Channel,
    rng: random.Random,
    ground_truth: tuple[str, str],
) -> AttackReport:
    """Joint (ID, PW) guessing; each guess becomes a forged ``<NID, D, M_1>``."""
    params = card.params
    before = channel.messages_sent("adversary")
    reasons: Counter[str] = Counter()
    accepted = None
    probes = 0
    for ident in id_dictionary:
        g = hash_to_group(ident, params)
        for guess in dictionary:
            probes += 1
            a = xor_digest(card.L, proposed._id_pw_mask(ident, guess, params, None))
            X = xor_digest(card.B, proposed._w(guess, a, params, None))
            D = mod_exp(g, sample_exponent(params, rng), params)
            M1 = digest([ident, encode_element(D, params), X], params)
            channel.inject("server", PLoginMsg(card.NID, D, M1).to_bytes(params))
            try:
                proposed.serve_login(server, channel, rng)
            except Reject as rej:
                reasons[rej.reason.value] += 1
                continue
            channel.receive("user")
            accepted = (ident, guess)
            break
        if accepted:
            break
    return AttackReport(
        "online-guess",
        "proposed",
        _outcome(accepted is not None and accepted == ground_truth),
        {
            "accepts": int(accepted is not None),
            "rejects": dict(reasons),
            "id_candidates": len(id_dictionary),
            "pw_candidates": len(dictionary),
        },
        probes=probes,
        messages=channel.messages_sent("adversary") - before,
    )


# -- key extraction by duplicate registration -------------------------------------


def extract_user_key_jiang(
    victim_id: str, server: jiang.JiangServer, rng: random.Random, ground_truth_key: int
) -> tuple[AttackReport, int | None]:
    """Register the victim's identity again and divide out our own password."""
    params = server.params
    pw_e = random_credential(rng, 12)
    try:
        card_e = jiang.register(server, jiang.registration_request(victim_id, pw_e))
    except Reject as rej:
        return AttackReport("extract-user-key", "jiang", Outcome.FAILED, {"reject": rej.reason.value}), None
    g = hash_to_group(victim_id, params)
    key = mod_div(card_e.B, mod_exp(g, password_scalar(pw_e, params), params), params)
    ok = key == ground_truth_key
    report = AttackReport(
        "extract-user-key", "jiang", _outcome(ok), {"key": format(key, "x"), "verified": ok}
    )
    return report, key if ok else None


def extract_user_key_proposed(
    victim_id: str, server: proposed.ProposedServer, rng: random.Random
) -> AttackReport:
    params = server.params
    req, _ = proposed.begin_registration(victim_id, random_credential(rng, 12), params, rng)
    try:
        proposed.server_register(server, req, rng)
    except Reject as rej:
        return AttackReport("extract-user-key", "proposed", Outcome.FAILED, {"reject": rej.reason.value})
    # a second card carries a fresh ID_SC, so nothing about the victim's X_i leaks
    return AttackReport("extract-user-key", "proposed", Outcome.FAILED, {"reject": "", "issued": True})


# -- off-line guessing ------------------------------------------------------------


def offline_guess_jiang(
    card: jiang.JiangCard,
    victim_id: str,
    extracted_key: int | None,
    dictionary: Sequence[str],
    ground_truth_pw: str,
) -> AttackReport:
    """Test ``B_i / h(ID)^PW* == h(ID)^x`` per guess; no network access at all."""
    if extracted_key is None:
        return AttackReport("offline-guess", "jiang", Outcome.FAILED, {"reason": "no extracted key"})
    params = card.params
    g = hash_to_group(victim_id, params)
    found, probes = None, 0
    for guess in dictionary:
        probes += 1
        if mod_div(card.B, mod_exp(g, password_scalar(guess, params), params), params) == extracted_key:
            found = guess
            break
    return AttackReport(
        "offline-guess",
        "jiang",
        _outcome(found is not None and found == ground_truth_pw),
        {"recovered": found or ""},
        probes=probes,
    )


def offline_guess_proposed(
    card: proposed.Card,
    id_dictionary: Sequence[str],
    dictionary: Sequence[str],
    ground_truth: tuple[str, str],
) -> AttackReport:
    """Joint (ID, PW) search against the card's verifier ``V``."""
    params = card.params
    found, probes = None, 0
    for ident in id_dictionary:
        for guess in dictionary:
            probes += 1
            a = xor_digest(card.L, proposed._id_pw_mask(ident, guess, params, None))
            if proposed._verifier(ident, a, guess, params, None) == card.V:
                found = (ident, guess)
                break
        if found:
            break
    return AttackReport(
        "offline-guess",
        "proposed",
        _outcome(found is not None and found == ground_truth),
        {"recovered": ":".join(found) if found else "", "id_candidates": len(id_dictionary)},
        probes=probes,
    )


# -- user impersonation -------------------------------------------------------------


def impersonate_user_jiang(
    victim_id: str,
    extracted_key: int | None,
    server: jiang.JiangServer,
    channel: Channel,
    rng: random.Random,
) -> AttackReport:
    if extracted_key is None:
        return AttackReport("impersonate-user", "jiang", Outcome.FAILED, {"reason": "no extracted key"})
    params = server.params
    g = hash_to_group(victim_id, params)
    e = sample_exponent(params, rng)
    D_E = mod_exp(g, e, params)
    W_E = mod_exp(extracted_key, e, params)
    T_E = channel.clock.time("adversary")
    M_E = jiang._login_mac(victim_id, extracted_key, D_E, W_E, T_E, params, None)
    channel.inject("server", JLoginMsg(victim_id, D_E, M_E, T_E).to_bytes(params))
    try:
        sess = jiang.serve(server, channel)
    except Reject as rej:
        return AttackReport(
            "impersonate-user", "jiang", Outcome.FAILED, {"reject": rej.reason.value}, messages=1
        )
    channel.receive("user")
    sk = jiang._session_key(W_E, params, None)
    return AttackReport(
        "impersonate-user",
        "jiang",
        _outcome(sk == sess.SK),
        {"server_accepted": True, "sk_match": sk == sess.SK, "sk": sk.hex()},
        messages=1,
    )


def impersonate_user_proposed(
    card: proposed.Card,
    id_dictionary: Sequence[str],
    server: proposed.ProposedServer,
    channel: Channel,
    rng: random.Random,
    random_attempts: int = 16,
) -> AttackReport:
    """Forge ``M_1`` from a dumped card without the password."""
    params = card.params
    reasons: Counter[str] = Counter()
    accepts = probes = 0
    forgeries: list[tuple[str, bytes]] = []
    for ident in id_dictionary:
        forgeries += [(ident, card.B), (ident, xor_digest(card.B, card.L)), (ident, card.V)]
    forgeries += [(random_credential(rng, 10), rng.randbytes(params.digest_len)) for _ in range(random_attempts)]
    for ident, X in forgeries:
        probes += 1
        D = mod_exp(hash_to_group(ident, params), sample_exponent(params, rng), params)
        M1 = digest([ident, encode_element(D, params), X], params)
        channel.inject("server", PLoginMsg(card.NID, D, M1).to_bytes(params))
        try:
            proposed.serve_login(server, channel, rng)
        except Reject as rej:
            reasons[rej.reason.value] += 1
            continue
        channel.receive("user")
        accepts += 1
    return AttackReport(
        "impersonate-user",
        "proposed",
        # an accepted forgery would still need SK; count acceptance as a win
        _outcome(accepts > 0),
        {"accepts": accepts, "rejects": dict(reasons)},
        probes=probes,
        messages=probes,
    )


# -- server impersonation -------------------------------------------------------------


def impersonate_server_proposed(
    world: ProposedWorld, recorded_reply: bytes, rng: random.Random, fuzz: int = 1000
) -> AttackReport:
    """Answer a fresh login with an old ``<D_S, M_2>``, then with fuzzed ones."""
    params = world.params
    channel = world.channel
    msg, sess = proposed.login_start(world.card, world.victim_id, world.victim_pw, world.rng)
    channel.interceptor = lambda env: None  # the adversary sits in front of the server
    channel.send("user", "server", msg.to_bytes(params))
    channel.interceptor = None
    channel.inject("user", recorded_reply)
    reasons: Counter[str] = Counter()
    accepts = 0
    try:
        proposed.client_finish(sess, PReplyMsg.from_bytes(channel.receive("user"), params), params)
        accepts += 1
    except Reject as rej:
        reasons["replayed:" + rej.reason.value] += 1
    for _ in range(fuzz):
        D_S = rng.randrange(1, params.p)
        fake = PReplyMsg(D_S, rng.randbytes(params.digest_len))
        try:
            proposed.client_finish(sess, fake, params)
            accepts += 1
        except Reject as rej:
            reasons["fuzzed:" + rej.reason.value] += 1
    return AttackReport(
        "impersonate-server",
        "proposed",
        _outcome(accepts > 0),
        {"accepts": accepts, "rejects": dict(reasons)},
        probes=fuzz + 1,
        messages=1,
    )


# -- replay -------------------------------------------------------------------------


def replay_proposed(world: ProposedWorld, recorded: Sequence[bytes]) -> AttackReport:
    """Replay an old login, then answer the fresh challenge with the old ``M_3``."""
    params, channel = world.params, world.channel
    login = _first(recorded, PLoginMsg, params)
    old_reply = _first(recorded, PReplyMsg, params)
    confirm = _first(recorded, PConfirmMsg, params)
    if login is None or confirm is None:
        return AttackReport("replay", "proposed", Outcome.FAILED, {"reason": "incomplete transcript"})
    channel.inject("server", login.to_bytes(params))
    try:
        sess = proposed.serve_login(world.server, channel, world.rng)
    except Reject as rej:
        return AttackReport("replay", "proposed", Outcome.FAILED, {"login_reject": rej.reason.value})
    fresh = PReplyMsg.from_bytes(channel.receive("user"), params)
    channel.inject("server", confirm.to_bytes())
    evidence = {
        "login_accepted": True,
        "fresh_challenge": old_reply is None or fresh.D_S != old_reply.D_S,
    }
    try:
        proposed.serve_confirm(sess, channel, params)
    except Reject as rej:
        evidence["confirm_reject"] = rej.reason.value
        return AttackReport("replay", "proposed", Outcome.FAILED, evidence, messages=2)
    return AttackReport("replay", "proposed", Outcome.SUCCEEDED, evidence, messages=2)


def replay_jiang(world: JiangWorld, recorded: Sequence[bytes], delay: int) -> AttackReport:
    """Resend an old login ``delay`` ticks later.

    Inside the freshness window the server accepts the copy, but the
    adversary still lacks ``W`` and cannot derive the session key; that
    acceptance is reported as evidence, not as success.
    """
    params, channel = world.params, world.channel
    login = _first(recorded, JLoginMsg, params)
    if login is None:
        return AttackReport("replay", "jiang", Outcome.FAILED, {"reason": "no login recorded"})
    channel.clock.advance(delay)
    channel.inject("server", login.to_bytes(params))
    try:
        sess = jiang.serve(world.server, channel)
    except Reject as rej:
        return AttackReport(
            "replay", "jiang", Outcome.FAILED, {"delay": delay, "reject": rej.reason.value}, messages=1
        )
    channel.receive("user")
    # the adversary's best guesses at W: public elements only
    cands = _group_candidates(params, login.D)
    won = any(jiang._session_key(w, params, None) == sess.SK for w in cands)
    return AttackReport(
        "replay",
        "jiang",
        _outcome(won),
        {"delay": delay, "accepted_in_window": True, "sk_recovered": won},
        messages=1,
    )


# -- forward secrecy -----------------------------------------------------------------


def break_pfs_jiang(
    master_key: int | None, recorded: Sequence[bytes], params: GroupParams, ground_truth_sk: bytes
) -> AttackReport:
    """``SK = h(D_i^x)`` straight from an eavesdropped login."""
    login = _first(recorded, JLoginMsg, params) if recorded else None
    if master_key is None or login is None:
        return AttackReport("break-pfs", "jiang", Outcome.FAILED, {"reason": "missing x or transcript"})
    W = mod_exp(login.D, master_key, params)
    sk = jiang._session_key(W, params, None)
    reply = _first(recorded, JServerReply, params)
    mac_ok = reply is not None and jiang._reply_mac(login.ID, W, reply.T_S, params, None) == reply.M_S
    return AttackReport(
        "break-pfs",
        "jiang",
        _outcome(sk == ground_truth_sk),
        {"sk": sk.hex(), "sk_match": sk == ground_truth_sk, "reply_mac_confirms": mac_ok},
    )


def _proposed_key_search(
    ident_candidates: Sequence[str],
    X_candidates: Sequence[bytes],
    K_candidates: Sequence[int],
    login: PLoginMsg,
    reply: PReplyMsg,
    params: GroupParams,
    ground_truth_sk: bytes,
) -> tuple[bool, int]:
    probes = 0
    for ident in ident_candidates:
        for X in X_candidates:
            for K in K_candidates:
                probes += 1
                sk = digest([ident, encode_element(K, params), X], params)
                m2 = digest(
                    [ident, sk, encode_element(login.D, params), encode_element(reply.D_S, params)],
                    params,
                )
                if sk == ground_truth_sk and m2 == reply.M2:
                    return True, probes
    return False, probes


def break_pfs_proposed(
    master_key: int,
    record: proposed.UserRecord,
    recorded: Sequence[bytes],
    params: GroupParams,
    ground_truth_sk: bytes,
) -> AttackReport:
    """With ``x`` and the victim's table row, ``X_i`` falls; ``K`` still needs CDH."""
    login = _first(recorded, PLoginMsg, params)
    reply = _first(recorded, PReplyMsg, params)
    if login is None or reply is None:
        return AttackReport("break-pfs", "proposed", Outcome.FAILED, {"reason": "missing transcript"})
    X = proposed.user_secret(record.ID, record.N, record.ID_SC, master_key, params)
    g = hash_to_group(record.ID, params)
    cands = _group_candidates(params, login.D, reply.D_S, g)
    cands += [mod_exp(c, master_key, params) for c in list(cands)]
    won, probes = _proposed_key_search([record.ID], [X], cands, login, reply, params, ground_truth_sk)
    return AttackReport(
        "break-pfs",
        "proposed",
        _outcome(won),
        {"X_recovered": True, "K_candidates": len(cands)},
        probes=probes,
    )


def forward_secrecy_jiang(
    user_key: int, victim_id: str, recorded: Sequence[bytes], params: GroupParams, ground_truth_sk: bytes
) -> AttackReport:
    """The user's long-term secret ``h(ID)^x`` leaks; ``W = h(ID)^(x alpha)`` still needs CDH."""
    login = _first(recorded, JLoginMsg, params)
    reply = _first(recorded, JServerReply, params)
    if login is None or reply is None:
        return AttackReport("forward-secrecy", "jiang", Outcome.FAILED, {"reason": "missing transcript"})
    cands = _group_candidates(params, login.D, user_key, hash_to_group(victim_id, params))
    probes, won = 0, False
    for W in cands:
        probes += 1
        if (
            jiang._session_key(W, params, None) == ground_truth_sk
            and jiang._reply_mac(victim_id, W, reply.T_S, params, None) == reply.M_S
        ):
            won = True
            break
    return AttackReport("forward-secrecy", "jiang", _outcome(won), {"W_candidates": len(cands)}, probes=probes)


def forward_secrecy_proposed(
    X: bytes, victim_id: str, recorded: Sequence[bytes], params: GroupParams, ground_truth_sk: bytes
) -> AttackReport:
    """``X_i`` and even ``ID`` leak; ``K = h(ID)^(alpha beta)`` still needs CDH."""
    login = _first(recorded, PLoginMsg, params)
    reply = _first(recorded, PReplyMsg, params)
    if login is None or reply is None:
        return AttackReport("forward-secrecy", "proposed", Outcome.FAILED, {"reason": "missing transcript"})
    cands = _group_candidates(params, login.D, reply.D_S, hash_to_group(victim_id, params))
    won, probes = _proposed_key_search([victim_id], [X], cands, login, reply, params, ground_truth_sk)
    return AttackReport(
        "forward-secrecy", "proposed", _outcome(won), {"K_candidates": len(cands)}, probes=probes
    )


def ephemeral_leak(
    leaked: dict[str, int],
    recorded: Sequence[bytes],
    params: GroupParams,
    id_dictionary: Sequence[str],
    ground_truth_sk: bytes,
    known_id: str | None = None,
    known_X: bytes | None = None,
) -> AttackReport:
    """Session exponents leak; ``SK`` still binds the secret ``ID`` and ``X_i``."""
    login = _first(recorded, PLoginMsg, params)
    reply = _first(recorded, PReplyMsg, params)
    if login is None or reply is None:
        return AttackReport("ephemeral-leak", "proposed", Outcome.FAILED, {"reason": "missing transcript"})
    if "alpha" in leaked:
        K = mod_exp(reply.D_S, leaked["alpha"], params)
    elif "beta" in leaked:
        K = mod_exp(login.D, leaked["beta"], params)
    else:
        return AttackReport("ephemeral-leak", "proposed", Outcome.FAILED, {"reason": "nothing leaked"})
    idents = [known_id] if known_id is not None else list(id_dictionary)
    Xs = [known_X] if known_X is not None else [bytes(params.digest_len)]
    won, probes = _proposed_key_search(idents, Xs, [K], login, reply, params, ground_truth_sk)
    return AttackReport(
        "ephemeral-leak",
        "proposed",
        _outcome(won),
        {"leaked": sorted(leaked), "knows_id": known_id is not None, "knows_X": known_X is not None},
        probes=probes,
    )


# -- flaw demonstrations ---------------------------------------------------------------


def anonymity(world: JiangWorld | ProposedWorld, scheme: str) -> AttackReport:
    """Look for the identity's bytes in every transmitted message and card field."""
    world.channel.eavesdrop = True
    world.session()
    ident = world.victim_id.encode()
    if scheme == "jiang":
        card_fields = [encode_element(world.card.B, world.params)]
    else:
        c = world.card
        card_fields = [c.NID, c.B, c.L, c.V, c.export()]
    leaks = [i for i, env in enumerate(world.channel.recorded) if ident in env.payload]
    card_leaks = [i for i, f in enumerate(card_fields) if ident in f]
    return AttackReport(
        "anonymity",
        scheme,
        _outcome(bool(leaks or card_leaks)),
        {"messages_with_id": leaks, "card_fields_with_id": card_leaks},
        probes=len(world.channel.recorded),
    )


def clock_skew(world: JiangWorld | ProposedWorld, scheme: str, skew_ticks: int) -> AttackReport:
    """Run an honest session with the user's clock ``skew_ticks`` behind the server."""
    world.clock.skew["user"] = -skew_ticks
    try:
        world.session()
    except Reject as rej:
        return AttackReport(
            "clock-skew", scheme, Outcome.SUCCEEDED, {"skew": skew_ticks, "honest_reject": rej.reason.value}
        )
    return AttackReport("clock-skew", scheme, Outcome.FAILED, {"skew": skew_ticks, "honest_reject": ""})


def wasted_roundtrip(world: JiangWorld | ProposedWorld, scheme: str, wrong_pw: str) -> AttackReport:
    """A typo'd password: does anything reach the network before rejection?"""
    channel = world.channel
    before = channel.messages_sent()
    params = world.params
    where = ""
    try:
        if scheme == "jiang":
            msg, _ = jiang.login(world.card, world.victim_id, wrong_pw, channel.clock, world.rng)
            channel.send("user", "server", msg.to_bytes(params))
            jiang.serve(world.server, channel)
        else:
            msg, _ = proposed.login_start(world.card, world.victim_id, wrong_pw, world.rng)
            channel.send("user", "server", msg.to_bytes(params))
            proposed.serve_login(world.server, channel, world.rng)
    except Reject as rej:
        where = rej.reason.value
    sent = channel.messages_sent() - before
    return AttackReport(
        "wasted-roundtrip", scheme, _outcome(sent > 0), {"reject": where, "messages": sent}, messages=sent
    )


def password_change_dependency(world: JiangWorld | ProposedWorld, scheme: str, new_pw: str) -> AttackReport:
    """Try a password change with the server offline, then online."""
    channel = world.channel
    before = channel.messages_sent()
    evidence: dict[str, object] = {}
    if scheme == "jiang":
        offline_card = replace(world.card)
        try:
            jiang.change_password(offline_card, world.victim_id, world.victim_pw, new_pw, None, channel, world.rng)
            evidence["offline"] = "ok"
        except Reject as rej:
            evidence["offline"] = rej.reason.value
        mid = channel.messages_sent()
        jiang.change_password(world.card, world.victim_id, world.victim_pw, new_pw, world.server, channel, world.rng)
        evidence["online_messages"] = channel.messages_sent() - mid
    else:
        proposed.change_password(world.card, world.victim_id, world.victim_pw, new_pw)
        evidence["offline"] = "ok"
        evidence["online_messages"] = 0
    sent_during_change = channel.messages_sent() - before
    world.victim_pw = new_pw
    sk, srv = world.session()
    evidence["new_password_login"] = sk == srv.SK
    needs_server = evidence["offline"] != "ok"
    return AttackReport(
        "password-change",
        scheme,
        _outcome(needs_server),
        evidence,
        messages=sent_during_change,
    )


def _flip(b: bytes) -> bytes:
    return bytes([b[0] ^ 1]) + b[1:]


def session_key_confirmation(world: JiangWorld | ProposedWorld, scheme: str) -> AttackReport:
    """Tamper with the server's reply in flight.

    The flaw shows when the server ends up committed to a session key that
    the user never confirmed holding.
    """
    params, channel = world.params, world.channel

    def tamper(env: Envelope) -> Envelope | None:
        if env.sender != "server":
            return env
        msg = decode(env.payload, params)
        if isinstance(msg, JServerReply):
            msg = JServerReply(msg.ID, _flip(msg.M_S), msg.T_S)
        elif isinstance(msg, PReplyMsg):
            # still a valid subgroup element, so the user derives a different K
            msg = PReplyMsg(mod_mul(msg.D_S, msg.D_S, params), msg.M2)
        return Envelope(env.sender, env.receiver, msg.to_bytes(params))

    channel.interceptor = tamper
    client_reject = ""
    server_committed = False
    try:
        if scheme == "jiang":
            msg, sess = jiang.login(world.card, world.victim_id, world.victim_pw, channel.clock, world.rng)
            channel.send("user", "server", msg.to_bytes(params))
            srv = jiang.serve(world.server, channel)
            server_committed = srv.SK is not None  # nothing further from the user is awaited
            try:
                jiang.client_finish(sess, JServerReply.from_bytes(channel.receive("user")), channel.clock, params, world.server.delta_t)
            except Reject as rej:
                client_reject = rej.reason.value
        else:
            msg, csess = proposed.login_start(world.card, world.victim_id, world.victim_pw, world.rng)
            channel.send("user", "server", msg.to_bytes(params))
            ssess = proposed.serve_login(world.server, channel, world.rng)
            try:
                confirm, _ = proposed.client_finish(csess, PReplyMsg.from_bytes(channel.receive("user"), params), params)
                channel.send("user", "server", confirm.to_bytes())
                proposed.serve_confirm(ssess, channel, params)
            except Reject as rej:
                client_reject = rej.reason.value
            server_committed = ssess.complete
    finally:
        channel.interceptor = None
    undetected = bool(client_reject) and server_committed
    return AttackReport(
        "session-key-verification",
        scheme,
        _outcome(undetected),
        {"client_reject": client_reject, "server_committed": server_committed},
    )


def card_revocation(world: JiangWorld | ProposedWorld, scheme: str, new_pw: str) -> AttackReport:
    """A thief holds the victim's old card and old credentials; the victim asks for a new card."""
    params, channel, rng = world.params, world.channel, world.rng
    stolen = replace(world.card)
    ident, old_pw = world.victim_id, world.victim_pw
    evidence: dict[str, object] = {}
    if scheme == "jiang":
        try:
            world.card = jiang.register(world.server, jiang.registration_request(ident, new_pw))
            evidence["reissue"] = "re-registered"
        except Reject as rej:
            evidence["reissue"] = rej.reason.value
        try:
            sk, srv = jiang.run_session(world.server, stolen, ident, old_pw, channel, rng)
            thief_in = sk == srv.SK
        except Reject as rej:
            evidence["thief_reject"] = rej.reason.value
            thief_in = False
    else:
        req, a = proposed.begin_registration(ident, new_pw, params, rng)
        partial = proposed.revoke_and_reissue(world.server, req, rng)
        world.card = proposed.finalize_card(partial, ident, new_pw, a)
        evidence["reissue"] = "new NID"
        try:
            sk, srv = proposed.run_session(world.server, stolen, ident, old_pw, channel, rng)
            thief_in = sk == srv.SK
        except Reject as rej:
            evidence["thief_reject"] = rej.reason.value
            thief_in = False
    evidence["thief_logged_in"] = thief_in
    return AttackReport("card-revocation", scheme, _outcome(thief_in), evidence)
