import random
import threading
from collections import Counter

import pytest

from authlab import proposed
from authlab.channel import Channel
from authlab.crypto import digest, encode_element, mod_mul, xor_digest
from authlab.errors import Reject, RejectReason, WireError
from authlab.wire import PConfirmMsg, PLoginMsg, PReplyMsg


def _server(params, seed=0):
    rng = random.Random(seed)
    return rng, proposed.setup(params, rng)


def _handshake(server, card, ID, PW, rng):
    msg, csess = proposed.login_start(card, ID, PW, rng)
    reply, ssess = proposed.server_respond(server, msg, rng)
    confirm, sk = proposed.client_finish(csess, reply, card.params)
    assert proposed.server_confirm(ssess, confirm, card.params) == sk
    return msg, reply, confirm, sk, csess, ssess


def test_setup_tiny(tiny):
    xs = {proposed.setup(tiny, random.Random(s)).x for s in range(20)}
    assert xs <= set(range(1, 11)) and len(xs) > 1


def test_registration_request_hides_password(p512, rng):
    pw = rng.randbytes(16).hex()
    req, a = proposed.begin_registration("alice", pw, p512, rng)
    data = req.to_bytes()
    assert pw.encode() not in data
    assert len(req.W) == p512.digest_len
    req2, a2 = proposed.begin_registration("alice", pw, p512, rng)
    assert a != a2 and req.W != req2.W


def test_server_register_fresh_and_duplicate(p512, rng):
    _, server = _server(p512)
    req, a = proposed.begin_registration("alice", "pw", p512, rng)
    partial = proposed.server_register(server, req, rng)
    rec = server.records[partial.NID]
    assert rec.N == 0 and rec.ID == "alice" and server.id_index["alice"] == 0
    X = proposed.user_secret("alice", 0, rec.ID_SC, server.x, p512)
    assert xor_digest(partial.B, req.W) == X
    with pytest.raises(Reject) as exc:
        proposed.server_register(server, proposed.begin_registration("alice", "x", p512, rng)[0], rng)
    assert exc.value.reason is RejectReason.DUPLICATE_ID
    assert len(server.records) == 1


def test_finalize_card_fields(p512, rng):
    _, server = _server(p512)
    req, a = proposed.begin_registration("alice", "pw", p512, rng)
    card = proposed.finalize_card(proposed.server_register(server, req, rng), "alice", "pw", a)
    mask = digest([proposed.xor_strings("alice", "pw")], p512)
    assert xor_digest(card.L, mask) == a
    assert card.V == digest(["alice", a, "pw"], p512)
    assert all(len(f) == p512.digest_len for f in (card.B, card.L, card.V))
    assert len(card.NID) == proposed.NID_LEN


def test_card_never_contains_identity(p512):
    rng = random.Random(42)
    _, server = _server(p512)
    for _ in range(50):
        ID = rng.randbytes(8).hex()
        card = proposed.register_user(server, ID, rng.randbytes(8).hex(), rng)
        blob = card.export()
        assert ID.encode() not in blob


def test_card_export_round_trip(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    assert proposed.Card.load(card.export()) == card
    with pytest.raises(WireError):
        proposed.Card.load(b"XXXX" + card.export())
    blob = bytearray(card.export())
    blob[len(proposed.CARD_MAGIC)] = 9
    with pytest.raises(WireError):
        proposed.Card.load(bytes(blob))


def test_completeness_exhaustive_tiny(tiny):
    for ident in ("a", "bob", "carol", "dave"):
        for pw in ("", "1", "pw", "hunter2"):
            rng, server = _server(tiny, hash((ident, pw)) & 0xFFFF)
            card = proposed.register_user(server, ident, pw, rng)
            sk, srv = proposed.run_session(server, card, ident, pw, Channel(), rng)
            assert sk == srv.SK and srv.complete


def test_messages_carry_only_nid(p512, rng):
    _, server = _server(p512)
    ID = "alice-" + rng.randbytes(8).hex()
    card = proposed.register_user(server, ID, "pw", rng)
    ch = Channel()
    ch.eavesdrop = True
    proposed.run_session(server, card, ID, "pw", ch, rng)
    assert len(ch.recorded) == 3
    assert all(ID.encode() not in env.payload for env in ch.recorded)
    assert ch.recorded[0].payload.count(card.NID) == 1


@pytest.mark.parametrize("ID,PW", [("alice", "wrong"), ("mallory", "pw"), ("mallory", "wrong")])
def test_bad_credentials_uniform_and_silent(p512, rng, ID, PW):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    ch = Channel()
    with pytest.raises(Reject) as exc:
        proposed.run_session(server, card, ID, PW, ch, rng)
    assert exc.value.reason is RejectReason.BAD_CREDENTIALS
    assert exc.value.detail == ""
    assert ch.messages_sent() == 0


def test_server_rejects_bad_m1_and_unknown_nid(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    msg, _ = proposed.login_start(card, "alice", "pw", rng)
    bad = PLoginMsg(msg.NID, msg.D, bytes([msg.M1[0] ^ 1]) + msg.M1[1:])
    with pytest.raises(Reject) as exc:
        proposed.server_respond(server, bad, rng)
    assert exc.value.reason is RejectReason.BAD_MAC
    with pytest.raises(Reject) as exc:
        proposed.server_respond(server, PLoginMsg(b"\0" * 16, msg.D, msg.M1), rng)
    assert exc.value.reason is RejectReason.UNKNOWN_NID


def test_client_rejects_tampered_and_replayed_reply(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    _, old_reply, _, _, _, _ = _handshake(server, card, "alice", "pw", rng)
    msg, csess = proposed.login_start(card, "alice", "pw", rng)
    reply, _ = proposed.server_respond(server, msg, rng)
    for fake in (
        old_reply,
        PReplyMsg(mod_mul(reply.D_S, reply.D_S, p512), reply.M2),
        PReplyMsg(reply.D_S, bytes(20)),
    ):
        with pytest.raises(Reject) as exc:
            proposed.client_finish(csess, fake, p512)
        assert exc.value.reason is RejectReason.BAD_MAC
    assert csess.SK is None


def test_server_confirm_rejects_old_and_truncated(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    _, _, old_confirm, _, _, _ = _handshake(server, card, "alice", "pw", rng)
    msg, csess = proposed.login_start(card, "alice", "pw", rng)
    reply, ssess = proposed.server_respond(server, msg, rng)
    confirm, _ = proposed.client_finish(csess, reply, p512)
    for fake in (old_confirm, PConfirmMsg(confirm.M3[:-1])):
        with pytest.raises(Reject) as exc:
            proposed.server_confirm(ssess, fake, p512)
        assert exc.value.reason is RejectReason.BAD_MAC
    assert not ssess.complete
    proposed.server_confirm(ssess, confirm, p512)
    assert ssess.complete


def test_tampered_login_d_detected(p512, rng):
    # a tampered D_i breaks M_1, so mismatched keys never reach M_2
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    msg, _ = proposed.login_start(card, "alice", "pw", rng)
    with pytest.raises(Reject):
        proposed.server_respond(server, PLoginMsg(msg.NID, mod_mul(msg.D, msg.D, p512), msg.M1), rng)


def test_session_freshness(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    a = _handshake(server, card, "alice", "pw", rng)
    b = _handshake(server, card, "alice", "pw", rng)
    assert a[0].D != b[0].D and a[1].D_S != b[1].D_S and a[3] != b[3]
    assert a[4].alpha != b[4].alpha and a[5].beta != b[5].beta


def test_session_key_independence(p512):
    rng, server = _server(p512, 77)
    card = proposed.register_user(server, "alice", "pw", rng)
    keys = [_handshake(server, card, "alice", "pw", rng)[3] for _ in range(1000)]
    assert len(set(keys)) == 1000
    # byte histogram of 20000 bytes should be roughly flat
    hist = Counter(b for k in keys for b in k)
    assert len(hist) == 256
    assert max(hist.values()) < 3 * (20000 / 256)


def test_change_password_local(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "old", rng)
    ch = Channel()
    proposed.change_password(card, "alice", "old", "new")
    assert ch.messages_sent() == 0
    sk, srv = proposed.run_session(server, card, "alice", "new", ch, rng)
    assert sk == srv.SK
    with pytest.raises(Reject):
        proposed.login_start(card, "alice", "old", rng)


def test_change_password_wrong_old_leaves_card(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "old", rng)
    snapshot = card.export()
    with pytest.raises(Reject) as exc:
        proposed.change_password(card, "alice", "nope", "new")
    assert exc.value.reason is RejectReason.BAD_CREDENTIALS
    assert card.export() == snapshot


def test_revoke_and_reissue(p512, rng):
    _, server = _server(p512)
    old = proposed.register_user(server, "alice", "pw", rng)
    req, a = proposed.begin_registration("alice", "pw2", p512, rng)
    new = proposed.finalize_card(proposed.revoke_and_reissue(server, req, rng), "alice", "pw2", a)
    assert server.records[old.NID].status is proposed.Status.REVOKED
    assert server.id_index["alice"] == 1
    assert server.active_record("alice").NID == new.NID
    active = [r for r in server.records.values() if r.ID == "alice" and r.status is proposed.Status.ACTIVE]
    assert len(active) == 1
    with pytest.raises(Reject) as exc:
        proposed.run_session(server, old, "alice", "pw", Channel(), rng)
    assert exc.value.reason is RejectReason.UNKNOWN_NID
    sk, srv = proposed.run_session(server, new, "alice", "pw2", Channel(), rng)
    assert sk == srv.SK


def test_reissue_unknown_id(p512, rng):
    _, server = _server(p512)
    req, _ = proposed.begin_registration("ghost", "pw", p512, rng)
    with pytest.raises(Reject) as exc:
        proposed.revoke_and_reissue(server, req, rng)
    assert exc.value.reason is RejectReason.UNKNOWN_ID


def test_concurrent_registration_single_winner(p512):
    _, server = _server(p512)
    results: list[str] = []

    def worker(i):
        r = random.Random(i)
        req, a = proposed.begin_registration("alice", f"pw{i}", p512, r)
        try:
            proposed.server_register(server, req, r)
            results.append("ok")
        except Reject:
            results.append("dup")

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results.count("ok") == 1 and len(server.records) == 1


def test_m1_depends_on_x(p512, rng):
    _, server = _server(p512)
    card = proposed.register_user(server, "alice", "pw", rng)
    msg, csess = proposed.login_start(card, "alice", "pw", rng)
    assert msg.M1 == digest(["alice", encode_element(msg.D, p512), csess.X], p512)
