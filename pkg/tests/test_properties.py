import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from authlab import jiang, proposed
from authlab.channel import Channel, SimClock
from authlab.crypto import (
    digest,
    gen_group_params,
    hash_to_group,
    mod_div,
    mod_exp,
    mod_mul,
    xor_digest,
    xor_strings,
)
from authlab.errors import Reject, RejectReason
from authlab.registry import dump_state, parse_state
from authlab.transcript import Transcript, TranscriptEvent
from authlab.wire import JLoginMsg, PLoginMsg, decode

P512 = gen_group_params("test-512")
TINY = gen_group_params("test-tiny")

texts = st.text(min_size=0, max_size=24)
blobs = st.binary(max_size=40)
fast = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@given(st.lists(blobs, max_size=4), st.lists(blobs, max_size=4))
def test_digest_framing_injective(a, b):
    if a != b:
        assert digest(a, P512) != digest(b, P512)


@given(st.integers(1, P512.p - 1), st.integers(1, P512.p - 1))
def test_div_inverts_mul(a, b):
    assert mod_div(mod_mul(a, b, P512), b, P512) == a


@fast
@given(blobs, st.integers(1, P512.q - 1), st.integers(1, P512.q - 1))
def test_dh_symmetry(data, a, b):
    g = hash_to_group(data, P512)
    assert mod_exp(mod_exp(g, a, P512), b, P512) == mod_exp(mod_exp(g, b, P512), a, P512)
    assert mod_exp(g, P512.q, P512) == 1


@given(st.binary(min_size=20, max_size=20), st.binary(min_size=20, max_size=20))
def test_xor_involution(a, b):
    assert xor_digest(xor_digest(a, b), b) == a


@given(texts, texts, texts)
def test_xor_strings_injective_in_second(a, b, c):
    if b != c:
        assert xor_strings(a, b) != xor_strings(a, c)


@given(texts, st.integers(1, P512.p - 1), st.binary(min_size=20, max_size=20), st.integers(-(2**63), 2**63 - 1))
def test_wire_round_trip(ident, d, m, t):
    msg = JLoginMsg(ident, d, m, t)
    assert decode(msg.to_bytes(P512), P512) == msg
    pmsg = PLoginMsg(m[:16], d, m)
    assert decode(pmsg.to_bytes(P512), P512) == pmsg


names = st.text(alphabet=st.characters(blacklist_characters="\t\n\r", blacklist_categories=("Cs",)), min_size=1, max_size=12)


@given(
    st.lists(
        st.builds(
            TranscriptEvent,
            names.filter(lambda n: not n.startswith("#")),
            names,
            blobs,
            st.tuples(*[st.integers(0, 10**6)] * 4),
            st.integers(-(10**9), 10**9),
        ),
        max_size=8,
    )
)
def test_transcript_round_trip(events):
    t = Transcript(events)
    assert Transcript.from_text(t.to_text()) == t


@fast
@given(texts, texts, st.integers(0, 2**32))
def test_completeness_tiny(ident, pw, seed):
    rng = random.Random(seed)
    ps = proposed.setup(TINY, rng)
    card = proposed.register_user(ps, ident, pw, rng)
    sk, srv = proposed.run_session(ps, card, ident, pw, Channel(), rng)
    assert sk == srv.SK
    clock = SimClock()
    js = jiang.setup(TINY, rng, clock)
    jcard = jiang.register(js, jiang.registration_request(ident, pw))
    sk, srv = jiang.run_session(js, jcard, ident, pw, Channel(clock), rng)
    assert sk == srv.SK


@fast
@given(st.binary(min_size=8, max_size=16), texts, texts, st.integers(0, 2**32))
def test_wrong_credentials_never_leave_the_card(ident_raw, pw, guess, seed):
    ident = ident_raw.hex()
    rng = random.Random(seed)
    server = proposed.setup(P512, rng)
    card = proposed.register_user(server, ident, pw, rng)
    assert ident.encode() not in card.export()
    ch = Channel()
    if guess == pw:
        return
    try:
        proposed.run_session(server, card, ident, guess, ch, rng)
    except Reject as rej:
        assert rej.reason is RejectReason.BAD_CREDENTIALS
    else:
        raise AssertionError("wrong password accepted")
    assert ch.messages_sent() == 0


@fast
@given(st.lists(st.text(min_size=1, max_size=10), unique=True, max_size=12), st.integers(0, 2**32))
def test_registry_round_trip(idents, seed):
    rng = random.Random(seed)
    server = proposed.setup(P512, rng)
    for ident in idents:
        proposed.register_user(server, ident, "pw", rng)
    data = dump_state(server, persist_master_key=True)
    back = parse_state(data)
    assert back.records == server.records and back.id_index == server.id_index
    assert dump_state(back, persist_master_key=True) == data
