"""Walk both schemes through register, login, password change and login again.

    python3 demos/honest_sessions.py [tiny|512|1024]
"""

import random
import sys

from authlab import jiang, proposed
from authlab.channel import Channel, SimClock
from authlab.crypto import OpCounter, gen_group_params

label = {"tiny": "test-tiny", "512": "test-512", "1024": "demo-1024"}[sys.argv[1] if len(sys.argv) > 1 else "512"]
params = gen_group_params(label)
rng = random.Random(2024)
print(f"group {label}: p has {params.p.bit_length()} bits\n")

# Jiang: every step talks to the server, including the password change
clock = SimClock()
ch = Channel(clock)
ch.eavesdrop = True
server = jiang.setup(params, rng, clock)
card = jiang.register(server, jiang.registration_request("alice", "tr0ub4dor"))
sk, srv = jiang.run_session(server, card, "alice", "tr0ub4dor", ch, rng)
print("jiang    SK user == SK server:", sk == srv.SK)
jiang.change_password(card, "alice", "tr0ub4dor", "correct-horse", server, ch, rng)
sk, srv = jiang.run_session(server, card, "alice", "correct-horse", ch, rng)
print("jiang    after change:", sk == srv.SK, f"({ch.messages_sent()} messages so far)")
print("jiang    login message names the user:", b"alice" in ch.recorded[0].payload)

# proposed: the card checks the password itself and the change is local
counter = OpCounter()
ch = Channel()
ch.eavesdrop = True
server = proposed.setup(params, rng)
with counter.phase("registration"):
    card = proposed.register_user(server, "alice", "tr0ub4dor", rng, counter)
sk, srv = proposed.run_session(server, card, "alice", "tr0ub4dor", ch, rng, counter)
print("\nproposed SK user == SK server:", sk == srv.SK, "| server saw M_3:", srv.complete)
sent = ch.messages_sent()
with counter.phase("password-change"):
    proposed.change_password(card, "alice", "tr0ub4dor", "correct-horse", counter)
print("proposed messages during password change:", ch.messages_sent() - sent)
sk, srv = proposed.run_session(server, card, "alice", "correct-horse", ch, rng)
print("proposed after change:", sk == srv.SK)
print("proposed any message names the user:", any(b"alice" in e.payload for e in ch.recorded))

print("\nproposed operation counts (T_h, T_E, T_M, T_X):")
for phase, c in counter.counts.items():
    if phase != "unattributed":
        print(f"  {phase:<16}{c.as_tuple()}")
