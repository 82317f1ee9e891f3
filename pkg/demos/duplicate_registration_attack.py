"""The duplicate-registration chain against Jiang, then the same moves against the proposed scheme.

An adversary registers the victim's identity with a password of their
own, divides it out of their own card to get h(ID)^x, guesses the victim's
password off-line from a dumped card, and finally logs in as the victim.

    python3 demos/duplicate_registration_attack.py
"""

import random

from authlab.crypto import gen_group_params, hash_to_group, mod_exp
from authlab.harness import attacks
from authlab.harness.report import make_dictionary, random_credential
from authlab.harness.worlds import jiang_world, proposed_world

params = gen_group_params("test-512")
rng = random.Random(7)
words = make_dictionary(random.Random(1), 1000)
victim_pw = words[421]

w = jiang_world(params, rng, victim_pw=victim_pw)
truth = mod_exp(hash_to_group(w.victim_id, params), w.server.x, params)
rep, key = attacks.extract_user_key_jiang(w.victim_id, w.server, rng, truth)
print("jiang    step 1, extract h(ID)^x:  ", rep.outcome.value)
rep = attacks.offline_guess_jiang(w.card, w.victim_id, key, words, victim_pw)
print("jiang    step 2, off-line guess:   ", rep.outcome.value, f"after {rep.probes} guesses, 0 messages")
rep = attacks.impersonate_user_jiang(w.victim_id, key, w.server, w.channel, rng)
print("jiang    step 3, impersonate user: ", rep.outcome.value, "| SK matches server:", rep.evidence.get("sk_match"))

p = proposed_world(params, rng, victim_pw=victim_pw)
rep = attacks.extract_user_key_proposed(p.victim_id, p.server, rng)
print("\nproposed step 1, re-register ID:   ", rep.outcome.value, f"({rep.evidence['reject']})")
ids = [random_credential(rng, 10) for _ in range(8)]
rep = attacks.offline_guess_proposed(p.card, ids, words, (p.victim_id, victim_pw))
print("proposed step 2, joint (ID, PW):   ", rep.outcome.value, f"after {rep.probes} guesses")
rep = attacks.impersonate_user_proposed(p.card, [p.victim_id] + ids, p.server, p.channel, rng)
print("proposed step 3, forge M_1:        ", rep.outcome.value, rep.evidence["rejects"])
