"""Ready-made simulated deployments: one server, one victim, one channel."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .. import jiang, proposed
from ..channel import Channel, SimClock
from ..crypto import GroupParams, OpCounter
from .report import random_credential


@dataclass
class JiangWorld:
    params: GroupParams
    rng: random.Random
    clock: SimClock
    channel: Channel
    server: jiang.JiangServer
    victim_id: str
    victim_pw: str
    card: jiang.JiangCard
    registrations: list[bytes] = field(default_factory=list)

    def session(self, counter: OpCounter | None = None):
        return jiang.run_session(
            self.server, self.card, self.victim_id, self.victim_pw, self.channel, self.rng, counter
        )


@dataclass
class ProposedWorld:
    params: GroupParams
    rng: random.Random
    clock: SimClock
    channel: Channel
    server: proposed.ProposedServer
    victim_id: str
    victim_pw: str
    card: proposed.Card
    registrations: list[bytes] = field(default_factory=list)

    def session(self, counter: OpCounter | None = None):
        return proposed.run_session(
            self.server, self.card, self.victim_id, self.victim_pw, self.channel, self.rng, counter
        )


def jiang_world(
    params: GroupParams,
    rng: random.Random,
    *,
    victim_id: str | None = None,
    victim_pw: str | None = None,
    delta_t: int = 2,
    allow_duplicates: bool = True,
) -> JiangWorld:
    clock = SimClock()
    server = jiang.setup(params, rng, clock, delta_t=delta_t, allow_duplicates=allow_duplicates)
    victim_id = victim_id or random_credential(rng, 10)
    victim_pw = victim_pw or random_credential(rng, 8)
    req = jiang.registration_request(victim_id, victim_pw)
    card = jiang.register(server, req)
    return JiangWorld(
        params, rng, clock, Channel(clock), server, victim_id, victim_pw, card, [req.to_bytes()]
    )


def proposed_world(
    params: GroupParams,
    rng: random.Random,
    *,
    victim_id: str | None = None,
    victim_pw: str | None = None,
) -> ProposedWorld:
    clock = SimClock()
    server = proposed.setup(params, rng)
    victim_id = victim_id or random_credential(rng, 10)
    victim_pw = victim_pw or random_credential(rng, 8)
    regs: list[bytes] = []
    card = proposed.register_user(server, victim_id, victim_pw, rng, transcript=regs)
    return ProposedWorld(params, rng, clock, Channel(clock), server, victim_id, victim_pw, card, regs)
