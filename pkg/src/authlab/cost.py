"""Per-phase operation counts for both schemes, beside the reference figures."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import jiang, proposed
from .channel import Channel, SimClock
from .crypto import PHASES, GroupParams, OpCounter, gen_group_params

# reference (T_h, T_E, T_M) per phase
REFERENCE: dict[str, dict[str, tuple[int, int, int]]] = {
    "jiang": {
        "registration": (1, 1, 0),
        "login": (2, 3, 1),
        "authentication": (6, 2, 0),
        "password-change": (6, 7, 3),
    },
    "proposed": {
        "registration": (4, 0, 0),
        "login": (4, 1, 0),
        "authentication": (8, 3, 0),
        "password-change": (6, 0, 0),
    },
}

HASH_TOLERANCE = 2

# which digest calls make up each measured T_h
MAPPING: dict[str, dict[str, str]] = {
    "jiang": {
        "registration": "h(ID) to group, digest(PW) as exponent",
        "login": "h(ID) to group, digest(PW), M = h(ID||C||D||W||T)",
        "authentication": "server: h(ID) to group, M check, M_S, SK; user: M_S check, SK",
        "password-change": "full login round trip (9) + h(ID) to group + digest(PW_new), digest(PW)",
    },
    "proposed": {
        "registration": "W = h(PW||a), X = h(ID||N||ID_SC||x), h(ID xor PW), V = h(ID||a||PW)",
        "login": "h(ID xor PW), V check, W, h(ID) to group, M_1",
        "authentication": "server: X, M_1 check, h(ID) to group, SK, M_2; user: SK, M_2 check, M_3; server: M_3 check",
        "password-change": "h(ID xor PW), V check, W, W_new, h(ID xor PW_new), V_new",
    },
}


@dataclass
class CostRow:
    scheme: str
    phase: str
    measured: tuple[int, int, int]
    reference: tuple[int, int, int]

    @property
    def hash_delta(self) -> int:
        return self.measured[0] - self.reference[0]

    @property
    def ok(self) -> bool:
        """Exact T_E and T_M, T_h within tolerance; only binding for the proposed scheme."""
        if self.scheme != "proposed":
            return True
        return (
            self.measured[1:] == self.reference[1:] and abs(self.hash_delta) <= HASH_TOLERANCE
        )


def _triple(counter: OpCounter, phase: str) -> tuple[int, int, int]:
    c = counter.counts[phase]
    return (c.hash, c.exp, c.mul)


def measure_proposed(params: GroupParams, rng: random.Random) -> OpCounter:
    counter = OpCounter()
    server = proposed.setup(params, rng)
    channel = Channel(SimClock())
    with counter.phase("registration"):
        card = proposed.register_user(server, "alice", "pw-one", rng, counter)
    proposed.run_session(server, card, "alice", "pw-one", channel, rng, counter)
    with counter.phase("password-change"):
        proposed.change_password(card, "alice", "pw-one", "pw-two", counter)
    return counter


def measure_jiang(params: GroupParams, rng: random.Random) -> OpCounter:
    counter = OpCounter()
    clock = SimClock()
    server = jiang.setup(params, rng, clock)
    channel = Channel(clock)
    with counter.phase("registration"):
        card = jiang.register(server, jiang.registration_request("alice", "pw-one"), counter)
    jiang.run_session(server, card, "alice", "pw-one", channel, rng, counter)
    with counter.phase("password-change"):
        jiang.change_password(card, "alice", "pw-one", "pw-two", server, channel, rng, counter)
    return counter


def cost_report(params: GroupParams | str = "test-512", seed: int = 0) -> list[CostRow]:
    if isinstance(params, str):
        params = gen_group_params(params)
    rows: list[CostRow] = []
    for scheme, measure in (("jiang", measure_jiang), ("proposed", measure_proposed)):
        counter = measure(params, random.Random(f"{seed}:cost:{scheme}"))
        for phase in PHASES:
            rows.append(CostRow(scheme, phase, _triple(counter, phase), REFERENCE[scheme][phase]))
    return rows


def _fmt(t: tuple[int, int, int]) -> str:
    h, e, m = t
    parts = [f"{h}T_h"]
    if e:
        parts.append(f"{e}T_E")
    if m:
        parts.append(f"{m}T_M")
    return " + ".join(parts)


def render_cost(rows: list[CostRow], machine: bool = False) -> str:
    if machine:
        lines = ["scheme\tphase\tT_h\tT_E\tT_M\tref_T_h\tref_T_E\tref_T_M\tok"]
        for r in rows:
            lines.append(
                "\t".join([r.scheme, r.phase, *map(str, r.measured), *map(str, r.reference), "1" if r.ok else "0"])
            )
        return "\n".join(lines) + "\n"
    lines = [f"{'scheme':<10}{'phase':<17}{'measured':<24}{'reference':<24}status"]
    for r in rows:
        if r.scheme == "proposed":
            status = "ok" if r.ok else "MISMATCH"
            status += f" (T_h {r.hash_delta:+d})"
        else:
            status = "reported only"
        lines.append(f"{r.scheme:<10}{r.phase:<17}{_fmt(r.measured):<24}{_fmt(r.reference):<24}{status}")
    lines.append("")
    lines.append(f"T_h mapping (tolerance +/-{HASH_TOLERANCE} on proposed rows; T_X not counted in totals):")
    for scheme, phases in MAPPING.items():
        for phase, text in phases.items():
            lines.append(f"  {scheme}/{phase}: {text}")
    return "\n".join(lines) + "\n"
