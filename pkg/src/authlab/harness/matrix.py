"""Security-attribute matrix: every scenario against both schemes.

A cell holds when the scenario's adversary (or flaw demonstration)
failed.  Expected cells are fixed below; :func:`attack_matrix` runs the
scenarios and :attr:`MatrixResult.matches` compares.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .. import jiang, proposed
from ..crypto import GroupParams, gen_group_params, hash_to_group, mod_exp
from ..transcript import Transcript, TranscriptEvent
from ..wire import PReplyMsg
from . import attacks
from .report import AttackReport, make_dictionary, random_credential
from .worlds import JiangWorld, ProposedWorld, jiang_world, proposed_world

SCHEMES = ("jiang", "proposed")
MARKS = {True: "√", False: "×", None: "-"}
MACHINE_MARKS = {True: "v", False: "x", None: "-"}


@dataclass(frozen=True)
class MatrixConfig:
    params: GroupParams
    seed: int = 0
    delta_t: int = 2
    skew: int | None = None
    dictionary: tuple[str, ...] | None = None
    allow_duplicates: bool = True
    id_candidates: int = 4
    fuzz: int = 1000

    @property
    def skew_ticks(self) -> int:
        return self.delta_t + 1 if self.skew is None else self.skew


class _Ctx:
    """Per-cell state: seeded rng, dictionary, and the worlds it created."""

    def __init__(self, cfg: MatrixConfig, row: str, scheme: str):
        self.cfg = cfg
        self.scheme = scheme
        self.rng = random.Random(f"{cfg.seed}:{row}:{scheme}")
        if cfg.dictionary is not None:
            self.dictionary = list(cfg.dictionary)
        else:
            self.dictionary = make_dictionary(random.Random(f"{cfg.seed}:dictionary"), 1000)
        self.rank = self.rng.randrange(len(self.dictionary))
        self.worlds: list[JiangWorld | ProposedWorld] = []

    @property
    def params(self) -> GroupParams:
        return self.cfg.params

    def world(self, victim_pw: str | None = None):
        if self.scheme == "jiang":
            w = jiang_world(
                self.params,
                self.rng,
                victim_pw=victim_pw,
                delta_t=self.cfg.delta_t,
                allow_duplicates=self.cfg.allow_duplicates,
            )
        else:
            w = proposed_world(self.params, self.rng, victim_pw=victim_pw)
        self.worlds.append(w)
        return w

    def dictionary_world(self):
        return self.world(victim_pw=self.dictionary[self.rank])

    def id_dictionary(self, exclude: str) -> list[str]:
        out: list[str] = []
        while len(out) < self.cfg.id_candidates:
            c = random_credential(self.rng, len(exclude))
            if c != exclude and c not in out:
                out.append(c)
        return out


def _recorded_session(w) -> tuple[bytes, list[bytes]]:
    w.channel.eavesdrop = True
    sk, _ = w.session()
    w.channel.eavesdrop = False
    return sk, [env.payload for env in w.channel.recorded]


def _user_key(w: JiangWorld) -> int:
    return mod_exp(hash_to_group(w.victim_id, w.params), w.server.x, w.params)


# -- scenarios, one per attribute ---------------------------------------------------


def _anonymity(ctx: _Ctx) -> AttackReport:
    return attacks.anonymity(ctx.world(), ctx.scheme)


def _insider(ctx: _Ctx) -> AttackReport:
    w = ctx.dictionary_world()
    return attacks.insider(w.registrations[0], ctx.params, w.victim_pw, ctx.dictionary)


def _online(ctx: _Ctx) -> AttackReport:
    w = ctx.dictionary_world()
    if ctx.scheme == "jiang":
        return attacks.online_guess_jiang(
            w.card, w.victim_id, ctx.dictionary, w.server, w.channel, ctx.rng, w.victim_pw
        )
    return attacks.online_guess_proposed(
        w.card,
        ctx.id_dictionary(w.victim_id),
        ctx.dictionary,
        w.server,
        w.channel,
        ctx.rng,
        (w.victim_id, w.victim_pw),
    )


def _offline(ctx: _Ctx) -> AttackReport:
    w = ctx.dictionary_world()
    if ctx.scheme == "jiang":
        extraction, key = attacks.extract_user_key_jiang(w.victim_id, w.server, ctx.rng, _user_key(w))
        rep = attacks.offline_guess_jiang(w.card, w.victim_id, key, ctx.dictionary, w.victim_pw)
    else:
        extraction = attacks.extract_user_key_proposed(w.victim_id, w.server, ctx.rng)
        rep = attacks.offline_guess_proposed(
            w.card, ctx.id_dictionary(w.victim_id), ctx.dictionary, (w.victim_id, w.victim_pw)
        )
    rep.evidence["extraction"] = extraction.outcome.value
    return rep


def _forward_secrecy(ctx: _Ctx) -> AttackReport:
    w = ctx.world()
    sk, recorded = _recorded_session(w)
    if ctx.scheme == "jiang":
        return attacks.forward_secrecy_jiang(_user_key(w), w.victim_id, recorded, ctx.params, sk)
    rec = w.server.active_record(w.victim_id)
    X = proposed.user_secret(rec.ID, rec.N, rec.ID_SC, w.server.x, ctx.params)
    return attacks.forward_secrecy_proposed(X, w.victim_id, recorded, ctx.params, sk)


def _impersonate_user(ctx: _Ctx) -> AttackReport:
    w = ctx.world()
    if ctx.scheme == "jiang":
        extraction, key = attacks.extract_user_key_jiang(w.victim_id, w.server, ctx.rng, _user_key(w))
        rep = attacks.impersonate_user_jiang(w.victim_id, key, w.server, w.channel, ctx.rng)
        rep.evidence["extraction"] = extraction.outcome.value
        return rep
    # even handing the adversary the true identity does not help
    ids = [w.victim_id] + ctx.id_dictionary(w.victim_id)
    return attacks.impersonate_user_proposed(w.card, ids, w.server, w.channel, ctx.rng)


def replay_window_sweep(cfg: MatrixConfig, max_delay: int | None = None) -> dict[int, bool]:
    """Jiang only: is a login replayed ``d`` ticks after interception accepted?"""
    out: dict[int, bool] = {}
    top = cfg.delta_t + 2 if max_delay is None else max_delay
    for d in range(top + 1):
        rng = random.Random(f"{cfg.seed}:replay-sweep:{d}")
        w = jiang_world(cfg.params, rng, delta_t=cfg.delta_t, allow_duplicates=cfg.allow_duplicates)
        msg, _ = jiang.login(w.card, w.victim_id, w.victim_pw, w.clock, rng)
        w.channel.interceptor = lambda env: None
        w.channel.send("user", "server", msg.to_bytes(w.params))
        w.channel.interceptor = None
        rep = attacks.replay_jiang(w, [msg.to_bytes(w.params)], d)
        out[d] = bool(rep.evidence.get("accepted_in_window"))
    return out


def _replay(ctx: _Ctx) -> AttackReport:
    w = ctx.world()
    _, recorded = _recorded_session(w)
    if ctx.scheme == "jiang":
        rep = attacks.replay_jiang(w, recorded, ctx.cfg.delta_t + 1)
        sweep = replay_window_sweep(ctx.cfg)
        rep.evidence["window_accepts"] = [d for d, ok in sweep.items() if ok]
        return rep
    return attacks.replay_proposed(w, recorded)


def _time_sync(ctx: _Ctx) -> AttackReport:
    return attacks.clock_skew(ctx.world(), ctx.scheme, ctx.cfg.skew_ticks)


def _efficient_login(ctx: _Ctx) -> AttackReport:
    w = ctx.world()
    wrong = w.victim_pw
    while wrong == w.victim_pw:
        wrong = random_credential(ctx.rng, len(w.victim_pw))
    return attacks.wasted_roundtrip(w, ctx.scheme, wrong)


def _password_change(ctx: _Ctx) -> AttackReport:
    return attacks.password_change_dependency(ctx.world(), ctx.scheme, random_credential(ctx.rng, 8))


def _sk_verification(ctx: _Ctx) -> AttackReport:
    return attacks.session_key_confirmation(ctx.world(), ctx.scheme)


def _revocation(ctx: _Ctx) -> AttackReport:
    return attacks.card_revocation(ctx.world(), ctx.scheme, random_credential(ctx.rng, 8))


def _pfs(ctx: _Ctx) -> AttackReport:
    w = ctx.world()
    sk, recorded = _recorded_session(w)
    if ctx.scheme == "jiang":
        return attacks.break_pfs_jiang(w.server.x, recorded, ctx.params, sk)
    rec = w.server.active_record(w.victim_id)
    return attacks.break_pfs_proposed(w.server.x, rec, recorded, ctx.params, sk)


def _impersonate_server(ctx: _Ctx) -> AttackReport | None:
    if ctx.scheme == "jiang":
        return None
    w = ctx.world()
    _, recorded = _recorded_session(w)
    reply = next(p for p in recorded if p[0] == PReplyMsg.TAG)
    return attacks.impersonate_server_proposed(w, reply, ctx.rng, fuzz=ctx.cfg.fuzz)


def _ephemeral(ctx: _Ctx) -> AttackReport | None:
    if ctx.scheme == "jiang":
        return None
    w = ctx.world()
    params, channel = ctx.params, w.channel
    channel.eavesdrop = True
    msg, csess = proposed.login_start(w.card, w.victim_id, w.victim_pw, ctx.rng)
    channel.send("user", "server", msg.to_bytes(params))
    ssess = proposed.serve_login(w.server, channel, ctx.rng)
    confirm, sk = proposed.client_finish(csess, PReplyMsg.from_bytes(channel.receive("user"), params), params)
    channel.send("user", "server", confirm.to_bytes())
    proposed.serve_confirm(ssess, channel, params)
    recorded = [env.payload for env in channel.recorded]
    leaked = {"alpha": csess.alpha, "beta": ssess.beta}
    return attacks.ephemeral_leak(leaked, recorded, params, ctx.id_dictionary(w.victim_id), sk)


Scenario = Callable[[_Ctx], "AttackReport | None"]


@dataclass(frozen=True)
class RowSpec:
    attribute: str
    expected_jiang: bool | None
    expected_proposed: bool | None
    core: bool
    scenario: Scenario


ROWS: tuple[RowSpec, ...] = (
    RowSpec("User anonymity", False, True, True, _anonymity),
    RowSpec("Insider attack", False, True, True, _insider),
    RowSpec("On-line password guessing attack", False, True, True, _online),
    RowSpec("Off-line password guessing attack", False, True, True, _offline),
    # long-term user secret leaks; the master key case is its own row below
    RowSpec("Forward secrecy", True, True, True, _forward_secrecy),
    RowSpec("User impersonation attack", False, True, True, _impersonate_user),
    RowSpec("Replay attack", True, True, True, _replay),
    RowSpec("Time synchronization problem", False, True, True, _time_sync),
    RowSpec("Efficient login phase", False, True, True, _efficient_login),
    RowSpec("User-friendly password change phase", False, True, True, _password_change),
    RowSpec("Session key verification", False, True, True, _sk_verification),
    RowSpec("Smart card revocation", False, True, True, _revocation),
    RowSpec("Perfect forward secrecy (master key)", False, True, False, _pfs),
    RowSpec("Server impersonation attack", None, True, False, _impersonate_server),
    RowSpec("Known session-specific temporary information", None, True, False, _ephemeral),
)


@dataclass
class MatrixRow:
    spec: RowSpec
    reports: dict[str, AttackReport | None]

    def observed(self, scheme: str) -> bool | None:
        rep = self.reports[scheme]
        return None if rep is None else not rep.succeeded

    def expected(self, scheme: str) -> bool | None:
        return self.spec.expected_jiang if scheme == "jiang" else self.spec.expected_proposed

    @property
    def matches(self) -> bool:
        return all(self.observed(s) == self.expected(s) for s in SCHEMES)


@dataclass
class MatrixResult:
    rows: list[MatrixRow]
    transcript: Transcript = field(default_factory=Transcript)

    @property
    def matches(self) -> bool:
        return all(r.matches for r in self.rows)

    def divergences(self) -> list[str]:
        return [r.spec.attribute for r in self.rows if not r.matches]

    def cell(self, attribute: str, scheme: str) -> bool | None:
        for r in self.rows:
            if r.spec.attribute == attribute:
                return r.observed(scheme)
        raise KeyError(attribute)

    def render(self, machine: bool = False) -> str:
        if machine:
            lines = ["attribute\tjiang\tproposed\texpected_jiang\texpected_proposed\tcore\tmatch"]
            m = MACHINE_MARKS
            for r in self.rows:
                lines.append(
                    "\t".join(
                        [
                            r.spec.attribute,
                            m[r.observed("jiang")],
                            m[r.observed("proposed")],
                            m[r.expected("jiang")],
                            m[r.expected("proposed")],
                            "1" if r.spec.core else "0",
                            "1" if r.matches else "0",
                        ]
                    )
                )
            return "\n".join(lines) + "\n"
        width = max(len(r.spec.attribute) for r in self.rows) + 2
        lines = [f"{'Security attribute':<{width}}{'Jiang':<8}Proposed"]
        lines.append("-" * (width + 18))
        for i, r in enumerate(self.rows):
            if i and r.spec.core != self.rows[i - 1].spec.core:
                lines.append("-" * (width + 18))
            flag = "" if r.matches else "  DIVERGES"
            lines.append(
                f"{r.spec.attribute:<{width}}{MARKS[r.observed('jiang')]:<8}"
                f"{MARKS[r.observed('proposed')]:<10}".rstrip()
                + flag
            )
        verdict = "matrix matches expected columns" if self.matches else "divergence: " + ", ".join(self.divergences())
        lines.append("")
        lines.append(verdict)
        return "\n".join(lines) + "\n"


def attack_matrix(
    seed: int = 0,
    params: GroupParams | str = "test-512",
    *,
    config: MatrixConfig | None = None,
    rows: Sequence[RowSpec] = ROWS,
) -> MatrixResult:
    if config is None:
        if isinstance(params, str):
            params = gen_group_params(params)
        config = MatrixConfig(params=params, seed=seed)
    result = MatrixResult([])
    for spec in rows:
        reports: dict[str, AttackReport | None] = {}
        for scheme in SCHEMES:
            ctx = _Ctx(config, spec.attribute, scheme)
            rep = spec.scenario(ctx)
            reports[scheme] = rep
            result.transcript.append(
                TranscriptEvent("note", f"{scheme}:{spec.attribute}", b"begin scenario")
            )
            for w in ctx.worlds:
                result.transcript.extend(w.channel.transcript)
            if rep is not None:
                result.transcript.append(rep.to_event())
        result.rows.append(MatrixRow(spec, reports))
    return result
