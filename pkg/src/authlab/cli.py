"""Command line: ``authlab {demo,attacks,cost}``.

Exit status is the contract: 0 when everything the command checks holds,
1 on a protocol reject, a matrix divergence or a cost mismatch, 2 on bad
usage or unreadable files.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from typing import Sequence

from . import jiang, proposed
from .channel import Channel, SimClock
from .cost import cost_report, render_cost
from .crypto import GroupParams, gen_group_params
from .errors import Reject
from .harness.matrix import MatrixConfig, attack_matrix
from .harness.report import load_dictionary
from .registry import RegistryError, load_state, save_state
from .transcript import export_transcript

PARAM_LABELS = {"tiny": "test-tiny", "512": "test-512", "1024": "demo-1024"}


@dataclass
class ScenarioConfig:
    security_label: str = "test-512"
    seed: int = 0
    delta_t: int = 2
    dictionary_path: str | None = None
    skew: int | None = None  # attacks: None means delta_t + 1; demo: None means 0
    state_path: str | None = None
    persist_master_key: bool = False
    allow_duplicate_registration: bool = True
    force: bool = False
    machine: bool = False
    transcript_path: str | None = None

    @property
    def params(self) -> GroupParams:
        return gen_group_params(self.security_label)


def _default_seed() -> int:
    raw = os.environ.get("AUTHLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"authlab: AUTHLAB_SEED must be an integer, got {raw!r}")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", choices=sorted(PARAM_LABELS), default="512")
    common.add_argument("--seed", type=int, default=None, help="defaults to $AUTHLAB_SEED, then 0")
    common.add_argument("--delta-t", type=int, default=2, dest="delta_t")
    common.add_argument("--machine", action="store_true", help="tab-separated output")
    common.add_argument("--transcript", metavar="PATH", help="write the message transcript here")

    p = argparse.ArgumentParser(prog="authlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", parents=[common], help="honest register, login, change, login")
    demo.add_argument("--scheme", choices=["jiang", "proposed"], default="proposed")
    demo.add_argument("--skew", type=int, default=0, help="ticks the user's clock lags the server")
    demo.add_argument("--state", metavar="PATH", help="round-trip the proposed server table here")
    demo.add_argument("--persist-master-key", action="store_true")
    demo.add_argument("--force", action="store_true", help="overwrite a damaged state file")
    demo.add_argument("--wrong-change-password", action="store_true", help="typo the old password at change")

    atk = sub.add_parser("attacks", parents=[common], help="security attribute matrix")
    atk.add_argument("--dict", metavar="PATH", help="password dictionary, one word per line")
    atk.add_argument("--skew", type=int, default=None)
    atk.add_argument("--no-duplicate-registration", action="store_true")

    sub.add_parser("cost", parents=[common], help="per-phase operation counts")
    return p


def _config(args: argparse.Namespace) -> ScenarioConfig:
    return ScenarioConfig(
        security_label=PARAM_LABELS[args.params],
        seed=_default_seed() if args.seed is None else args.seed,
        delta_t=args.delta_t,
        dictionary_path=getattr(args, "dict", None),
        skew=getattr(args, "skew", 0),
        state_path=getattr(args, "state", None),
        persist_master_key=getattr(args, "persist_master_key", False),
        allow_duplicate_registration=not getattr(args, "no_duplicate_registration", False),
        force=getattr(args, "force", False),
        machine=args.machine,
        transcript_path=args.transcript,
    )


def cmd_demo(scheme: str, cfg: ScenarioConfig, *, wrong_change_password: bool = False, out=None) -> int:
    out = out or sys.stdout
    params = cfg.params
    rng = random.Random(f"{cfg.seed}:demo:{scheme}")
    clock = SimClock(skew={"user": -cfg.skew} if cfg.skew else {})
    channel = Channel(clock)
    ID, PW, PW_new = "alice", "correct horse", "battery staple"
    old = "correct hose" if wrong_change_password else PW

    def step(name: str, ok: bool = True, detail: str = "") -> bool:
        print(f"{name:<22}{'ok' if ok else 'FAIL'}{'  ' + detail if detail else ''}", file=out)
        return ok

    try:
        if scheme == "jiang":
            server = jiang.setup(params, rng, clock, delta_t=cfg.delta_t)
            card = jiang.register(server, jiang.registration_request(ID, PW))
            step("register")
            sk, srv = jiang.run_session(server, card, ID, PW, channel, rng)
            if not step("login + key agreement", sk == srv.SK, sk.hex()):
                return 1
            jiang.change_password(card, ID, old, PW_new, server, channel, rng)
            step("password change")
            sk, srv = jiang.run_session(server, card, ID, PW_new, channel, rng)
        else:
            server = proposed.setup(params, rng)
            card = proposed.register_user(server, ID, PW, rng)
            step("register")
            if cfg.state_path:
                save_state(server, cfg.state_path, persist_master_key=cfg.persist_master_key, force=cfg.force)
                master = server.x
                server = load_state(cfg.state_path, None if cfg.persist_master_key else master)
                step("state round trip", detail=cfg.state_path)
            sk, srv = proposed.run_session(server, card, ID, PW, channel, rng)
            if not step("login + key agreement", sk == srv.SK, sk.hex()):
                return 1
            proposed.change_password(card, ID, old, PW_new)
            step("password change")
            sk, srv = proposed.run_session(server, card, ID, PW_new, channel, rng)
        if not step("login (new password)", sk == srv.SK, sk.hex()):
            return 1
    except Reject as rej:
        print(f"reject: {rej.reason.value}" + (f" ({rej.detail})" if rej.detail else ""), file=out)
        return 1
    except RegistryError as exc:
        print(f"state error: {exc}", file=out)
        return 2
    finally:
        if cfg.transcript_path:
            export_transcript(channel.transcript, cfg.transcript_path)
    return 0


def cmd_attacks(cfg: ScenarioConfig, out=None) -> int:
    out = out or sys.stdout
    dictionary = None
    if cfg.dictionary_path:
        try:
            dictionary = tuple(load_dictionary(cfg.dictionary_path))
        except OSError as exc:
            print(f"authlab: cannot read dictionary: {exc}", file=sys.stderr)
            return 2
        if not dictionary:
            print("authlab: dictionary is empty", file=sys.stderr)
            return 2
    mcfg = MatrixConfig(
        params=cfg.params,
        seed=cfg.seed,
        delta_t=cfg.delta_t,
        skew=cfg.skew,
        dictionary=dictionary,
        allow_duplicates=cfg.allow_duplicate_registration,
    )
    result = attack_matrix(config=mcfg)
    out.write(result.render(machine=cfg.machine))
    if cfg.transcript_path:
        export_transcript(result.transcript, cfg.transcript_path)
    return 0 if result.matches else 1


def cmd_cost(cfg: ScenarioConfig, out=None) -> int:
    out = out or sys.stdout
    rows = cost_report(cfg.params, cfg.seed)
    out.write(render_cost(rows, machine=cfg.machine))
    return 0 if all(r.ok for r in rows) else 1


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    cfg = _config(args)
    if args.command == "demo":
        return cmd_demo(args.scheme, cfg, wrong_change_password=args.wrong_change_password)
    if args.command == "attacks":
        return cmd_attacks(cfg)
    return cmd_cost(cfg)


if __name__ == "__main__":
    sys.exit(main())
