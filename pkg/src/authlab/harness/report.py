from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from ..transcript import Transcript, TranscriptEvent

# 64 symbols: 6 bits per character of a random credential
ALPHABET = string.ascii_letters + string.digits + "._"


class Outcome(str, Enum):
    SUCCEEDED = "succeeded"
    FAILED = "failed"


@dataclass
class AttackReport:
    """Result of one attack or flaw demonstration against one scheme.

    ``SUCCEEDED`` always means the adversary (or the demonstrated flaw) won,
    so the attribute under test does *not* hold for that scheme.  Attack
    code only reports success after checking its evidence against ground
    truth or against a genuine server's acceptance.
    """

    attack: str
    scheme: str
    outcome: Outcome
    evidence: dict[str, Any] = field(default_factory=dict)
    probes: int = 0
    messages: int = 0
    counters: tuple[int, int, int, int] = (0, 0, 0, 0)
    transcript: Transcript = field(default_factory=Transcript, repr=False, compare=False)

    @property
    def succeeded(self) -> bool:
        return self.outcome is Outcome.SUCCEEDED

    def to_dict(self) -> dict[str, Any]:
        return {
            "attack": self.attack,
            "scheme": self.scheme,
            "outcome": self.outcome.value,
            "evidence": self.evidence,
            "probes": self.probes,
            "messages": self.messages,
            "counters": list(self.counters),
        }

    def to_event(self) -> TranscriptEvent:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return TranscriptEvent("report", f"{self.scheme}:{self.attack}", payload, self.counters, 0)


@dataclass
class AdversaryState:
    """Everything the adversary knows, filled only through :meth:`grant`."""

    cards: list[Any] = field(default_factory=list)
    recorded: list[bytes] = field(default_factory=list)
    extracted_keys: dict[str, int] = field(default_factory=dict)
    master_key: int | None = None
    ephemeral: dict[str, int] = field(default_factory=dict)
    dictionary: list[str] = field(default_factory=list)
    id_dictionary: list[str] = field(default_factory=list)
    known: dict[str, Any] = field(default_factory=dict)

    def grant(self, capability: str, value: Any) -> None:
        if capability == "card":
            self.cards.append(value)
        elif capability == "recorded":
            self.recorded.extend(value)
        elif capability == "extracted_key":
            ident, key = value
            self.extracted_keys[ident] = key
        elif capability == "master_key":
            self.master_key = value
        elif capability == "ephemeral":
            self.ephemeral.update(value)
        elif capability == "dictionary":
            self.dictionary = list(value)
        elif capability == "id_dictionary":
            self.id_dictionary = list(value)
        else:
            self.known[capability] = value

    def capabilities(self) -> set[str]:
        caps = {
            name
            for name, held in (
                ("card", self.cards),
                ("recorded", self.recorded),
                ("extracted_key", self.extracted_keys),
                ("master_key", self.master_key is not None),
                ("ephemeral", self.ephemeral),
                ("dictionary", self.dictionary),
                ("id_dictionary", self.id_dictionary),
            )
            if held
        }
        return caps | set(self.known)


def random_credential(rng: random.Random, length: int = 8) -> str:
    return "".join(rng.choice(ALPHABET) for _ in range(length))


def make_dictionary(rng: random.Random, size: int = 1000, length: int = 8) -> list[str]:
    """``size`` distinct random words over the 64-symbol alphabet."""
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < size:
        w = random_credential(rng, length)
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def load_dictionary(path: str | Path) -> list[str]:
    """One word per line; blank lines skipped, order kept, duplicates dropped."""
    out: list[str] = []
    seen: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        w = line.strip()
        if w and w not in seen:
            seen.add(w)
            out.append(w)
    return out
