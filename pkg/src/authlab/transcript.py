"""Append-only event logs and their line-oriented hex text format.

One event per line, tab separated::

    direction  party  payload-hex  counters  tick

``counters`` is ``h,E,M,X`` totals at the time of the event.  A payload of
``-`` stands for the empty byte string.  Lines starting with ``#`` are
comments; the first line is a version header.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

HEADER = "# authlab-transcript v1"


class TranscriptParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class TranscriptEvent:
    direction: str
    party: str
    payload: bytes
    counters: tuple[int, int, int, int] = (0, 0, 0, 0)
    tick: int = 0

    def to_line(self) -> str:
        for name, val in (("direction", self.direction), ("party", self.party)):
            if not val or any(c in val for c in "\t\n\r"):
                raise ValueError(f"{name} must be non-empty and free of tabs/newlines: {val!r}")
        if self.direction.startswith("#"):
            raise ValueError("direction may not start with '#' (comment marker)")
        payload = self.payload.hex() if self.payload else "-"
        counters = ",".join(str(c) for c in self.counters)
        return "\t".join([self.direction, self.party, payload, counters, str(self.tick)])

    @classmethod
    def from_line(cls, line: str, lineno: int = 0) -> TranscriptEvent:
        cols = line.split("\t")
        if len(cols) != 5:
            raise TranscriptParseError(lineno, f"expected 5 tab-separated fields, got {len(cols)}")
        direction, party, payload, counters, tick = cols
        try:
            data = b"" if payload == "-" else bytes.fromhex(payload)
        except ValueError:
            raise TranscriptParseError(lineno, "payload is not valid hex") from None
        try:
            nums = tuple(int(c) for c in counters.split(","))
        except ValueError:
            raise TranscriptParseError(lineno, "counters must be integers") from None
        if len(nums) != 4:
            raise TranscriptParseError(lineno, "counters must have 4 entries")
        try:
            t = int(tick)
        except ValueError:
            raise TranscriptParseError(lineno, "tick must be an integer") from None
        if not direction or not party:
            raise TranscriptParseError(lineno, "empty direction or party")
        return cls(direction, party, data, nums, t)  # type: ignore[arg-type]


@dataclass
class Transcript:
    events: list[TranscriptEvent] = field(default_factory=list)

    def append(self, event: TranscriptEvent) -> None:
        self.events.append(event)

    def extend(self, other: Transcript) -> None:
        self.events.extend(other.events)

    def __iter__(self) -> Iterator[TranscriptEvent]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def to_text(self) -> str:
        return "\n".join([HEADER, *(e.to_line() for e in self.events)]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Transcript:
        # only \n separates events; str.splitlines would also split on \x0c and friends
        lines = text.split("\n")
        if not lines or lines[0] != HEADER:
            raise TranscriptParseError(1, f"missing header {HEADER!r}")
        events = []
        for i, line in enumerate(lines[1:], start=2):
            if not line or line.startswith("#"):
                continue
            events.append(TranscriptEvent.from_line(line, i))
        return cls(events)


def export_transcript(t: Transcript, path: str | Path) -> None:
    Path(path).write_text(t.to_text(), encoding="utf-8")


def import_transcript(path: str | Path) -> Transcript:
    return Transcript.from_text(Path(path).read_text(encoding="utf-8"))
