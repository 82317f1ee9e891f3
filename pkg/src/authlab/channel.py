"""Simulated public channel under full adversary control.

With every hook disabled the channel is a FIFO that delivers payloads
unmodified.  Every send, drop, injection and delivery is logged to the
channel's :class:`~authlab.transcript.Transcript`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .crypto import OpCounter
from .errors import Reject, RejectReason
from .transcript import Transcript, TranscriptEvent


@dataclass
class SimClock:
    """Tick counter shared by all parties, with per-party signed skew."""

    now: int = 0
    skew: dict[str, int] = field(default_factory=dict)

    def time(self, party: str) -> int:
        return self.now + self.skew.get(party, 0)

    def advance(self, ticks: int = 1) -> None:
        if ticks < 0:
            raise ValueError("clock cannot run backwards")
        self.now += ticks


@dataclass(frozen=True)
class Envelope:
    sender: str
    receiver: str
    payload: bytes


Interceptor = Callable[[Envelope], Optional[Envelope]]


class Channel:
    """Dolev-Yao channel: eavesdrop, intercept, inject and replay.

    ``interceptor`` sees each honest envelope before it is queued; it may
    return it unchanged, return a modified envelope, or return ``None`` to
    drop it.
    """

    def __init__(
        self,
        clock: SimClock | None = None,
        counter: OpCounter | None = None,
        latency: int = 1,
    ):
        self.clock = clock or SimClock()
        self.counter = counter
        self.latency = latency
        self.queue: deque[Envelope] = deque()
        self.transcript = Transcript()
        self.eavesdrop = False
        self.recorded: list[Envelope] = []
        self.interceptor: Interceptor | None = None
        self.sent: dict[str, int] = {}

    def _log(self, direction: str, party: str, payload: bytes) -> None:
        counts = self.counter.total().as_tuple() if self.counter else (0, 0, 0, 0)
        self.transcript.append(TranscriptEvent(direction, party, payload, counts, self.clock.now))

    def send(self, sender: str, receiver: str, payload: bytes) -> None:
        env = Envelope(sender, receiver, payload)
        self.sent[sender] = self.sent.get(sender, 0) + 1
        self._log("send", f"{sender}>{receiver}", payload)
        if self.eavesdrop:
            self.recorded.append(env)
        if self.interceptor is not None:
            out = self.interceptor(env)
            if out is None:
                self._log("drop", f"{sender}>{receiver}", payload)
                return
            if out != env:
                self._log("modify", f"{out.sender}>{out.receiver}", out.payload)
            env = out
        self.queue.append(env)

    def inject(self, receiver: str, payload: bytes, sender: str = "adversary") -> None:
        """Queue an adversary-authored message; hooks do not apply."""
        self.sent["adversary"] = self.sent.get("adversary", 0) + 1
        self._log("inject", f"{sender}>{receiver}", payload)
        self.queue.append(Envelope(sender, receiver, payload))

    def replay(self, index: int, receiver: str | None = None) -> None:
        """Re-send the ``index``-th recorded envelope, optionally re-addressed."""
        env = self.recorded[index]
        self.inject(receiver or env.receiver, env.payload, sender=env.sender)

    def receive(self, receiver: str) -> bytes:
        for i, env in enumerate(self.queue):
            if env.receiver == receiver:
                del self.queue[i]
                self.clock.advance(self.latency)
                self._log("deliver", f"{env.sender}>{receiver}", env.payload)
                return env.payload
        raise Reject(RejectReason.NO_RESPONSE, f"nothing queued for {receiver}")

    def messages_sent(self, sender: str | None = None) -> int:
        if sender is None:
            return sum(self.sent.values())
        return self.sent.get(sender, 0)

    def note(self, party: str, text: str) -> None:
        self._log("note", party, text.encode("utf-8"))
