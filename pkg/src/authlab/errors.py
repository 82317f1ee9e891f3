from __future__ import annotations

from enum import Enum


class RejectReason(str, Enum):
    UNKNOWN_ID = "unknown-id"
    STALE_TIMESTAMP = "stale-timestamp"
    BAD_MAC = "bad-mac"
    DUPLICATE_ID = "duplicate-id"
    UNKNOWN_NID = "unknown-nid"
    BAD_CREDENTIALS = "bad-credentials"
    LOCKED_OUT = "locked-out"
    MALFORMED = "malformed"
    NO_RESPONSE = "no-response"


class Reject(Exception):
    """A protocol party refused to continue.

    The reasons are deliberately distinguishable so attacks can be
    instrumented; a deployed server would not reveal them.
    """

    def __init__(self, reason: RejectReason, detail: str = ""):
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)
        self.reason = reason
        self.detail = detail


class WireError(ValueError):
    """Bytes that do not parse as a protocol message."""
