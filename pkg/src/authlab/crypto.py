"""Group arithmetic, hashing and randomness shared by both schemes.

Group elements are plain ``int`` values in ``[1, p-1]`` and digests are
``bytes`` of ``params.digest_len``.  Every operation that the cost model
tallies accepts an optional :class:`OpCounter`.
"""

from __future__ import annotations

import hashlib
import random
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Sequence

SECURITY_LABELS = ("test-tiny", "test-512", "demo-1024")
PHASES = ("registration", "login", "authentication", "password-change")

# Oakley group 2 (RFC 2409): 1024-bit safe prime.
_OAKLEY_1024 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE65381"
    "FFFFFFFFFFFFFFFF",
    16,
)
_SEED_512 = 2024
_TINY_DIGEST_LEN = 8  # truncated SHA-1: insecure, test-only
_DIGEST_LEN = 20

_SMALL_PRIMES = [n for n in range(3, 2000) if all(n % d for d in range(2, int(n**0.5) + 1))]


class DomainError(ValueError):
    """An argument lies outside the domain of a group operation."""


class ParamGenerationError(RuntimeError):
    def __init__(self, label: str, attempts: int):
        super().__init__(f"no safe prime found for {label} after {attempts} candidates")
        self.label = label
        self.attempts = attempts


@dataclass(frozen=True)
class GroupParams:
    """A safe-prime group ``p = 2q + 1`` plus the digest length in use."""

    p: int
    q: int
    digest_len: int
    label: str

    @property
    def element_len(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_len(self) -> int:
        return (self.q.bit_length() + 7) // 8


@dataclass
class OpCounts:
    hash: int = 0
    exp: int = 0
    mul: int = 0
    xor: int = 0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.hash, self.exp, self.mul, self.xor)


@dataclass
class OpCounter:
    """Per-phase tally of T_h, T_E, T_M and T_X operations.

    Operations executed outside any :meth:`phase` block are tallied under
    ``"unattributed"``.
    """

    counts: dict[str, OpCounts] = field(
        default_factory=lambda: {ph: OpCounts() for ph in (*PHASES, "unattributed")}
    )
    active: str = "unattributed"

    @contextmanager
    def phase(self, name: str) -> Iterator[OpCounts]:
        if name not in self.counts:
            raise KeyError(f"unknown phase {name!r}")
        previous, self.active = self.active, name
        try:
            yield self.counts[name]
        finally:
            self.active = previous

    def add(self, kind: str, n: int = 1) -> None:
        bucket = self.counts[self.active]
        setattr(bucket, kind, getattr(bucket, kind) + n)

    def reset(self, name: str | None = None) -> None:
        for ph in [name] if name else list(self.counts):
            self.counts[ph] = OpCounts()

    def total(self) -> OpCounts:
        out = OpCounts()
        for c in self.counts.values():
            out.hash += c.hash
            out.exp += c.exp
            out.mul += c.mul
            out.xor += c.xor
        return out


def _tick(counter: OpCounter | None, kind: str) -> None:
    if counter is not None:
        counter.add(kind)


# -- primality and parameter generation ------------------------------------


def is_probable_prime(n: int, rounds: int = 32, rng: random.Random | None = None) -> bool:
    """Miller-Rabin; 32 random bases bound the error by 4**-32 = 2**-64."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    rng = rng or random.Random(n)
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def find_safe_prime(
    bits: int, rng: random.Random, timeout: float | None = None, label: str = ""
) -> tuple[int, int]:
    """Search for ``p = 2q + 1`` with ``p`` of exactly ``bits`` bits."""
    if bits < 4:
        raise ValueError("bits must be >= 4")
    start = time.monotonic()
    attempts = 0
    while True:
        attempts += 1
        if timeout is not None and time.monotonic() - start > timeout:
            raise ParamGenerationError(label or f"{bits}-bit", attempts)
        q = rng.getrandbits(bits - 1) | (1 << (bits - 2)) | 1
        p = 2 * q + 1
        if any(q % sp == 0 or p % sp == 0 for sp in _SMALL_PRIMES if sp < q):
            continue
        # cheap Fermat filters before the full test
        if pow(2, q - 1, q) != 1 or pow(2, p - 1, p) != 1:
            continue
        if is_probable_prime(q) and is_probable_prime(p):
            return p, q


_CACHE: dict[str, GroupParams] = {}


def gen_group_params(
    label: str, *, rng: random.Random | None = None, timeout: float | None = None
) -> GroupParams:
    """Return group parameters for one of :data:`SECURITY_LABELS`.

    Without ``rng`` the result is fixed per label: (23, 11) for test-tiny,
    a safe prime found from a fixed seed for test-512, and the RFC 2409
    group-2 prime for demo-1024.  Passing ``rng`` forces a fresh search
    (except for test-tiny), bounded by ``timeout`` seconds.
    """
    if label not in SECURITY_LABELS:
        raise ValueError(f"unknown security label {label!r}; expected one of {SECURITY_LABELS}")
    if label == "test-tiny":
        return GroupParams(p=23, q=11, digest_len=_TINY_DIGEST_LEN, label=label)
    bits = 512 if label == "test-512" else 1024
    if rng is not None:
        p, q = find_safe_prime(bits, rng, timeout, label)
        return GroupParams(p=p, q=q, digest_len=_DIGEST_LEN, label=label)
    if label not in _CACHE:
        if label == "demo-1024":
            p = _OAKLEY_1024
            q = (p - 1) // 2
        else:
            p, q = find_safe_prime(bits, random.Random(_SEED_512), timeout, label)
        _CACHE[label] = GroupParams(p=p, q=q, digest_len=_DIGEST_LEN, label=label)
    return _CACHE[label]


# -- encodings ---------------------------------------------------------------


def encode_element(value: int, params: GroupParams) -> bytes:
    """Canonical fixed-width big-endian encoding (width = byte length of p)."""
    return value.to_bytes(params.element_len, "big")


def decode_element(data: bytes, params: GroupParams) -> int:
    if len(data) != params.element_len:
        raise DomainError(f"element must be {params.element_len} bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if not 1 <= value <= params.p - 1:
        raise DomainError("element outside [1, p-1]")
    return value


def encode_scalar(value: int, params: GroupParams) -> bytes:
    return value.to_bytes(params.scalar_len, "big")


def encode_uint(value: int, width: int = 8) -> bytes:
    return value.to_bytes(width, "big")


def encode_tick(t: int) -> bytes:
    return t.to_bytes(8, "big", signed=True)


def to_bytes(s: str | bytes) -> bytes:
    return s.encode("utf-8") if isinstance(s, str) else s


# -- group operations --------------------------------------------------------


def _check_element(value: int, params: GroupParams, what: str) -> None:
    if value % params.p == 0:
        raise DomainError(f"{what} is 0 mod p")
    if not 1 <= value <= params.p - 1:
        raise DomainError(f"{what} outside [1, p-1]")


def mod_exp(base: int, e: int, params: GroupParams, counter: OpCounter | None = None) -> int:
    _check_element(base, params, "base")
    if e < 0:
        raise DomainError("negative exponent")
    _tick(counter, "exp")
    return pow(base, e, params.p)


def mod_mul(a: int, b: int, params: GroupParams, counter: OpCounter | None = None) -> int:
    _check_element(a, params, "a")
    _check_element(b, params, "b")
    _tick(counter, "mul")
    return a * b % params.p


def mod_div(a: int, b: int, params: GroupParams, counter: OpCounter | None = None) -> int:
    _check_element(a, params, "a")
    _check_element(b, params, "divisor")
    _tick(counter, "mul")
    return a * pow(b, -1, params.p) % params.p


# -- hashing -----------------------------------------------------------------


def _frame(parts: Sequence[bytes]) -> bytes:
    return b"".join(len(part).to_bytes(4, "big") + part for part in parts)


def digest(
    parts: Sequence[str | bytes], params: GroupParams, counter: OpCounter | None = None
) -> bytes:
    """SHA-1 over length-prefixed parts, truncated to ``params.digest_len``."""
    _tick(counter, "hash")
    return hashlib.sha1(_frame([to_bytes(p) for p in parts])).digest()[: params.digest_len]


def hash_to_group(
    data: str | bytes, params: GroupParams, counter: OpCounter | None = None
) -> int:
    """Map ``data`` into the order-q subgroup of quadratic residues.

    Counts as a single hash: the squaring and the (rare) rehash are part of
    the construction.
    """
    _tick(counter, "hash")
    raw = to_bytes(data)
    suffix = b""
    for ctr in range(256):
        h = hashlib.sha1(_frame([raw + suffix])).digest()[: params.digest_len]
        g = pow(int.from_bytes(h, "big") % params.p, 2, params.p)
        if g not in (0, 1):
            return g
        suffix = bytes([ctr])
    raise DomainError("hash_to_group failed to leave {0, 1}")  # pragma: no cover


def password_scalar(pw: str | bytes, params: GroupParams, counter: OpCounter | None = None) -> int:
    """Digest-then-reduce-mod-q mapping used by the Jiang scheme's ``x + PW``."""
    return int.from_bytes(digest([pw], params, counter), "big") % params.q


def xor_digest(a: bytes, b: bytes, counter: OpCounter | None = None) -> bytes:
    if len(a) != len(b):
        raise DomainError(f"xor length mismatch: {len(a)} != {len(b)}")
    _tick(counter, "xor")
    return bytes(x ^ y for x, y in zip(a, b))


def xor_strings(a: str | bytes, b: str | bytes) -> bytes:
    """XOR two variable-length strings after framing both to one width.

    Each operand is length-prefixed and zero-padded to the longer framed
    length, so the result is defined for any pair of inputs.
    """
    fa = _frame([to_bytes(a)])
    fb = _frame([to_bytes(b)])
    width = max(len(fa), len(fb))
    fa, fb = fa.ljust(width, b"\0"), fb.ljust(width, b"\0")
    return bytes(x ^ y for x, y in zip(fa, fb))


def sample_exponent(params: GroupParams, rng: random.Random) -> int:
    """Uniform scalar in ``[1, q-1]``."""
    return rng.randrange(1, params.q)
