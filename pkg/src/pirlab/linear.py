"""Single-round linear scheme on 4-bit blocks, a replicated baseline, and
the two-copy symmetrization combinator.

The linear scheme downloads three bits from each database per block. Which
three is set by a fair pattern coin and the desired index; either database
sees one of two equally likely selections no matter which message is wanted.
All sums are XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .capacity import PirParameters
from .descriptor import Message, SchemeDescriptor, SessionRecord

PATTERNS = (1, 2)
# DB2's two possible answer selections, named by content, not by pattern:
# t1 = (a4, b2, a3+b1), t2 = (a2, b4, a1+b3).
TRIPLE_1 = "t1"
TRIPLE_2 = "t2"

BLOCK = 4


def _check_block(name: str, bits) -> tuple[int, ...]:
    bits = tuple(bits)
    if len(bits) != BLOCK or any(b not in (0, 1) for b in bits):
        raise ValueError(f"{name} must be a {BLOCK}-bit tuple")
    return bits


@dataclass(frozen=True)
class LinearMessages:
    """One native block: two messages of four bits each."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", _check_block("a", self.a))
        object.__setattr__(self, "b", _check_block("b", self.b))


@dataclass(frozen=True)
class PatternChoice:
    """User randomness: one of the two download patterns, fair."""

    pattern: int

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError("pattern must be 1 or 2")


@dataclass(frozen=True)
class StoredLinear:
    s1: tuple[int, ...]
    s2: tuple[int, ...]


def linear_store(m: LinearMessages) -> StoredLinear:
    """Six stored bits per database."""
    a, b = m.a, m.b
    s1 = (a[0], a[2], b[0], b[2], a[1] ^ b[1], a[3] ^ b[3])
    s2 = (a[1], a[3], b[1], b[3], a[2] ^ b[0], a[0] ^ b[2])
    return StoredLinear(s1, s2)


def db1_selector(pattern: int) -> int:
    return pattern


def db2_selector(pattern: int, theta: int) -> str:
    return TRIPLE_1 if pattern == theta else TRIPLE_2


def db1_answer(pattern: int, s1: tuple[int, ...]) -> tuple[int, ...]:
    if pattern == 1:
        return (s1[0], s1[2], s1[4])  # a1, b1, a2+b2
    return (s1[1], s1[3], s1[5])  # a3, b3, a4+b4


def db2_answer(selector: str, s2: tuple[int, ...]) -> tuple[int, ...]:
    if selector == TRIPLE_1:
        return (s2[1], s2[2], s2[4])  # a4, b2, a3+b1
    return (s2[0], s2[3], s2[5])  # a2, b4, a1+b3


def linear_decode(
    theta: int, pattern: int, d1: tuple[int, ...], d2: tuple[int, ...]
) -> tuple[int, ...]:
    """XOR-cancel the interference to rebuild the desired 4-bit message."""
    if pattern == 1 and theta == 1:
        return (d1[0], d1[2] ^ d2[1], d2[2] ^ d1[1], d2[0])
    if pattern == 1 and theta == 2:
        return (d1[1], d1[2] ^ d2[0], d2[2] ^ d1[0], d2[1])
    if pattern == 2 and theta == 1:
        return (d2[2] ^ d1[1], d2[0], d1[0], d1[2] ^ d2[1])
    return (d2[2] ^ d1[0], d2[1], d1[1], d1[2] ^ d2[0])


def linear_retrieve(
    theta: int, choice: PatternChoice, m: LinearMessages
) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], tuple[int, ...]]:
    """Run one block retrieval; returns ((db1 bits, db2 bits), decoded)."""
    if theta not in (1, 2):
        raise ValueError("theta must be 1 or 2")
    stored = linear_store(m)
    d1 = db1_answer(choice.pattern, stored.s1)
    d2 = db2_answer(db2_selector(choice.pattern, theta), stored.s2)
    return (d1, d2), linear_decode(theta, choice.pattern, d1, d2)


def linear_retrieve_long(
    theta: int, w1: tuple[int, ...], w2: tuple[int, ...], coins: tuple[int, ...]
) -> tuple[int, tuple[int, ...]]:
    """Blockwise extension: independent 4-bit blocks, one pattern coin each.

    Returns (download bits, decoded message). Rate, zero error and privacy
    carry over from the native block by the product construction.
    """
    if len(w1) != len(w2) or len(w1) % BLOCK != 0:
        raise ValueError(f"message length must be a positive multiple of {BLOCK}")
    blocks = len(w1) // BLOCK
    if len(coins) != blocks:
        raise ValueError("one pattern coin is needed per block")
    decoded: list[int] = []
    download = 0
    for i in range(blocks):
        lo, hi = BLOCK * i, BLOCK * (i + 1)
        (d1, d2), out = linear_retrieve(
            theta, PatternChoice(coins[i]), LinearMessages(w1[lo:hi], w2[lo:hi])
        )
        download += len(d1) + len(d2)
        decoded.extend(out)
    return download, tuple(decoded)


def replicated_store(m: LinearMessages) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Replication baseline: both databases hold every message bit."""
    full = m.a + m.b
    return (full, full)


def gf2_rank(rows: list[int]) -> int:
    """Rank of bitmask rows over GF(2)."""
    rank = 0
    basis: list[int] = []
    for row in rows:
        for pivot in basis:
            row = min(row, row ^ pivot)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


# Stored functionals as bitmasks over (a1..a4, b1..b4); bit i = a_{i+1}, bit 4+i = b_{i+1}.
_S1_MASKS = [0b00000001, 0b00000100, 0b00010000, 0b01000000, 0b00100010, 0b10001000]
_S2_MASKS = [0b00000010, 0b00001000, 0b00100000, 0b10000000, 0b00010100, 0b01000001]


def linear_storage_entropy_bits() -> tuple[float, float]:
    """H(S_n) per block under uniform messages, via GF(2) rank."""
    return float(gf2_rank(list(_S1_MASKS))), float(gf2_rank(list(_S2_MASKS)))


def _uniform_message_space():
    weight = Fraction(1, 256)
    for bits in product((0, 1), repeat=8):
        yield (bits[:4], bits[4:]), weight


def linear_descriptor() -> SchemeDescriptor:
    def randomness_space():
        yield 1, Fraction(1, 2)
        yield 2, Fraction(1, 2)

    def store(msg):
        stored = linear_store(LinearMessages(*msg))
        return (stored.s1, stored.s2)

    def run(msg, theta, pattern):
        (d1, d2), decoded = linear_retrieve(theta, PatternChoice(pattern), LinearMessages(*msg))
        return SessionRecord(
            queries=((db1_selector(pattern),), (db2_selector(pattern, theta),)),
            answers=(d1, d2),
            decoded=decoded,
            download_bits=6,
        )

    return SchemeDescriptor(
        name="linear",
        params=PirParameters(num_messages=2, num_databases=2, collusion=1, rounds=1),
        block_length=BLOCK,
        message_space=_uniform_message_space,
        randomness_space=randomness_space,
        store=store,
        run=run,
    )


def replicated_descriptor() -> SchemeDescriptor:
    """Trivial baseline: download both messages from DB1 under a constant query."""

    def randomness_space():
        yield 0, Fraction(1)

    def store(msg):
        full = tuple(msg[0]) + tuple(msg[1])
        return (full, full)

    def run(msg, theta, _f):
        full = tuple(msg[0]) + tuple(msg[1])
        return SessionRecord(
            queries=(("all",), ()),
            answers=(full, ()),
            decoded=tuple(msg[theta - 1]),
            download_bits=len(full),
        )

    return SchemeDescriptor(
        name="replicated",
        params=PirParameters(num_messages=2, num_databases=2, collusion=1, rounds=1),
        block_length=BLOCK,
        message_space=_uniform_message_space,
        randomness_space=randomness_space,
        store=store,
        run=run,
    )


def asymmetric_toy_descriptor() -> SchemeDescriptor:
    """Deliberately lopsided scheme for exercising the symmetrizer.

    DB1 stores both messages (8 bits) and serves the desired one outright;
    DB2 stores the linear scheme's 6 bits and serves 2 of them chosen by a
    user coin. Makes no privacy claim; rate 2/3, overhead 7/4, and the two
    databases' storage and answer entropies are intentionally unequal.
    """

    def randomness_space():
        yield 0, Fraction(1, 2)
        yield 1, Fraction(1, 2)

    def store(msg):
        stored = linear_store(LinearMessages(*msg))
        return (tuple(msg[0]) + tuple(msg[1]), stored.s2)

    def run(msg, theta, f):
        s1, s2 = store(msg)
        a1 = tuple(msg[theta - 1])
        a2 = (s2[0], s2[1]) if f == 0 else (s2[2], s2[3])
        return SessionRecord(
            queries=((f"m{theta}",), (f"half{f}",)),
            answers=(a1, a2),
            decoded=a1,
            download_bits=6,
        )

    return SchemeDescriptor(
        name="asymmetric-toy",
        params=PirParameters(num_messages=2, num_databases=2, collusion=1, rounds=1),
        block_length=BLOCK,
        message_space=_uniform_message_space,
        randomness_space=randomness_space,
        store=store,
        run=run,
    )


def symmetrize(scheme: SchemeDescriptor) -> SchemeDescriptor:
    """Two independent copies with database roles swapped in the second.

    Messages, storage, queries and answers all double; the second copy's
    database 1 material lands on database 2 and vice versa, which equalizes
    per-database storage and answer entropies while leaving the rate and
    the storage overhead untouched. Only single-round two-message
    two-database schemes are accepted.
    """
    p = scheme.params
    if (p.num_messages, p.num_databases, p.rounds) != (2, 2, 1):
        raise ValueError(
            "symmetrize requires a single-round scheme with K = 2 messages and N = 2 databases"
        )
    half = scheme.block_length
    # The combined space revisits each component (message, theta, randomness)
    # triple many times; memoizing the component scheme keeps exhaustive
    # audits of the combined scheme linear in its own state space.
    component_run = lru_cache(maxsize=None)(scheme.run)
    component_store = lru_cache(maxsize=None)(scheme.store)

    def split(msg: Message):
        w1, w2 = msg
        return (w1[:half], w2[:half]), (w1[half:], w2[half:])

    def message_space():
        for first, p_first in scheme.message_space():
            for second, p_second in scheme.message_space():
                msg = (
                    tuple(first[0]) + tuple(second[0]),
                    tuple(first[1]) + tuple(second[1]),
                )
                yield msg, p_first * p_second

    def randomness_space():
        for f_first, p_first in scheme.randomness_space():
            for f_second, p_second in scheme.randomness_space():
                yield (f_first, f_second), p_first * p_second

    def store(msg):
        first, second = split(msg)
        s_first = component_store(first)
        s_second = component_store(second)
        return (s_first[0] + s_second[1], s_first[1] + s_second[0])

    def run(msg, theta, f):
        first, second = split(msg)
        rec_first = component_run(first, theta, f[0])
        rec_second = component_run(second, theta, f[1])
        return SessionRecord(
            queries=(
                rec_first.queries[0] + rec_second.queries[1],
                rec_first.queries[1] + rec_second.queries[0],
            ),
            answers=(
                rec_first.answers[0] + rec_second.answers[1],
                rec_first.answers[1] + rec_second.answers[0],
            ),
            decoded=rec_first.decoded + rec_second.decoded,
            download_bits=rec_first.download_bits + rec_second.download_bits,
        )

    def side_information(msg, f):
        first, second = split(msg)
        side_first = scheme.side_info(first, f[0])
        side_second = scheme.side_info(second, f[1])
        return (side_first[0] + side_second[1], side_first[1] + side_second[0])

    return SchemeDescriptor(
        name=f"symmetric({scheme.name})",
        params=p,
        block_length=2 * half,
        message_space=message_space,
        randomness_space=randomness_space,
        store=store,
        run=run,
        side_information=side_information if scheme.side_information else None,
    )
