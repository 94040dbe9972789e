"""Uniform scheme descriptor consumed by the audit engine and combinators.

A descriptor bundles everything needed to exhaust a protocol: the message
and user-randomness spaces with their exact probabilities, the storage map,
and a deterministic session function. Messages are pairs of bit tuples
``(w1, w2)``; sessions are pure, so enumeration order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, NamedTuple

from .capacity import PirParameters

Message = tuple  # (w1 bits, w2 bits)


class SessionRecord(NamedTuple):
    """One retrieval session at the scheme's native block length.

    ``queries[n]`` and ``answers[n]`` are flat tuples of hashable symbols for
    database ``n`` (all rounds concatenated, fixed arity; ``None`` marks a
    position where nothing was sent). ``download_bits`` counts answer bits
    actually shipped, at symbol level, never query bits.
    """

    queries: tuple[tuple, ...]
    answers: tuple[tuple, ...]
    decoded: tuple[int, ...]
    download_bits: int


@dataclass(frozen=True)
class SchemeDescriptor:
    """A protocol description: storage map, query/answer policies, decoder.

    ``message_space`` and ``randomness_space`` yield ``(value, probability)``
    pairs with exact Fraction probabilities summing to 1. ``store(msg)``
    returns one flat symbol tuple per database. ``run(msg, theta, f)``
    plays a full session deterministically. ``side_information(msg, f)``
    returns, per database, the symbols available to that database at
    answer time before consulting its storage (used for conditional-entropy
    storage accounting); the default is no side information.
    """

    name: str
    params: PirParameters
    block_length: int
    message_space: Callable[[], Iterable[tuple[Message, Fraction]]]
    randomness_space: Callable[[], Iterable[tuple[Any, Fraction]]]
    store: Callable[[Message], tuple[tuple, ...]]
    run: Callable[[Message, int, Any], SessionRecord]
    side_information: Callable[[Message, Any], tuple[tuple, ...]] | None = None

    def desired(self, msg: Message, theta: int) -> tuple[int, ...]:
        if not (1 <= theta <= self.params.num_messages):
            raise ValueError(f"theta must be in [1, {self.params.num_messages}]")
        return tuple(msg[theta - 1])

    def side_info(self, msg: Message, f) -> tuple[tuple, ...]:
        if self.side_information is None:
            return tuple(() for _ in range(self.params.num_databases))
        return self.side_information(msg, f)
