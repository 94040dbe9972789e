"""Closed-form capacity and storage-overhead oracles.

These formulas are evaluated exactly (capacity as a Fraction) so that
"measured rate equals capacity" style boundary checks need no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class PirParameters:
    """Protocol parameters: K messages, N databases, T-collusion, round count."""

    num_messages: int
    num_databases: int
    collusion: int = 1
    rounds: int = 1

    def __post_init__(self):
        if self.num_messages < 1:
            raise ValueError("num_messages must be at least 1")
        if self.num_databases < 1:
            raise ValueError("num_databases must be at least 1")
        if not (1 <= self.collusion <= self.num_databases):
            raise ValueError(
                f"collusion must satisfy 1 <= T <= N, got T={self.collusion}, N={self.num_databases}"
            )
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")


@dataclass(frozen=True)
class OverheadAccount:
    """Per-database stored entropy (bits) plus message dimensions."""

    per_database_storage_bits: tuple[float, ...]
    message_length: int
    num_messages: int

    def __post_init__(self):
        object.__setattr__(
            self, "per_database_storage_bits", tuple(self.per_database_storage_bits)
        )
        if any(bits < 0 for bits in self.per_database_storage_bits):
            raise ValueError("storage entries must be non-negative")
        if self.message_length < 1:
            raise ValueError("message_length must be positive")
        if self.num_messages < 1:
            raise ValueError("num_messages must be at least 1")


def mtpir_capacity(p: PirParameters) -> Fraction:
    """Retrieval capacity (1 + T/N + ... + (T/N)^(K-1))^-1, exact.

    Independent of the round count.
    """
    ratio = Fraction(p.collusion, p.num_databases)
    series = sum((ratio**i for i in range(p.num_messages)), Fraction(0))
    return 1 / series


def storage_overhead(account: OverheadAccount) -> float:
    """Total stored bits across databases divided by total message bits."""
    total = sum(account.per_database_storage_bits)
    return total / (account.num_messages * account.message_length)


def check_rate_admissible(rate: Fraction, p: PirParameters) -> bool:
    """True iff ``rate`` does not exceed the capacity for ``p``.

    Exact comparison; a rate equal to capacity passes (boundary case).
    """
    rate = Fraction(rate)
    if rate < 0:
        raise ValueError("rate must be non-negative")
    return rate <= mtpir_capacity(p)
