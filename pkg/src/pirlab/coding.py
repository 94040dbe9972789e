"""Lossless coding for protocol streams.

Two coders live here:

* an integer arithmetic coder driven by an exact symbol model, used to
  squeeze database answer streams down to their entropy, and
* a random-binning coder for DB2's storage: a block of (y1, y2) cell pairs
  is hashed to a short bin index at store time, and reconstructed at query
  time by searching the candidates consistent with the indicator side
  information for the unique one that lands in the bin.

Stream framing (stable interop format): a coded stream is

    [u64 BE: symbol count][u64 BE: payload bit count][payload bytes]

with payload bits packed big endian (first bit = most significant bit of
the first byte) and zero padding to a byte boundary.
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Hashable, Mapping, Sequence

from .dist import ExactDist, conditional_entropy, entropy
from .seeds import derive_seed

_STATE_BITS = 32
_MASK = (1 << _STATE_BITS) - 1
_TOP = 1 << (_STATE_BITS - 1)
_SECOND = _TOP >> 1
_HEADER = struct.Struct(">QQ")


@dataclass(frozen=True)
class SourceModel:
    """Finite alphabet with exact symbol probabilities (all positive, sum 1)."""

    alphabet: tuple[Hashable, ...]
    probabilities: Mapping[Hashable, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        probs = {s: Fraction(p) for s, p in dict(self.probabilities).items()}
        object.__setattr__(self, "probabilities", probs)
        if set(probs) != set(self.alphabet):
            raise ValueError("probabilities must cover exactly the alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet symbols must be distinct")
        if any(p <= 0 for p in probs.values()):
            raise ValueError("all probabilities must be positive")
        if sum(probs.values()) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        denominator = math.lcm(*(p.denominator for p in probs.values()))
        if denominator >= _SECOND:
            raise ValueError("probability denominators too large for the coder state")
        frequencies = [probs[s].numerator * (denominator // probs[s].denominator)
                       for s in self.alphabet]
        cumulative = [0]
        for f in frequencies:
            cumulative.append(cumulative[-1] + f)
        object.__setattr__(self, "_cumulative", tuple(cumulative))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.alphabet)})

    @classmethod
    def bernoulli(cls, p_one: Fraction) -> "SourceModel":
        p_one = Fraction(p_one)
        return cls((0, 1), {0: 1 - p_one, 1: p_one})

    def entropy_bits(self) -> float:
        return entropy(ExactDist({(s,): p for s, p in self.probabilities.items()}))


class _BitWriter:
    def __init__(self):
        self._bytes = bytearray()
        self._current = 0
        self._filled = 0
        self.bit_count = 0

    def write(self, bit: int) -> None:
        self._current = (self._current << 1) | bit
        self._filled += 1
        self.bit_count += 1
        if self._filled == 8:
            self._bytes.append(self._current)
            self._current = 0
            self._filled = 0

    def getvalue(self) -> bytes:
        out = bytes(self._bytes)
        if self._filled:
            out += bytes((self._current << (8 - self._filled),))
        return out


class _BitReader:
    """Yields payload bits big endian, then zeros forever (decoder lookahead)."""

    def __init__(self, payload: bytes, bit_count: int):
        self._payload = payload
        self._bit_count = bit_count
        self._pos = 0

    def read(self) -> int:
        if self._pos >= self._bit_count:
            return 0
        byte = self._payload[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit


def entropy_encode(symbols: Sequence[Hashable], model: SourceModel) -> bytes:
    """Arithmetic-code ``symbols`` under ``model`` into a framed stream."""
    cumulative = model._cumulative
    index = model._index
    total = cumulative[-1]
    writer = _BitWriter()
    low, high, pending = 0, _MASK, 0
    count = 0
    for symbol in symbols:
        try:
            i = index[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} outside the model alphabet") from None
        span = high - low + 1
        high = low + span * cumulative[i + 1] // total - 1
        low = low + span * cumulative[i] // total
        while ((low ^ high) & _TOP) == 0:
            bit = low >> (_STATE_BITS - 1)
            writer.write(bit)
            for _ in range(pending):
                writer.write(bit ^ 1)
            pending = 0
            low = (low << 1) & _MASK
            high = ((high << 1) & _MASK) | 1
        while (low & ~high & _SECOND) != 0:
            pending += 1
            low = (low << 1) & (_MASK >> 1)
            high = ((high << 1) & (_MASK >> 1)) | _TOP | 1
        count += 1
    if count:
        writer.write(1)
    return _HEADER.pack(count, writer.bit_count) + writer.getvalue()


def _parse_frame(data: bytes) -> tuple[int, int, bytes]:
    if len(data) < _HEADER.size:
        raise ValueError("truncated stream: missing header")
    count, bit_count = _HEADER.unpack_from(data)
    payload = data[_HEADER.size:]
    if len(payload) != (bit_count + 7) // 8:
        raise ValueError("truncated or corrupt stream: payload length mismatch")
    return count, bit_count, payload


def stream_symbol_count(data: bytes) -> int:
    return _parse_frame(data)[0]


def stream_payload_bits(data: bytes) -> int:
    """Number of code bits in a framed stream (framing header excluded)."""
    return _parse_frame(data)[1]


def entropy_decode(data: bytes, model: SourceModel, count: int) -> list:
    """Exact inverse of :func:`entropy_encode` for the same model and count."""
    frame_count, bit_count, payload = _parse_frame(data)
    if count != frame_count:
        raise ValueError(f"count mismatch: stream holds {frame_count} symbols, asked for {count}")
    cumulative = model._cumulative
    total = cumulative[-1]
    size = len(model.alphabet)
    reader = _BitReader(payload, bit_count)
    code = 0
    for _ in range(_STATE_BITS):
        code = (code << 1) | reader.read()
    low, high = 0, _MASK
    out = []
    for _ in range(count):
        span = high - low + 1
        value = ((code - low + 1) * total - 1) // span
        lo, hi = 0, size
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if cumulative[mid] > value:
                hi = mid
            else:
                lo = mid
        out.append(model.alphabet[lo])
        high = low + span * cumulative[lo + 1] // total - 1
        low = low + span * cumulative[lo] // total
        while ((low ^ high) & _TOP) == 0:
            code = ((code << 1) & _MASK) | reader.read()
            low = (low << 1) & _MASK
            high = ((high << 1) & _MASK) | 1
        while (low & ~high & _SECOND) != 0:
            code = (code & _TOP) | ((code << 1) & (_MASK >> 1)) | reader.read()
            low = (low << 1) & (_MASK >> 1)
            high = ((high << 1) & (_MASK >> 1)) | _TOP | 1
    return out


# --- Random binning with decoder side information -------------------------

Y_PAIRS = ((0, 0), (1, 0), (0, 1))
_PAIR_TO_TRIT = {pair: i for i, pair in enumerate(Y_PAIRS)}


def y_pair_indicator_joint() -> ExactDist:
    """Exact joint law of (y1, y2, u) for uniform messages and a fair coin."""
    return ExactDist(
        {
            (0, 0, 0): Fraction(1, 4),
            (0, 0, 1): Fraction(1, 4),
            (1, 0, 1): Fraction(1, 4),
            (0, 1, 1): Fraction(1, 4),
        }
    )


def side_info_conditional_entropy() -> float:
    """H(y1, y2 | u) in bits; the binning rate target per position."""
    return conditional_entropy(y_pair_indicator_joint(), (2,))


@dataclass(frozen=True)
class CodecConfig:
    """Binning parameters: block length, per-symbol rate margin, hash seed."""

    block_length: int = 16
    rate_margin: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.block_length < 1:
            raise ValueError("block_length must be at least 1")
        if self.rate_margin <= 0:
            raise ValueError("rate_margin must be positive")


@dataclass(frozen=True)
class SwBin:
    """Output of the binning encoder: a bin index of ``bin_bits`` bits."""

    bin_index: int
    bin_bits: int

    def __post_init__(self):
        if not (0 <= self.bin_index < (1 << self.bin_bits)):
            raise ValueError("bin_index out of range for bin_bits")


def sw_bin_bits(cfg: CodecConfig) -> int:
    """ceil(n * (H(y1, y2 | u) + margin)) bits per block."""
    return math.ceil(cfg.block_length * (side_info_conditional_entropy() + cfg.rate_margin))


def _mask_table(cfg: CodecConfig, bits: int) -> list[tuple[int, int, int]]:
    # Position-wise tabulation hash: XOR of one uniform mask per position and
    # symbol. Any two distinct blocks collide with probability 2**-bits.
    rng = random.Random(derive_seed(cfg.seed, "sw-mask", cfg.block_length, bits))
    return [tuple(rng.getrandbits(bits) for _ in range(3)) for _ in range(cfg.block_length)]


def _to_trits(y_block: Sequence[tuple[int, int]], n: int) -> list[int]:
    if len(y_block) != n:
        raise ValueError(f"block must have length {n}, got {len(y_block)}")
    try:
        return [_PAIR_TO_TRIT[tuple(pair)] for pair in y_block]
    except KeyError:
        raise ValueError("block contains a pair outside {(0,0), (1,0), (0,1)}") from None


def sw_encode(y_block: Sequence[tuple[int, int]], cfg: CodecConfig) -> SwBin:
    """Hash a block of cell pairs into its bin. The encoder never sees u."""
    trits = _to_trits(y_block, cfg.block_length)
    bits = sw_bin_bits(cfg)
    masks = _mask_table(cfg, bits)
    index = 0
    for position, trit in enumerate(trits):
        index ^= masks[position][trit]
    return SwBin(index, bits)


def _check_side_info(u_block: Sequence[int], cfg: CodecConfig) -> list[int]:
    u_block = list(u_block)
    if len(u_block) != cfg.block_length:
        raise ValueError(f"side information must have length {cfg.block_length}")
    if any(u not in (0, 1) for u in u_block):
        raise ValueError("side information must contain only bits")
    return u_block


def sw_decode(
    sw_bin: SwBin, u_block: Sequence[int], cfg: CodecConfig
) -> tuple[tuple[int, int], ...] | None:
    """Reconstruct the unique candidate block in the bin, or None on ambiguity.

    Candidates are every block consistent with the side information: the
    pair is pinned to (0, 0) where u = 0 and ranges over three values where
    u = 1. The search is meet-in-the-middle over the XOR-decomposable hash,
    which returns exactly what a plain scan over all 3**k candidates would
    (see ``sw_decode_reference``), in O(3**(k/2)) time. A None result is the
    coder's decode failure: two or more candidates landed in the bin.
    """
    u_block = _check_side_info(u_block, cfg)
    bits = sw_bin_bits(cfg)
    if sw_bin.bin_bits != bits:
        raise ValueError(f"bin carries {sw_bin.bin_bits} bits, config implies {bits}")
    masks = _mask_table(cfg, bits)
    fixed = 0
    free: list[int] = []
    for position, u in enumerate(u_block):
        if u == 0:
            fixed ^= masks[position][0]
        else:
            free.append(position)

    left, right = free[: len(free) // 2], free[len(free) // 2 :]
    target = sw_bin.bin_index ^ fixed

    left_map: dict[int, list] = {}
    for combo in product((0, 1, 2), repeat=len(left)):
        h = 0
        for position, trit in zip(left, combo):
            h ^= masks[position][trit]
        entry = left_map.get(h)
        if entry is None:
            left_map[h] = [1, combo]
        else:
            entry[0] += 1

    matches = 0
    found = None
    for combo in product((0, 1, 2), repeat=len(right)):
        h = 0
        for position, trit in zip(right, combo):
            h ^= masks[position][trit]
        entry = left_map.get(target ^ h)
        if entry is not None:
            matches += entry[0]
            if found is None:
                found = (entry[1], combo)
            if matches > 1:
                return None
    if matches != 1:
        return None

    pairs = [(0, 0)] * cfg.block_length
    for position, trit in zip(left, found[0]):
        pairs[position] = Y_PAIRS[trit]
    for position, trit in zip(right, found[1]):
        pairs[position] = Y_PAIRS[trit]
    return tuple(pairs)


def sw_decode_reference(
    sw_bin: SwBin, u_block: Sequence[int], cfg: CodecConfig
) -> tuple[tuple[int, int], ...] | None:
    """Plain scan over every side-information-consistent candidate.

    Exponential in the number of u = 1 positions; used as the independent
    oracle against the meet-in-the-middle decoder on small blocks.
    """
    u_block = _check_side_info(u_block, cfg)
    bits = sw_bin_bits(cfg)
    if sw_bin.bin_bits != bits:
        raise ValueError(f"bin carries {sw_bin.bin_bits} bits, config implies {bits}")
    masks = _mask_table(cfg, bits)
    free = [position for position, u in enumerate(u_block) if u == 1]
    fixed = 0
    for position, u in enumerate(u_block):
        if u == 0:
            fixed ^= masks[position][0]
    found = None
    for combo in product((0, 1, 2), repeat=len(free)):
        h = fixed
        for position, trit in zip(free, combo):
            h ^= masks[position][trit]
        if h == sw_bin.bin_index:
            if found is not None:
                return None
            found = combo
    if found is None:
        return None
    pairs = [(0, 0)] * cfg.block_length
    for position, trit in zip(free, found):
        pairs[position] = Y_PAIRS[trit]
    return tuple(pairs)
