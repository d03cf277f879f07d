"""LFSR-driven self-shrinking keystream generator.

The raw m-sequence comes from a Fibonacci LFSR: stage k is the output, the XOR of the tap
stages enters stage 1. Raw bits are produced in vectorized blocks from the linear recurrence
a[n+k] = XOR_{t in taps} a[n+k-t] and buffered; every public operation consumes the buffer
strictly in order so counters reflect bits actually used.
"""
from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sparse_ots.core.errors import ArgumentError, ConfigurationError

logger = logging.getLogger(__name__)

# Feedback taps of primitive polynomials, one per supported degree. Raw bits are generated
# in blocks of the smallest tap, so reciprocal forms with a large smallest tap are preferred.
PRIMITIVE_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 11, 8, 6),
    13: (13, 12, 10, 9),
    14: (14, 13, 11, 9),
    15: (15, 14),
    16: (16, 14, 13, 11),
    24: (24, 23, 22, 17),
    32: (32, 31, 30, 10),
    64: (64, 63, 61, 60),
    128: (128, 126, 101, 99),
    256: (256, 254, 251, 246),
}

# Raw bits generated per buffer refill.
_CHUNK = 1 << 16


@dataclass(frozen=True, slots=True)
class LfsrSpec:
    """Public structure of the generator: degree and feedback taps.

    Taps are stage indices in [1, degree]. The polynomial should be primitive for a
    maximal period; this is documented, not checked.
    """

    degree: int
    taps: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.degree < 2:
            raise ConfigurationError(f"LFSR degree must be >= 2, got {self.degree}")
        if not self.taps:
            raise ConfigurationError("LFSR tap set must be nonempty")
        bad = [t for t in self.taps if not 1 <= t <= self.degree]
        if bad:
            raise ConfigurationError(f"Taps {bad} outside [1, {self.degree}]")
        if len(set(self.taps)) != len(self.taps):
            raise ConfigurationError(f"Duplicate taps in {self.taps}")

    @classmethod
    def primitive(cls, degree: int) -> LfsrSpec:
        """Spec from the built-in primitive polynomial table."""
        if degree not in PRIMITIVE_TAPS:
            known = ", ".join(str(d) for d in sorted(PRIMITIVE_TAPS))
            raise ConfigurationError(
                f"No built-in primitive taps for degree {degree} (known: {known}); pass taps"
            )
        return cls(degree=degree, taps=PRIMITIVE_TAPS[degree])


@dataclass(frozen=True, slots=True)
class Key:
    """Initial LFSR state, the only secret.

    ``state`` packs stage i into bit (degree - i), so stage 1 is the most significant bit
    and stage ``degree`` (the first output bit) is bit 0.
    """

    degree: int
    state: int

    def __post_init__(self) -> None:
        if self.state < 0 or self.state.bit_length() > self.degree:
            raise ConfigurationError(f"State does not fit in {self.degree} bits")
        if self.state == 0:
            raise ConfigurationError("All-zero LFSR state is a fixed point")

    @classmethod
    def from_bits(cls, bits: str | Sequence[int]) -> Key:
        """Build a key from stage values listed stage 1 first, e.g. ``"001"``."""
        values = [int(b) for b in bits]
        if any(v not in (0, 1) for v in values):
            raise ConfigurationError(f"Key bits must be 0/1, got {bits!r}")
        state = 0
        for v in values:
            state = (state << 1) | v
        return cls(degree=len(values), state=state)

    @classmethod
    def from_hex(cls, text: str, degree: int) -> Key:
        """Parse the big-endian hex encoding written by :meth:`hex`."""
        try:
            state = int(text.strip(), 16)
        except ValueError as e:
            raise ConfigurationError(f"Invalid key hex: {text!r}") from e
        return cls(degree=degree, state=state)

    def hex(self) -> str:
        """Big-endian hex string of ceil(degree/8) bytes."""
        return self.state.to_bytes((self.degree + 7) // 8, "big").hex()


def _state_bits(state: int, degree: int) -> npt.NDArray[np.uint8]:
    """Next ``degree`` output bits held in the register, earliest first."""
    raw = np.frombuffer(state.to_bytes((degree + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:degree].copy()


def _pack_state(bits: npt.NDArray[np.uint8]) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def generate_raw(spec: LfsrSpec, state: int, n: int) -> tuple[npt.NDArray[np.uint8], int]:
    """Run the LFSR ``n`` steps from ``state``.

    Returns:
        Tuple of (the n output bits, register state after the last step)
    """
    k = spec.degree
    seq = np.empty(n + k, dtype=np.uint8)
    seq[:k] = _state_bits(state, k)
    taps = sorted(spec.taps)
    block = taps[0]
    for j in range(k, n + k, block):
        end = min(j + block, n + k)
        acc = seq[j - taps[0] : end - taps[0]].copy()
        for t in taps[1:]:
            acc ^= seq[j - t : end - t]
        seq[j:end] = acc
    return seq[:n], _pack_state(seq[n : n + k])


class KeystreamSource:
    """Stateful bipolar keystream: LFSR, self-shrinking decimator and bit counters.

    Not safe for concurrent mutation. ``raw_count`` counts LFSR bits consumed and
    ``keystream_count`` counts self-shrunk symbols emitted.
    """

    def __init__(self, spec: LfsrSpec, key: Key):
        if key.degree != spec.degree:
            raise ConfigurationError(
                f"Key has {key.degree} bits but the LFSR has {spec.degree} stages"
            )
        self.spec = spec
        self.raw_count = 0
        self.keystream_count = 0
        self._tail = key.state
        self._buffer = np.empty(0, dtype=np.uint8)
        self._pos = 0
        self.period_warned = False

    @classmethod
    def from_bits(cls, bits: str, taps: Sequence[int]) -> KeystreamSource:
        key = Key.from_bits(bits)
        return cls(LfsrSpec(degree=key.degree, taps=tuple(taps)), key)

    # ------------------------------------------------------------------
    # Raw buffer
    # ------------------------------------------------------------------

    def _available(self) -> int:
        return len(self._buffer) - self._pos

    def _ensure(self, n: int) -> None:
        missing = n - self._available()
        if missing <= 0:
            return
        # Small tap offsets mean short vectorized blocks; refill less at a time.
        size = max(missing, min(_CHUNK, 256 * min(self.spec.taps)))
        fresh, self._tail = generate_raw(self.spec, self._tail, size)
        self._buffer = np.concatenate([self._buffer[self._pos :], fresh])
        self._pos = 0

    @property
    def register(self) -> int:
        """LFSR state at the current consumption point (same packing as Key.state)."""
        self._ensure(self.spec.degree)
        return _pack_state(self._buffer[self._pos : self._pos + self.spec.degree])

    def skip_raw(self, n: int) -> None:
        """Discard ``n`` raw bits without emitting keystream."""
        if n < 0:
            raise ArgumentError(f"Cannot skip a negative number of bits ({n})")
        remaining = n
        while remaining > 0:
            step = min(remaining, _CHUNK)
            self._ensure(step)
            self._pos += step
            remaining -= step
        self.raw_count += n

    # ------------------------------------------------------------------
    # Stream operations
    # ------------------------------------------------------------------

    def lfsr_next(self) -> int:
        """Next raw m-sequence bit."""
        self._ensure(1)
        bit = int(self._buffer[self._pos])
        self._pos += 1
        self.raw_count += 1
        return bit

    def ssg_next(self) -> int:
        """Next bipolar symbol: a pair (a, b) emits (-1)**b when a == 1, else is dropped."""
        while True:
            self._ensure(2)
            a = self._buffer[self._pos]
            b = self._buffer[self._pos + 1]
            self._pos += 2
            self.raw_count += 2
            if a:
                self.keystream_count += 1
                return 1 - 2 * int(b)

    def take_bits(self, n: int) -> npt.NDArray[np.int8]:
        """Next ``n`` bipolar symbols as an int8 array of +/-1."""
        if n < 0:
            raise ArgumentError(f"Cannot take a negative number of symbols ({n})")
        out = np.empty(n, dtype=np.int8)
        filled = 0
        while filled < n:
            need = n - filled
            # About four raw bits per emitted symbol.
            self._ensure(4 * need + 64)
            pairs = self._available() // 2
            window = self._buffer[self._pos : self._pos + 2 * pairs].reshape(pairs, 2)
            emitted = np.flatnonzero(window[:, 0])
            if len(emitted) >= need:
                chosen = emitted[:need]
                used_pairs = int(chosen[-1]) + 1
            else:
                chosen = emitted
                used_pairs = pairs
            out[filled : filled + len(chosen)] = 1 - 2 * window[chosen, 1].astype(np.int8)
            filled += len(chosen)
            self._pos += 2 * used_pairs
            self.raw_count += 2 * used_pairs
        self.keystream_count += n
        return out

    def iter_bits(self) -> Iterator[int]:
        """Keystream mapped to bits (-1 -> 0, +1 -> 1), pulled one symbol at a time."""
        while True:
            yield (self.ssg_next() + 1) // 2


def lfsr_next(source: KeystreamSource) -> int:
    return source.lfsr_next()


def ssg_next_bipolar(source: KeystreamSource) -> int:
    return source.ssg_next()


def take_bits(source: KeystreamSource, n: int) -> npt.NDArray[np.int8]:
    return source.take_bits(n)


def balance_statistic(sequence: Sequence[int] | npt.NDArray[np.integer]) -> float:
    """Fraction of +1 symbols in a bipolar sequence."""
    values = np.asarray(sequence)
    if values.size == 0:
        raise ArgumentError("Balance of an empty sequence is undefined")
    return float(np.count_nonzero(values == 1) / values.size)


def ssg_prefix(spec: LfsrSpec, state: int, length: int) -> tuple[int, ...]:
    """First ``length`` bipolar symbols from ``state``, stepping the register as an int.

    Cheaper than a :class:`KeystreamSource` for exhaustive key search over short prefixes.
    """
    k = spec.degree
    mask = 0
    for t in spec.taps:
        mask |= 1 << (k - t)
    top = k - 1
    reg = state
    out: list[int] = []
    while len(out) < length:
        a = reg & 1
        reg = (reg >> 1) | (((reg & mask).bit_count() & 1) << top)
        b = reg & 1
        reg = (reg >> 1) | (((reg & mask).bit_count() & 1) << top)
        if a:
            out.append(1 - 2 * b)
    return tuple(out)
