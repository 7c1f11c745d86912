"""Deterministic binary arithmetic coder with fixed-point Bernoulli and binomial models.

The coder is a 64-bit range coder: probabilities are quantized once onto a
32-bit grid and every interval update is plain integer arithmetic, so encoder
and decoder agree bit-for-bit on any platform. Floating point never enters
the coding loop.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

PROB_BITS = 32
PROB_ONE = 1 << PROB_BITS
PROB_MAX = PROB_ONE - 2  # largest codable fixed-point value
PROB_CERTAIN = PROB_ONE - 1  # reserved sentinel: probability exactly 1

_MASK64 = (1 << 64) - 1
_TOP = 1 << 56  # renormalize while range < 2^56
_FF_TOP = 0xFF << 56


class CodecError(Exception):
    """A bitstream could not be decoded (truncated or corrupt)."""


@dataclass(frozen=True)
class FixedProb:
    """A probability quantized to 32-bit fixed point, interpreted as value / 2^32.

    Values 0 and PROB_CERTAIN are reserved for probabilities that quantize to
    exactly 0 or 1; such models force their symbol and emit no bits. Codable
    values lie in [1, PROB_MAX], so the sentinels survive a u32 round trip.
    """

    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value <= PROB_CERTAIN:
            raise ValueError(f"fixed-point probability out of range: {self.value}")

    @classmethod
    def from_float(cls, p: float) -> "FixedProb":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of [0, 1]: {p}")
        if p == 0.0:
            return cls(0)
        if p == 1.0:
            return cls(PROB_CERTAIN)
        return cls(min(max(round(p * PROB_ONE), 1), PROB_MAX))

    def to_float(self) -> float:
        if self.value == PROB_CERTAIN:
            return 1.0
        return self.value / PROB_ONE

    @property
    def is_degenerate(self) -> bool:
        return self.value == 0 or self.value == PROB_CERTAIN

    @property
    def forced_bit(self) -> int:
        """The only emittable bit under a degenerate model."""
        if self.value == 0:
            return 0
        if self.value == PROB_CERTAIN:
            return 1
        raise ValueError("model is not degenerate")


class BitSink:
    """Append-only bit buffer; bits fill each byte MSB-first."""

    __slots__ = ("_bytes", "_cur", "_nbits")

    def __init__(self) -> None:
        self._bytes = bytearray()
        self._cur = 0
        self._nbits = 0

    def append_bit(self, bit: int) -> None:
        self._cur = (self._cur << 1) | (bit & 1)
        self._nbits += 1
        if self._nbits % 8 == 0:
            self._bytes.append(self._cur)
            self._cur = 0

    def append_byte(self, byte: int) -> None:
        if self._nbits % 8 == 0:
            self._bytes.append(byte & 0xFF)
            self._nbits += 8
        else:
            for i in range(7, -1, -1):
                self.append_bit((byte >> i) & 1)

    @property
    def bit_length(self) -> int:
        return self._nbits

    def getvalue(self) -> bytes:
        """Contents padded to whole bytes with zero bits."""
        out = bytes(self._bytes)
        rem = self._nbits % 8
        if rem:
            out += bytes([(self._cur << (8 - rem)) & 0xFF])
        return out


class BitSource:
    """Bit reader over immutable bytes, MSB-first, with a bounded zero tail.

    Reads past the declared length yield zero bits for up to 64 bits of slack
    (the range decoder's lookahead). Requests beyond that raise CodecError,
    which is how truncated or malformed streams surface during decode.
    """

    __slots__ = ("_data", "_nbits", "_pos", "_limit")

    def __init__(self, data: bytes, bit_length: int | None = None) -> None:
        nbits = 8 * len(data) if bit_length is None else bit_length
        if nbits > 8 * len(data):
            raise CodecError("declared bit length exceeds buffer")
        self._data = data
        self._nbits = nbits
        self._pos = 0
        self._limit = nbits + 64

    @property
    def bit_length(self) -> int:
        return self._nbits

    def read_bit(self) -> int:
        pos = self._pos
        if pos >= self._limit:
            raise CodecError("bitstream exhausted")
        self._pos = pos + 1
        if pos >= self._nbits:
            return 0
        return (self._data[pos >> 3] >> (7 - (pos & 7))) & 1

    def read_byte(self) -> int:
        pos = self._pos
        if pos & 7 or pos + 8 > self._nbits:
            b = 0
            for _ in range(8):
                b = (b << 1) | self.read_bit()
            return b
        self._pos = pos + 8
        return self._data[pos >> 3]


_BINOMIAL_CACHE: dict[tuple[int, int], tuple[tuple[int, ...], int]] = {}


def binomial_cumulative(m: int, value: int) -> tuple[tuple[int, ...], int]:
    """Cumulative fixed-point frequencies for Binomial(m, value/2^32).

    The construction is exact-integer with a fixed evaluation order, so both
    coder sides rebuild identical tables instead of shipping them: the raw
    weights W_k = C(m,k) * value^k * (2^32-value)^(m-k) follow the recurrence
    W_{k+1} = ((W_k // u) * (m-k) * v) // (k+1) (each division exact), then a
    single flooring pass maps them onto the 2^32 grid with a minimum of one
    unit per symbol so every count stays codable. The grand total therefore
    lands within m+1 units of 2^32.
    """
    key = (m, value)
    cached = _BINOMIAL_CACHE.get(key)
    if cached is not None:
        return cached
    u = PROB_ONE - value
    w = u**m
    shift = PROB_BITS * (m - 1)
    cums = [0] * (m + 2)
    acc = 0
    for k in range(m + 1):
        acc += max(1, w >> shift)
        cums[k + 1] = acc
        if k < m:
            w = ((w // u) * ((m - k) * value)) // (k + 1)
    result = (tuple(cums), acc)
    _BINOMIAL_CACHE[key] = result
    return result


def clear_binomial_cache() -> None:
    """Drop memoized binomial tables (they grow with distinct (m, p) pairs)."""
    _BINOMIAL_CACHE.clear()


class ArithEncoder:
    """Range encoder writing bytes into a BitSink.

    State is a 64-bit low/range pair with byte-wise renormalization; carries
    propagate through a cache byte plus a run counter, so emitted bytes are
    final. The first emitted byte is always zero (it absorbs a potential
    carry) and finish() appends at most two more bytes beyond the pending
    carry run, keeping total output within 64 bits of the ideal code length.
    """

    __slots__ = ("_sink", "_low", "_range", "_cache", "_cache_size", "_finished")

    def __init__(self, sink: BitSink | None = None) -> None:
        self._sink = sink if sink is not None else BitSink()
        self._low = 0
        self._range = _MASK64
        self._cache = 0
        self._cache_size = 1
        self._finished = False

    @property
    def sink(self) -> BitSink:
        return self._sink

    def _shift_low(self) -> None:
        low = self._low
        if low < _FF_TOP or low > _MASK64:
            carry = low >> 64
            append = self._sink.append_byte
            append((self._cache + carry) & 0xFF)
            fill = (0xFF + carry) & 0xFF
            for _ in range(self._cache_size - 1):
                append(fill)
            self._cache = (low >> 56) & 0xFF
            self._cache_size = 0
        self._cache_size += 1
        self._low = (low << 8) & _MASK64

    def _check_open(self) -> None:
        if self._finished:
            raise ValueError("encoder already finished")

    def encode_bernoulli(self, bit: int, prob1: FixedProb) -> None:
        """Narrow the interval by one Bernoulli symbol (P(bit=1) = prob1)."""
        self._check_open()
        v = prob1.value
        if v == 0 or v == PROB_CERTAIN:
            if bit != (0 if v == 0 else 1):
                raise ValueError("cannot encode a symbol of model probability zero")
            return
        r = self._range >> PROB_BITS
        if bit:
            self._low += r * (PROB_ONE - v)
            self._range = r * v
        else:
            self._range = r * (PROB_ONE - v)
        while self._range < _TOP:
            self._shift_low()
            self._range <<= 8

    def encode_bits(self, bits, prob1: FixedProb) -> None:
        """Bulk encode_bernoulli over an iterable of 0/1 values (hot path)."""
        self._check_open()
        v = prob1.value
        if v == 0 or v == PROB_CERTAIN:
            forced = 0 if v == 0 else 1
            for b in bits:
                if b != forced:
                    raise ValueError("cannot encode a symbol of model probability zero")
            return
        f0 = PROB_ONE - v
        low = self._low
        rng = self._range
        cache = self._cache
        cache_size = self._cache_size
        append = self._sink.append_byte
        for b in bits:
            r = rng >> PROB_BITS
            if b:
                low += r * f0
                rng = r * v
            else:
                rng = r * f0
            while rng < _TOP:
                # mirror of _shift_low, kept local for speed
                if low < _FF_TOP or low > _MASK64:
                    carry = low >> 64
                    append((cache + carry) & 0xFF)
                    fill = (0xFF + carry) & 0xFF
                    for _ in range(cache_size - 1):
                        append(fill)
                    cache = (low >> 56) & 0xFF
                    cache_size = 0
                cache_size += 1
                low = (low << 8) & _MASK64
                rng <<= 8
        self._low = low
        self._range = rng
        self._cache = cache
        self._cache_size = cache_size

    def encode_binomial(self, k: int, m: int, prob: FixedProb) -> None:
        """Encode a count k against the fixed-point Binomial(m, prob) pmf."""
        self._check_open()
        if m < 1:
            raise ValueError("binomial model needs m >= 1")
        if not 0 <= k <= m:
            raise ValueError(f"count {k} outside 0..{m}")
        v = prob.value
        if v == 0 or v == PROB_CERTAIN:
            if k != (0 if v == 0 else m):
                raise ValueError("cannot encode a count of model probability zero")
            return
        cums, total = binomial_cumulative(m, v)
        r = self._range // total
        self._low += r * cums[k]
        self._range = r * (cums[k + 1] - cums[k])
        while self._range < _TOP:
            self._shift_low()
            self._range <<= 8

    def finish(self) -> int:
        """Flush the encoder; returns the total emitted bit length.

        The stream is self-terminating for a decoder driven by the same model
        sequence; no explicit end symbol is written.
        """
        if not self._finished:
            self._finished = True
            # smallest multiple of 2^56 inside [low, low+range); range >= 2^56
            # after renormalization guarantees one exists, so two byte shifts
            # pin the codeword and the rest of the stream can read as zeros
            self._low = (self._low + _TOP - 1) >> 56 << 56
            self._shift_low()
            self._shift_low()
        return self._sink.bit_length


class ArithDecoder:
    """Range decoder mirroring ArithEncoder; must see the same model sequence."""

    __slots__ = ("_source", "_range", "_code")

    def __init__(self, source: BitSource) -> None:
        self._source = source
        source.read_byte()  # leading carry-absorber byte, always zero
        code = 0
        for _ in range(8):
            code = (code << 8) | source.read_byte()
        self._code = code
        self._range = _MASK64

    def decode_bernoulli(self, prob1: FixedProb) -> int:
        v = prob1.value
        if v == 0 or v == PROB_CERTAIN:
            return 0 if v == 0 else 1
        r = self._range >> PROB_BITS
        t = r * (PROB_ONE - v)
        if self._code >= t:
            self._code -= t
            self._range = r * v
            bit = 1
        else:
            self._range = t
            bit = 0
        while self._range < _TOP:
            self._code = (self._code << 8) | self._source.read_byte()
            self._range <<= 8
        return bit

    def decode_bits(self, count: int, prob1: FixedProb) -> bytearray:
        """Bulk decode_bernoulli; returns a bytearray of 0/1 values."""
        out = bytearray(count)
        v = prob1.value
        if v == 0 or v == PROB_CERTAIN:
            if v == PROB_CERTAIN:
                for i in range(count):
                    out[i] = 1
            return out
        f0 = PROB_ONE - v
        code = self._code
        rng = self._range
        read_byte = self._source.read_byte
        for i in range(count):
            r = rng >> PROB_BITS
            t = r * f0
            if code >= t:
                code -= t
                rng = r * v
                out[i] = 1
            else:
                rng = t
            while rng < _TOP:
                code = (code << 8) | read_byte()
                rng <<= 8
        self._code = code
        self._range = rng
        return out

    def decode_binomial(self, m: int, prob: FixedProb) -> int:
        if m < 1:
            raise ValueError("binomial model needs m >= 1")
        v = prob.value
        if v == 0 or v == PROB_CERTAIN:
            return 0 if v == 0 else m
        cums, total = binomial_cumulative(m, v)
        r = self._range // total
        dv = self._code // r
        if dv >= total:  # leftover slack above the top symbol (corrupt input)
            dv = total - 1
        k = bisect.bisect_right(cums, dv) - 1
        self._code -= r * cums[k]
        self._range = r * (cums[k + 1] - cums[k])
        while self._range < _TOP:
            self._code = (self._code << 8) | self._source.read_byte()
            self._range <<= 8
        return k
