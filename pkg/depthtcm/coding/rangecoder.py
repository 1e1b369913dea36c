# -*- coding: utf-8 -*-
#
# depthtcm
# Copyright (C) 2025  depthtcm contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
#
"""Carry-less range coder over integer frequency models.

The coder keeps a 64-bit ``low``/``range`` register and shifts one byte out
whenever the top byte of the interval is settled.  Models expose
``interval(symbol)`` and ``locate(value)``; adaptive models additionally
update after every coded symbol, so the decoder must start from an identical
fresh model.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass

import numpy as np

from typing import (
    Iterable,
    List,
    Sequence,
    Tuple,
    Union,
)

from ..exceptions import InvalidModel, ModelMismatch, TruncatedStream
from .constants import (
    ADAPTIVE_INCREMENT,
    ADAPTIVE_LIMIT,
    BOT,
    FLUSH_BYTES,
    INITIAL_RANGE,
    MASK,
    PAD_BYTES,
    PROBABILITY_BITS,
    RAW_CHUNK_BITS,
    REGISTER_BITS,
    TOP,
)

_logger = logging.getLogger("depthtcm.coding")


@dataclass
class SymbolStream:
    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self) -> None:
        self.symbols = np.asarray(self.symbols, dtype=np.int64).ravel()
        if self.alphabet_size < 1:
            raise InvalidModel(f"Alphabet size must be positive, got {self.alphabet_size}")
        if self.symbols.size and (
            self.symbols.min() < 0 or self.symbols.max() >= self.alphabet_size
        ):
            raise ModelMismatch(
                f"Symbols outside alphabet of size {self.alphabet_size}: "
                f"[{self.symbols.min()}, {self.symbols.max()}]"
            )

    def __len__(self) -> int:
        return int(self.symbols.size)


class CdfTable:
    """Static cumulative frequency table, ``cdf[0] = 0`` and ``cdf[-1] = total``."""

    def __init__(self, cdf: Sequence[int], precision: int = PROBABILITY_BITS) -> None:
        self.cdf = np.asarray(cdf, dtype=np.int64)
        self.precision = precision
        self.validate()
        # python ints for the hot path
        self._cum: List[int] = self.cdf.tolist()

    def validate(self) -> None:
        cdf = self.cdf
        if cdf.ndim != 1 or cdf.size < 2:
            raise InvalidModel("A table needs at least one symbol")
        if cdf[0] != 0:
            raise InvalidModel(f"Cumulative table must start at 0, got {cdf[0]}")
        if np.any(np.diff(cdf) <= 0):
            raise InvalidModel("Cumulative table is not strictly increasing")
        if cdf[-1] > (1 << self.precision):
            raise InvalidModel(
                f"Table total {cdf[-1]} exceeds {self.precision}-bit precision"
            )

    @classmethod
    def from_frequencies(
        cls, freqs: Iterable[int], precision: int = PROBABILITY_BITS
    ) -> CdfTable:
        freqs = np.asarray(list(freqs), dtype=np.int64)
        if np.any(freqs <= 0):
            raise InvalidModel("Every symbol needs a positive frequency")
        return cls(np.concatenate([[0], np.cumsum(freqs)]), precision)

    @classmethod
    def from_probabilities(
        cls, probs: Sequence[float], precision: int = PROBABILITY_BITS
    ) -> CdfTable:
        return cls(probabilities_to_cdf(np.asarray(probs, dtype=np.float64)[None, :],
                                        precision)[0], precision)

    @classmethod
    def uniform(cls, alphabet_size: int) -> CdfTable:
        return cls(np.arange(alphabet_size + 1, dtype=np.int64))

    @property
    def alphabet_size(self) -> int:
        return int(self.cdf.size - 1)

    @property
    def total(self) -> int:
        return self._cum[-1]

    def probability(self, symbol: int) -> float:
        return (self._cum[symbol + 1] - self._cum[symbol]) / self._cum[-1]

    def interval(self, symbol: int) -> Tuple[int, int, int]:
        if not 0 <= symbol < len(self._cum) - 1:
            raise ModelMismatch(
                f"Symbol {symbol} has no mass in a table of {self.alphabet_size} symbols"
            )
        lo = self._cum[symbol]
        return lo, self._cum[symbol + 1] - lo, self._cum[-1]

    def locate(self, value: int) -> Tuple[int, int, int]:
        symbol = int(np.searchsorted(self.cdf, value, side="right")) - 1
        lo = self._cum[symbol]
        return symbol, lo, self._cum[symbol + 1] - lo

    def update(self, symbol: int) -> None:
        pass


def probabilities_to_cdf(probs: np.ndarray, precision: int = PROBABILITY_BITS) -> np.ndarray:
    """Row-wise integer CDFs with every symbol holding at least one count.

    Each row gets one count per symbol, the remaining counts are shared in
    proportion to ``probs`` (floored), and the rounding residual goes to the
    most probable symbol.
    """
    probs = np.asarray(probs, dtype=np.float64)
    rows, alphabet = probs.shape
    total = 1 << precision
    if alphabet > total:
        raise InvalidModel(f"Alphabet of {alphabet} symbols exceeds {precision}-bit precision")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise InvalidModel("Probabilities must be finite and non-negative")
    mass = probs.sum(axis=1, keepdims=True)
    if np.any(mass <= 0):
        raise InvalidModel("Probability rows must have positive mass")
    probs = probs / mass
    spare = total - alphabet
    freqs = 1 + np.floor(probs * spare).astype(np.int64)
    residual = total - freqs.sum(axis=1)
    freqs[np.arange(rows), np.argmax(probs, axis=1)] += residual
    cdf = np.zeros((rows, alphabet + 1), dtype=np.int64)
    np.cumsum(freqs, axis=1, out=cdf[:, 1:])
    return cdf


class AdaptiveFrequencyModel:
    """Order-0 counts over a Fenwick tree, halved when the total passes the limit."""

    def __init__(
        self,
        alphabet_size: int,
        increment: int = ADAPTIVE_INCREMENT,
        limit: int = ADAPTIVE_LIMIT,
    ) -> None:
        if alphabet_size < 1 or alphabet_size > limit // 2:
            raise InvalidModel(f"Unsupported adaptive alphabet size {alphabet_size}")
        self.alphabet_size = alphabet_size
        self.increment = increment
        self.limit = limit
        self._counts = [1] * alphabet_size
        self._tree = [0] * (alphabet_size + 1)
        self.total = 0
        self._rebuild()

    def _rebuild(self) -> None:
        n = self.alphabet_size
        tree = [0] * (n + 1)
        for i, c in enumerate(self._counts, 1):
            tree[i] += c
            parent = i + (i & -i)
            if parent <= n:
                tree[parent] += tree[i]
        self._tree = tree
        self.total = sum(self._counts)

    def _prefix(self, symbol: int) -> int:
        s = 0
        i = symbol
        while i > 0:
            s += self._tree[i]
            i -= i & -i
        return s

    def interval(self, symbol: int) -> Tuple[int, int, int]:
        if not 0 <= symbol < self.alphabet_size:
            raise ModelMismatch(
                f"Symbol {symbol} outside adaptive alphabet of {self.alphabet_size}"
            )
        return self._prefix(symbol), self._counts[symbol], self.total

    def locate(self, value: int) -> Tuple[int, int, int]:
        pos = 0
        remaining = value
        step = 1 << (self.alphabet_size.bit_length() - 1)
        while step:
            nxt = pos + step
            if nxt <= self.alphabet_size and self._tree[nxt] <= remaining:
                pos = nxt
                remaining -= self._tree[nxt]
            step >>= 1
        return pos, value - remaining, self._counts[pos]

    def update(self, symbol: int) -> None:
        if self.total + self.increment > self.limit:
            self._counts = [(c + 1) >> 1 for c in self._counts]
            self._rebuild()
        self._counts[symbol] += self.increment
        self.total += self.increment
        i = symbol + 1
        while i <= self.alphabet_size:
            self._tree[i] += self.increment
            i += i & -i


Model = Union[CdfTable, AdaptiveFrequencyModel]


class RangeEncoder:
    def __init__(self) -> None:
        self._low = 0
        self._range = INITIAL_RANGE
        self._out = bytearray()

    def _normalize(self) -> None:
        while True:
            if (self._low ^ (self._low + self._range)) < TOP:
                pass
            elif self._range < BOT:
                self._range = -self._low & (BOT - 1)
            else:
                break
            self._out.append(self._low >> (REGISTER_BITS - 8))
            self._range = (self._range << 8) & MASK
            self._low = (self._low << 8) & MASK

    def encode(self, cum: int, freq: int, total: int) -> None:
        if freq <= 0:
            raise ModelMismatch("Symbol has zero mass under the model")
        r = self._range // total
        self._low += cum * r
        self._range = r * freq
        self._normalize()

    def encode_symbol(self, model: Model, symbol: int) -> None:
        self.encode(*model.interval(symbol))
        model.update(symbol)

    def encode_bits(self, value: int, nbits: int) -> None:
        """Raw bits, least significant chunk first."""
        value, nbits = int(value), int(nbits)
        while nbits > 0:
            chunk = min(nbits, RAW_CHUNK_BITS)
            self.encode(value & ((1 << chunk) - 1), 1, 1 << chunk)
            value >>= chunk
            nbits -= chunk

    def finish(self) -> bytes:
        # any value in [low, low + range) decodes; pick one whose low bytes are zero
        point = (self._low + BOT - 1) & ~(BOT - 1) & MASK
        for i in range(FLUSH_BYTES):
            self._out.append((point >> (REGISTER_BITS - 8 * (i + 1))) & 0xFF)
        return bytes(self._out)


class RangeDecoder:
    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0
        self._low = 0
        self._range = INITIAL_RANGE
        self._code = 0
        for _ in range(REGISTER_BITS // 8):
            self._code = (self._code << 8) | self._read_byte()

    def _read_byte(self) -> int:
        pos = self._pos
        self._pos += 1
        if pos < len(self._data):
            return self._data[pos]
        if pos < len(self._data) + PAD_BYTES:
            return 0
        raise TruncatedStream(
            f"Range decoder read past the end of a {len(self._data)}-byte stream"
        )

    def _normalize(self) -> None:
        while True:
            if (self._low ^ (self._low + self._range)) < TOP:
                pass
            elif self._range < BOT:
                self._range = -self._low & (BOT - 1)
            else:
                break
            self._code = ((self._code << 8) | self._read_byte()) & MASK
            self._range = (self._range << 8) & MASK
            self._low = (self._low << 8) & MASK

    def target(self, total: int) -> int:
        self._range //= total
        value = ((self._code - self._low) & MASK) // self._range
        if value >= total:
            raise ModelMismatch(
                f"Decoded value {value} outside model total {total}; stream and model disagree"
            )
        return value

    def consume(self, cum: int, freq: int) -> None:
        self._low += cum * self._range
        self._range *= freq
        self._normalize()

    def decode_symbol(self, model: Model) -> int:
        symbol, cum, freq = model.locate(self.target(model.total))
        self.consume(cum, freq)
        model.update(symbol)
        return symbol

    def decode_bits(self, nbits: int) -> int:
        nbits = int(nbits)
        value = 0
        shift = 0
        while nbits > 0:
            chunk = min(nbits, RAW_CHUNK_BITS)
            part = self.target(1 << chunk)
            self.consume(part, 1)
            value |= part << shift
            shift += chunk
            nbits -= chunk
        return value

    @property
    def bytes_read(self) -> int:
        return min(self._pos, len(self._data))


ModelSpec = Union[Model, Sequence[CdfTable]]


def _models_for(model: ModelSpec, count: int):
    if isinstance(model, (CdfTable, AdaptiveFrequencyModel)):
        return (model for _ in range(count))
    if len(model) != count:
        raise ModelMismatch(f"{len(model)} tables supplied for {count} symbols")
    return iter(model)


def range_encode(stream: SymbolStream, model: ModelSpec) -> bytes:
    """Encode a stream under one shared model or one table per position."""
    encoder = RangeEncoder()
    for symbol, m in zip(stream.symbols.tolist(), _models_for(model, len(stream))):
        encoder.encode_symbol(m, symbol)
    data = encoder.finish()
    _logger.debug(f"Range coded {len(stream)} symbols into {len(data)} bytes")
    return data


def range_decode(data: bytes, model: ModelSpec, count: int, alphabet_size: int = 0) -> SymbolStream:
    decoder = RangeDecoder(data)
    symbols = [decoder.decode_symbol(m) for m in _models_for(model, count)]
    if not alphabet_size:
        if isinstance(model, (CdfTable, AdaptiveFrequencyModel)):
            alphabet_size = model.alphabet_size
        else:
            alphabet_size = max((t.alphabet_size for t in model), default=1)
    return SymbolStream(np.asarray(symbols, dtype=np.int64), alphabet_size)
