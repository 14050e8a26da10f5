"""Alphabets, encoded symbol sequences and single-symbol statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, UnknownSymbol

MAX_ALPHABET = 256  # indices are stored as uint8


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols mapped to dense indices 0..m-1."""

    symbols: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise EmptyInput("alphabet needs at least one symbol")
        if len(self.symbols) > MAX_ALPHABET:
            raise ValueError(f"alphabets larger than {MAX_ALPHABET} are not supported")
        index = {s: i for i, s in enumerate(self.symbols)}
        if len(index) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        object.__setattr__(self, "_index", index)

    @property
    def m(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, token) -> bool:
        return token in self._index

    def index(self, token) -> int:
        return self._index[token]

    def symbol(self, i: int) -> str:
        return self.symbols[i]


def default_alphabet(m: int) -> Alphabet:
    """Digits, then lower-case letters, then raw byte values for large m."""
    if m <= 10:
        syms = tuple("0123456789"[:m])
    elif m <= 36:
        syms = tuple("0123456789abcdefghijklmnopqrstuvwxyz"[:m])
    else:
        syms = tuple(chr(i) for i in range(m))
    return Alphabet(syms)


@dataclass(frozen=True)
class SymbolSequence:
    """Immutable index array over an alphabet."""

    data: np.ndarray
    alphabet: Alphabet

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("sequence data must be one-dimensional")
        if arr.size and int(arr.max()) >= self.alphabet.m:
            raise ValueError("sequence contains an index outside the alphabet")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def M(self) -> int:
        return int(self.data.size)

    @property
    def m(self) -> int:
        return self.alphabet.m

    def __len__(self) -> int:
        return self.M

    def decode(self) -> list[str]:
        symbols = self.alphabet.symbols
        return [symbols[i] for i in self.data]

    def to_text(self) -> str:
        """Concatenation of the decoded symbols (for single-character alphabets)."""
        return "".join(self.decode())


def alphabet_from_sequence(tokens: Iterable[str]) -> Alphabet:
    """Alphabet of the distinct tokens in first-appearance order."""
    seen: dict = {}
    for t in tokens:
        if t not in seen:
            seen[t] = len(seen)
    if not seen:
        raise EmptyInput("cannot build an alphabet from an empty stream")
    return Alphabet(tuple(seen))


def encode(tokens: Sequence[str], alphabet: Alphabet) -> SymbolSequence:
    """Map a token stream to its index sequence. Empty input is a valid M=0 sequence."""
    idx = np.empty(len(tokens), dtype=np.uint8)
    lookup = alphabet._index
    for pos, t in enumerate(tokens):
        code = lookup.get(t)
        if code is None:
            raise UnknownSymbol(pos, t)
        idx[pos] = code
    return SymbolSequence(idx, alphabet)


def symbol_probabilities(seq: SymbolSequence) -> np.ndarray:
    """Relative symbol frequencies p_a = count(a) / M."""
    if seq.M == 0:
        raise EmptyInput("cannot estimate probabilities of an empty sequence")
    counts = np.bincount(seq.data, minlength=seq.m)
    return counts / seq.M
