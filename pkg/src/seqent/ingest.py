"""Readers that turn raw inputs into symbol sequences.

Text is coarse-grained onto the 27-symbol alphabet a..z plus blank:
upper-case folds to lower-case, anything that is not an ASCII letter
separates words, and separator runs collapse to a single blank by
default. FASTA input keeps A/C/G/T only; ambiguity codes are dropped,
not imputed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Alphabet, SymbolSequence
from .errors import EmptyInput, InvalidPartition, MalformedFasta

TEXT27 = Alphabet(tuple("abcdefghijklmnopqrstuvwxyz") + (" ",))
DNA = Alphabet(("A", "C", "G", "T"))
BINARY = Alphabet(("0", "1"))

_BLANK = 26
_NUCLEOTIDE = {"A": 0, "C": 1, "G": 2, "T": 3}


@dataclass(frozen=True)
class CorpusStats:
    """Bookkeeping for one ingested input."""

    input_bytes: int
    emitted: int
    dropped: int
    alphabet: Alphabet


def coarse_grain_text(text: str, collapse_blanks: bool = True) -> tuple[SymbolSequence, CorpusStats]:
    """Map a character stream onto the 27-letter alphabet.

    With collapse_blanks every maximal run of non-letters becomes one
    blank; without it every non-letter becomes its own blank. Leading and
    trailing blanks are trimmed either way.
    """
    out = []
    pending_blank = False
    for ch in text:
        if "A" <= ch <= "Z":
            ch = ch.lower()
        if "a" <= ch <= "z":
            if pending_blank and out:
                out.append(_BLANK)
            pending_blank = False
            out.append(ord(ch) - 97)
        elif collapse_blanks:
            pending_blank = True
        elif out:
            out.append(_BLANK)
    if not collapse_blanks:
        while out and out[-1] == _BLANK:
            out.pop()
    if not out:
        raise EmptyInput("no letters survived coarse-graining")
    data = np.asarray(out, dtype=np.uint8)
    stats = CorpusStats(len(text), data.size, len(text) - data.size, TEXT27)
    return SymbolSequence(data, TEXT27), stats


def parse_fasta(data) -> tuple[SymbolSequence, CorpusStats]:
    """Concatenated A/C/G/T indices from one or more FASTA records."""
    if isinstance(data, bytes):
        data = data.decode("ascii", errors="replace")
    n_bytes = len(data)
    saw_header = False
    out = []
    dropped = 0
    for line in data.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(">"):
            saw_header = True
            continue
        if not saw_header:
            raise MalformedFasta("first non-empty line must be a '>' header")
        for ch in stripped:
            if ch.isspace():
                continue
            code = _NUCLEOTIDE.get(ch.upper())
            if code is None:
                dropped += 1
            else:
                out.append(code)
    if not saw_header:
        raise MalformedFasta("no FASTA header found")
    if not out:
        raise EmptyInput("no nucleotides found")
    data_arr = np.asarray(out, dtype=np.uint8)
    stats = CorpusStats(n_bytes, data_arr.size, dropped, DNA)
    return SymbolSequence(data_arr, DNA), stats


def binary_map(seq: SymbolSequence, one_set) -> SymbolSequence:
    """Collapse the alphabet to {0,1}: symbols in one_set become 1."""
    one = set(one_set)
    unknown = one - set(seq.alphabet.symbols)
    if unknown:
        raise InvalidPartition(f"symbols not in the alphabet: {sorted(unknown)}")
    if not one or len(one) == seq.alphabet.m:
        raise InvalidPartition("one_set must be a non-empty proper subset")
    lut = np.zeros(seq.alphabet.m, dtype=np.uint8)
    for s in one:
        lut[seq.alphabet.index(s)] = 1
    return SymbolSequence(lut[seq.data], BINARY)


def read_raw_symbols(data, mode: str = "bytes") -> tuple[SymbolSequence, CorpusStats]:
    """Per-byte symbols, or whitespace-separated tokens as symbols."""
    if mode not in ("bytes", "tokens"):
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(data, str):
        raw = data.encode("latin-1", errors="replace")
    else:
        raw = bytes(data)
    if mode == "bytes":
        if not raw:
            raise EmptyInput("empty input")
        text = raw.decode("latin-1")
        seen: dict[str, int] = {}
        idx = np.empty(len(text), dtype=np.uint8)
        for i, ch in enumerate(text):
            code = seen.get(ch)
            if code is None:
                code = len(seen)
                seen[ch] = code
            idx[i] = code
        alphabet = Alphabet(tuple(seen))
        stats = CorpusStats(len(raw), idx.size, 0, alphabet)
        return SymbolSequence(idx, alphabet), stats
    tokens = raw.decode("utf-8", errors="replace").split()
    if not tokens:
        raise EmptyInput("empty input")
    seen = {}
    idx = np.empty(len(tokens), dtype=np.uint8)
    for i, tok in enumerate(tokens):
        code = seen.get(tok)
        if code is None:
            code = len(seen)
            seen[tok] = code
        idx[i] = code
    alphabet = Alphabet(tuple(seen))
    stats = CorpusStats(len(raw), idx.size, 0, alphabet)
    return SymbolSequence(idx, alphabet), stats
