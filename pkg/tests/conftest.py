"""Shared helpers: slow independent oracles the fast paths are checked against."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from seqent.core import SymbolSequence, default_alphabet


def random_sequence(rng, m: int, length: int) -> SymbolSequence:
    data = rng.integers(0, m, length).astype(np.uint8)
    return SymbolSequence(data, default_alphabet(m))


def literal_correlation(data, m: int, r_max: int) -> np.ndarray:
    """Plain-loop estimator: mean over windows of indicator-deviation products."""
    data = list(int(v) for v in data)
    M = len(data)
    p = [data.count(a) / M for a in range(m)]
    out = np.zeros((r_max + 1, m, m))
    for r in range(r_max + 1):
        for a in range(m):
            for b in range(m):
                acc = 0.0
                for i in range(M - r):
                    acc += ((1.0 if data[i] == a else 0.0) - p[a]) * (
                        (1.0 if data[i + r] == b else 0.0) - p[b]
                    )
                out[r, a, b] = acc / (M - r)
    return out


def block_entropy_oracle(data, L: int) -> tuple[float, int]:
    """Counter-based block entropy of the M-L+1 sliding words, in bits."""
    words = Counter(tuple(data[i : i + L]) for i in range(len(data) - L + 1))
    w = sum(words.values())
    h = -sum((n / w) * math.log2(n / w) for n in words.values())
    return h, len(words)


def prefix_block_entropy_oracle(data, L: int) -> float:
    """Block entropy of the first M-L words only (the ones with a successor)."""
    words = Counter(tuple(data[i : i + L]) for i in range(len(data) - L))
    w = sum(words.values())
    return -sum((n / w) * math.log2(n / w) for n in words.values())
