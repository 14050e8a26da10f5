"""Integer encodings of fixed-length words for counting."""

from __future__ import annotations

import numpy as np

_INT63 = (1 << 63) - 1


def codes_fit(m: int, L: int) -> bool:
    """True when every length-L word over m symbols fits in a signed 64-bit code."""
    return m**L <= _INT63


def sliding_codes(data: np.ndarray, m: int, L: int) -> np.ndarray:
    """Base-m codes of all M-L+1 sliding windows (first symbol most significant)."""
    n = data.size - L + 1
    codes = np.zeros(n, dtype=np.int64)
    for j in range(L):
        codes *= m
        codes += data[j : j + n]
    return codes


def window_counts(data: np.ndarray, m: int, L: int) -> np.ndarray:
    """Multiset of counts of the distinct length-L words (identities dropped)."""
    if codes_fit(m, L):
        _, counts = np.unique(sliding_codes(data, m, L), return_counts=True)
        return counts
    windows = np.lib.stride_tricks.sliding_window_view(data, L)
    _, counts = np.unique(windows, axis=0, return_counts=True)
    return counts
