"""Entropy estimators and the derived length scales.

Two routes are provided. The correlation route turns the pair-correlation
series into a differential-entropy curve, optionally removing the
finite-length fluctuation floor (m_eff-1)^2 L / M that a finite sample
adds to the squared-correlation sum. The block route is the classic
likelihood estimate over sliding words, with its validity flag from the
m^L <= M counting rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._codes import window_counts
from .core import SymbolSequence
from .correlation import CorrelationSeries
from .errors import InvalidLag, InvalidLength

LN2_2 = 2.0 * np.log(2.0)

#: defaults for the plateau detector, exposed as CLI flags
RC_TOL = 1e-4
RC_WINDOW = 10


def h0(p: np.ndarray) -> float:
    """Shannon entropy of a probability vector, in bits; 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


@dataclass(frozen=True)
class EntropyCurve:
    """Per-word-length entropy from the correlation route.

    h_corr is the raw estimate, h_corr_corrected subtracts the fluctuation
    term; both are kept. The corrected value may exceed h0 once the
    fluctuation term overtakes the correlation sum (past the stationarity
    length); that is reported, not clamped.
    """

    L: np.ndarray
    h_corr: np.ndarray
    h_corr_corrected: np.ndarray
    correlation_sum: np.ndarray  # S(L), cumulative squared-correlation sum
    fluctuation_term: np.ndarray  # (m_eff-1)^2 L / M, zeros when M unknown
    h0: float
    m_eff: int
    M: int | None
    correction: bool

    @property
    def h_effective(self) -> np.ndarray:
        return self.h_corr_corrected if self.correction else self.h_corr

    @property
    def exceeds_h0(self) -> np.ndarray:
        """Per-L flag: corrected estimate rose above the uncorrelated entropy."""
        return self.h_corr_corrected > self.h0


def _squared_correlation_terms(corr: CorrelationSeries, r_hi: int) -> tuple[np.ndarray, int]:
    """Per-lag sum_ab C(r)^2 / (p_a p_b) restricted to the support, r = 1..r_hi."""
    sup = corr.p > 0.0
    w = np.zeros_like(corr.p)
    w[sup] = 1.0 / corr.p[sup]
    terms = np.einsum("rab,a,b->r", corr.matrices[1 : r_hi + 1] ** 2, w, w)
    return terms, int(sup.sum())


def correlation_entropy_curve(
    corr: CorrelationSeries, L_max: int, correction: bool = True
) -> EntropyCurve:
    """Differential entropy per word length from the correlation series."""
    if not 1 <= L_max <= corr.r_max:
        raise InvalidLag(f"L_max={L_max} outside 1..r_max={corr.r_max}")
    if correction and corr.M is None:
        raise ValueError("fluctuation correction needs the source length M")
    terms, m_eff = _squared_correlation_terms(corr, L_max)
    s = np.cumsum(terms)
    L = np.arange(1, L_max + 1)
    fluct = (m_eff - 1) ** 2 * L / corr.M if corr.M else np.zeros(L_max)
    base = h0(corr.p)
    return EntropyCurve(
        L=L,
        h_corr=base - s / LN2_2,
        h_corr_corrected=base - (s - fluct) / LN2_2,
        correlation_sum=s,
        fluctuation_term=fluct,
        h0=base,
        m_eff=m_eff,
        M=corr.M,
        correction=correction,
    )


def binary_entropy_curve(k: np.ndarray, h0_bits: float, L_max: int | None = None) -> EntropyCurve:
    """Two-symbol closed form: h(L) = h0 - sum_{r<=L} K(r)^2 / (2 ln 2)."""
    k = np.asarray(k, dtype=float)
    if L_max is None:
        L_max = k.size
    if not 1 <= L_max <= k.size:
        raise InvalidLag(f"L_max={L_max} outside 1..{k.size}")
    if np.any(np.abs(k) > 1.0):
        raise ValueError("normalized correlators must lie in [-1, 1]")
    s = np.cumsum(k[:L_max] ** 2)
    L = np.arange(1, L_max + 1)
    h = h0_bits - s / LN2_2
    return EntropyCurve(
        L=L,
        h_corr=h,
        h_corr_corrected=h.copy(),
        correlation_sum=s,
        fluctuation_term=np.zeros(L_max),
        h0=h0_bits,
        m_eff=2,
        M=None,
        correction=False,
    )


@dataclass(frozen=True)
class BlockEntropyCurve:
    """Likelihood block entropies H(L) and differences h(L) = H(L+1) - H(L)."""

    L: np.ndarray
    H: np.ndarray
    h: np.ndarray
    word_count: np.ndarray
    valid: np.ndarray  # m^L <= M counting rule
    m: int
    M: int


def _block_entropy(data: np.ndarray, m: int, L: int) -> tuple[float, int]:
    counts = window_counts(data, m, L)
    w = data.size - L + 1
    h_val = np.log2(w) - float(counts @ np.log2(counts)) / w
    return h_val, counts.size


def block_entropy_curve(seq: SymbolSequence, L_max: int) -> BlockEntropyCurve:
    """Block entropies for L = 1..L_max; needs windows of length L_max + 1."""
    if L_max < 1 or L_max + 1 > seq.M:
        raise InvalidLength(f"L_max={L_max} needs L_max+1 <= M={seq.M}")
    H = np.empty(L_max + 1)
    word_count = np.empty(L_max, dtype=np.int64)
    for L in range(1, L_max + 2):
        h_val, n_words = _block_entropy(seq.data, seq.m, L)
        H[L - 1] = h_val
        if L <= L_max:
            word_count[L - 1] = n_words
    Ls = np.arange(1, L_max + 1)
    valid = np.array([seq.m**int(L) <= seq.M for L in Ls])
    return BlockEntropyCurve(
        L=Ls,
        H=H[:L_max],
        h=H[1:] - H[:L_max],
        word_count=word_count,
        valid=valid,
        m=seq.m,
        M=seq.M,
    )


def validity_limit(m: int, M: int) -> int:
    """Largest L with m^L <= M (exact integer arithmetic)."""
    if m < 2:
        raise InvalidLength("validity limit needs m >= 2")
    if M < m:
        raise InvalidLength("validity limit needs M >= m")
    L, power = 1, m
    while power * m <= M:
        power *= m
        L += 1
    return L


@dataclass(frozen=True)
class LengthReport:
    """Detected plateau onset R_c and stationarity length R_s (None if not found)."""

    r_c: int | None
    r_s: int | None


def stationarity_length(corr: CorrelationSeries) -> int | None:
    """Smallest L where the fluctuation line overtakes the correlation sum."""
    if corr.M is None:
        raise ValueError("stationarity length needs the source length M")
    terms, m_eff = _squared_correlation_terms(corr, corr.r_max)
    s = np.cumsum(terms)
    line = (m_eff - 1) ** 2 * np.arange(1, corr.r_max + 1) / corr.M
    hits = np.nonzero(s <= line)[0]
    return int(hits[0]) + 1 if hits.size else None


def correlation_length(curve: EntropyCurve, tol: float = RC_TOL, window: int = RC_WINDOW) -> int | None:
    """Smallest L from which `window` consecutive steps of h change by < tol."""
    h = curve.h_effective
    if h.size < window + 1:
        return None
    ok = np.abs(np.diff(h)) < tol
    run = np.convolve(ok.astype(int), np.ones(window, dtype=int), mode="valid")
    starts = np.nonzero(run == window)[0]
    return int(starts[0]) + 1 if starts.size else None
