"""Symbolic pair-correlation estimation.

The central object is the per-lag matrix series

    C[ab](r) = <[d(a_i,a) - p_a] [d(a_{i+r},b) - p_b]>,   r = 0..r_max,

estimated on a finite sequence with the 1/(M-r) window normalisation and
p taken once over the full length. Rows and columns of every lag matrix
sum to zero by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SymbolSequence, symbol_probabilities
from .errors import DegenerateCorrelations, InvalidLag

#: default warn threshold for the weak-correlation diagnostic
WEAK_WARN_THRESHOLD = 0.3


@dataclass(frozen=True)
class CorrelationSeries:
    """Estimated lag matrices C(0..r_max) with the symbol probabilities.

    M is the length of the source sequence; it is None for synthetic
    (target) series that were not estimated from data.
    """

    matrices: np.ndarray  # shape (r_max + 1, m, m)
    p: np.ndarray
    M: int | None = None

    @property
    def r_max(self) -> int:
        return self.matrices.shape[0] - 1

    @property
    def m(self) -> int:
        return self.matrices.shape[1]

    def lag(self, r: int) -> np.ndarray:
        """C matrix at lag r; negative lags return the transpose of |r|."""
        return self.matrices[r] if r >= 0 else self.matrices[-r].T

    def zero_lag_analytic(self) -> np.ndarray:
        """p_a d(a,b) - p_a p_b, the exact lag-0 matrix of the estimator."""
        return np.diag(self.p) - np.outer(self.p, self.p)


@dataclass(frozen=True)
class NormalizedSeries:
    """K(r) = C(r)/C(0) for r = 1..r_max; NaN where C(0) vanishes."""

    values: np.ndarray  # shape (r_max, m, m), index 0 <-> r = 1
    defined: np.ndarray  # shape (m, m) bool
    p: np.ndarray

    @property
    def r_max(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def lag(self, r: int) -> np.ndarray:
        return self.values[r - 1]


@dataclass(frozen=True)
class NumericMapping:
    """Numeric values assigned to the alphabet symbols."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("numeric mapping must be finite")
        object.__setattr__(self, "values", vals)


def _deviation_tracks(seq: SymbolSequence, p: np.ndarray) -> np.ndarray:
    """Indicator deviations, one float row per symbol: X[a,i] = d(a_i,a) - p_a."""
    eye = np.eye(seq.m)
    return eye[:, seq.data] - p[:, None]


def _check_lag(seq: SymbolSequence, r_max: int) -> None:
    if not 1 <= r_max <= seq.M - 2:
        raise InvalidLag(f"r_max={r_max} outside 1..M-2 for M={seq.M}")


def correlation_series(seq: SymbolSequence, r_max: int) -> CorrelationSeries:
    """Direct estimator: per lag, the mean over windows of the deviation products."""
    _check_lag(seq, r_max)
    p = symbol_probabilities(seq)
    x = _deviation_tracks(seq, p)
    M = seq.M
    out = np.empty((r_max + 1, seq.m, seq.m))
    for r in range(r_max + 1):
        head = x[:, : M - r] if r else x
        tail = x[:, r:]
        out[r] = head @ tail.T / (M - r)
    return CorrelationSeries(out, p, M)


def correlation_series_fast(seq: SymbolSequence, r_max: int) -> CorrelationSeries:
    """Transform-based estimator, identical contract to correlation_series.

    Indicator deviation tracks are zero-padded to the next power of two
    >= 2M so the circular correlation carries no wrap-around for lags up
    to r_max; one spectrum product per unordered symbol pair yields both
    lag orientations.
    """
    _check_lag(seq, r_max)
    p = symbol_probabilities(seq)
    M, m = seq.M, seq.m
    n = 1 << (2 * M - 1).bit_length()
    x = np.zeros((m, n))
    x[:, :M] = _deviation_tracks(seq, p)
    spectra = np.fft.rfft(x, axis=1)
    denom = (M - np.arange(r_max + 1)).astype(float)
    out = np.empty((r_max + 1, m, m))
    for a in range(m):
        for b in range(a, m):
            c = np.fft.irfft(np.conj(spectra[a]) * spectra[b], n)
            out[:, a, b] = c[: r_max + 1] / denom
            if b != a:
                out[0, b, a] = out[0, a, b]
                out[1:, b, a] = c[n - r_max : n][::-1] / denom[1:]
    return CorrelationSeries(out, p, M)


def normalize(corr: CorrelationSeries) -> NormalizedSeries:
    """Divide each lag matrix by the analytic lag-0 matrix, entrywise.

    Entries whose lag-0 denominator is zero (symbols with probability 0,
    or a diagonal entry with probability 1) are returned as NaN and
    flagged in the `defined` mask.
    """
    c0 = corr.zero_lag_analytic()
    defined = c0 != 0.0
    values = np.full((corr.r_max, corr.m, corr.m), np.nan)
    np.divide(corr.matrices[1:], c0[None, :, :], out=values,
              where=defined[None, :, :])
    return NormalizedSeries(values, defined, corr.p)


def numeric_correlator(corr: CorrelationSeries, mapping) -> np.ndarray:
    """Correlation function of the numerically mapped sequence, per lag.

    Equals the direct covariance of eps[a_i] about its full-length mean.
    """
    eps = mapping.values if isinstance(mapping, NumericMapping) else np.asarray(mapping, dtype=float)
    return np.einsum("a,b,rab->r", eps, eps, corr.matrices)


def weak_correlation_diagnostic(norm: NormalizedSeries) -> float:
    """Upper bound on the conditional-probability deviation amplitude.

    D = max_a sum_r sum_b |K[ba](r)| * max(p_b, 1 - p_b); absent entries
    contribute nothing. Values approaching 1 mean the additive model can
    drive conditional probabilities out of (0, 1).
    """
    k_abs = np.nan_to_num(np.abs(norm.values), nan=0.0)
    w = np.maximum(norm.p, 1.0 - norm.p)
    per_alpha = np.einsum("rba,b->a", k_abs, w)
    return float(per_alpha.max()) if per_alpha.size else 0.0


def binary_normalized_correlator(corr: CorrelationSeries) -> np.ndarray:
    """Scalar K(r) = C(r)/C(0) of a binary series, r = 1..r_max."""
    if corr.m != 2:
        raise ValueError("binary correlator requires a two-symbol series")
    c0 = corr.p[0] * corr.p[1]
    if c0 == 0.0:
        raise DegenerateCorrelations("binary correlator undefined: one symbol is absent")
    return corr.matrices[1:, 1, 1] / c0


def correlation_from_binary_target(k: np.ndarray, p, M: int | None = None) -> CorrelationSeries:
    """Synthetic binary series realising a prescribed scalar correlator.

    k[r-1] is the target K(r); the lag matrices follow the binary sign
    pattern (equal diagonal, negated off-diagonal entries).
    """
    k = np.asarray(k, dtype=float)
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise ValueError("binary target needs a two-symbol probability vector")
    c0_scalar = p[0] * p[1]
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])
    matrices = np.empty((k.size + 1, 2, 2))
    matrices[0] = np.diag(p) - np.outer(p, p)
    matrices[1:] = k[:, None, None] * c0_scalar * sign[None, :, :]
    return CorrelationSeries(matrices, p, M)
