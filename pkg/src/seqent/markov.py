"""Additive high-order Markov machinery.

An additive chain draws the next symbol from

    P(a | history) = p_a + sum_{r=1..N} sum_b F[ab](r) (d(a_{i-r}, b) - p_b)

with a memory kernel F of depth N. The kernel is only determined by the
pair correlations up to a per-(a, r) additive constant (adding the same
value to a whole row of F(r) leaves the probabilities unchanged); solver
output is therefore reported in the canonical gauge sum_b F[ab](r) p_b = 0.

The weak-correlation solution of the correlation/kernel relation is, to
first order and in canonical gauge, F[ab](r) = C[ba](r) / p_b, which for
two symbols reduces to the familiar scalar form
P(1|history) = p1 + sum_r f(r) (a_{i-r} - p1) with f(r) = K(r).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._codes import codes_fit, sliding_codes
from .core import Alphabet, SymbolSequence, default_alphabet
from .correlation import (
    CorrelationSeries,
    NormalizedSeries,
    correlation_from_binary_target,
    normalize,
)
from .errors import DegenerateCorrelations, InvalidLag, InvalidLength

CLAMP_EPS = 1e-6
RNG_ID = "numpy.random.Philox"


@dataclass(frozen=True)
class MemoryFunction:
    """Kernel tensor, kernel[r-1][a, b] = F[ab](r), r = 1..N."""

    kernel: np.ndarray  # shape (N, m, m)

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=float)
        if k.ndim != 3 or k.shape[1] != k.shape[2]:
            raise ValueError("kernel must have shape (N, m, m)")
        if not np.all(np.isfinite(k)):
            raise ValueError("kernel entries must be finite")
        object.__setattr__(self, "kernel", k)

    @property
    def order(self) -> int:
        return self.kernel.shape[0]

    @property
    def m(self) -> int:
        return self.kernel.shape[1]

    def canonical(self, p: np.ndarray) -> "MemoryFunction":
        """Gauge-fixed representative with sum_b F[ab](r) p_b = 0."""
        k = self.kernel - (self.kernel @ p)[:, :, None]
        return MemoryFunction(k)

    def is_null(self) -> bool:
        return self.order == 0 or not np.any(self.kernel)


def _correlation_stack(norm: NormalizedSeries, n_lags: int) -> np.ndarray:
    """Rebuild C(1..n_lags) from a normalized series on full support."""
    if not norm.defined.all():
        raise DegenerateCorrelations("normalized series has absent entries")
    c0 = np.diag(norm.p) - np.outer(norm.p, norm.p)
    return norm.values[:n_lags] * c0[None, :, :]


def memory_function_series(norm: NormalizedSeries, order: int, series_order: int = 1) -> MemoryFunction:
    """Weak-correlation series solution of the correlation/kernel relation.

    series_order 1 keeps the leading term F[ab](r) = C[ba](r)/p_b; 2 adds
    the quadratic correction from re-substituting the leading term.
    """
    if series_order not in (1, 2):
        raise ValueError("series_order must be 1 or 2")
    if order < 1 or order > norm.r_max:
        raise InvalidLag(f"order={order} outside 1..r_max={norm.r_max}")
    p = norm.p
    c = _correlation_stack(norm, order)
    # G[xy](s) = C[xy](s)/p_x; for s < 0 use C(|s|) transposed.
    g = c / p[None, :, None]

    def g_at(s: int) -> np.ndarray:
        return g[s - 1] if s > 0 else c[-s - 1].T / p[:, None]

    kernel = np.transpose(g, (0, 2, 1)).copy()  # F1[r][a,b] = G[ba](r)
    if series_order == 2:
        for r in range(1, order + 1):
            acc = np.zeros((norm.m, norm.m))
            for rp in range(1, order + 1):
                if rp == r:
                    continue
                acc += g_at(r - rp) @ g_at(rp)
            kernel[r - 1] -= acc.T
    return MemoryFunction(kernel).canonical(p)


def memory_function_exact(corr: CorrelationSeries, order: int) -> MemoryFunction:
    """Dense solve of the correlation/kernel relation for r = 1..order.

    The raw system is singular along the gauge directions, so one
    reference symbol (the most probable) is eliminated and the result
    mapped back to the canonical gauge. Symbols with zero probability are
    excluded throughout and get zero kernel rows/columns.
    """
    if order < 1 or order > corr.r_max:
        raise InvalidLag(f"order={order} outside 1..r_max={corr.r_max}")
    p = corr.p
    sup = np.nonzero(p > 0.0)[0]
    if sup.size < 2:
        raise DegenerateCorrelations("need at least two symbols with support")
    ref = sup[np.argmax(p[sup])]
    others = np.array([s for s in sup if s != ref])
    k = others.size
    n = order * k

    def reduced_block(s: int) -> np.ndarray:
        c = corr.lag(s)
        return c[np.ix_(others, others)] - np.outer(
            c[others, ref], p[others] / p[ref]
        )

    a_mat = np.empty((n, n))
    for r in range(1, order + 1):
        for rp in range(1, order + 1):
            a_mat[(r - 1) * k : r * k, (rp - 1) * k : rp * k] = reduced_block(r - rp)
    rhs = np.empty((n, sup.size))
    for r in range(1, order + 1):
        rhs[(r - 1) * k : r * k, :] = corr.matrices[r][np.ix_(others, sup)]
    try:
        sol = np.linalg.solve(a_mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCorrelations(f"reduced system is singular: {exc}") from exc

    kernel = np.zeros((order, corr.m, corr.m))
    for r in range(order):
        block = sol[r * k : (r + 1) * k, :]  # rows gamma (others), cols beta (sup)
        kernel[r][np.ix_(sup, others)] = block.T
        kernel[r][sup, ref] = -(block.T @ p[others]) / p[ref]
    return MemoryFunction(kernel).canonical(p)


def memory_residual(corr: CorrelationSeries, mem: MemoryFunction) -> float:
    """Largest absolute defect of the correlation/kernel relation over r = 1..N."""
    n = mem.order
    if corr.r_max < n:
        raise InvalidLag("series too short to check the kernel relation")
    worst = 0.0
    for r in range(1, n + 1):
        acc = np.zeros((corr.m, corr.m))
        for rp in range(1, n + 1):
            acc += corr.lag(r - rp) @ mem.kernel[rp - 1].T
        worst = max(worst, float(np.abs(corr.matrices[r] - acc).max()))
    return worst


def binary_memory_from_scalar(f: np.ndarray, p) -> MemoryFunction:
    """Canonical two-symbol kernel with row differences F[11]-F[10] = f(r)."""
    f = np.asarray(f, dtype=float)
    p = np.asarray(p, dtype=float)
    pattern = np.array([[p[1], -p[0]], [-p[1], p[0]]])
    return MemoryFunction(f[:, None, None] * pattern[None, :, :])


def binary_memory_from_target(
    k_target: np.ndarray, p, order: int | None = None, method: str = "exact"
) -> MemoryFunction:
    """Kernel realising a prescribed scalar correlator K(r) on a binary chain.

    The target is zero-padded up to `order`, so a deeper solve suppresses
    the correlation tail the chain would otherwise grow past the last
    prescribed lag.
    """
    k_target = np.asarray(k_target, dtype=float)
    if order is None:
        order = k_target.size
    if order < k_target.size:
        raise InvalidLag("order smaller than the prescribed correlator support")
    k_full = np.zeros(order)
    k_full[: k_target.size] = k_target
    corr = correlation_from_binary_target(k_full, p)
    if method == "exact":
        return memory_function_exact(corr, order)
    if method == "series":
        return memory_function_series(normalize(corr), order, 1)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class AdditiveCpf:
    """Stationary probabilities plus an optional memory kernel."""

    p: np.ndarray
    memory: MemoryFunction | None = None
    clamp_eps: float = CLAMP_EPS

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("p must be a probability vector")
        if self.memory is not None and self.memory.m != p.size:
            raise ValueError("kernel alphabet size does not match p")
        object.__setattr__(self, "p", p)

    @property
    def m(self) -> int:
        return self.p.size

    @property
    def order(self) -> int:
        return 0 if self.memory is None else self.memory.order


def cpf_eval(cpf: AdditiveCpf, history) -> np.ndarray:
    """Next-symbol distribution given the most-recent-last history.

    Histories shorter than the kernel depth use the available lags only.
    Raw values are clamped into [eps, 1-eps] on the support (symbols with
    p = 0 stay at 0) and renormalized.
    """
    hist = np.asarray(history, dtype=np.int64)
    raw = cpf.p.copy()
    if cpf.memory is not None and hist.size:
        n_use = min(hist.size, cpf.order)
        kern = cpf.memory.kernel
        for r in range(1, n_use + 1):
            raw += kern[r - 1][:, hist[-r]] - kern[r - 1] @ cpf.p
    out = np.zeros_like(raw)
    sup = cpf.p > 0.0
    out[sup] = np.clip(raw[sup], cpf.clamp_eps, 1.0 - cpf.clamp_eps)
    return out / out.sum()


@dataclass(frozen=True)
class GenerationInfo:
    """Reproducibility metadata for one generated sequence."""

    seed: int
    order: int
    burn_in: int
    length: int
    clamp_events: int
    rng_id: str = RNG_ID


def _iid_sample(rng, p: np.ndarray, count: int) -> np.ndarray:
    cdf = np.cumsum(p)
    draws = np.searchsorted(cdf, rng.random(count), side="right")
    return np.minimum(draws, p.size - 1).astype(np.uint8)


def generate(
    cpf: AdditiveCpf,
    length: int,
    seed: int,
    alphabet: Alphabet | None = None,
    burn_in: int | None = None,
) -> tuple[SymbolSequence, GenerationInfo]:
    """Sample a sequence of `length` symbols from an additive chain.

    The first N symbols are drawn independently from p, a burn-in stretch
    (default 10 N) is generated and discarded, and the next `length`
    symbols are returned. Deterministic for a fixed seed.
    """
    if length < 1:
        raise InvalidLength("generation length must be >= 1")
    if alphabet is None:
        alphabet = default_alphabet(cpf.m)
    if alphabet.m != cpf.m:
        raise ValueError("alphabet size does not match the chain")
    rng = np.random.Generator(np.random.Philox(seed))
    n = cpf.order
    if burn_in is None:
        burn_in = 10 * n

    if cpf.memory is None or cpf.memory.is_null():
        data = _iid_sample(rng, cpf.p, n + burn_in + length)
        info = GenerationInfo(seed, n, burn_in, length, 0)
        return SymbolSequence(data[-length:], alphabet), info

    total = n + burn_in + length
    uniforms = rng.random(total).tolist()
    data = _iid_sample(rng, cpf.p, n).tolist()
    kern = cpf.memory.kernel
    drift = kern @ cpf.p  # constant part; kernel column minus this per lag
    eps = cpf.clamp_eps
    one_m_eps = 1.0 - eps
    clamps = 0

    if cpf.m == 2 and cpf.p[0] > 0.0 and cpf.p[1] > 0.0:
        # scalar loop: only P(1) is tracked, P(0) = 1 - P(1)
        g = [[float(kern[r][1, s] - drift[r][1]) for s in (0, 1)] for r in range(n)]
        p1 = float(cpf.p[1])
        for i in range(n, total):
            x = p1
            for r in range(n):
                x += g[r][data[i - 1 - r]]
            if x < eps:
                x = eps
                clamps += 1
            elif x > one_m_eps:
                x = one_m_eps
                clamps += 1
            data.append(1 if uniforms[i] >= 1.0 - x else 0)
    else:
        cols = [
            [(kern[r][:, s] - drift[r]).tolist() for s in range(cpf.m)]
            for r in range(n)
        ]
        base = cpf.p.tolist()
        sup = [k for k in range(cpf.m) if cpf.p[k] > 0.0]
        for i in range(n, total):
            acc = base[:]
            for r in range(n):
                c = cols[r][data[i - 1 - r]]
                for k in sup:
                    acc[k] += c[k]
            tot = 0.0
            stepped = False
            for k in sup:
                v = acc[k]
                if v < eps:
                    v = eps
                    acc[k] = v
                    stepped = True
                elif v > one_m_eps:
                    v = one_m_eps
                    acc[k] = v
                    stepped = True
                tot += v
            if stepped:
                clamps += 1
            t = uniforms[i] * tot
            run = 0.0
            choice = sup[-1]
            for k in sup:
                run += acc[k]
                if t < run:
                    choice = k
                    break
            data.append(choice)

    seq = SymbolSequence(np.asarray(data[-length:], dtype=np.uint8), alphabet)
    return seq, GenerationInfo(seed, n, burn_in, length, clamps)


@dataclass(frozen=True)
class EmpiricalCpf:
    """Conditional distributions counted from a sequence, keyed by context."""

    order: int
    m: int
    table: dict = field(repr=False)  # bytes(context) -> count vector

    def _key(self, context) -> bytes:
        ctx = np.asarray(context, dtype=np.uint8)
        if ctx.size != self.order:
            raise InvalidLength(f"context must have exactly {self.order} symbols")
        return ctx.tobytes()

    def counts(self, context) -> np.ndarray | None:
        return self.table.get(self._key(context))

    def query(self, context) -> np.ndarray | None:
        """Conditional distribution after `context`, or None if never observed."""
        c = self.counts(context)
        if c is None:
            return None
        return c / c.sum()

    def contexts(self):
        for key, counts in self.table.items():
            yield np.frombuffer(key, dtype=np.uint8), counts


def empirical_cpf(seq: SymbolSequence, order: int) -> EmpiricalCpf:
    """Count next-symbol distributions for every observed length-`order` context."""
    if order < 1 or order >= seq.M:
        raise InvalidLength(f"order={order} needs 1 <= order < M={seq.M}")
    m = seq.m
    data = seq.data
    table: dict[bytes, np.ndarray] = {}
    if codes_fit(m, order + 1):
        u_codes, counts = np.unique(sliding_codes(data, m, order + 1), return_counts=True)
        ctx_codes = u_codes // m
        nxt = (u_codes % m).astype(np.int64)
        u_ctx, inv = np.unique(ctx_codes, return_inverse=True)
        matrix = np.zeros((u_ctx.size, m), dtype=np.int64)
        matrix[inv, nxt] = counts
        digits = np.empty((u_ctx.size, order), dtype=np.uint8)
        rem = u_ctx.copy()
        for j in range(order - 1, -1, -1):
            digits[:, j] = rem % m
            rem //= m
        for row, key in enumerate(digits):
            table[key.tobytes()] = matrix[row]
    else:
        raw = data.tobytes()
        for i in range(seq.M - order):
            key = raw[i : i + order]
            row = table.get(key)
            if row is None:
                row = np.zeros(m, dtype=np.int64)
                table[key] = row
            row[data[i + order]] += 1
    return EmpiricalCpf(order, m, table)


def conditional_entropy(seq: SymbolSequence, cpf: EmpiricalCpf, L: int) -> float:
    """Average next-symbol entropy over length-L contexts, in bits.

    Context weights use the prefix windows (the M - L windows that have a
    following symbol), so the result is exactly the difference of block
    entropies counted over that same window set.
    """
    if L < 1 or L > cpf.order:
        raise InvalidLength(f"L={L} outside 1..cpf order={cpf.order}")
    if L != cpf.order:
        cpf = empirical_cpf(seq, L)
    rows = np.array([c for _, c in cpf.contexts()], dtype=float)
    totals = rows.sum(axis=1)
    w = totals.sum()
    probs = rows / totals[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(probs > 0.0, np.log2(probs, where=probs > 0.0), 0.0)
    per_ctx = -(probs * logs).sum(axis=1)
    return float((totals / w) @ per_ctx)
