import numpy as np
import pytest

from conftest import prefix_block_entropy_oracle, random_sequence
from seqent import (
    AdditiveCpf,
    DegenerateCorrelations,
    InvalidLength,
    MemoryFunction,
    SymbolSequence,
    binary_memory_from_scalar,
    binary_memory_from_target,
    binary_normalized_correlator,
    conditional_entropy,
    correlation_from_binary_target,
    correlation_series,
    correlation_series_fast,
    cpf_eval,
    empirical_cpf,
    generate,
    memory_function_exact,
    memory_function_series,
    memory_residual,
    normalize,
)
from seqent.core import default_alphabet, symbol_probabilities


def small_random_kernel(rng, m, order, scale):
    """Canonical-gauge kernel with entries O(scale), a valid weak chain."""
    p = np.full(m, 1.0 / m)
    kern = rng.normal(0.0, scale, (order, m, m))
    return MemoryFunction(kern).canonical(p), p


# --- series solution -------------------------------------------------------

def test_series_zero_correlations_give_zero_kernel():
    norm = normalize(correlation_from_binary_target(np.zeros(6), [0.5, 0.5]))
    mem = memory_function_series(norm, 6, 1)
    assert np.all(mem.kernel == 0.0)


def test_series_order1_matches_scalar_binary_form():
    k = np.array([0.06, -0.02, 0.01])
    p = np.array([0.3, 0.7])
    norm = normalize(correlation_from_binary_target(k, p))
    mem = memory_function_series(norm, 3, 1)
    expected = binary_memory_from_scalar(k, p)
    np.testing.assert_allclose(mem.kernel, expected.kernel, atol=1e-14)
    # scalar reduction: row differences recover K(r)
    np.testing.assert_allclose(
        mem.kernel[:, 1, 1] - mem.kernel[:, 1, 0], k, atol=1e-14
    )


def test_series_requires_full_support():
    seq = SymbolSequence(np.zeros(50, np.uint8), default_alphabet(2))
    norm = normalize(correlation_series(seq, 10))
    with pytest.raises(DegenerateCorrelations):
        memory_function_series(norm, 5, 1)


def test_series_order2_converges_cubically():
    # against the exact solve: leading term leaves O(K^2), adding the
    # quadratic term leaves O(K^3)
    k = np.array([0.05, 0.04, 0.03, 0.02])
    p = np.array([0.5, 0.5])
    corr = correlation_from_binary_target(k, p)
    exact = memory_function_exact(corr, 4)
    s1 = memory_function_series(normalize(corr), 4, 1)
    s2 = memory_function_series(normalize(corr), 4, 2)
    err1 = np.abs(s1.kernel - exact.kernel).max()
    err2 = np.abs(s2.kernel - exact.kernel).max()
    assert err2 < err1
    assert err2 <= 10 * 0.05**3


def test_series_order2_multisymbol_against_exact():
    rng = np.random.default_rng(50)
    mem0, p = small_random_kernel(rng, 3, 4, 0.02)
    seq, _ = generate(AdditiveCpf(p, mem0), 400_000, seed=5)
    corr = correlation_series_fast(seq, 20)
    exact = memory_function_exact(corr, 4)
    s2 = memory_function_series(normalize(corr), 4, 2)
    kscale = np.nanmax(np.abs(normalize(corr).values[:4]))
    assert np.abs(s2.kernel - exact.kernel).max() <= 10 * kscale**3


# --- exact solution --------------------------------------------------------

def test_exact_zero_rhs_gives_zero_kernel():
    corr = correlation_from_binary_target(np.zeros(6), [0.5, 0.5])
    mem = memory_function_exact(corr, 6)
    np.testing.assert_allclose(mem.kernel, 0.0, atol=1e-14)


def test_exact_binary_single_lag_reduces_to_k():
    corr = correlation_from_binary_target([0.1], [0.4, 0.6])
    mem = memory_function_exact(corr, 1)
    f_scalar = mem.kernel[0, 1, 1] - mem.kernel[0, 1, 0]
    assert abs(f_scalar - 0.1) < 1e-12


def test_exact_agrees_with_least_squares_oracle():
    # unreduced singular system solved by min-norm lstsq, then both results
    # mapped to the canonical gauge
    rng = np.random.default_rng(51)
    mem0, p = small_random_kernel(rng, 3, 3, 0.02)
    seq, _ = generate(AdditiveCpf(p, mem0), 200_000, seed=9)
    corr = correlation_series(seq, 10)
    order, m = 3, 3
    mem = memory_function_exact(corr, order)

    n = order * m
    a = np.zeros((n, n))
    for r in range(1, order + 1):
        for rp in range(1, order + 1):
            a[(r - 1) * m : r * m, (rp - 1) * m : rp * m] = corr.lag(r - rp)
    kernels = np.zeros((order, m, m))
    for beta in range(m):
        rhs = np.concatenate([corr.matrices[r][:, beta] for r in range(1, order + 1)])
        sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        for r in range(order):
            kernels[r][beta] = sol[r * m : (r + 1) * m]
    oracle = MemoryFunction(kernels).canonical(symbol_probabilities(seq))
    np.testing.assert_allclose(mem.kernel, oracle.kernel, atol=1e-8)


def test_exact_residual_on_measured_chain():
    rng = np.random.default_rng(52)
    mem0, p = small_random_kernel(rng, 3, 4, 0.02)
    seq, _ = generate(AdditiveCpf(p, mem0), 300_000, seed=6)
    corr = correlation_series_fast(seq, 16)
    mem = memory_function_exact(corr, 4)
    assert memory_residual(corr, mem) <= 1e-8


def test_exact_needs_support():
    seq = SymbolSequence(np.zeros(60, np.uint8), default_alphabet(2))
    corr = correlation_series(seq, 10)
    with pytest.raises(DegenerateCorrelations):
        memory_function_exact(corr, 3)


def test_canonical_gauge_invariants():
    rng = np.random.default_rng(53)
    p = np.array([0.2, 0.3, 0.5])
    raw = MemoryFunction(rng.normal(0, 0.1, (4, 3, 3)))
    fixed = raw.canonical(p)
    assert np.abs(fixed.kernel @ p).max() < 1e-15
    again = fixed.canonical(p)
    np.testing.assert_allclose(fixed.kernel, again.kernel, atol=1e-15)


# --- conditional probability evaluation ------------------------------------

def test_cpf_eval_zero_kernel_returns_p():
    p = np.array([0.2, 0.5, 0.3])
    cpf = AdditiveCpf(p, None)
    np.testing.assert_allclose(cpf_eval(cpf, [0, 1, 2]), p, atol=1e-12)


def test_cpf_eval_scalar_binary_substitution():
    mem = binary_memory_from_scalar([0.1], [0.5, 0.5])
    cpf = AdditiveCpf(np.array([0.5, 0.5]), mem)
    out = cpf_eval(cpf, [1])
    assert abs(out[1] - 0.55) < 1e-12
    out0 = cpf_eval(cpf, [0])
    assert abs(out0[1] - 0.45) < 1e-12


def test_cpf_eval_symmetric_form_equals_scalar_oracle():
    rng = np.random.default_rng(54)
    f = rng.normal(0, 0.03, 6)
    p1 = 0.42
    mem = binary_memory_from_scalar(f, [1 - p1, p1])
    cpf = AdditiveCpf(np.array([1 - p1, p1]), mem)
    for _ in range(100):
        hist = rng.integers(0, 2, 6)
        expected = p1 + sum(f[r] * (hist[-1 - r] - p1) for r in range(6))
        got = cpf_eval(cpf, hist)
        assert abs(got[1] - expected) < 1e-12
        assert abs(got.sum() - 1.0) < 1e-12


def test_cpf_eval_truncated_history_uses_available_lags():
    rng = np.random.default_rng(55)
    f = np.array([0.05, 0.04, 0.03, 0.02])
    p1 = 0.5
    mem = binary_memory_from_scalar(f, [0.5, 0.5])
    cpf = AdditiveCpf(np.array([0.5, 0.5]), mem)
    hist = rng.integers(0, 2, 2)  # shorter than the kernel depth
    expected = p1 + sum(f[r] * (hist[-1 - r] - p1) for r in range(2))
    assert abs(cpf_eval(cpf, hist)[1] - expected) < 1e-12


def test_cpf_eval_gauge_invariance():
    rng = np.random.default_rng(56)
    mem0, p = small_random_kernel(rng, 4, 5, 0.03)
    cpf0 = AdditiveCpf(p, mem0)
    shift = rng.normal(0, 0.5, (5, 4))  # arbitrary per-(symbol, lag) constants
    mem1 = MemoryFunction(mem0.kernel + shift[:, :, None])
    cpf1 = AdditiveCpf(p, mem1)
    for _ in range(50):
        hist = rng.integers(0, 4, 5)
        np.testing.assert_allclose(
            cpf_eval(cpf0, hist), cpf_eval(cpf1, hist), atol=1e-12
        )


def test_cpf_eval_clamps_and_stays_a_distribution():
    mem = binary_memory_from_scalar([0.9, 0.9], [0.5, 0.5])  # strong kernel
    cpf = AdditiveCpf(np.array([0.5, 0.5]), mem)
    out = cpf_eval(cpf, [1, 1])
    assert out.min() >= 1e-6 - 1e-15
    assert abs(out.sum() - 1.0) < 1e-12


def test_cpf_eval_keeps_zero_probability_symbols_at_zero():
    p = np.array([0.5, 0.5, 0.0])
    kern = np.zeros((1, 3, 3))
    kern[0, :2, :2] = binary_memory_from_scalar([0.1], [0.5, 0.5]).kernel[0]
    cpf = AdditiveCpf(p, MemoryFunction(kern))
    out = cpf_eval(cpf, [1])
    assert out[2] == 0.0
    assert abs(out.sum() - 1.0) < 1e-12


# --- generation ------------------------------------------------------------

def test_generate_deterministic_per_seed():
    mem = binary_memory_from_scalar([0.05], [0.5, 0.5])
    cpf = AdditiveCpf(np.array([0.5, 0.5]), mem)
    a, info_a = generate(cpf, 5000, seed=3)
    b, info_b = generate(cpf, 5000, seed=3)
    c, _ = generate(cpf, 5000, seed=4)
    assert np.array_equal(a.data, b.data)
    assert info_a == info_b
    assert not np.array_equal(a.data, c.data)


def test_generate_iid_matches_target_probabilities():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    cpf = AdditiveCpf(p, None)
    seq, info = generate(cpf, 200_000, seed=8)
    p_hat = symbol_probabilities(seq)
    se = np.sqrt(p * (1 - p) / seq.M)
    assert np.all(np.abs(p_hat - p) <= 4 * se)
    assert info.clamp_events == 0


def test_generate_single_lag_roundtrip():
    mem = binary_memory_from_target([0.1], [0.5, 0.5])
    seq, _ = generate(AdditiveCpf(np.array([0.5, 0.5]), mem), 200_000, seed=2)
    k = binary_normalized_correlator(correlation_series_fast(seq, 5))
    assert abs(k[0] - 0.1) <= 3 / np.sqrt(seq.M)


def test_generate_counts_clamps_near_boundary():
    # kernel sums to ~1, conditional probabilities regularly hit [0,1]
    mem = binary_memory_from_scalar(np.full(20, 0.05), [0.5, 0.5])
    _, info = generate(AdditiveCpf(np.array([0.5, 0.5]), mem), 20_000, seed=1)
    assert info.clamp_events > 0


def test_generate_roundtrip_weak_targets_binary():
    # prescribed correlator -> leading-order kernel -> chain -> measured
    # correlator, within 3 SE per prescribed lag
    cases = [
        (np.array([0.1]), 21),
        (np.array([0.02, 0.012, 0.008]), 22),
        (0.02 * 0.8 ** np.arange(50), 23),
    ]
    p = np.array([0.5, 0.5])
    M = 1_000_000
    for k_target, seed in cases:
        n = k_target.size
        mem = binary_memory_from_target(k_target, p, method="series")
        seq, _ = generate(AdditiveCpf(p, mem), M, seed=seed)
        k_hat = binary_normalized_correlator(correlation_series_fast(seq, n))
        assert np.all(np.abs(k_hat - k_target) <= 3 / np.sqrt(M))


def test_generate_roundtrip_four_symbols():
    # stage 1: a chain from a small random kernel defines a realisable target;
    # stage 2: its measured correlator drives the leading-order kernel and the
    # regenerated chain must reproduce it within combined statistical error
    rng = np.random.default_rng(57)
    mem0, p = small_random_kernel(rng, 4, 5, 0.012)
    M = 1_000_000
    chain_a, _ = generate(AdditiveCpf(p, mem0), M, seed=31)
    corr_a = correlation_series_fast(chain_a, 5)
    mem1 = memory_function_series(normalize(corr_a), 5, 1)
    chain_b, _ = generate(AdditiveCpf(p, mem1), M, seed=32)
    corr_b = correlation_series_fast(chain_b, 5)
    c0 = corr_a.zero_lag_analytic()
    se = np.sqrt(np.outer(np.diag(c0), np.diag(c0))) / np.abs(c0) / np.sqrt(M)
    diff = np.abs(corr_b.matrices[1:] / c0 - corr_a.matrices[1:] / c0)
    assert np.all(diff <= 3 * np.sqrt(2) * se)


# --- empirical CPF and conditional entropy ---------------------------------

def test_empirical_cpf_alternating():
    seq = SymbolSequence(np.tile([0, 1], 100).astype(np.uint8), default_alphabet(2))
    cpf = empirical_cpf(seq, 1)
    np.testing.assert_allclose(cpf.query([0]), [0.0, 1.0])
    np.testing.assert_allclose(cpf.query([1]), [1.0, 0.0])


def test_empirical_cpf_absent_context():
    seq = SymbolSequence(np.zeros(50, np.uint8), default_alphabet(2))
    cpf = empirical_cpf(seq, 2)
    assert cpf.query([0, 1]) is None
    assert cpf.query([0, 0]) is not None


def test_empirical_cpf_distributions_normalised():
    rng = np.random.default_rng(58)
    seq = random_sequence(rng, 3, 5000)
    cpf = empirical_cpf(seq, 2)
    for ctx, counts in cpf.contexts():
        q = cpf.query(ctx)
        assert abs(q.sum() - 1.0) < 1e-12
        assert counts.sum() > 0


def test_empirical_cpf_known_chain_roundtrip():
    mem = binary_memory_from_target([0.1], [0.5, 0.5])
    seq, _ = generate(AdditiveCpf(np.array([0.5, 0.5]), mem), 300_000, seed=12)
    cpf = empirical_cpf(seq, 1)
    for ctx, expect in (([1], 0.55), ([0], 0.45)):
        n_ctx = cpf.counts(ctx).sum()
        se = np.sqrt(expect * (1 - expect) / n_ctx)
        assert abs(cpf.query(ctx)[1] - expect) <= 3 * se


def test_empirical_cpf_wide_context_fallback_matches_direct_counts():
    # 3^41 overflows 63-bit codes, forcing the hashing path
    rng = np.random.default_rng(59)
    seq = random_sequence(rng, 3, 300)
    order = 40
    cpf = empirical_cpf(seq, order)
    from collections import Counter, defaultdict

    direct = defaultdict(Counter)
    d = seq.data
    for i in range(seq.M - order):
        direct[tuple(d[i : i + order])][int(d[i + order])] += 1
    assert len(direct) == len(cpf.table)
    for ctx, counter in direct.items():
        counts = cpf.counts(list(ctx))
        for sym in range(3):
            assert counts[sym] == counter.get(sym, 0)


def test_empirical_cpf_length_guard():
    seq = random_sequence(np.random.default_rng(0), 2, 10)
    with pytest.raises(InvalidLength):
        empirical_cpf(seq, 10)


def test_conditional_entropy_iid_and_alternating():
    rng = np.random.default_rng(60)
    seq = random_sequence(rng, 2, 100_000)
    h1 = conditional_entropy(seq, empirical_cpf(seq, 1), 1)
    assert abs(h1 - 1.0) < 0.01
    alt = SymbolSequence(np.tile([0, 1], 200).astype(np.uint8), default_alphabet(2))
    assert conditional_entropy(alt, empirical_cpf(alt, 1), 1) == 0.0


def test_conditional_entropy_is_block_difference():
    # chain rule holds exactly when both sides count over the same M-L
    # prefix windows; the packaged block curve uses all M-L+1 windows, so
    # it differs by O(log(M)/M)
    rng = np.random.default_rng(61)
    seq = random_sequence(rng, 2, 10_000)
    cpf6 = empirical_cpf(seq, 6)
    from conftest import block_entropy_oracle

    for L in range(1, 7):
        h_cond = conditional_entropy(seq, cpf6, L)
        h_hi, _ = block_entropy_oracle(seq.data, L + 1)
        h_lo = prefix_block_entropy_oracle(seq.data, L)
        assert abs(h_cond - (h_hi - h_lo)) < 1e-9
        full_lo, _ = block_entropy_oracle(seq.data, L)
        assert abs(h_cond - (h_hi - full_lo)) < 2 * np.log2(seq.M) / seq.M


def test_conditional_entropy_order_guard():
    seq = random_sequence(np.random.default_rng(0), 2, 100)
    cpf = empirical_cpf(seq, 2)
    with pytest.raises(InvalidLength):
        conditional_entropy(seq, cpf, 3)
