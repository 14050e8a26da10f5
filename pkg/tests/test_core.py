import numpy as np
import pytest

from seqent import (
    Alphabet,
    EmptyInput,
    SymbolSequence,
    UnknownSymbol,
    alphabet_from_sequence,
    encode,
    symbol_probabilities,
)


def test_alphabet_first_appearance_order():
    a = alphabet_from_sequence("abca")
    assert a.symbols == ("a", "b", "c")
    assert a.m == 3


def test_alphabet_single_symbol():
    assert alphabet_from_sequence("aaaa").m == 1


def test_alphabet_empty_stream():
    with pytest.raises(EmptyInput):
        alphabet_from_sequence("")


def test_alphabet_rejects_duplicates_and_oversize():
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError):
        Alphabet(tuple(f"s{i}" for i in range(257)))


def test_alphabet_index_roundtrip():
    a = Alphabet(("x", "y", "z"))
    for i, s in enumerate(a.symbols):
        assert a.index(s) == i
        assert a.symbol(i) == s


def test_encode_basic():
    a = alphabet_from_sequence("ab")
    seq = encode("aba", a)
    assert seq.data.tolist() == [0, 1, 0]
    assert seq.M == 3


def test_encode_empty_is_valid():
    seq = encode("", alphabet_from_sequence("a"))
    assert seq.M == 0


def test_encode_unknown_symbol_position():
    with pytest.raises(UnknownSymbol) as err:
        encode("abz", alphabet_from_sequence("ab"))
    assert err.value.position == 2
    assert err.value.token == "z"


def test_encode_decode_roundtrip():
    rng = np.random.default_rng(11)
    a = alphabet_from_sequence("abcd")
    for _ in range(20):
        tokens = [a.symbols[i] for i in rng.integers(0, 4, rng.integers(1, 50))]
        assert encode(tokens, a).decode() == tokens


def test_sequence_is_immutable():
    seq = encode("aba", alphabet_from_sequence("ab"))
    with pytest.raises(ValueError):
        seq.data[0] = 1


def test_probabilities_examples():
    a2 = alphabet_from_sequence("ab")
    np.testing.assert_allclose(
        symbol_probabilities(SymbolSequence(np.array([0, 1, 0, 1], np.uint8), a2)),
        [0.5, 0.5],
    )
    np.testing.assert_allclose(
        symbol_probabilities(SymbolSequence(np.array([0, 0, 1], np.uint8), a2)),
        [2 / 3, 1 / 3],
    )
    a1 = alphabet_from_sequence("a")
    np.testing.assert_allclose(
        symbol_probabilities(SymbolSequence(np.array([0, 0, 0, 0], np.uint8), a1)),
        [1.0],
    )


def test_probabilities_empty():
    with pytest.raises(EmptyInput):
        symbol_probabilities(encode("", alphabet_from_sequence("a")))


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(5)
    for m in (2, 5, 30):
        data = rng.integers(0, m, 997).astype(np.uint8)
        seq = SymbolSequence(data, Alphabet(tuple(f"s{i}" for i in range(m))))
        assert abs(symbol_probabilities(seq).sum() - 1.0) < 1e-12


def test_probabilities_permutation_equivariant():
    rng = np.random.default_rng(7)
    tokens = [("a", "b", "c")[i] for i in rng.integers(0, 3, 500)]
    a = Alphabet(("a", "b", "c"))
    b = Alphabet(("c", "a", "b"))
    pa = symbol_probabilities(encode(tokens, a))
    pb = symbol_probabilities(encode(tokens, b))
    for sym in "abc":
        assert pa[a.index(sym)] == pb[b.index(sym)]


def test_zero_count_symbols_allowed_with_explicit_alphabet():
    seq = encode("aaaa", Alphabet(("a", "b")))
    np.testing.assert_allclose(symbol_probabilities(seq), [1.0, 0.0])
