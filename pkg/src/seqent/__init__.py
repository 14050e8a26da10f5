"""Entropy of long-range weakly correlated symbolic sequences.

The library estimates symbolic pair correlations of a finite sequence,
converts them into a differential-entropy curve with an optional
finite-length fluctuation correction, cross-checks against block-entropy
likelihood estimates, and generates surrogate additive Markov chains
with prescribed correlations.
"""

__version__ = "0.1.0"

from .core import (
    Alphabet,
    SymbolSequence,
    alphabet_from_sequence,
    default_alphabet,
    encode,
    symbol_probabilities,
)
from .correlation import (
    CorrelationSeries,
    NormalizedSeries,
    NumericMapping,
    binary_normalized_correlator,
    correlation_from_binary_target,
    correlation_series,
    correlation_series_fast,
    normalize,
    numeric_correlator,
    weak_correlation_diagnostic,
)
from .entropy import (
    BlockEntropyCurve,
    EntropyCurve,
    LengthReport,
    binary_entropy_curve,
    block_entropy_curve,
    correlation_entropy_curve,
    correlation_length,
    h0,
    stationarity_length,
    validity_limit,
)
from .errors import (
    DegenerateCorrelations,
    EmptyInput,
    InvalidLag,
    InvalidLength,
    InvalidPartition,
    MalformedFasta,
    SeqentError,
    UnknownSymbol,
    WeakCorrelationExceeded,
)
from .ingest import (
    BINARY,
    DNA,
    TEXT27,
    CorpusStats,
    binary_map,
    coarse_grain_text,
    parse_fasta,
    read_raw_symbols,
)
from .markov import (
    AdditiveCpf,
    EmpiricalCpf,
    GenerationInfo,
    MemoryFunction,
    binary_memory_from_scalar,
    binary_memory_from_target,
    conditional_entropy,
    cpf_eval,
    empirical_cpf,
    generate,
    memory_function_exact,
    memory_function_series,
    memory_residual,
)

__all__ = [
    "__version__",
    "Alphabet", "SymbolSequence", "alphabet_from_sequence", "default_alphabet",
    "encode", "symbol_probabilities",
    "CorrelationSeries", "NormalizedSeries", "NumericMapping",
    "binary_normalized_correlator", "correlation_from_binary_target",
    "correlation_series", "correlation_series_fast", "normalize",
    "numeric_correlator", "weak_correlation_diagnostic",
    "BlockEntropyCurve", "EntropyCurve", "LengthReport",
    "binary_entropy_curve", "block_entropy_curve", "correlation_entropy_curve",
    "correlation_length", "h0", "stationarity_length", "validity_limit",
    "DegenerateCorrelations", "EmptyInput", "InvalidLag", "InvalidLength",
    "InvalidPartition", "MalformedFasta", "SeqentError", "UnknownSymbol",
    "WeakCorrelationExceeded",
    "BINARY", "DNA", "TEXT27", "CorpusStats",
    "binary_map", "coarse_grain_text", "parse_fasta", "read_raw_symbols",
    "AdditiveCpf", "EmpiricalCpf", "GenerationInfo", "MemoryFunction",
    "binary_memory_from_scalar", "binary_memory_from_target",
    "conditional_entropy", "cpf_eval", "empirical_cpf", "generate",
    "memory_function_exact", "memory_function_series", "memory_residual",
]
