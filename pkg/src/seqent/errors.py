"""Exception types shared across the package."""


class SeqentError(Exception):
    """Base class for all seqent errors."""


class EmptyInput(SeqentError):
    """Raised when an operation receives no usable symbols."""


class UnknownSymbol(SeqentError):
    """A token not present in the alphabet was encountered."""

    def __init__(self, position: int, token: str):
        self.position = position
        self.token = token
        super().__init__(f"unknown symbol {token!r} at position {position}")


class InvalidLag(SeqentError):
    """Lag bound outside the range supported by the sequence/series."""


class InvalidLength(SeqentError):
    """Word or history length outside the supported range."""


class InvalidPartition(SeqentError):
    """Binary mapping requested with an empty or full symbol subset."""


class MalformedFasta(SeqentError):
    """Input does not follow the FASTA layout."""


class DegenerateCorrelations(SeqentError):
    """Correlation data too degenerate to solve for a memory kernel."""


class WeakCorrelationExceeded(SeqentError):
    """Requested target correlations are too strong for safe generation."""

    def __init__(self, diagnostic: float, limit: float):
        self.diagnostic = diagnostic
        self.limit = limit
        super().__init__(
            f"weak-correlation diagnostic {diagnostic:.4g} exceeds limit {limit:g}"
        )
