"""Exception hierarchy shared across the package."""


class RmtlabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(RmtlabError):
    """Operator/state dimensions disagree."""


class NotUnitary(RmtlabError):
    """A matrix required to be unitary fails the residual check."""


class ConvergenceFailure(RmtlabError):
    """The dense eigensolver failed to converge."""


class IndexOutOfRange(RmtlabError):
    """A row/column/qubit index is outside the valid range."""


class BadIndexOrder(RmtlabError):
    """Elementary rotation indices must satisfy i < j."""


class TooFewQubits(RmtlabError):
    """Nearest-neighbor coupling needs at least two qubits."""


class OddDimension(RmtlabError):
    """The baker map needs an even Hilbert-space dimension."""


class SingleQubit(RmtlabError):
    """Multipartite entanglement is undefined for a single qubit."""


class NotPowerOfTwo(RmtlabError):
    """Dimension is not 2**n for integer n."""


class EmptySample(RmtlabError):
    """An empirical distribution with no samples was supplied."""


class MissingReferenceKind(RmtlabError):
    """The reference library does not contain the requested kind."""


class ValidationError(RmtlabError):
    """Bad CLI/experiment configuration."""
