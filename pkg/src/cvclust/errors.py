"""Exception and warning types shared across the package."""


class DataFormatError(ValueError):
    """Raised when an input file or array violates the expected format."""


class UndefinedScoreError(ValueError):
    """Raised when a score has no defined value (e.g. the coarse-graining
    uncertainty ratio of a single-cluster partition, which is 0/0)."""


class UndersizedClusterError(ValueError):
    """Raised when a cluster is too small for the requested neighbor rank."""


class CandidatesExhaustedWarning(UserWarning):
    """Emitted when multiway refinement runs out of candidate partitions
    before reaching the requested cluster count."""
