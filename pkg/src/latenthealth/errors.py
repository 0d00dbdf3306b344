"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions do not agree with what an operation expects."""


class DataError(ValueError):
    """Input data is malformed, empty, or inconsistent with its labels."""


class ContaminationError(DataError):
    """Severe-fault or unlabeled windows were passed to a training routine."""


class ArchitectureError(ValueError):
    """A checkpoint or parameter set does not match the expected network layout."""


class DegenerateThresholdError(ValueError):
    """Fitted thresholds do not order normal below degraded."""
