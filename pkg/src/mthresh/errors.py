"""Exception types raised by the thresholding toolkit."""


class ThresholdingError(Exception):
    """Base class for algorithmic failures (recorded, not fatal, in bench runs)."""


class EmptyImage(ThresholdingError, ValueError):
    pass


class EmptyThresholdSet(ThresholdingError, ValueError):
    pass


class InvalidPartitionCount(ThresholdingError, ValueError):
    pass


class InsufficientCandidates(ThresholdingError):
    """Fewer AMTIS candidate levels than requested thresholds."""

    def __init__(self, available, requested):
        self.available = available
        self.requested = requested
        super().__init__(
            f"{available} candidate level(s) available, {requested} threshold(s) requested"
        )


class DegenerateHistogram(ThresholdingError, ValueError):
    """Too few nonempty bins to place the requested number of thresholds."""


class UndefinedObjective(ThresholdingError, ValueError):
    """Cross-entropy evaluated with a class of zero mass."""


class DimensionMismatch(ValueError):
    pass


class ImageTooSmall(ValueError):
    pass


class EmptyCorpus(ValueError):
    pass
