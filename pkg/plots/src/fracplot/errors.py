"""Error types for the figure pipeline."""


class PlotError(Exception):
    """Input or rendering problem the caller should report, not a bug."""


class HeaderMismatchError(PlotError):
    """CSV header differs from the documented interface; names the columns."""

    def __init__(self, message: str, missing=(), unexpected=()):
        super().__init__(message)
        self.missing = tuple(missing)
        self.unexpected = tuple(unexpected)
