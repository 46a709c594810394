"""Exception types raised across the package."""


class SbrError(Exception):
    """Base class for all errors raised by sbrbench."""


class ParseError(SbrError, ValueError):
    """A data row of an event log could not be parsed."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class EmptyDatasetError(SbrError):
    """An operation produced (or received) a dataset with no sessions."""


class SplitError(SbrError):
    """The data cannot be sliced or split as requested."""


class SearchError(SbrError):
    """Every trial of a hyperparameter search failed."""

    def __init__(self, causes):
        self.causes = list(causes)
        lines = "; ".join(f"trial {i}: {c}" for i, c in self.causes)
        super().__init__(f"all {len(self.causes)} trials failed ({lines})")


class StageError(SbrError):
    """An experiment stage failed; ``stage`` names the stage."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
