"""Non-neural session-based recommenders and a reproducible evaluation harness."""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    ColumnSpec, Event, Session, SessionSet, from_sequences, load_event_log, sessionize,
)
from .preprocess import SplitSpec, TrainTestSplit  # noqa: E402

__all__ = ["ColumnSpec", "Event", "Session", "SessionSet", "SplitSpec", "TrainTestSplit",
           "from_sequences", "load_event_log", "sessionize", "__version__"]
