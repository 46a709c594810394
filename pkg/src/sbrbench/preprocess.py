"""Filtering, timestamp synthesis, temporal slicing and train/test splits."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import SECONDS_PER_DAY, Session, SessionSet, day_of
from .errors import EmptyDatasetError, SplitError


@dataclass(frozen=True)
class SplitSpec:
    n_slices: int = 5
    test_days: int = 1
    min_item_support: int = 5
    min_session_length: int = 2
    iterative_filter: bool = False

    def __post_init__(self):
        if self.n_slices < 1:
            raise ValueError("n_slices must be >= 1")
        if self.test_days < 1:
            raise ValueError("test_days must be >= 1")
        if self.min_item_support < 1:
            raise ValueError("min_item_support must be >= 1")
        if self.min_session_length < 2:
            raise ValueError("min_session_length must be >= 2")

    @property
    def required_days(self) -> int:
        return self.n_slices * (self.test_days + 1)


@dataclass(frozen=True)
class TrainTestSplit:
    train: SessionSet
    test: SessionSet
    boundary_time: int | float


def _filter_once(data: SessionSet, min_support: int, min_length: int) -> SessionSet:
    counts = Counter()
    for s in data:
        counts.update(s.items)
    keep = {i for i, c in counts.items() if c >= min_support}
    sessions = []
    for s in data:
        idx = [p for p, i in enumerate(s.items) if i in keep]
        if len(idx) < min_length:
            continue
        if len(idx) == len(s):
            sessions.append(s)
        else:
            sessions.append(Session(s.session_id, tuple(s.items[p] for p in idx),
                                    tuple(s.times[p] for p in idx)))
    return SessionSet(sessions)


def filter_dataset(data: SessionSet, spec: SplitSpec) -> SessionSet:
    """Drop rare items (by event count), then sessions that became too short.

    With ``spec.iterative_filter`` the two passes repeat until nothing changes.
    """
    out = _filter_once(data, spec.min_item_support, spec.min_session_length)
    if spec.iterative_filter:
        while True:
            nxt = _filter_once(out, spec.min_item_support, spec.min_session_length)
            if nxt == out:
                break
            out = nxt
    if not len(out):
        raise EmptyDatasetError("empty after filtering")
    return out


def synthesize_timestamps(data: SessionSet, seed: int, span_days: int,
                          spec: SplitSpec | None = None) -> SessionSet:
    """Assign random session start times for logs that have none.

    Starts are uniform integers in ``[0, span_days)`` days; events inside a
    session are one second apart.
    """
    if span_days < 1:
        raise SplitError("span_days must be >= 1")
    if spec is not None and span_days < spec.required_days:
        raise SplitError(f"span of {span_days} days too small; slicing needs {spec.required_days}")
    rng = np.random.default_rng(seed)
    # draw in the input's stable session order so the result depends only on seed + content
    ordered = sorted(data.sessions, key=lambda s: s.session_id)
    starts = rng.integers(0, span_days * SECONDS_PER_DAY, size=len(ordered))
    sessions = [
        Session(s.session_id, s.items, tuple(int(t0) + p for p in range(len(s))))
        for s, t0 in zip(ordered, starts)
    ]
    return SessionSet(sessions)


def make_slices(data: SessionSet, spec: SplitSpec) -> list[SessionSet]:
    """Cut the dataset into ``n_slices`` equal calendar windows by session end time."""
    if spec.n_slices == 1:
        return [data]
    if data.span_days < spec.required_days:
        raise SplitError(f"dataset spans {data.span_days} days; "
                         f"{spec.n_slices} slices with {spec.test_days} test days need {spec.required_days}")
    origin = day_of(data.first_time) * SECONDS_PER_DAY
    total = data.span_days * SECONDS_PER_DAY
    n = spec.n_slices
    buckets: list[list[Session]] = [[] for _ in range(n)]
    for s in data:
        idx = int((s.end_time - origin) * n // total)
        buckets[min(idx, n - 1)].append(s)
    return [SessionSet(b) for b in buckets]


def split_by_boundary(data: SessionSet, boundary) -> TrainTestSplit:
    train = [s for s in data if s.end_time < boundary]
    test = [s for s in data if s.end_time >= boundary]
    if not train:
        raise SplitError("empty train set")
    if not test:
        raise SplitError("empty test set")
    return TrainTestSplit(SessionSet(train), SessionSet(test), boundary)


def split_slice(data: SessionSet, spec: SplitSpec) -> TrainTestSplit:
    """Use the last ``test_days`` calendar days of the slice as the test set."""
    return split_last_days(data, spec.test_days)


def split_last_days(data: SessionSet, test_days: int) -> TrainTestSplit:
    if not len(data):
        raise SplitError("cannot split an empty slice")
    if data.span_days <= test_days:
        raise SplitError(f"slice spans {data.span_days} days, not more than test_days={test_days}")
    boundary = (day_of(data.last_time) + 1 - test_days) * SECONDS_PER_DAY
    return split_by_boundary(data, boundary)


def restrict_to_items(data: SessionSet, vocabulary, min_session_length: int = 2) -> SessionSet:
    """Remove events whose item is not in ``vocabulary``; drop short sessions."""
    sessions = []
    for s in data:
        idx = [p for p, i in enumerate(s.items) if i in vocabulary]
        if len(idx) < min_session_length:
            continue
        if len(idx) == len(s):
            sessions.append(s)
        else:
            sessions.append(Session(s.session_id, tuple(s.items[p] for p in idx),
                                    tuple(s.times[p] for p in idx)))
    return SessionSet(sessions)


def restrict_test_to_known_items(split: TrainTestSplit, min_session_length: int = 2) -> TrainTestSplit:
    test = restrict_to_items(split.test, split.train.vocabulary, min_session_length)
    if not len(test):
        raise SplitError("empty test set after restricting to known items")
    return TrainTestSplit(split.train, test, split.boundary_time)
