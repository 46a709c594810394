"""Event logs, sessions and the in-memory session dataset.

Timestamps are seconds since the epoch. Integral values stay ``int``;
fractional values are truncated to whole milliseconds.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ParseError

SECONDS_PER_DAY = 86_400


@dataclass(frozen=True, slots=True)
class Event:
    session_id: int
    item_id: int
    timestamp: int | float

    def __post_init__(self):
        if self.session_id < 0 or self.item_id < 0:
            raise ValueError(f"identifiers must be non-negative: {self}")
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be non-negative: {self}")


@dataclass(frozen=True, slots=True)
class Session:
    """One session: parallel tuples of items and timestamps in event order."""

    session_id: int
    items: tuple[int, ...]
    times: tuple[int | float, ...]

    def __len__(self):
        return len(self.items)

    @property
    def start_time(self):
        return min(self.times)

    @property
    def end_time(self):
        return max(self.times)

    @property
    def events(self) -> tuple[Event, ...]:
        return tuple(Event(self.session_id, i, t) for i, t in zip(self.items, self.times))

    def prefix(self, n: int) -> "Session":
        """The session truncated to its first ``n`` events."""
        return Session(self.session_id, self.items[:n], self.times[:n])


def day_of(timestamp) -> int:
    """Calendar day index (UTC) of a timestamp."""
    return int(timestamp // SECONDS_PER_DAY)


class SessionSet:
    """Immutable collection of sessions ordered by end time.

    Sessions sharing an end time are ordered by ``session_id`` so that the
    ordering is a pure function of the session contents.
    """

    __slots__ = ("sessions", "vocabulary", "_first_time", "_last_time")

    def __init__(self, sessions: Iterable[Session] = ()):
        ordered = sorted(sessions, key=lambda s: (s.end_time, s.session_id))
        self.sessions: tuple[Session, ...] = tuple(ordered)
        vocab = set()
        for s in self.sessions:
            vocab.update(s.items)
        self.vocabulary: frozenset[int] = frozenset(vocab)
        if self.sessions:
            self._first_time = min(s.start_time for s in self.sessions)
            self._last_time = self.sessions[-1].end_time
        else:
            self._first_time = self._last_time = None

    def __len__(self):
        return len(self.sessions)

    def __iter__(self) -> Iterator[Session]:
        return iter(self.sessions)

    def __getitem__(self, idx):
        return self.sessions[idx]

    def __eq__(self, other):
        if not isinstance(other, SessionSet):
            return NotImplemented
        return self.sessions == other.sessions

    def __hash__(self):
        return hash(self.sessions)

    def __repr__(self):
        return f"SessionSet(sessions={len(self)}, events={self.n_events}, items={len(self.vocabulary)})"

    @property
    def n_events(self) -> int:
        return sum(len(s) for s in self.sessions)

    @property
    def first_time(self):
        return self._first_time

    @property
    def last_time(self):
        return self._last_time

    @property
    def span_days(self) -> int:
        """Number of calendar days from the first event to the last one, inclusive."""
        if not self.sessions:
            return 0
        return day_of(self._last_time) - day_of(self._first_time) + 1

    def stats(self) -> dict:
        """Dataset characteristics: actions, sessions, items, days."""
        return {
            "actions": self.n_events,
            "sessions": len(self),
            "items": len(self.vocabulary),
            "days": self.span_days,
        }


@dataclass(frozen=True)
class ColumnSpec:
    """Layout of a delimiter-separated event log.

    Column entries are header names when ``header`` is true, otherwise
    zero-based column indices.
    """

    session: str | int = "SessionId"
    item: str | int = "ItemId"
    time: str | int = "Time"
    delimiter: str = ","
    header: bool = True


def _parse_int(value: str) -> int:
    return int(value.strip())


def _parse_time(value: str) -> int | float:
    value = value.strip()
    try:
        return int(value)
    except ValueError:
        pass
    t = float(value)
    if not math.isfinite(t):
        raise ValueError(f"non-finite timestamp {value!r}")
    millis = math.floor(t * 1000)
    if millis % 1000 == 0:
        return millis // 1000
    return millis / 1000


def load_event_log(path, columns: ColumnSpec = ColumnSpec()) -> list[Event]:
    """Read one event per data row, in file order.

    Raises ``FileNotFoundError`` for a missing file and :class:`ParseError`
    (with the 1-based line number) for the first malformed row.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"event log not found: {path}")
    events = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=columns.delimiter)
        if columns.header:
            try:
                head = next(reader)
            except StopIteration:
                return events
            try:
                cols = [head.index(c) for c in (columns.session, columns.item, columns.time)]
            except ValueError as exc:
                raise ParseError(path, 1, f"missing column in header {head}: {exc}") from None
        else:
            cols = [int(columns.session), int(columns.item), int(columns.time)]
        need = max(cols) + 1
        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < need:
                raise ParseError(path, line, f"expected at least {need} fields, got {len(row)}")
            try:
                ev = Event(_parse_int(row[cols[0]]), _parse_int(row[cols[1]]), _parse_time(row[cols[2]]))
            except ValueError as exc:
                raise ParseError(path, line, str(exc)) from None
            events.append(ev)
    return events


def sessionize(events: Iterable[Event]) -> SessionSet:
    """Group events into sessions sorted by time (stable for ties)."""
    grouped: dict[int, list[Event]] = defaultdict(list)
    for ev in events:
        grouped[ev.session_id].append(ev)
    sessions = []
    for sid, evs in grouped.items():
        evs.sort(key=lambda e: e.timestamp)
        sessions.append(Session(sid, tuple(e.item_id for e in evs), tuple(e.timestamp for e in evs)))
    return SessionSet(sessions)


@dataclass(frozen=True)
class IdMap:
    """Original-to-dense identifier mapping; dense ids follow original sort order."""

    original: tuple[int, ...]

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "IdMap":
        return cls(tuple(sorted(set(values))))

    def __len__(self):
        return len(self.original)

    def encoder(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.original)}

    def write(self, path, name: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"original_{name}", f"dense_{name}"])
            for dense, orig in enumerate(self.original):
                w.writerow([orig, dense])


def encode_ids(events: Sequence[Event]) -> tuple[list[Event], IdMap, IdMap]:
    """Remap session and item identifiers to dense integers.

    Returns the remapped events plus the session and item maps.
    """
    smap = IdMap.from_values(e.session_id for e in events)
    imap = IdMap.from_values(e.item_id for e in events)
    senc, ienc = smap.encoder(), imap.encoder()
    out = [Event(senc[e.session_id], ienc[e.item_id], e.timestamp) for e in events]
    return out, smap, imap


def from_sequences(sequences: Sequence[Sequence[int]], start: int = 0, step: int = 1,
                   gap: int = SECONDS_PER_DAY) -> SessionSet:
    """Build a SessionSet from bare item lists (test and demo helper).

    Session ``n`` gets id ``n + 1`` and starts at ``start + n * gap``;
    events inside a session are ``step`` seconds apart.
    """
    sessions = []
    for n, seq in enumerate(sequences):
        t0 = start + n * gap
        sessions.append(Session(n + 1, tuple(seq), tuple(t0 + step * p for p in range(len(seq)))))
    return SessionSet(sessions)
