"""Incremental-reveal evaluation and ranking, coverage and popularity metrics.

Conventions: the relevance set for precision, recall and MAP is the set of
distinct items still to come in the session; precision divides by the
cut-off even when the list is shorter; average precision divides by
``min(cutoff, |remaining|)``; popularity averages over list slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algorithms.ranking import Recommendation
from .algorithms.stats import ItemStats
from .corpus import Session, SessionSet
from .errors import EmptyDatasetError

DEFAULT_CUTOFFS = (5, 10, 20)
ACCURACY_METRICS = ("hr", "mrr", "precision", "recall", "map")
ALL_METRICS = ACCURACY_METRICS + ("cov", "pop")


@dataclass(frozen=True)
class PredictionEvent:
    prefix: Session
    next_item: int
    remaining_items: frozenset


@dataclass(frozen=True)
class EventScores:
    hit: float
    rr: float
    precision: float
    recall: float
    ap: float


def enumerate_events(test: SessionSet) -> list[PredictionEvent]:
    """One prediction event per revealed prefix of every test session."""
    events = []
    for s in test:
        for n in range(1, len(s)):
            events.append(PredictionEvent(s.prefix(n), s.items[n], frozenset(s.items[n:])))
    return events


def score_event(rec: Recommendation | Sequence[int], ev: PredictionEvent, cutoff: int) -> EventScores:
    items = rec.items if isinstance(rec, Recommendation) else tuple(rec)
    top = items[:cutoff]
    hit = rr = 0.0
    hits = 0
    ap_sum = 0.0
    for rank, it in enumerate(top, 1):
        if it == ev.next_item and not hit:
            hit, rr = 1.0, 1.0 / rank
        if it in ev.remaining_items:
            hits += 1
            ap_sum += hits / rank
    n_rel = len(ev.remaining_items)
    return EventScores(
        hit=hit,
        rr=rr,
        precision=hits / cutoff,
        recall=hits / n_rel,
        ap=ap_sum / min(cutoff, n_rel),
    )


@dataclass
class MetricsReport:
    """Mean metrics per cut-off; ``values[metric][cutoff]``."""

    cutoffs: tuple[int, ...]
    values: dict[str, dict[int, float]]
    n_events: int
    timing: dict = field(default_factory=dict)

    def __getitem__(self, key):
        metric, cutoff = key
        return self.values[metric][cutoff]

    def rows(self):
        for c in self.cutoffs:
            yield c, {m: self.values[m][c] for m in ALL_METRICS}


class _Accumulator:
    """Per-cutoff running sums; merged in a fixed order for reproducibility."""

    def __init__(self, cutoffs):
        self.cutoffs = tuple(cutoffs)
        self.sums = {c: [0.0] * 5 for c in self.cutoffs}
        self.emitted = {c: set() for c in self.cutoffs}
        self.pop_sum = {c: 0.0 for c in self.cutoffs}
        self.slots = {c: 0 for c in self.cutoffs}
        self.n = 0

    def add(self, rec: Recommendation, ev: PredictionEvent, stats: ItemStats | None):
        self.n += 1
        pops = [stats.popularity_of(i) if stats is not None else 0.0 for i in rec.items]
        for c in self.cutoffs:
            sc = score_event(rec, ev, c)
            acc = self.sums[c]
            acc[0] += sc.hit
            acc[1] += sc.rr
            acc[2] += sc.precision
            acc[3] += sc.recall
            acc[4] += sc.ap
            top = rec.items[:c]
            self.emitted[c].update(top)
            self.pop_sum[c] += sum(pops[:c])
            self.slots[c] += len(top)

    def report(self, catalog_size: int) -> MetricsReport:
        values = {m: {} for m in ALL_METRICS}
        for c in self.cutoffs:
            for m, total in zip(ACCURACY_METRICS, self.sums[c]):
                values[m][c] = total / self.n
            values["cov"][c] = len(self.emitted[c]) / catalog_size if catalog_size else 0.0
            values["pop"][c] = self.pop_sum[c] / self.slots[c] if self.slots[c] else 0.0
        return MetricsReport(self.cutoffs, values, self.n)


def evaluate(model, test: SessionSet, cutoffs: Iterable[int] = DEFAULT_CUTOFFS,
             catalog=None, stats: ItemStats | None = None, restrict_to=None,
             events: Sequence[PredictionEvent] | None = None) -> MetricsReport:
    """Replay every test session one event at a time and average the metrics.

    ``catalog`` is the training vocabulary used as the coverage denominator;
    ``restrict_to`` optionally limits which items the model may emit.
    """
    cutoffs = tuple(sorted(set(cutoffs)))
    if events is None:
        events = enumerate_events(test)
    if not events:
        raise EmptyDatasetError("no prediction events in the test set")
    k = max(cutoffs)
    acc = _Accumulator(cutoffs)
    for ev in events:
        acc.add(model.predict(ev.prefix, k, restrict_to), ev, stats)
    return acc.report(len(catalog) if catalog is not None else 0)
