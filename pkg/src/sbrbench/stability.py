"""Day-by-day accuracy with and without retraining, and the relative drop between them.

In ``retraining`` mode day ``i`` is scored by a model fitted on the initial
training data plus days ``1..i-1``; in ``no_retraining`` mode every day
uses the initial model. Both modes score only items known to the initial
training data. The drop is the mean of per-day relative differences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .algorithms import make_model
from .corpus import SessionSet, day_of
from .errors import EmptyDatasetError, SbrError
from .evaluation import MetricsReport, evaluate
from .preprocess import restrict_to_items

MODES = ("retraining", "no_retraining")
STABILITY_METRICS = (("hr", 20), ("mrr", 20))


@dataclass
class StabilityRun:
    mode: str
    reports: list[MetricsReport | None]
    train_sizes: list[int]

    @property
    def empty_days(self) -> list[int]:
        return [i for i, r in enumerate(self.reports) if r is None]

    def series(self, metric: str, cutoff: int = 20) -> list[float | None]:
        return [None if r is None else r[metric, cutoff] for r in self.reports]


@dataclass(frozen=True)
class Drop:
    percent: float
    days_used: int
    days_excluded: int = 0


def split_days(data: SessionSet) -> list[SessionSet]:
    """Calendar days of ``data`` by session end time, oldest first (empty days skipped)."""
    by_day: dict[int, list] = {}
    for s in data:
        by_day.setdefault(day_of(s.end_time), []).append(s)
    return [SessionSet(by_day[d]) for d in sorted(by_day)]


def run_stability(algorithm: str, config: dict | None, initial: SessionSet,
                  days: Sequence[SessionSet], mode: str, cutoffs=(20,),
                  min_session_length: int = 2) -> StabilityRun:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if len(days) < 2:
        raise SbrError("stability analysis needs at least two test days")
    vocab = initial.vocabulary
    train = initial
    model = make_model(algorithm, config).fit(train)
    reports, sizes = [], []
    for i, day in enumerate(days):
        if mode == "retraining" and i > 0:
            model = make_model(algorithm, config).fit(train)
        sizes.append(train.n_events)
        scored = restrict_to_items(day, vocab, min_session_length)
        try:
            reports.append(evaluate(model, scored, cutoffs, vocab, restrict_to=vocab))
        except EmptyDatasetError:
            reports.append(None)
        if mode == "retraining" and i < len(days) - 1:
            train = SessionSet(train.sessions + day.sessions)
    return StabilityRun(mode, reports, sizes)


def relative_drop(retrain: Sequence[float | None], noretrain: Sequence[float | None]) -> Drop:
    """Mean over days of ``(noretrain - retrain) / retrain`` in percent.

    Days missing in either series are skipped; days where the retrained
    value is zero are excluded with a warning and counted.
    """
    if len(retrain) != len(noretrain):
        raise ValueError("series must be aligned on the same days")
    ratios, excluded = [], 0
    for r, n in zip(retrain, noretrain):
        if r is None or n is None:
            continue
        if r == 0:
            excluded += 1
            continue
        ratios.append((n - r) / r)
    if excluded:
        warnings.warn(f"{excluded} day(s) with zero retrained accuracy excluded from the drop", stacklevel=2)
    if not ratios:
        return Drop(math.nan, 0, excluded)
    return Drop(100.0 * math.fsum(ratios) / len(ratios), len(ratios), excluded)


def stability_drop(retrain: StabilityRun, noretrain: StabilityRun,
                   metrics=STABILITY_METRICS) -> dict[str, Drop]:
    return {f"{m}@{c}": relative_drop(retrain.series(m, c), noretrain.series(m, c)) for m, c in metrics}
