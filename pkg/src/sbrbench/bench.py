"""Training time and per-prediction latency."""

from __future__ import annotations

import os
import platform
import time
from dataclasses import dataclass

import numpy as np

from .algorithms import make_model
from .corpus import SessionSet
from .errors import EmptyDatasetError
from .evaluation import enumerate_events

WARMUP_PREDICTIONS = 100


def hardware_descriptor() -> str:
    cpu = platform.processor() or platform.machine()
    return f"{platform.system()} {cpu} ({os.cpu_count()} cpus), Python {platform.python_version()}"


@dataclass
class TimingReport:
    train_seconds: float | None = None
    predict_ms_mean: float | None = None
    predict_ms_median: float | None = None
    predict_ms_p95: float | None = None
    predictions: int = 0
    hardware: str = ""

    @property
    def train_minutes(self):
        return None if self.train_seconds is None else self.train_seconds / 60.0

    def merge(self, other: "TimingReport") -> "TimingReport":
        out = TimingReport(**vars(self))
        for k, v in vars(other).items():
            if v not in (None, 0, ""):
                setattr(out, k, v)
        return out


def time_training(algorithm: str, config: dict | None, train: SessionSet):
    """Fit once under a monotonic clock; returns ``(TimingReport, model)``."""
    model = make_model(algorithm, config)
    t0 = time.perf_counter()
    model.fit(train)
    elapsed = time.perf_counter() - t0
    return TimingReport(train_seconds=elapsed, hardware=hardware_descriptor()), model


def time_prediction(model, test: SessionSet, sample_limit: int = 1000, k: int = 20,
                    warmup: int = WARMUP_PREDICTIONS, events=None) -> TimingReport:
    """Latency of single ``predict`` calls in milliseconds.

    ``warmup`` unmeasured calls on the first events precede the measured
    ones; measured calls start after them and wrap around when the test set
    is small, so exactly ``min(sample_limit, #events)`` calls are timed.
    """
    if events is None:
        events = enumerate_events(test)
    if not events:
        raise EmptyDatasetError("no prediction events to time")
    n = len(events)
    for ev in events[:min(warmup, n)]:
        model.predict(ev.prefix, k)
    count = min(sample_limit, n)
    start = warmup % n
    lat = np.empty(count)
    clock = time.perf_counter
    for j in range(count):
        ev = events[(start + j) % n]
        t0 = clock()
        model.predict(ev.prefix, k)
        lat[j] = clock() - t0
    lat *= 1000.0
    return TimingReport(
        predict_ms_mean=float(lat.mean()),
        predict_ms_median=float(np.median(lat)),
        predict_ms_p95=float(np.percentile(lat, 95)),
        predictions=count,
        hardware=hardware_descriptor(),
    )
