"""Random hyperparameter search against a validation split (target MRR@20)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .algorithms import make_model
from .corpus import SessionSet
from .errors import SearchError
from .evaluation import evaluate
from .preprocess import TrainTestSplit, restrict_test_to_known_items, split_last_days

TARGET = ("mrr", 20)


@dataclass(frozen=True)
class Choice:
    values: tuple

    def sample(self, rng):
        return self.values[int(rng.integers(len(self.values)))]


@dataclass(frozen=True)
class IntRange:
    low: int
    high: int  # inclusive

    def sample(self, rng):
        return int(rng.integers(self.low, self.high + 1))


@dataclass(frozen=True)
class LogUniform:
    """Log-uniform real in ``[low, high]``; ``inf_prob`` of returning infinity."""

    low: float
    high: float
    inf_prob: float = 0.0

    def sample(self, rng):
        u = rng.random()
        x = math.exp(rng.uniform(math.log(self.low), math.log(self.high)))
        return math.inf if u < self.inf_prob else x


@dataclass(frozen=True)
class ParamSpace:
    params: dict = field(default_factory=dict)

    def sample(self, rng) -> dict:
        cfg = {name: dist.sample(rng) for name, dist in sorted(self.params.items())}
        if "k_neighbors" in cfg and "sample_size" in cfg:
            cfg["k_neighbors"] = min(cfg["k_neighbors"], cfg["sample_size"])
        return cfg

    def describe(self) -> dict:
        out = {}
        for name, dist in sorted(self.params.items()):
            if isinstance(dist, Choice):
                out[name] = {"choice": list(dist.values)}
            elif isinstance(dist, IntRange):
                out[name] = {"int": [dist.low, dist.high]}
            else:
                out[name] = {"loguniform": [dist.low, dist.high], "inf_prob": dist.inf_prob}
        return out


_NEIGHBORS = Choice((50, 100, 200, 300, 500, 750, 1000, 1500))
_SAMPLE = Choice((500, 1000, 2500, 5000))
_LAMBDA = LogUniform(0.1, 100.0, inf_prob=0.1)

DEFAULT_SPACES = {
    "ar": ParamSpace({}),
    "sr": ParamSpace({"decay": Choice(("div", "step")), "steps": IntRange(1, 5)}),
    "sknn": ParamSpace({"k_neighbors": _NEIGHBORS, "sample_size": _SAMPLE,
                        "similarity": Choice(("cosine", "dot"))}),
    "vsknn": ParamSpace({"k_neighbors": _NEIGHBORS, "sample_size": _SAMPLE,
                         "weighting_scheme": Choice(("constant", "linear")),
                         "idf_enabled": Choice((False, True))}),
    "stan": ParamSpace({"k_neighbors": _NEIGHBORS, "sample_size": _SAMPLE,
                        "lambda1": _LAMBDA, "lambda2": _LAMBDA, "lambda3": _LAMBDA}),
    "vstan": ParamSpace({"k_neighbors": _NEIGHBORS, "sample_size": _SAMPLE,
                         "weighting_scheme": Choice(("constant", "linear", "exponential")),
                         "lambda1": _LAMBDA, "lambda2": _LAMBDA, "lambda3": _LAMBDA,
                         "idf_enabled": Choice((False, True))}),
}


@dataclass(frozen=True)
class Trial:
    index: int
    params: dict
    score: float
    seconds: float
    error: str | None = None


def make_validation_split(train: SessionSet, test_days: int, min_session_length: int = 2) -> TrainTestSplit:
    """Hold out the last ``test_days`` days of the training data."""
    return restrict_test_to_known_items(split_last_days(train, test_days), min_session_length)


def random_search(algorithm: str, space: ParamSpace, n_iter: int, seed: int,
                  subtrain: SessionSet, validation: SessionSet,
                  fixed: dict | None = None) -> tuple[dict, list[Trial]]:
    """Sample ``n_iter`` configurations and keep the one with the best MRR@20.

    A trial that raises scores 0 and the search continues; ties go to the
    earlier trial. An empty space runs a single trial.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    rng = np.random.default_rng(seed)
    if not space.params:
        n_iter = 1
    fixed = dict(fixed or {})
    metric, cutoff = TARGET
    trials: list[Trial] = []
    for idx in range(n_iter):
        params = {**fixed, **space.sample(rng)}
        t0 = time.perf_counter()
        try:
            model = make_model(algorithm, params).fit(subtrain)
            report = evaluate(model, validation, (cutoff,), subtrain.vocabulary)
            score, err = report[metric, cutoff], None
        except Exception as exc:  # noqa: BLE001 - a failed trial is recorded, not fatal
            score, err = 0.0, f"{type(exc).__name__}: {exc}"
        trials.append(Trial(idx, params, score, time.perf_counter() - t0, err))
    if all(t.error is not None for t in trials):
        raise SearchError([(t.index, t.error) for t in trials])
    best = max(trials, key=lambda t: (t.score, -t.index))
    return dict(best.params), trials


def format_params(params: dict) -> str:
    """Compact, key-sorted text form of a parameter dict."""
    parts = []
    for k in sorted(params):
        v = params[k]
        if isinstance(v, float):
            v = "inf" if math.isinf(v) else repr(v)
        parts.append(f"{k}={v}")
    return ";".join(parts)


def trial_rows(trials: Sequence[Trial]) -> list[dict[str, Any]]:
    return [{"trial": t.index, "params": format_params(t.params), "mrr@20": repr(t.score),
             "error": t.error or ""} for t in trials]
