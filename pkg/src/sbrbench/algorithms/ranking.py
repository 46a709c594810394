"""Shared top-k ranking with deterministic tie-breaking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class Recommendation:
    """Ranked, duplicate-free items with their scores (score desc, item asc)."""

    items: tuple[int, ...] = ()
    scores: tuple[float, ...] = ()

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(zip(self.items, self.scores))

    def top(self, k: int) -> "Recommendation":
        return Recommendation(self.items[:k], self.scores[:k])


EMPTY = Recommendation()


def rank_arrays(items: np.ndarray, scores: np.ndarray, k: int, allowed=None) -> Recommendation:
    """Rank parallel item/score arrays; non-positive scores are dropped."""
    mask = scores > 0
    if allowed is not None:
        mask &= np.fromiter((i in allowed for i in items.tolist()), bool, len(items))
    items, scores = items[mask], scores[mask]
    if not len(items):
        return EMPTY
    if len(items) > 4 * k:
        # only the k-th score and anything tied with it can reach the list
        kth = np.partition(scores, len(scores) - k)[len(scores) - k]
        keep = scores >= kth
        items, scores = items[keep], scores[keep]
    order = np.lexsort((items, -scores))[:k]
    return Recommendation(tuple(items[order].tolist()), tuple(scores[order].tolist()))


def rank_topk(scores: Mapping[int, float], k: int, allowed=None) -> Recommendation:
    """Top ``k`` items with positive score, by score descending then item ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not scores:
        return EMPTY
    items = np.fromiter(scores.keys(), np.int64, len(scores))
    values = np.fromiter(scores.values(), np.float64, len(scores))
    return rank_arrays(items, values, k, allowed)
