"""Association rules (AR) and sequential rules (SR).

Both count item pairs inside training sessions. AR counts every position
pair in both directions; SR only counts forward pairs and weights them by
positional distance.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..corpus import Session, SessionSet
from ..errors import EmptyDatasetError
from .base import SessionRecommender
from .ranking import EMPTY, Recommendation, rank_arrays

_MAX_PAIRS_PER_BLOCK = 4_000_000


class RuleTable:
    """Item -> {item: weight} rules stored as rows pre-sorted for ranking."""

    def __init__(self, src, dst, weight, directed: bool):
        keep = weight > 0
        src, dst, weight = src[keep], dst[keep], weight[keep]
        order = np.lexsort((dst, -weight, src))
        self._dst = dst[order]
        self._w = weight[order]
        srcs = src[order]
        self._rows: dict[int, tuple[int, int]] = {}
        if len(srcs):
            starts = np.flatnonzero(np.r_[True, srcs[1:] != srcs[:-1]])
            ends = np.r_[starts[1:], len(srcs)]
            for s, a, b in zip(srcs[starts].tolist(), starts.tolist(), ends.tolist()):
                self._rows[s] = (a, b)
        self.directed = directed

    def __contains__(self, item):
        return item in self._rows

    def __len__(self):
        return len(self._dst)

    def row(self, item: int) -> dict[int, float]:
        if item not in self._rows:
            return {}
        a, b = self._rows[item]
        return dict(zip(self._dst[a:b].tolist(), self._w[a:b].tolist()))

    def weight(self, src: int, dst: int) -> float:
        return self.row(src).get(dst, 0.0)

    def sources(self):
        return self._rows.keys()

    def ranked(self, item: int, k: int, allowed=None) -> Recommendation:
        if item not in self._rows:
            return EMPTY
        a, b = self._rows[item]
        if allowed is None:
            b = min(b, a + k)
            return Recommendation(tuple(self._dst[a:b].tolist()), tuple(self._w[a:b].tolist()))
        return rank_arrays(self._dst[a:b], self._w[a:b], k, allowed)


def _position_pairs(train: SessionSet):
    """Yield (first_item, second_item, distance) arrays over all pairs p < q."""
    by_len = defaultdict(list)
    for s in train:
        if len(s) > 1:
            by_len[len(s)].append(s.items)
    for length in sorted(by_len):
        seqs = by_len[length]
        p, q = np.triu_indices(length, 1)
        per_session = len(p)
        block = max(1, _MAX_PAIRS_PER_BLOCK // per_session)
        for start in range(0, len(seqs), block):
            mat = np.asarray(seqs[start:start + block], dtype=np.int64)
            first = mat[:, p].ravel()
            second = mat[:, q].ravel()
            dist = np.broadcast_to(q - p, (len(mat), per_session)).ravel()
            yield first, second, dist


def _accumulate(src, dst, weight):
    if not len(src):
        empty = np.empty(0, np.int64)
        return empty, empty, np.empty(0)
    items = np.unique(np.concatenate([src, dst]))
    n = len(items)
    key = np.searchsorted(items, src) * n + np.searchsorted(items, dst)
    uniq, inv = np.unique(key, return_inverse=True)
    total = np.bincount(inv, weights=weight)
    return items[uniq // n], items[uniq % n], total


def fit_ar(train: SessionSet) -> RuleTable:
    """Symmetric co-occurrence counts over all position pairs of distinct items."""
    if not len(train):
        raise EmptyDatasetError("cannot fit on an empty training set")
    srcs, dsts = [], []
    for first, second, _ in _position_pairs(train):
        diff = first != second
        srcs += [first[diff], second[diff]]
        dsts += [second[diff], first[diff]]
    if not srcs:
        return RuleTable(*_accumulate(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)), directed=False)
    src, dst = np.concatenate(srcs), np.concatenate(dsts)
    return RuleTable(*_accumulate(src, dst, np.ones(len(src))), directed=False)


def sr_decay(distance: np.ndarray, decay: str = "div", steps: int = 1) -> np.ndarray:
    """Pair weight as a function of positional distance.

    ``div`` is 1/d; ``step`` is 1 for d <= steps and 0 beyond.
    """
    distance = np.asarray(distance, dtype=np.float64)
    if decay == "div":
        return 1.0 / distance
    if decay == "step":
        return (distance <= steps).astype(np.float64)
    raise ValueError(f"unknown SR decay {decay!r}")


def fit_sr(train: SessionSet, decay: str = "div", steps: int = 1) -> RuleTable:
    """Directed rules i -> j for i before j, weighted by distance decay."""
    if not len(train):
        raise EmptyDatasetError("cannot fit on an empty training set")
    srcs, dsts, ws = [], [], []
    for first, second, dist in _position_pairs(train):
        diff = first != second
        srcs.append(first[diff])
        dsts.append(second[diff])
        ws.append(sr_decay(dist[diff], decay, steps))
    if not srcs:
        e = np.empty(0, np.int64)
        return RuleTable(e, e, np.empty(0), directed=True)
    return RuleTable(*_accumulate(np.concatenate(srcs), np.concatenate(dsts), np.concatenate(ws)),
                     directed=True)


def predict_rules(table: RuleTable, prefix: Session, k: int, allowed=None) -> Recommendation:
    """Items most strongly associated with the last prefix item.

    An unknown last item yields an empty recommendation.
    """
    if not len(prefix):
        raise ValueError("prefix must be non-empty")
    return table.ranked(prefix.items[-1], k, allowed)


predict_ar = predict_rules
predict_sr = predict_rules


class AR(SessionRecommender):
    name = "ar"

    def fit(self, train):
        self.table_ = fit_ar(train)
        return self

    def score_table(self, prefix):
        return self.table_.row(prefix.items[-1])

    def predict(self, prefix, k=20, allowed=None):
        return predict_rules(self.table_, prefix, k, allowed)


class SR(SessionRecommender):
    name = "sr"

    def __init__(self, decay: str = "div", steps: int = 1):
        sr_decay(np.ones(1), decay, steps)
        self.decay = decay
        self.steps = steps

    def get_params(self):
        return {"decay": self.decay, "steps": self.steps}

    def fit(self, train):
        self.table_ = fit_sr(train, self.decay, self.steps)
        return self

    def score_table(self, prefix):
        return self.table_.row(prefix.items[-1])

    def predict(self, prefix, k=20, allowed=None):
        return predict_rules(self.table_, prefix, k, allowed)
