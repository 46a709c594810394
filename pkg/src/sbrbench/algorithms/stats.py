from __future__ import annotations

import numpy as np

from ..corpus import SessionSet


class ItemStats:
    """Per-item training statistics.

    ``counts`` are event occurrences, ``popularity`` is the min-max
    normalised count (all zeros when every count is equal) and ``idf`` is
    ``ln(n_sessions / sessions containing the item)``.
    """

    def __init__(self, items, counts, session_counts, n_sessions):
        self.items = np.asarray(items, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.session_counts = np.asarray(session_counts, dtype=np.int64)
        self.n_sessions = int(n_sessions)
        if len(self.counts):
            lo, hi = self.counts.min(), self.counts.max()
            span = hi - lo
            self.popularity = (self.counts - lo) / span if span > 0 else np.zeros(len(self.counts))
            self.idf = np.log(self.n_sessions / self.session_counts)
        else:
            self.popularity = np.zeros(0)
            self.idf = np.zeros(0)
        self._index = {it: i for i, it in enumerate(self.items.tolist())}

    @classmethod
    def from_sessions(cls, train: SessionSet) -> "ItemStats":
        counts: dict[int, int] = {}
        docs: dict[int, int] = {}
        for s in train:
            for it in s.items:
                counts[it] = counts.get(it, 0) + 1
            for it in set(s.items):
                docs[it] = docs.get(it, 0) + 1
        items = sorted(counts)
        return cls(items, [counts[i] for i in items], [docs[i] for i in items], len(train))

    def __contains__(self, item):
        return item in self._index

    def __len__(self):
        return len(self.items)

    def popularity_of(self, item) -> float:
        i = self._index.get(item)
        return 0.0 if i is None else float(self.popularity[i])

    def idf_of(self, item) -> float:
        return float(self.idf[self._index[item]])

    def count_of(self, item) -> int:
        i = self._index.get(item)
        return 0 if i is None else int(self.counts[i])


compute_item_stats = ItemStats.from_sessions
