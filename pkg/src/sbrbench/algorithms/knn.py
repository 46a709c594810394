"""Session-based nearest neighbours: SKNN, V-SKNN, STAN and VSTAN.

All four variants run through one scoring routine driven by a
:class:`KnnConfig`. Definitions, with ``C`` the distinct prefix items,
``p`` the 1-based position of an item's last occurrence in the prefix,
``L`` the prefix length and ``N`` a neighbour's distinct items:

* prefix weight ``w(p)``: constant 1, linear ``p / L`` or exponential
  ``exp((p - L) / lambda1)``;
* similarity ``sum(w(p_i) for i in C & N) / sqrt(|C| * |N|)`` (cosine) or
  the bare weighted overlap (dot), times ``exp(-age_days / lambda2)``
  where age is measured from the last prefix event to the neighbour's end;
* an item at position ``q`` of a neighbour contributes the neighbour's
  similarity times ``exp(-|q - anchor| / lambda3)``, ``anchor`` being the
  position of the last prefix item in that neighbour (factor 1 when the
  neighbour lacks it);
* the summed score is multiplied by the item's IDF when enabled.

An infinite lambda disables the corresponding decay.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..corpus import SECONDS_PER_DAY, Session, SessionSet
from ..errors import EmptyDatasetError
from .base import SessionRecommender
from .ranking import EMPTY, Recommendation, rank_arrays
from .stats import ItemStats

INF = math.inf
SIMILARITIES = ("cosine", "dot")
WEIGHTING_SCHEMES = ("constant", "linear", "exponential")


@dataclass(frozen=True)
class KnnConfig:
    k_neighbors: int = 100
    sample_size: float = 1000
    similarity: str = "cosine"
    weighting_scheme: str = "constant"
    lambda1: float = INF
    lambda2: float = INF
    lambda3: float = INF
    idf_enabled: bool = False

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not self.sample_size >= 1:
            raise ValueError("sample_size must be >= 1")
        if self.k_neighbors > self.sample_size:
            raise ValueError(f"k_neighbors={self.k_neighbors} exceeds sample_size={self.sample_size}")
        if self.similarity not in SIMILARITIES:
            raise ValueError(f"similarity must be one of {SIMILARITIES}")
        if self.weighting_scheme not in WEIGHTING_SCHEMES:
            raise ValueError(f"weighting_scheme must be one of {WEIGHTING_SCHEMES}")
        for name in ("lambda1", "lambda2", "lambda3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0 (inf disables the decay)")

    def as_dict(self) -> dict:
        return asdict(self)


class NeighborIndex:
    """Inverted item -> training-session index plus per-session position tables.

    Training sessions are addressed by their rank in the SessionSet order
    (end time, then session id), so every posting list is sorted from the
    oldest to the most recent session.
    """

    def __init__(self, train: SessionSet, sample_size: float = 1000):
        if not len(train):
            raise EmptyDatasetError("cannot index an empty training set")
        self.sessions = train.sessions
        self.sample_size = sample_size
        self.items = np.array(sorted(train.vocabulary), dtype=np.int64)
        enc = {it: i for i, it in enumerate(self.items.tolist())}
        self._enc = enc
        n_items = len(self.items)

        distinct, last_pos, sizes = [], [], []
        for s in self.sessions:
            last = {}
            for p, it in enumerate(s.items, 1):
                last[it] = p
            distinct.extend(enc[it] for it in last)
            last_pos.extend(last.values())
            sizes.append(len(last))
        self.session_items = np.array(distinct, dtype=np.int64)
        self.session_pos = np.array(last_pos, dtype=np.int64)
        self.session_size = np.array(sizes, dtype=np.int64)
        self.session_ptr = np.concatenate([[0], np.cumsum(self.session_size)])
        self.end_times = np.array([s.end_time for s in self.sessions], dtype=np.float64)
        self.session_ids = np.array([s.session_id for s in self.sessions], dtype=np.int64)

        owner = np.repeat(np.arange(len(self.sessions)), self.session_size)
        order = np.argsort(self.session_items, kind="stable")
        self.postings = owner[order]
        df = np.bincount(self.session_items, minlength=n_items)
        self.item_ptr = np.concatenate([[0], np.cumsum(df)])

        occurrences = np.fromiter((enc[it] for s in self.sessions for it in s.items), np.int64)
        self.stats = ItemStats(self.items, np.bincount(occurrences, minlength=n_items), df, len(self.sessions))

    @property
    def n_postings(self) -> int:
        return len(self.postings)

    def encode(self, item):
        return self._enc.get(item)

    def sessions_with(self, item) -> np.ndarray:
        """Session ranks containing ``item``, oldest first."""
        i = self._enc.get(item)
        if i is None:
            return np.empty(0, np.int64)
        return self.postings[self.item_ptr[i]:self.item_ptr[i + 1]]


def build_neighbor_index(train: SessionSet, sample_size: float = 1000) -> NeighborIndex:
    return NeighborIndex(train, sample_size)


def prefix_weights(items, scheme: str, lambda1: float = INF):
    """Distinct prefix items (first-seen order) and their weights."""
    last = {}
    for p, it in enumerate(items, 1):
        last[it] = p
    pos = np.fromiter(last.values(), np.float64, len(last))
    length = len(items)
    if scheme == "constant":
        w = np.ones(len(pos))
    elif scheme == "linear":
        w = pos / length
    elif scheme == "exponential":
        w = np.exp((pos - length) / lambda1)
    else:
        raise ValueError(f"unknown weighting scheme {scheme!r}")
    return list(last), w


def _neighbors(index: NeighborIndex, prefix: Session, cfg: KnnConfig, now):
    """Ranks and similarities of the selected neighbours, best first."""
    distinct, weights = prefix_weights(prefix.items, cfg.weighting_scheme, cfg.lambda1)
    known = [(index.encode(it), w) for it, w in zip(distinct, weights.tolist())]
    known = [(i, w) for i, w in known if i is not None]
    if not known:
        return np.empty(0, np.int64), np.empty(0)

    m = cfg.sample_size
    lists = [index.postings[index.item_ptr[i]:index.item_ptr[i + 1]] for i, _ in known]
    if math.isfinite(m):
        m = int(m)
        cand = np.unique(np.concatenate([p[-m:] for p in lists]))[-m:]
    else:
        cand = np.unique(np.concatenate(lists))

    overlap = np.zeros(len(cand))
    lo = cand[0]
    for post, (_, w) in zip(lists, known):
        post = post[np.searchsorted(post, lo):]
        at = np.searchsorted(cand, post)
        hit = at < len(cand)
        at, post = at[hit], post[hit]
        at = at[cand[at] == post]
        overlap[at] += w

    if cfg.similarity == "cosine":
        sim = overlap / np.sqrt(len(distinct) * index.session_size[cand])
    else:
        sim = overlap
    if math.isfinite(cfg.lambda2):
        age = np.maximum(0.0, now - index.end_times[cand]) / SECONDS_PER_DAY
        sim = sim * np.exp(-age / cfg.lambda2)

    keep = sim > 0
    cand, sim = cand[keep], sim[keep]
    order = np.lexsort((index.session_ids[cand], -index.end_times[cand], -sim))[:cfg.k_neighbors]
    return cand[order], sim[order]


def find_neighbors(index: NeighborIndex, prefix: Session, cfg: KnnConfig, now=None):
    """The ``k_neighbors`` most similar sampled training sessions.

    Returns ``(session, similarity)`` pairs ordered by similarity, then by
    more recent end time, then by ascending session id.
    """
    if not len(prefix):
        raise ValueError("prefix must be non-empty")
    if now is None:
        now = prefix.times[-1]
    ranks, sims = _neighbors(index, prefix, cfg, now)
    return [(index.sessions[r], s) for r, s in zip(ranks.tolist(), sims.tolist())]


def score_items(index: NeighborIndex, prefix: Session, cfg: KnnConfig, now=None):
    """Item scores as parallel arrays (items ascending)."""
    if not len(prefix):
        raise ValueError("prefix must be non-empty")
    if now is None:
        now = prefix.times[-1]
    ranks, sims = _neighbors(index, prefix, cfg, now)
    if not len(ranks):
        return np.empty(0, np.int64), np.empty(0)

    sizes = index.session_size[ranks]
    owner = np.repeat(np.arange(len(ranks)), sizes)
    starts = index.session_ptr[ranks]
    flat = np.arange(len(owner)) - np.repeat(np.cumsum(sizes) - sizes, sizes) + np.repeat(starts, sizes)
    items = index.session_items[flat]
    contrib = sims[owner]

    if math.isfinite(cfg.lambda3):
        anchor = index.encode(prefix.items[-1])
        pos = index.session_pos[flat]
        anchor_pos = np.zeros(len(ranks), np.int64)
        if anchor is not None:
            here = items == anchor
            anchor_pos[owner[here]] = pos[here]
        ap = anchor_pos[owner]
        factor = np.where(ap > 0, np.exp(-np.abs(pos - ap) / cfg.lambda3), 1.0)
        contrib = contrib * factor

    scores = np.bincount(items, weights=contrib, minlength=len(index.items))
    touched = np.unique(items)
    out = scores[touched]
    if cfg.idf_enabled:
        out = out * index.stats.idf[touched]
    return index.items[touched], out


def score_table(index, prefix, cfg, now=None) -> dict[int, float]:
    items, scores = score_items(index, prefix, cfg, now)
    return dict(zip(items.tolist(), scores.tolist()))


def sknn_config(cfg: KnnConfig) -> KnnConfig:
    return replace(cfg, weighting_scheme="constant", lambda1=INF, lambda2=INF, lambda3=INF, idf_enabled=False)


def vsknn_config(cfg: KnnConfig) -> KnnConfig:
    return replace(cfg, lambda2=INF, lambda3=INF)


def stan_config(cfg: KnnConfig) -> KnnConfig:
    return replace(cfg, weighting_scheme="exponential", idf_enabled=False)


def vstan_config(cfg: KnnConfig) -> KnnConfig:
    return cfg


def _predict(index, prefix, cfg, k, now, allowed=None) -> Recommendation:
    items, scores = score_items(index, prefix, cfg, now)
    if not len(items):
        return EMPTY
    return rank_arrays(items, scores, k, allowed)


def predict_sknn(index, prefix, cfg, k, allowed=None) -> Recommendation:
    """Sum of binary similarities of the neighbours containing each item."""
    return _predict(index, prefix, sknn_config(cfg), k, None, allowed)


def predict_vsknn(index, prefix, cfg, k, allowed=None) -> Recommendation:
    """Position-weighted similarity, optional IDF."""
    return _predict(index, prefix, vsknn_config(cfg), k, None, allowed)


def predict_stan(index, prefix, cfg, k, now=None, allowed=None) -> Recommendation:
    """Exponential prefix weights, session recency and neighbour-position decay."""
    return _predict(index, prefix, stan_config(cfg), k, now, allowed)


def predict_vstan(index, prefix, cfg, k, now=None, allowed=None) -> Recommendation:
    """STAN's three decays with a selectable prefix weighting and optional IDF."""
    return _predict(index, prefix, vstan_config(cfg), k, now, allowed)


class _KnnModel(SessionRecommender):
    _params: tuple[str, ...] = ()
    _effective = staticmethod(vstan_config)

    def __init__(self, **params):
        unknown = set(params) - set(self._params)
        if unknown:
            raise TypeError(f"{type(self).__name__} got unexpected parameters {sorted(unknown)}")
        base = {k: v for k, v in params.items()}
        self.config = self._effective(KnnConfig(**base))
        self._given = {k: getattr(self.config, k) for k in self._params}

    def get_params(self):
        return dict(self._given)

    def fit(self, train):
        self.index_ = build_neighbor_index(train, self.config.sample_size)
        return self

    def score_table(self, prefix):
        return score_table(self.index_, prefix, self.config)

    def predict(self, prefix, k=20, allowed=None):
        return _predict(self.index_, prefix, self.config, k, None, allowed)


class SKNN(_KnnModel):
    name = "sknn"
    _params = ("k_neighbors", "sample_size", "similarity")
    _effective = staticmethod(sknn_config)


class VSKNN(_KnnModel):
    name = "vsknn"
    _params = ("k_neighbors", "sample_size", "similarity", "weighting_scheme", "idf_enabled")
    _effective = staticmethod(vsknn_config)

    def __init__(self, weighting_scheme="linear", idf_enabled=True, **params):
        super().__init__(weighting_scheme=weighting_scheme, idf_enabled=idf_enabled, **params)


class STAN(_KnnModel):
    name = "stan"
    _params = ("k_neighbors", "sample_size", "similarity", "lambda1", "lambda2", "lambda3")
    _effective = staticmethod(stan_config)

    def __init__(self, lambda1=2.0, lambda2=5.0, lambda3=2.0, **params):
        super().__init__(lambda1=lambda1, lambda2=lambda2, lambda3=lambda3, **params)


class VSTAN(_KnnModel):
    name = "vstan"
    _params = ("k_neighbors", "sample_size", "similarity", "weighting_scheme",
               "lambda1", "lambda2", "lambda3", "idf_enabled")

    def __init__(self, weighting_scheme="exponential", idf_enabled=True,
                 lambda1=2.0, lambda2=5.0, lambda3=2.0, **params):
        super().__init__(weighting_scheme=weighting_scheme, idf_enabled=idf_enabled,
                         lambda1=lambda1, lambda2=lambda2, lambda3=lambda3, **params)
