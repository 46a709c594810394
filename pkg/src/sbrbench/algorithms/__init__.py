"""The six non-neural session-based recommenders behind one fit/predict surface."""

from .base import SessionRecommender
from .knn import (
    SKNN, STAN, VSKNN, VSTAN, KnnConfig, NeighborIndex, build_neighbor_index, find_neighbors,
    predict_sknn, predict_stan, predict_vsknn, predict_vstan, score_items, score_table,
)
from .ranking import Recommendation, rank_topk
from .rules import AR, SR, RuleTable, fit_ar, fit_sr, predict_ar, predict_sr
from .stats import ItemStats, compute_item_stats

ALGORITHMS = {cls.name: cls for cls in (AR, SR, SKNN, VSKNN, STAN, VSTAN)}


def make_model(name: str, params: dict | None = None) -> SessionRecommender:
    """Instantiate an algorithm by its short name (``ar``, ``sr``, ``sknn``, ...)."""
    try:
        cls = ALGORITHMS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return cls(**(params or {}))


__all__ = [
    "ALGORITHMS", "AR", "SR", "SKNN", "VSKNN", "STAN", "VSTAN", "ItemStats", "KnnConfig",
    "NeighborIndex", "Recommendation", "RuleTable", "SessionRecommender", "build_neighbor_index",
    "compute_item_stats", "find_neighbors", "fit_ar", "fit_sr", "make_model", "predict_ar",
    "predict_sknn", "predict_sr", "predict_stan", "predict_vsknn", "predict_vstan", "rank_topk",
    "score_items", "score_table",
]
