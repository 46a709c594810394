from __future__ import annotations

from ..corpus import Session, SessionSet
from .ranking import Recommendation, rank_topk


class SessionRecommender:
    """Common fit/predict surface.

    ``fit`` returns ``self``; after fitting the model is never mutated, so a
    fitted instance can serve concurrent ``predict`` calls.
    """

    name = "base"

    def fit(self, train: SessionSet) -> "SessionRecommender":
        raise NotImplementedError

    def score_table(self, prefix: Session) -> dict[int, float]:
        raise NotImplementedError

    def predict(self, prefix: Session, k: int = 20, allowed=None) -> Recommendation:
        return rank_topk(self.score_table(prefix), k, allowed)

    def get_params(self) -> dict:
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"
