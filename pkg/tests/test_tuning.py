import itertools
import math

import numpy as np
import pytest

from sbrbench.algorithms import make_model
from sbrbench.corpus import SECONDS_PER_DAY, Session, SessionSet
from sbrbench.errors import SearchError
from sbrbench.evaluation import evaluate
from sbrbench.harness.synthetic import generate_synthetic_corpus
from sbrbench.tuning import (
    DEFAULT_SPACES, Choice, IntRange, LogUniform, ParamSpace, format_params, make_validation_split,
    random_search,
)

DAY = SECONDS_PER_DAY


def daily_sessions(days, per_day=3):
    out, sid = [], 0
    for d in days:
        for n in range(per_day):
            t = d * DAY + 3600 * (n + 1)
            out.append(Session(sid, (n % 4, (n + 1) % 4, (n + 2) % 4), (t, t + 1, t + 2)))
            sid += 1
    return SessionSet(out)


@pytest.fixture(scope="module")
def planted():
    data = generate_synthetic_corpus(n_items=60, n_sessions=600, span_days=10, rule_strength=0.9, seed=5)
    split = make_validation_split(data, test_days=2)
    return split.train, split.test


def test_validation_split_takes_last_days():
    train = daily_sessions(range(1, 9))
    split = make_validation_split(train, test_days=2)
    assert sorted({s.end_time // DAY for s in split.train}) == [1, 2, 3, 4, 5, 6]
    assert sorted({s.end_time // DAY for s in split.test}) == [7, 8]


def test_single_iteration_is_best(planted):
    sub, val = planted
    best, trials = random_search("sr", DEFAULT_SPACES["sr"], 1, 0, sub, val)
    assert len(trials) == 1 and best == trials[0].params


def test_same_seed_same_trials(planted):
    sub, val = planted
    space = ParamSpace({"k_neighbors": Choice((5, 20, 50)), "sample_size": Choice((50, 200)),
                        "lambda2": LogUniform(0.1, 100.0, inf_prob=0.2)})
    r1 = random_search("stan", space, 6, 11, sub, val)
    r2 = random_search("stan", space, 6, 11, sub, val)
    assert r1[0] == r2[0]
    assert [(t.params, t.score) for t in r1[1]] == [(t.params, t.score) for t in r2[1]]


def test_argmax_consistency(planted):
    sub, val = planted
    best, trials = random_search("sr", DEFAULT_SPACES["sr"], 8, 3, sub, val)
    top = max(t.score for t in trials)
    first = next(t for t in trials if t.score == top)
    assert best == first.params
    assert [t.index for t in trials] == list(range(8))


def test_winner_beats_every_config_in_small_space(planted):
    sub, val = planted
    grid = {"k_neighbors": (5, 50), "similarity": ("cosine", "dot")}
    space = ParamSpace({k: Choice(v) for k, v in grid.items()})
    best, trials = random_search("sknn", space, 24, 0, sub, val, fixed={"sample_size": 200})
    seen = {format_params(t.params) for t in trials}
    assert len(seen) == 4  # every grid point was sampled
    winner = max(t.score for t in trials)
    for combo in itertools.product(*grid.values()):
        params = dict(zip(grid, combo), sample_size=200)
        model = make_model("sknn", params).fit(sub)
        assert winner >= evaluate(model, val, (20,), sub.vocabulary)["mrr", 20]


def test_failed_trials_score_zero(planted):
    sub, val = planted
    space = ParamSpace({"decay": Choice(("div", "nonsense"))})
    best, trials = random_search("sr", space, 10, 1, sub, val)
    bad = [t for t in trials if t.error]
    assert bad and all(t.score == 0.0 for t in bad)
    assert best["decay"] == "div"


def test_all_trials_failing_raises(planted):
    sub, val = planted
    with pytest.raises(SearchError):
        random_search("sr", ParamSpace({"decay": Choice(("nonsense",))}), 3, 0, sub, val)


def test_empty_space_runs_once(planted):
    sub, val = planted
    best, trials = random_search("ar", DEFAULT_SPACES["ar"], 50, 0, sub, val)
    assert len(trials) == 1 and best == {}


def test_neighbors_clamped_to_sample_size():
    space = ParamSpace({"k_neighbors": Choice((1000,)), "sample_size": Choice((500,))})
    assert space.sample(np.random.default_rng(0))["k_neighbors"] == 500


def test_distributions():
    rng = np.random.default_rng(0)
    draws = [LogUniform(0.1, 100.0, inf_prob=0.5).sample(rng) for _ in range(400)]
    finite = [d for d in draws if math.isfinite(d)]
    assert 100 < len(finite) < 300
    assert all(0.1 <= d <= 100.0 for d in finite)
    assert {IntRange(1, 3).sample(rng) for _ in range(100)} == {1, 2, 3}


def test_default_spaces_sample_valid_models():
    rng = np.random.default_rng(7)
    for name, space in DEFAULT_SPACES.items():
        for _ in range(5):
            make_model(name, space.sample(rng))
