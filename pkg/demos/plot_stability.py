"""
How much does a stale model lose?
=================================

Trains on a month of synthetic clicks, then scores each of the following
five days twice: once with a model refitted on everything seen so far and
once with the original model.
"""

import warnings

from sbrbench.harness.synthetic import generate_synthetic_corpus
from sbrbench.preprocess import split_last_days
from sbrbench.stability import run_stability, split_days, stability_drop

data = generate_synthetic_corpus(n_items=500, n_sessions=6000, span_days=35, rule_strength=0.6, seed=3)
split = split_last_days(data, 5)
days = split_days(split.test)
print("initial training:", split.train.stats(), "| test days:", [len(d) for d in days])

for name in ("sr", "sknn"):
    runs = {mode: run_stability(name, None, split.train, days, mode)
            for mode in ("retraining", "no_retraining")}
    print(f"\n{name}: HR@20 per day")
    for mode, run in runs.items():
        print(f"  {mode:>13}:", " ".join(f"{v:.3f}" for v in run.series("hr")))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        drops = stability_drop(runs["retraining"], runs["no_retraining"])
    print("  relative drop:", {k: round(v.percent, 2) for k, v in drops.items()}, "%")

# the rules here never change, so the stale model loses little; a drifting
# catalogue (see tests/test_stability.py) makes the gap obvious
