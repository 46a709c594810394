"""Seeded synthetic session corpora with planted next-item rules."""

from __future__ import annotations

import csv

import numpy as np

from ..corpus import SECONDS_PER_DAY, Session, SessionSet


def planted_rules(n_items: int, seed: int) -> np.ndarray:
    """Successor of every item: one random cycle through all items (no fixed points)."""
    rng = np.random.default_rng([seed, 1])
    order = rng.permutation(n_items)
    succ = np.empty(n_items, dtype=np.int64)
    succ[order] = np.roll(order, -1)
    return succ


def item_popularity(n_items: int, seed: int, exponent: float = 1.0) -> np.ndarray:
    """Zipf-like sampling probabilities over a random item ranking."""
    rng = np.random.default_rng([seed, 2])
    weights = 1.0 / np.arange(1, n_items + 1) ** exponent
    probs = np.empty(n_items)
    probs[rng.permutation(n_items)] = weights / weights.sum()
    return probs


def generate_synthetic_corpus(n_items: int = 1000, n_sessions: int = 5000, span_days: int = 30,
                              rule_strength: float = 0.0, seed: int = 0, mean_length: float = 5.0,
                              max_length: int = 10, popularity_exponent: float = 1.0,
                              step_seconds: int = 60) -> SessionSet:
    """Sessions whose first item follows item popularity; each later item is the
    planted successor of the previous one with probability ``rule_strength``
    and an independent popularity draw otherwise.

    Lengths are ``2 + Poisson(mean_length - 2)`` capped at ``max_length``;
    session starts are uniform over ``span_days``.
    """
    if min(n_items, n_sessions, span_days) < 1:
        raise ValueError("n_items, n_sessions and span_days must be >= 1")
    if not 0.0 <= rule_strength <= 1.0:
        raise ValueError("rule_strength must lie in [0, 1]")
    if max_length < 2 or mean_length < 2:
        raise ValueError("sessions need at least two events")
    succ = planted_rules(n_items, seed)
    probs = item_popularity(n_items, seed, popularity_exponent)
    rng = np.random.default_rng([seed, 3])

    lengths = np.minimum(2 + rng.poisson(mean_length - 2.0, n_sessions), max_length)
    mat = np.zeros((n_sessions, max_length), dtype=np.int64)
    mat[:, 0] = rng.choice(n_items, size=n_sessions, p=probs)
    for t in range(1, max_length):
        active = np.flatnonzero(lengths > t)
        if not len(active):
            break
        prev = mat[active, t - 1]
        follow = rng.random(len(active)) < rule_strength
        drawn = rng.choice(n_items, size=len(active), p=probs)
        mat[active, t] = np.where(follow, succ[prev], drawn)

    horizon = span_days * SECONDS_PER_DAY - max_length * step_seconds
    starts = rng.integers(0, max(horizon, 1), size=n_sessions)
    sessions = []
    for sid, (row, n, t0) in enumerate(zip(mat.tolist(), lengths.tolist(), starts.tolist())):
        sessions.append(Session(sid, tuple(row[:n]), tuple(range(t0, t0 + n * step_seconds, step_seconds))))
    return SessionSet(sessions)


def write_event_log(data: SessionSet, path, header=("SessionId", "ItemId", "Time"), delimiter=",") -> None:
    """Write sessions as a delimiter-separated event log, one event per row."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        for s in data:
            for it, t in zip(s.items, s.times):
                w.writerow((s.session_id, it, t))
