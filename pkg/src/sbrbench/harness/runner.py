"""End-to-end experiment orchestration and result files.

Output directory layout::

    summary.csv          slice-averaged metrics, one row per (algorithm, cutoff)
    detail.csv           per-slice metrics, one row per (slice, algorithm, cutoff)
    trials_<alg>.csv     tuning trial log (tune stage)
    stability.csv        per-day HR@20 / MRR@20 for both modes (stability stage)
    stability_drop.csv   relative drop per slice and metric (stability stage)
    timing.csv           wall-clock measurements (bench and tune stages)
    metadata.json        configuration echo, formula decisions and fingerprint
    item_map.csv, session_map.csv   original -> dense identifiers (file datasets)

Everything except ``timing.csv`` is a deterministic function of the
configuration and seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import zlib
from pathlib import Path

from .. import __version__
from ..algorithms import make_model
from ..algorithms.stats import compute_item_stats
from ..bench import time_prediction, time_training
from ..corpus import SessionSet, encode_ids, load_event_log, sessionize
from ..errors import SbrError, StageError
from ..evaluation import ALL_METRICS, enumerate_events, evaluate
from ..preprocess import (
    filter_dataset, make_slices, restrict_test_to_known_items, split_slice, synthesize_timestamps,
)
from ..stability import run_stability, split_days, stability_drop
from ..tuning import make_validation_split, random_search, format_params, trial_rows
from .config import ExperimentConfig
from .synthetic import generate_synthetic_corpus

log = logging.getLogger(__name__)

FORMULA_DECISIONS = {
    "ar": "symmetric count of co-occurring position pairs of distinct items",
    "sr": "forward position pairs, weight 1/d (decay=div) or 1 if d<=steps (decay=step)",
    "prefix_weights": "constant 1 | linear p/L | exponential exp((p-L)/lambda1); p = last occurrence, 1-based",
    "similarity": "sum of prefix weights over shared items / sqrt(|C|*|N|) (cosine) or unnormalised (dot)",
    "recency": "similarity * exp(-max(0, now - neighbour end)/86400/lambda2); now = last prefix event",
    "neighbour_position": "contribution * exp(-|q - anchor|/lambda3); 1 if neighbour lacks the last prefix item",
    "idf": "score * ln(n_train_sessions / sessions containing item)",
    "sampling": "m most recent candidate sessions by (end time, session id)",
    "neighbour_ties": "similarity desc, end time desc, session id asc",
    "item_ties": "score desc, item id asc; non-positive scores dropped; prefix items not excluded",
    "metrics": "relevance = distinct remaining items; P@k / k; AP / min(k, |remaining|); POP over list slots",
    "filtering": "global before slicing; item support by event count, then session length",
    "slices": "equal calendar windows, session assigned by end time",
    "stability_drop": "mean over days of (noretrain - retrain)/retrain, percent",
    "latency": "first 100 predictions unmeasured; single-threaded",
}


def formula_fingerprint() -> str:
    blob = json.dumps(FORMULA_DECISIONS, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r.get(h)) for h in header])


METRIC_COLUMNS = [f"{m}" for m in ALL_METRICS]
DETAIL_HEADER = ["dataset", "slice", "algorithm", "params", "cutoff", *METRIC_COLUMNS, "events",
                 "code_version", "fingerprint"]
SUMMARY_HEADER = ["dataset", "algorithm", "params", "cutoff", *METRIC_COLUMNS, "slices",
                  "code_version", "fingerprint"]
TIMING_HEADER = ["dataset", "slice", "algorithm", "stage", "trial", "seconds", "train_minutes",
                 "predict_ms_mean", "predict_ms_median", "predict_ms_p95", "predictions", "hardware"]
STABILITY_HEADER = ["dataset", "slice", "algorithm", "mode", "day", "train_events", "hr@20", "mrr@20"]
DROP_HEADER = ["dataset", "slice", "algorithm", "metric", "drop_percent", "days_used", "days_excluded"]


def load_dataset(config: ExperimentConfig, out: Path | None = None) -> SessionSet:
    ds = config.dataset
    if ds.synthetic is not None:
        params = dict(ds.synthetic)
        params.setdefault("seed", config.seed)
        return generate_synthetic_corpus(**params)
    events = load_event_log(ds.path, ds.columns)
    events, smap, imap = encode_ids(events)
    if out is not None:
        imap.write(out / "item_map.csv", "item")
        smap.write(out / "session_map.csv", "session")
    return sessionize(events)


def _alg_seed(seed: int, key: str) -> int:
    return (seed * 1_000_003 + zlib.crc32(key.encode())) % 2**32


class _Results:
    def __init__(self):
        self.detail, self.timing, self.stability, self.drops = [], [], [], []
        self.trials: dict[str, list] = {}
        self.params: dict[str, dict] = {}
        self.slices: list[dict] = []
        self.stage = "load"


def _summarize(config: ExperimentConfig, res: _Results) -> list[dict]:
    rows = []
    code = {"code_version": __version__, "fingerprint": formula_fingerprint()}
    for alg in config.algorithms:
        for c in sorted(set(config.cutoffs)):
            per = [r for r in res.detail if r["algorithm"] == alg.key and r["cutoff"] == c]
            if not per:
                continue
            row = {"dataset": config.dataset.name, "algorithm": alg.key, "params": per[0]["params"],
                   "cutoff": c, "slices": len(per), **code}
            for m in METRIC_COLUMNS:
                row[m] = math.fsum(r[m] for r in per) / len(per)
            rows.append(row)
    return rows


def _metadata(config: ExperimentConfig, res: _Results, data_stats: dict) -> dict:
    cfg = config.to_dict()
    cfg.pop("output_dir", None)
    return {
        "code_version": __version__,
        "fingerprint": formula_fingerprint(),
        "formula_decisions": FORMULA_DECISIONS,
        "config": cfg,
        "dataset_stats": data_stats,
        "slices": res.slices,
        "selected_params": {k: format_params(v) for k, v in res.params.items()},
        "search_spaces": {a.key: a.param_space().describe() for a in config.algorithms
                          if "tune" in config.stages and a.tune},
    }


def _flush(config: ExperimentConfig, out: Path, res: _Results, data_stats: dict) -> None:
    stages = config.stages
    if "evaluate" in stages:
        _write_csv(out / "detail.csv", DETAIL_HEADER, res.detail)
        _write_csv(out / "summary.csv", SUMMARY_HEADER, _summarize(config, res))
    for key, trials in res.trials.items():
        _write_csv(out / f"trials_{key}.csv", ["trial", "params", "mrr@20", "error"], trial_rows(trials))
    if "stability" in stages:
        _write_csv(out / "stability.csv", STABILITY_HEADER, res.stability)
        _write_csv(out / "stability_drop.csv", DROP_HEADER, res.drops)
    if res.timing:
        _write_csv(out / "timing.csv", TIMING_HEADER, res.timing)
    with (out / "metadata.json").open("w") as fh:
        json.dump(_metadata(config, res, data_stats), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def run_experiment(config: ExperimentConfig) -> Path:
    """Run every enabled stage on every slice and write the result files.

    Stage failures raise :class:`StageError`; results gathered up to that
    point are still written.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = _Results()
    data_stats: dict = {}
    try:
        data = load_dataset(config, out)
        res.stage = "preprocess"
        if config.dataset.synthesize_timestamps_days:
            data = synthesize_timestamps(data, config.seed, config.dataset.synthesize_timestamps_days, config.split)
        data_stats["raw"] = data.stats()
        data = filter_dataset(data, config.split)
        data_stats["filtered"] = data.stats()
        slices = make_slices(data, config.split)
        for si, sl in enumerate(slices):
            res.stage = f"slice{si}/preprocess"
            split = restrict_test_to_known_items(split_slice(sl, config.split), config.split.min_session_length)
            res.slices.append({"slice": si, "train": split.train.stats(), "test": split.test.stats(),
                               "boundary_time": split.boundary_time})
            if si == 0 and "tune" in config.stages:
                res.stage = "slice0/tune"
                _tune(config, split.train, res)
            _run_slice(config, si, split, res)
    except SbrError as exc:
        _flush(config, out, res, data_stats)
        if isinstance(exc, StageError):
            raise
        raise StageError(res.stage, str(exc)) from exc
    except Exception as exc:
        _flush(config, out, res, data_stats)
        raise StageError(res.stage, f"{type(exc).__name__}: {exc}") from exc
    _flush(config, out, res, data_stats)
    return out


def _tune(config: ExperimentConfig, train: SessionSet, res: _Results) -> None:
    val = make_validation_split(train, config.split.test_days, config.split.min_session_length)
    for alg in config.algorithms:
        if not alg.tune:
            continue
        log.info("tuning %s (%d iterations)", alg.key, config.tune_iterations)
        best, trials = random_search(alg.name, alg.param_space(), config.tune_iterations,
                                     _alg_seed(config.seed, alg.key), val.train, val.test, fixed=alg.params)
        res.params[alg.key] = best
        res.trials[alg.key] = trials
        for t in trials:
            res.timing.append({"dataset": config.dataset.name, "slice": 0, "algorithm": alg.key,
                               "stage": "tune", "trial": t.index, "seconds": t.seconds})


def _run_slice(config: ExperimentConfig, si: int, split, res: _Results) -> None:
    name = config.dataset.name
    stats = compute_item_stats(split.train)
    events = enumerate_events(split.test)
    for alg in config.algorithms:
        params = res.params.get(alg.key, dict(alg.params))
        shown = format_params(params)
        if "evaluate" in config.stages:
            res.stage = f"slice{si}/evaluate/{alg.key}"
            log.info("slice %d: evaluating %s", si, alg.key)
            model = make_model(alg.name, params).fit(split.train)
            report = evaluate(model, split.test, config.cutoffs, split.train.vocabulary, stats, events=events)
            for c, vals in report.rows():
                res.detail.append({"dataset": name, "slice": si, "algorithm": alg.key, "params": shown,
                                   "cutoff": c, **vals, "events": report.n_events,
                                   "code_version": __version__, "fingerprint": formula_fingerprint()})
        if "bench" in config.stages:
            res.stage = f"slice{si}/bench/{alg.key}"
            fit_t, model = time_training(alg.name, params, split.train)
            pred_t = time_prediction(model, split.test, config.bench_sample_limit,
                                     max(config.cutoffs), config.bench_warmup, events=events)
            t = fit_t.merge(pred_t)
            res.timing.append({"dataset": name, "slice": si, "algorithm": alg.key, "stage": "bench",
                               "seconds": t.train_seconds, "train_minutes": t.train_minutes,
                               "predict_ms_mean": t.predict_ms_mean, "predict_ms_median": t.predict_ms_median,
                               "predict_ms_p95": t.predict_ms_p95, "predictions": t.predictions,
                               "hardware": t.hardware})
        if "stability" in config.stages:
            res.stage = f"slice{si}/stability/{alg.key}"
            days = split_days(split.test)
            runs = {mode: run_stability(alg.name, params, split.train, days, mode)
                    for mode in ("retraining", "no_retraining")}
            for mode, run in runs.items():
                hr, mrr = run.series("hr"), run.series("mrr")
                for d in range(len(days)):
                    res.stability.append({"dataset": name, "slice": si, "algorithm": alg.key, "mode": mode,
                                          "day": d + 1, "train_events": run.train_sizes[d],
                                          "hr@20": hr[d], "mrr@20": mrr[d]})
            for metric, drop in stability_drop(runs["retraining"], runs["no_retraining"]).items():
                res.drops.append({"dataset": name, "slice": si, "algorithm": alg.key, "metric": metric,
                                  "drop_percent": drop.percent, "days_used": drop.days_used,
                                  "days_excluded": drop.days_excluded})
