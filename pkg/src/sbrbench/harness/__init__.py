"""Experiment configuration, orchestration, synthetic data and the CLI."""

from .config import AlgorithmSpec, DatasetSpec, ExperimentConfig, config_from_dict, load_config
from .runner import FORMULA_DECISIONS, formula_fingerprint, load_dataset, run_experiment
from .synthetic import generate_synthetic_corpus, planted_rules, write_event_log

__all__ = [
    "AlgorithmSpec", "DatasetSpec", "ExperimentConfig", "FORMULA_DECISIONS", "config_from_dict",
    "formula_fingerprint", "generate_synthetic_corpus", "load_config", "load_dataset", "planted_rules",
    "run_experiment", "write_event_log",
]
