"""Experiment configuration files (YAML).

Every key and its default is documented in the README ("Configuration
file"); the dataclass defaults below mirror that table.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml

from ..algorithms import ALGORITHMS
from ..corpus import ColumnSpec
from ..preprocess import SplitSpec
from ..tuning import DEFAULT_SPACES, Choice, IntRange, LogUniform, ParamSpace

STAGES = ("evaluate", "tune", "stability", "bench")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    params: dict = field(default_factory=dict)
    label: str = ""
    tune: bool = True
    space: dict | None = None

    @property
    def key(self) -> str:
        return self.label or self.name

    def param_space(self) -> ParamSpace:
        if self.space is None:
            return DEFAULT_SPACES[self.name]
        return parse_space(self.space)


@dataclass(frozen=True)
class DatasetSpec:
    name: str = "dataset"
    path: str | None = None
    columns: ColumnSpec = ColumnSpec()
    synthetic: dict | None = None
    synthesize_timestamps_days: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec
    algorithms: tuple[AlgorithmSpec, ...]
    split: SplitSpec = SplitSpec()
    cutoffs: tuple[int, ...] = (5, 10, 20)
    seed: int = 42
    stages: frozenset = frozenset({"evaluate"})
    output_dir: str = "results"
    tune_iterations: int = 100
    bench_sample_limit: int = 1000
    bench_warmup: int = 100

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown stages {sorted(unknown)}; choose from {STAGES}")
        if self.dataset.path is None and self.dataset.synthetic is None:
            raise ValueError("dataset needs either 'path' or 'synthetic'")
        if "stability" in self.stages and self.split.test_days < 2:
            raise ValueError("the stability stage needs split.test_days >= 2")
        if any(c < 1 for c in self.cutoffs):
            raise ValueError("cutoffs must be positive")
        keys = [a.key for a in self.algorithms]
        if len(set(keys)) != len(keys):
            raise ValueError("algorithm labels must be unique")

    def with_overrides(self, output_dir=None, seed=None, enable=(), disable=(), only=None):
        stages = set(only) if only is not None else set(self.stages)
        stages |= set(enable)
        stages -= set(disable)
        return replace(self, output_dir=output_dir or self.output_dir,
                       seed=self.seed if seed is None else seed, stages=frozenset(stages))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stages"] = sorted(self.stages)
        d["cutoffs"] = list(self.cutoffs)
        d["algorithms"] = [asdict(a) for a in self.algorithms]
        return d


def _number(v):
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", ".inf"):
        return math.inf
    return v


def parse_space(spec: dict) -> ParamSpace:
    params = {}
    for name, d in spec.items():
        if "choice" in d:
            params[name] = Choice(tuple(_number(v) for v in d["choice"]))
        elif "int" in d:
            lo, hi = d["int"]
            params[name] = IntRange(int(lo), int(hi))
        elif "loguniform" in d:
            lo, hi = d["loguniform"]
            params[name] = LogUniform(float(lo), float(hi), float(d.get("inf_prob", 0.0)))
        else:
            raise ValueError(f"bad search-space entry for {name!r}: {d}")
    return ParamSpace(params)


def config_from_dict(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    raw = dict(raw or {})
    ds = dict(raw.get("dataset") or {})
    cols = dict(ds.get("columns") or {})
    path = ds.get("path")
    if path is not None and base_dir is not None and not Path(path).is_absolute():
        path = str(base_dir / path)
    synth_ts = ds.get("synthesize_timestamps")
    dataset = DatasetSpec(
        name=str(ds.get("name", raw.get("name", "dataset"))),
        path=path,
        columns=ColumnSpec(**cols),
        synthetic=ds.get("synthetic"),
        synthesize_timestamps_days=None if not synth_ts else int(synth_ts["span_days"]),
    )
    algs = []
    for a in raw.get("algorithms") or []:
        a = {"name": a} if isinstance(a, str) else dict(a)
        name = a["name"].lower()
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
        params = {k: _number(v) for k, v in (a.get("params") or {}).items()}
        algs.append(AlgorithmSpec(name, params, str(a.get("label", "")), bool(a.get("tune", True)),
                                  a.get("space")))
    stages = raw.get("stages", {"evaluate": True})
    if isinstance(stages, dict):
        stages = [k for k, v in stages.items() if v]
    tune = raw.get("tune") or {}
    bench = raw.get("bench") or {}
    out = raw.get("output_dir", "results")
    return ExperimentConfig(
        dataset=dataset,
        algorithms=tuple(algs),
        split=SplitSpec(**(raw.get("split") or {})),
        cutoffs=tuple(int(c) for c in raw.get("cutoffs", (5, 10, 20))),
        seed=int(raw.get("seed", 42)),
        stages=frozenset(stages),
        output_dir=out,
        tune_iterations=int(tune.get("n_iter", 100)),
        bench_sample_limit=int(bench.get("sample_limit", 1000)),
        bench_warmup=int(bench.get("warmup", 100)),
    )


def load_config(path) -> ExperimentConfig:
    """Read a YAML experiment file.

    A relative dataset path resolves against the file's directory; a relative
    ``output_dir`` resolves against the working directory.
    """
    path = Path(path)
    with path.open() as fh:
        raw = yaml.safe_load(fh)
    return config_from_dict(raw, path.parent)
